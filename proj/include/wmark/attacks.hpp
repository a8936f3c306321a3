#ifndef WMARK_ATTACKS_HPP
#define WMARK_ATTACKS_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <variant>
#include <vector>

#include "wmark/image.hpp"

namespace wmark::attacks {

struct JpegCompress {
  int quality;  // 1..100, baseline tables
};

struct GaussianNoise {
  double mean = 0.0;      // in [0, 1] pixel units, scaled by 255
  double variance = 0.0;  // in [0, 1]^2 pixel units, scaled by 255^2
  std::uint64_t seed = 0;
};

struct SaltPepper {
  double density = 0.0;  // fraction of pixels forced to 0 or 255
  std::uint64_t seed = 0;
};

struct GaussianFilter {
  int window;    // odd, one of 3, 5, 7, 9
  double sigma;  // > 0
};

struct HistEq {};

struct Composite;

using AttackSpec = std::variant<JpegCompress, GaussianNoise, SaltPepper,
                                GaussianFilter, HistEq, Composite>;

// Attacks applied left to right. Nesting depth is capped at 4.
struct Composite {
  std::vector<AttackSpec> steps;
};

// Applies the attack; the result has the host's dimensions. Identical
// inputs (image, spec, seed) give identical outputs on every platform.
GrayImage apply_attack(const GrayImage& image, const AttackSpec& spec);

// Individual attacks, also reachable through apply_attack.
GrayImage jpeg_compress(const GrayImage& image, int quality);
GrayImage gaussian_noise(const GrayImage& image, double mean, double variance,
                         std::uint64_t seed);
GrayImage salt_pepper(const GrayImage& image, double density,
                      std::uint64_t seed);
GrayImage gaussian_filter(const GrayImage& image, int window, double sigma);
GrayImage hist_eq(const GrayImage& image);

// Text form used by the CLI and bench configs:
//   jpeg:q=75
//   gauss-noise:var=0.001,seed=7      (optional mean=...)
//   sp:d=0.01,seed=7
//   gauss-filter:w=3,sigma=0.5
//   histeq
// Steps joined with '+' form a composite, e.g. "histeq+gauss-noise:var=0.001".
// Throws InvalidSpec on malformed text or out-of-range parameters.
AttackSpec parse_attack(const std::string& text);

// Canonical text for a spec; parse_attack(format_attack(s)) == s.
std::string format_attack(const AttackSpec& spec);

// Seed recorded for reporting: the seed of the first randomized step, or 0.
std::uint64_t attack_seed(const AttackSpec& spec);

}  // namespace wmark::attacks

#endif  // WMARK_ATTACKS_HPP
