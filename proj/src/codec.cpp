#include "wmark/codec.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include "wmark/metrics.hpp"

namespace wmark::codec {

namespace {

void validate_common(const GrayImage& image, const EmbedParams& params) {
  if (image.width() % 8 != 0 || image.height() % 8 != 0)
    throw DimensionNotMultipleOf8(
        "image dimensions must be multiples of 8 for embedding, got " +
        std::to_string(image.width()) + "x" + std::to_string(image.height()));
  if (params.block_offset < 0)
    throw InvalidSpec("block_offset must be non-negative");
}

// Magnitude plane in the layout the blockwise DCT tiles over.
Plane to_layout(const Plane& magnitude, SpectrumLayout layout) {
  return layout == SpectrumLayout::kCentered ? spectral::fftshift(magnitude)
                                             : magnitude;
}

Plane from_layout(const Plane& magnitude, SpectrumLayout layout) {
  return layout == SpectrumLayout::kCentered ? spectral::ifftshift(magnitude)
                                             : magnitude;
}

Eigen::VectorXd masked_coefficients(const Plane& dct_plane,
                                    std::int64_t block_index,
                                    std::int64_t blocks_per_row,
                                    const spectral::MidbandMask& mask) {
  const Eigen::Index base_r = 8 * (block_index / blocks_per_row);
  const Eigen::Index base_c = 8 * (block_index % blocks_per_row);
  Eigen::VectorXd v(mask.length());
  for (int j = 0; j < mask.length(); ++j) {
    const auto& [r, c] = mask.positions()[static_cast<std::size_t>(j)];
    v(j) = dct_plane(base_r + r, base_c + c);
  }
  return v;
}

// Pearson correlation that tolerates a degenerate sample vector: a flat
// tile carries no watermark evidence, so it correlates to zero instead of
// throwing like the strict keying::pearson.
double detection_correlation(const Eigen::VectorXd& sample,
                             const Eigen::VectorXd& carrier) {
  if (sample.maxCoeff() == sample.minCoeff()) return 0.0;
  return keying::pearson(sample, carrier);
}

}  // namespace

std::int64_t capacity(int width, int height) {
  if (width % 8 != 0 || height % 8 != 0)
    throw DimensionNotMultipleOf8(
        "capacity is defined for dimensions that are multiples of 8");
  return (static_cast<std::int64_t>(width) / 8) *
         (static_cast<std::int64_t>(height) / 8);
}

std::vector<std::int64_t> block_assignment(std::int64_t n_blocks,
                                           std::int64_t n_bits,
                                           const keying::SecretKey& key,
                                           const EmbedParams& params) {
  if (params.block_offset + n_bits > n_blocks)
    throw PayloadTooLarge("payload of " + std::to_string(n_bits) +
                          " bits at offset " +
                          std::to_string(params.block_offset) +
                          " exceeds " + std::to_string(n_blocks) + " blocks");
  std::vector<std::int64_t> assignment(static_cast<std::size_t>(n_bits));
  if (params.assignment == Assignment::kRaster) {
    std::iota(assignment.begin(), assignment.end(), params.block_offset);
    return assignment;
  }
  // Permuted mode scatters the payload over every tile past the offset.
  const auto perm =
      keying::keyed_permutation(key, n_blocks - params.block_offset);
  for (std::int64_t i = 0; i < n_bits; ++i)
    assignment[static_cast<std::size_t>(i)] =
        params.block_offset + perm[static_cast<std::size_t>(i)];
  return assignment;
}

void add_carriers(Plane& dct_of_magnitude, const WatermarkBits& payload,
                  const keying::PnPair& pn,
                  const std::vector<std::int64_t>& assignment, double gain,
                  const spectral::MidbandMask& mask) {
  const std::int64_t blocks_per_row = dct_of_magnitude.cols() / 8;
  for (std::int64_t i = 0; i < payload.size(); ++i) {
    const Eigen::VectorXd& seq = payload.bit(i) ? pn.seq1 : pn.seq0;
    const std::int64_t block = assignment[static_cast<std::size_t>(i)];
    const Eigen::Index base_r = 8 * (block / blocks_per_row);
    const Eigen::Index base_c = 8 * (block % blocks_per_row);
    for (int j = 0; j < mask.length(); ++j) {
      const auto& [r, c] = mask.positions()[static_cast<std::size_t>(j)];
      dct_of_magnitude(base_r + r, base_c + c) += gain * seq(j);
    }
  }
}

EmbedOutcome embed(const GrayImage& host, const WatermarkBits& payload,
                   const keying::SecretKey& key, const EmbedParams& params) {
  validate_common(host, params);
  if (!(params.gain > 0.0)) throw InvalidSpec("gain must be positive");
  const std::int64_t n_blocks = capacity(host.width(), host.height());
  const auto assignment =
      block_assignment(n_blocks, payload.size(), key, params);
  const auto pn = keying::derive_pn_pair(key, params.mask.length());

  const Plane plane = to_plane(host);
  const spectral::Spectrum spectrum = spectral::decompose(plane);
  Plane dct_mag =
      spectral::blockwise_dct(to_layout(spectrum.magnitude, params.layout));
  add_carriers(dct_mag, payload, pn, assignment, params.gain, params.mask);
  const Plane magnitude =
      from_layout(spectral::blockwise_idct(dct_mag), params.layout);
  const Plane rebuilt =
      spectral::reconstruct({magnitude, spectrum.phase});
  GrayImage out = from_plane(rebuilt);
  const double psnr_db = metrics::psnr(host, out);
  return EmbedOutcome{std::move(out), psnr_db, payload.size()};
}

WatermarkBits extract(const GrayImage& image, int wm_width, int wm_height,
                      const keying::SecretKey& key,
                      const EmbedParams& params) {
  validate_common(image, params);
  if (wm_width < 1 || wm_height < 1)
    throw InvalidSpec("watermark dimensions must be positive");
  const std::int64_t n_bits =
      static_cast<std::int64_t>(wm_width) * wm_height;
  const std::int64_t n_blocks = capacity(image.width(), image.height());
  const auto assignment = block_assignment(n_blocks, n_bits, key, params);
  const auto pn = keying::derive_pn_pair(key, params.mask.length());

  const spectral::Spectrum spectrum = spectral::decompose(to_plane(image));
  const Plane dct_mag =
      spectral::blockwise_dct(to_layout(spectrum.magnitude, params.layout));
  const std::int64_t blocks_per_row = image.width() / 8;

  PixelArray bits(wm_height, wm_width);
  for (std::int64_t i = 0; i < n_bits; ++i) {
    const Eigen::VectorXd v = masked_coefficients(
        dct_mag, assignment[static_cast<std::size_t>(i)], blocks_per_row,
        params.mask);
    const double c0 = detection_correlation(v, pn.seq0);
    const double c1 = detection_correlation(v, pn.seq1);
    // Ties decide 0, so equal evidence never invents payload bits.
    bits(i / wm_width, i % wm_width) = c1 > c0 ? 1 : 0;
  }
  return WatermarkBits(std::move(bits));
}

double calibrate_gain(const GrayImage& host, const WatermarkBits& payload,
                      const keying::SecretKey& key, double target_psnr_db,
                      const EmbedParams& base_params) {
  if (!(target_psnr_db >= 30.0 && target_psnr_db <= 80.0))
    throw Unsatisfiable("target PSNR must lie in [30, 80] dB");
  EmbedParams params = base_params;
  auto psnr_at = [&](double gain) {
    params.gain = gain;
    return embed(host, payload, key, params).psnr_db;
  };
  auto exact_at = [&](double gain) {
    params.gain = gain;
    const EmbedOutcome out = embed(host, payload, key, params);
    const WatermarkBits back = extract(out.image, payload.width(),
                                       payload.height(), key, params);
    return metrics::ber(payload, back) == 0.0;
  };

  // PSNR falls monotonically with gain (up to quantization jitter); find
  // the gain whose PSNR sits at the lower edge of the accepted band by
  // bisection in log-gain, then back off until extraction is exact.
  constexpr double kLo = 1e-4, kHi = 1e8;
  constexpr int kIterations = 60;
  const double floor_db = target_psnr_db - 0.5;
  if (psnr_at(kHi) > floor_db)
    throw Unsatisfiable("even gain 1e8 stays above the target band");
  if (psnr_at(kLo) < floor_db)
    throw Unsatisfiable("even gain 1e-4 falls below the target band");
  double lo = std::log(kLo), hi = std::log(kHi);
  for (int it = 0; it < kIterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (psnr_at(std::exp(mid)) >= floor_db)
      lo = mid;
    else
      hi = mid;
  }
  double gain = std::exp(lo);
  double achieved = psnr_at(gain);
  if (std::abs(achieved - target_psnr_db) > 0.5)
    throw Unsatisfiable("no gain lands within 0.5 dB of " +
                        std::to_string(target_psnr_db) + " dB (closest " +
                        std::to_string(achieved) + " dB)");
  // Trade at most the width of the band for exactness.
  constexpr int kBackoffSteps = 12;
  for (int step = 0; step <= kBackoffSteps; ++step) {
    const double candidate =
        gain * (1.0 - static_cast<double>(step) / kBackoffSteps * 0.15);
    if (std::abs(psnr_at(candidate) - target_psnr_db) > 0.5) break;
    if (exact_at(candidate)) return candidate;
  }
  throw Unsatisfiable(
      "no gain in the target band yields exact no-attack extraction");
}

std::string to_string(Assignment a) {
  return a == Assignment::kRaster ? "raster" : "permuted";
}

std::string to_string(SpectrumLayout l) {
  return l == SpectrumLayout::kNatural ? "natural" : "centered";
}

Assignment parse_assignment(const std::string& text) {
  if (text == "raster") return Assignment::kRaster;
  if (text == "permuted") return Assignment::kPermuted;
  throw InvalidSpec("assignment must be 'raster' or 'permuted', got '" +
                    text + "'");
}

SpectrumLayout parse_layout(const std::string& text) {
  if (text == "natural") return SpectrumLayout::kNatural;
  if (text == "centered") return SpectrumLayout::kCentered;
  throw InvalidSpec("layout must be 'natural' or 'centered', got '" + text +
                    "'");
}

}  // namespace wmark::codec
