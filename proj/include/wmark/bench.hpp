#ifndef WMARK_BENCH_HPP
#define WMARK_BENCH_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "wmark/attacks.hpp"
#include "wmark/codec.hpp"
#include "wmark/metrics.hpp"

namespace wmark::bench {

// Gain policy: a fixed value, or per-host calibration to a PSNR target.
struct CalibrateGain {
  double target_psnr_db;
};

struct BenchConfig {
  std::vector<std::filesystem::path> images;
  std::vector<std::filesystem::path> payloads;
  keying::SecretKey key = keying::SecretKey::from_passphrase("bench-key");
  std::optional<double> gain;                  // exactly one of gain /
  std::optional<CalibrateGain> calibrate;      // calibrate must be set
  codec::EmbedParams params;                   // gain field ignored
  std::vector<attacks::AttackSpec> attack_list;
  std::uint64_t seed = 0;   // injected into randomized preset attacks
  std::string format = "csv";  // "csv" or "json"
};

// One output row. Rows are sorted by (image_id, payload_id, attack).
struct BenchRow {
  metrics::EvalReport report;
  double gain = 0.0;
  std::string key_fingerprint;
  std::uint64_t seed = 0;
  std::string error;  // empty on success; on failure metrics are NaN
};

// The fixed evaluation grid: JPEG quality 60..90 step 5, Gaussian noise
// var 0.001, salt & pepper densities {0.01, 0.02, 0.04, 0.06}, Gaussian
// filter windows {3, 5, 7, 9} at sigma 0.5, histogram equalization alone
// and followed by Gaussian noise var 0.001. Randomized attacks carry the
// given seed.
std::vector<attacks::AttackSpec> paper_preset(std::uint64_t seed);

// Expands the token "5std" to the five bundled 512x512 host fixtures.
// fixture_dir overrides the default location (WMARK_FIXTURE_DIR, else
// tests/fixtures/hosts relative to the working directory).
std::vector<std::filesystem::path> resolve_images(
    const std::vector<std::string>& tokens,
    const std::optional<std::filesystem::path>& fixture_dir);

// Runs the full grid. Per (image, payload): one "none" row for the
// unattacked watermarked image, then one row per attack. A failing row
// records its error and the run continues. Same config, same bytes out.
std::vector<BenchRow> run_bench(const BenchConfig& config);

// Writers render the same rows; numeric fields agree across formats.
// Infinite PSNR becomes "inf" in CSV and null plus an *_infinite flag in
// JSON. Trailing newline, no timestamps, fully reproducible.
void write_csv(std::ostream& out, const std::vector<BenchRow>& rows);
void write_json(std::ostream& out, const std::vector<BenchRow>& rows);

// Loads a JSON config file; unknown keys are rejected. See
// configs/bench_paper.json for the shape.
BenchConfig load_config(const std::filesystem::path& path);

}  // namespace wmark::bench

#endif  // WMARK_BENCH_HPP
