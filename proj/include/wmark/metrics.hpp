#ifndef WMARK_METRICS_HPP
#define WMARK_METRICS_HPP

#include <string>

#include "wmark/image.hpp"

namespace wmark::metrics {

// Mean squared error over pixel values treated as doubles in [0, 255].
// Throws DimensionMismatch unless shapes agree.
double mse(const GrayImage& a, const GrayImage& b);

// 10*log10(255^2 / mse). Identical images give +infinity.
double psnr(const GrayImage& a, const GrayImage& b);

// Normalized correlation between a reference watermark and an extracted
// one, both over {0,1}:
//   sum((w .* w') .^ 2) / (sqrt(sum(w .^ 2)) * sqrt(sum(w' .^ 2))).
// An all-zero extraction scores 0; an all-zero reference is an error
// (DegenerateReference).
double nc(const WatermarkBits& reference, const WatermarkBits& extracted);

// Fraction of differing bits.
double ber(const WatermarkBits& reference, const WatermarkBits& extracted);

// One evaluation of one attacked image.
struct EvalReport {
  std::string image_id;
  std::string payload_id;
  std::string attack;           // canonical attack text, "none" for baseline
  double psnr_vs_host_db;       // attacked image vs clean host
  double psnr_vs_watermarked_db;  // attacked image vs watermarked image
  double nc;
  double ber;
};

}  // namespace wmark::metrics

#endif  // WMARK_METRICS_HPP
