#include "wmark/metrics.hpp"

#include <cmath>
#include <limits>

namespace wmark::metrics {

namespace {

void require_same_shape(int aw, int ah, int bw, int bh, const char* what) {
  if (aw != bw || ah != bh)
    throw DimensionMismatch(std::string(what) + " shapes differ: " +
                            std::to_string(aw) + "x" + std::to_string(ah) +
                            " vs " + std::to_string(bw) + "x" +
                            std::to_string(bh));
}

}  // namespace

double mse(const GrayImage& a, const GrayImage& b) {
  require_same_shape(a.width(), a.height(), b.width(), b.height(), "image");
  const Plane diff =
      a.pixels().cast<double>() - b.pixels().cast<double>();
  return diff.square().sum() / static_cast<double>(diff.size());
}

double psnr(const GrayImage& a, const GrayImage& b) {
  const double err = mse(a, b);
  if (err == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / err);
}

double nc(const WatermarkBits& reference, const WatermarkBits& extracted) {
  require_same_shape(reference.width(), reference.height(), extracted.width(),
                     extracted.height(), "watermark");
  double both = 0.0, ref_sum = 0.0, ext_sum = 0.0;
  for (std::int64_t i = 0; i < reference.size(); ++i) {
    const double w = reference.bit(i), x = extracted.bit(i);
    // Over {0,1}, (w*x)^2, w^2 and x^2 are just the bits themselves; the
    // general expressions are kept for clarity against the definition.
    both += (w * x) * (w * x);
    ref_sum += w * w;
    ext_sum += x * x;
  }
  if (ref_sum == 0.0)
    throw DegenerateReference("reference watermark has no 1 bits");
  if (ext_sum == 0.0) return 0.0;
  return both / (std::sqrt(ref_sum) * std::sqrt(ext_sum));
}

double ber(const WatermarkBits& reference, const WatermarkBits& extracted) {
  require_same_shape(reference.width(), reference.height(), extracted.width(),
                     extracted.height(), "watermark");
  std::int64_t wrong = 0;
  for (std::int64_t i = 0; i < reference.size(); ++i)
    wrong += reference.bit(i) != extracted.bit(i);
  return static_cast<double>(wrong) / static_cast<double>(reference.size());
}

}  // namespace wmark::metrics
