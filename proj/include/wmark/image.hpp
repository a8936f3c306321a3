#ifndef WMARK_IMAGE_HPP
#define WMARK_IMAGE_HPP

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <utility>

#include "wmark/errors.hpp"

namespace wmark {

// Real-valued working plane. Row-major so that (row, col) indexing matches
// the raster order of the underlying image files.
using Plane =
    Eigen::Array<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using PixelArray =
    Eigen::Array<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// 8-bit grayscale raster, at least 8x8. Immutable after construction.
class GrayImage {
 public:
  explicit GrayImage(PixelArray pixels) : pixels_(std::move(pixels)) {
    if (pixels_.rows() < 8 || pixels_.cols() < 8)
      throw UnsupportedFormat("image must be at least 8x8 pixels");
  }

  int width() const { return static_cast<int>(pixels_.cols()); }
  int height() const { return static_cast<int>(pixels_.rows()); }
  const PixelArray& pixels() const { return pixels_; }
  std::uint8_t at(int row, int col) const { return pixels_(row, col); }

 private:
  PixelArray pixels_;
};

// Binary payload raster; entries are 0 or 1.
class WatermarkBits {
 public:
  explicit WatermarkBits(PixelArray bits) : bits_(std::move(bits)) {
    if (bits_.rows() < 1 || bits_.cols() < 1)
      throw UnsupportedFormat("watermark must be at least 1x1");
    if ((bits_ > 1).any())
      throw UnsupportedFormat("watermark entries must be 0 or 1");
  }

  int width() const { return static_cast<int>(bits_.cols()); }
  int height() const { return static_cast<int>(bits_.rows()); }
  std::int64_t size() const { return bits_.size(); }
  const PixelArray& bits() const { return bits_; }
  // Raster-order access: index = row * width + col.
  std::uint8_t bit(std::int64_t index) const {
    return bits_(index / bits_.cols(), index % bits_.cols());
  }

 private:
  PixelArray bits_;
};

// Reads a grayscale image from a PGM (P5, maxval 255) or 8-bit grayscale
// PNG file, chosen by extension. Anything else is rejected.
GrayImage load_image(const std::filesystem::path& path);

// Writes PGM (P5) or 8-bit grayscale PNG, chosen by extension. Output is
// byte-for-byte deterministic for a given image.
void save_image(const GrayImage& image, const std::filesystem::path& path);

// Reads a binary watermark: PBM (P4), or any loadable grayscale image
// thresholded at 128 (>= 128 maps to 1).
WatermarkBits load_watermark(const std::filesystem::path& path);

// Writes a watermark as PBM (P4).
void save_watermark(const WatermarkBits& bits, const std::filesystem::path& path);

// Widens pixels to doubles in [0, 255]. No rescaling.
Plane to_plane(const GrayImage& image);

// Rounds half away from zero, clips to [0, 255], narrows to 8 bits.
// Throws NonFiniteValue if the plane contains NaN or +/-inf.
GrayImage from_plane(const Plane& plane);

}  // namespace wmark

#endif  // WMARK_IMAGE_HPP
