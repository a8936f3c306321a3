#ifndef WMARK_SPECTRAL_HPP
#define WMARK_SPECTRAL_HPP

#include <array>
#include <string>
#include <utility>
#include <vector>

#include "wmark/image.hpp"

namespace wmark::spectral {

// Full-frame DFT magnitude and phase, same shape as the input plane.
// Forward transform is unnormalized; the inverse applies 1/(W*H).
struct Spectrum {
  Plane magnitude;
  Plane phase;
};

// 2D DFT of a real plane, split into magnitude >= 0 and phase in (-pi, pi].
Spectrum decompose(const Plane& plane);

// Real part of the inverse DFT of magnitude * exp(i * phase). Negative
// magnitudes are accepted (they flip the phase by pi).
Plane reconstruct(const Spectrum& spectrum);

// Moves the zero-frequency bin to the plane center (even dimensions only
// here, so fftshift and its inverse are the same index map).
Plane fftshift(const Plane& plane);
Plane ifftshift(const Plane& plane);

using Block = Eigen::Matrix<double, 8, 8, Eigen::RowMajor>;

// Orthonormal 8x8 DCT-II and its inverse. Round-trip is identity to
// floating-point accuracy; a constant block c maps to DC = 8c.
Block dct2_block(const Block& block);
Block idct2_block(const Block& block);

// Applies the 8x8 transform independently to each tile of a plane whose
// dimensions are multiples of 8. Throws DimensionNotMultipleOf8 otherwise.
Plane blockwise_dct(const Plane& plane);
Plane blockwise_idct(const Plane& plane);

// The standard zigzag scan of an 8x8 block as (row, col) pairs;
// index 0 is DC at (0, 0).
const std::array<std::pair<int, int>, 64>& zigzag_order();

// Set of in-block coefficient positions carrying the watermark. Valid masks
// hold 2..62 distinct positions and never include DC.
class MidbandMask {
 public:
  explicit MidbandMask(std::vector<std::pair<int, int>> positions);

  const std::vector<std::pair<int, int>>& positions() const {
    return positions_;
  }
  int length() const { return static_cast<int>(positions_.size()); }

  // Canonical text form, parseable by parse_mask.
  std::string str() const;

 private:
  std::vector<std::pair<int, int>> positions_;
};

// Default band: zigzag indices 9..30 inclusive (22 coefficients).
MidbandMask midband_mask();

// Contiguous zigzag band [first, last], DC excluded.
MidbandMask midband_mask(int zigzag_first, int zigzag_last);

// Accepts "zigzag:<first>-<last>" or an explicit semicolon-separated
// position list "pos:r,c;r,c;...". Throws InvalidMask on anything else.
MidbandMask parse_mask(const std::string& text);

}  // namespace wmark::spectral

#endif  // WMARK_SPECTRAL_HPP
