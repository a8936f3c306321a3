#ifndef WMARK_CODEC_HPP
#define WMARK_CODEC_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "wmark/image.hpp"
#include "wmark/keying.hpp"
#include "wmark/spectral.hpp"

namespace wmark::codec {

// How payload bits are laid onto the 8x8 tiles of the magnitude plane.
enum class Assignment {
  kRaster,    // bit i -> tile block_offset + i in raster order
  kPermuted,  // bit i -> keyed permutation of the available tiles
};

// Which magnitude plane the blockwise DCT tiles: the natural DFT layout
// (DC at the top-left corner) or the centered layout (DC shifted to the
// middle, so tile content varies much less across the plane).
enum class SpectrumLayout {
  kNatural,
  kCentered,
};

struct EmbedParams {
  double gain = 0.0;  // must be set > 0 by the caller or loaded from config
  spectral::MidbandMask mask = spectral::midband_mask();
  Assignment assignment = Assignment::kRaster;
  SpectrumLayout layout = SpectrumLayout::kCentered;
  std::int64_t block_offset = 0;  // first tile used by raster assignment
};

struct EmbedOutcome {
  GrayImage image;
  double psnr_db;               // watermarked vs host, after quantization
  std::int64_t bits_embedded;
};

// Number of payload bits an image of this size can carry: one per 8x8 tile.
// Throws DimensionNotMultipleOf8 unless both dimensions are multiples of 8.
std::int64_t capacity(int width, int height);

// Tile indices used for an n_bits payload among n_blocks tiles, in payload
// bit order. Shared by embed and extract; exposed for tests.
std::vector<std::int64_t> block_assignment(std::int64_t n_blocks,
                                           std::int64_t n_bits,
                                           const keying::SecretKey& key,
                                           const EmbedParams& params);

// Adds gain * carrier to the masked coefficients of each assigned tile of
// a blockwise-DCT plane, in place. This is the whole embedding rule; embed
// wraps it in the spectral round trip. Exposed so locality and linearity
// can be tested without quantization in the way.
void add_carriers(Plane& dct_of_magnitude, const WatermarkBits& payload,
                  const keying::PnPair& pn,
                  const std::vector<std::int64_t>& assignment, double gain,
                  const spectral::MidbandMask& mask);

// Embeds the payload into the host under the key. Throws PayloadTooLarge
// if payload size + block_offset exceeds capacity, InvalidSpec for a
// non-positive gain.
EmbedOutcome embed(const GrayImage& host, const WatermarkBits& payload,
                   const keying::SecretKey& key, const EmbedParams& params);

// Blind extraction: recovers a wm_width x wm_height payload from a
// (possibly attacked) image using only the key and params. Per tile, the
// masked coefficients are correlated against both carriers; the stronger
// correlation decides the bit, ties and degenerate tiles decide 0.
WatermarkBits extract(const GrayImage& image, int wm_width, int wm_height,
                      const keying::SecretKey& key, const EmbedParams& params);

// Largest gain whose embed PSNR is within +/-0.5 dB of target_psnr_db and
// whose no-attack extraction is exact. target must lie in [30, 80].
// Throws Unsatisfiable when no such gain exists.
double calibrate_gain(const GrayImage& host, const WatermarkBits& payload,
                      const keying::SecretKey& key, double target_psnr_db,
                      const EmbedParams& base_params);

// Serialization helpers for config files and CLI flags.
std::string to_string(Assignment a);
std::string to_string(SpectrumLayout l);
Assignment parse_assignment(const std::string& text);
SpectrumLayout parse_layout(const std::string& text);

}  // namespace wmark::codec

#endif  // WMARK_CODEC_HPP
