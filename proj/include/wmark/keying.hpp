#ifndef WMARK_KEYING_HPP
#define WMARK_KEYING_HPP

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "wmark/errors.hpp"

namespace wmark::keying {

// Secret key material. All pseudo-random choices in the codec are pure
// functions of these bytes, so embed/extract agree with no side channel.
class SecretKey {
 public:
  explicit SecretKey(std::vector<std::uint8_t> bytes);

  static SecretKey from_passphrase(std::string_view text);
  static SecretKey from_hex(std::string_view hex);

  const std::vector<std::uint8_t>& bytes() const { return bytes_; }

  // Short non-reversible identifier for reports: first 16 hex digits of
  // SHA-256(salt || key bytes). Pass the deployment salt explicitly; the
  // CLI reads it from WMARK_FINGERPRINT_SALT.
  std::string fingerprint(std::string_view salt) const;

 private:
  std::vector<std::uint8_t> bytes_;
};

// Deterministic byte stream: concatenated SHA-256 blocks of
// key || LE64(stream_id) || LE64(counter). Distinct stream_ids are
// independent for all practical purposes.
std::vector<std::uint8_t> keyed_bytes(const SecretKey& key,
                                      std::uint64_t stream_id, std::size_t n);

// Lowercase hex SHA-256 of a byte buffer; fixture integrity checks use it.
std::string sha256_hex(const std::uint8_t* data, std::size_t len);

// Sample Pearson correlation of two equal-length vectors (length >= 2).
// Throws DegenerateInput if either vector is constant.
double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

// Bipolar (+1/-1) sequence pair, one per payload bit value.
struct PnPair {
  Eigen::VectorXd seq0;
  Eigen::VectorXd seq1;
};

// Derives the two carrier sequences of the given length from the key.
// Deterministic; |pearson(seq0, seq1)| < 0.3 is guaranteed by rejection
// resampling over successive key-derived streams. Throws LengthTooSmall
// for length < 2.
PnPair derive_pn_pair(const SecretKey& key, int length);

// Keyed Fisher-Yates permutation of {0, ..., n-1}; used for the permuted
// block-assignment mode. Deterministic in (key, n).
std::vector<std::int64_t> keyed_permutation(const SecretKey& key,
                                            std::int64_t n);

}  // namespace wmark::keying

#endif  // WMARK_KEYING_HPP
