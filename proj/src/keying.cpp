#include "wmark/keying.hpp"

#include <openssl/evp.h>

#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <sstream>

namespace wmark::keying {

namespace {

std::array<std::uint8_t, 32> sha256(const std::uint8_t* data,
                                    std::size_t len) {
  std::array<std::uint8_t, 32> digest{};
  unsigned int written = 0;
  if (!EVP_Digest(data, len, digest.data(), &written, EVP_sha256(), nullptr) ||
      written != digest.size())
    throw Error("SHA-256 computation failed");
  return digest;
}

void append_le64(std::vector<std::uint8_t>& buf, std::uint64_t v) {
  for (int i = 0; i < 8; ++i)
    buf.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::string hex(const std::uint8_t* data, std::size_t len) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (std::size_t i = 0; i < len; ++i) {
    out.push_back(digits[data[i] >> 4]);
    out.push_back(digits[data[i] & 0xf]);
  }
  return out;
}

// Bit j (MSB first) of a keyed byte stream, mapped to +1/-1.
Eigen::VectorXd bipolar_from_stream(const SecretKey& key,
                                    std::uint64_t stream_id, int length) {
  const auto bytes =
      keyed_bytes(key, stream_id, (static_cast<std::size_t>(length) + 7) / 8);
  Eigen::VectorXd seq(length);
  for (int i = 0; i < length; ++i) {
    const int bit = (bytes[static_cast<std::size_t>(i) / 8] >> (7 - i % 8)) & 1;
    seq(i) = bit ? 1.0 : -1.0;
  }
  return seq;
}

bool is_constant(const Eigen::VectorXd& v) {
  return v.maxCoeff() == v.minCoeff();
}

}  // namespace

SecretKey::SecretKey(std::vector<std::uint8_t> bytes)
    : bytes_(std::move(bytes)) {
  if (bytes_.empty()) throw DegenerateInput("key must not be empty");
}

SecretKey SecretKey::from_passphrase(std::string_view text) {
  if (text.empty()) throw DegenerateInput("empty passphrase");
  return SecretKey(std::vector<std::uint8_t>(text.begin(), text.end()));
}

SecretKey SecretKey::from_hex(std::string_view hex_text) {
  if (hex_text.empty() || hex_text.size() % 2 != 0)
    throw DegenerateInput("hex key needs a positive even digit count");
  auto nibble = [](char ch) -> int {
    if (ch >= '0' && ch <= '9') return ch - '0';
    if (ch >= 'a' && ch <= 'f') return ch - 'a' + 10;
    if (ch >= 'A' && ch <= 'F') return ch - 'A' + 10;
    throw DegenerateInput(std::string("bad hex digit: ") + ch);
  };
  std::vector<std::uint8_t> bytes(hex_text.size() / 2);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    bytes[i] = static_cast<std::uint8_t>(nibble(hex_text[2 * i]) << 4 |
                                         nibble(hex_text[2 * i + 1]));
  return SecretKey(std::move(bytes));
}

std::string SecretKey::fingerprint(std::string_view salt) const {
  std::vector<std::uint8_t> buf(salt.begin(), salt.end());
  buf.insert(buf.end(), bytes_.begin(), bytes_.end());
  const auto digest = sha256(buf.data(), buf.size());
  return hex(digest.data(), 8);
}

std::string sha256_hex(const std::uint8_t* data, std::size_t len) {
  const auto digest = sha256(data, len);
  return hex(digest.data(), digest.size());
}

std::vector<std::uint8_t> keyed_bytes(const SecretKey& key,
                                      std::uint64_t stream_id, std::size_t n) {
  std::vector<std::uint8_t> out;
  out.reserve(n + 32);
  std::vector<std::uint8_t> msg(key.bytes());
  append_le64(msg, stream_id);
  const std::size_t counter_at = msg.size();
  append_le64(msg, 0);
  for (std::uint64_t counter = 0; out.size() < n; ++counter) {
    for (int i = 0; i < 8; ++i)
      msg[counter_at + static_cast<std::size_t>(i)] =
          static_cast<std::uint8_t>(counter >> (8 * i));
    const auto block = sha256(msg.data(), msg.size());
    out.insert(out.end(), block.begin(), block.end());
  }
  out.resize(n);
  return out;
}

double pearson(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  if (a.size() != b.size())
    throw DegenerateInput("pearson needs equal-length vectors");
  if (a.size() < 2) throw DegenerateInput("pearson needs length >= 2");
  if (is_constant(a) || is_constant(b))
    throw DegenerateInput("pearson is undefined for a constant vector");
  const Eigen::VectorXd da = a.array() - a.mean();
  const Eigen::VectorXd db = b.array() - b.mean();
  return da.dot(db) / std::sqrt(da.squaredNorm() * db.squaredNorm());
}

PnPair derive_pn_pair(const SecretKey& key, int length) {
  if (length < 2)
    throw LengthTooSmall("carrier length must be at least 2, got " +
                         std::to_string(length));
  // Rejection resampling: walk stream pairs (2a, 2a+1) until the sequences
  // are non-constant and nearly orthogonal. For length >= 8 the first
  // attempt almost always wins; short lengths may take a few.
  constexpr int kMaxAttempts = 4096;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    PnPair pair{
        bipolar_from_stream(key, 2 * static_cast<std::uint64_t>(attempt),
                            length),
        bipolar_from_stream(key, 2 * static_cast<std::uint64_t>(attempt) + 1,
                            length)};
    if (is_constant(pair.seq0) || is_constant(pair.seq1)) continue;
    if (std::abs(pearson(pair.seq0, pair.seq1)) < 0.3) return pair;
  }
  throw DegenerateInput("no carrier pair found; key or length degenerate");
}

std::vector<std::int64_t> keyed_permutation(const SecretKey& key,
                                            std::int64_t n) {
  std::vector<std::int64_t> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  if (n < 2) return perm;
  // Fisher-Yates driven by a dedicated keyed stream, eight bytes per draw
  // with rejection to keep each draw uniform.
  constexpr std::uint64_t kPermutationStream = 0x7065726d75746531ull;
  std::size_t cursor = 0;
  std::vector<std::uint8_t> pool =
      keyed_bytes(key, kPermutationStream, 8 * static_cast<std::size_t>(n) * 2);
  auto next_u64 = [&]() {
    // keyed_bytes is prefix-stable, so doubling the pool extends the same
    // stream without disturbing the bytes already consumed.
    if (cursor + 8 > pool.size())
      pool = keyed_bytes(key, kPermutationStream, pool.size() * 2);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i)
      v |= static_cast<std::uint64_t>(pool[cursor++]) << (8 * i);
    return v;
  };
  for (std::int64_t i = n - 1; i > 0; --i) {
    const std::uint64_t bound = static_cast<std::uint64_t>(i) + 1;
    const std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw;
    do {
      draw = next_u64();
    } while (draw >= limit);
    std::swap(perm[static_cast<std::size_t>(i)],
              perm[static_cast<std::size_t>(draw % bound)]);
  }
  return perm;
}

}  // namespace wmark::keying
