#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "test_support.hpp"
#include "wmark/keying.hpp"

using namespace wmark;
using namespace wmark::keying;

namespace {

std::string hex_of(const std::vector<std::uint8_t>& bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  for (const auto b : bytes) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

}  // namespace

TEST_CASE("keyed byte stream matches frozen reference values") {
  // Reference digests computed with an independent SHA-256 implementation
  // over key || LE64(stream) || LE64(counter).
  const SecretKey key = SecretKey::from_passphrase("abc");
  CHECK(hex_of(keyed_bytes(key, 0, 16)) == "9f9dadcdb7dad3772b609c72ac73b216");
  CHECK(hex_of(keyed_bytes(key, 1, 16)) == "379412b9afbd41875b15734d564ba89d");
  // Bytes past the first digest come from counter 1 of the same stream.
  const auto long_run = keyed_bytes(key, 0, 40);
  const std::vector<std::uint8_t> tail(long_run.begin() + 32, long_run.end());
  CHECK(hex_of(tail) == "4ebe9d7eadc666bf");
}

TEST_CASE("keyed byte stream is prefix stable") {
  const SecretKey key = SecretKey::from_passphrase("prefix");
  const auto small = keyed_bytes(key, 7, 20);
  const auto large = keyed_bytes(key, 7, 200);
  CHECK(std::equal(small.begin(), small.end(), large.begin()));
}

TEST_CASE("key fingerprint is salted and stable") {
  const SecretKey key = SecretKey::from_passphrase("abc");
  CHECK(key.fingerprint("") == "ba7816bf8f01cfea");
  CHECK(key.fingerprint("pepper") == "fadf7b97406e1eaa");
  CHECK(key.fingerprint("") != key.fingerprint("pepper"));
}

TEST_CASE("hex keys parse and validate") {
  const SecretKey key = SecretKey::from_hex("00ff10");
  CHECK(key.bytes() == std::vector<std::uint8_t>{0x00, 0xff, 0x10});
  CHECK(SecretKey::from_hex("AbCd").bytes() ==
        std::vector<std::uint8_t>{0xab, 0xcd});
  CHECK_THROWS_AS(SecretKey::from_hex("abc"), DegenerateInput);
  CHECK_THROWS_AS(SecretKey::from_hex("zz"), DegenerateInput);
  CHECK_THROWS_AS(SecretKey::from_hex(""), DegenerateInput);
  CHECK_THROWS_AS(SecretKey::from_passphrase(""), DegenerateInput);
}

TEST_CASE("pearson on hand-computed examples") {
  Eigen::VectorXd a(3), b(3);
  a << 1, 2, 3;
  b << 2, 4, 6;
  CHECK(pearson(a, b) == doctest::Approx(1.0).epsilon(1e-12));
  b << -1, -2, -3;
  CHECK(pearson(a, b) == doctest::Approx(-1.0).epsilon(1e-12));
  Eigen::VectorXd c(4), d(4);
  c << 1, 0, 1, 0;
  d << 0, 1, 0, 1;
  CHECK(pearson(c, d) == doctest::Approx(-1.0).epsilon(1e-12));
  // Uncorrelated by construction: covariance term cancels.
  Eigen::VectorXd e(4), f(4);
  e << 1, 1, -1, -1;
  f << 1, -1, 1, -1;
  CHECK(pearson(e, f) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("pearson rejects degenerate input") {
  Eigen::VectorXd a(3), b(3);
  a << 1, 1, 1;
  b << 1, 2, 3;
  CHECK_THROWS_AS(pearson(a, b), DegenerateInput);
  CHECK_THROWS_AS(pearson(b, a), DegenerateInput);
  Eigen::VectorXd one(1);
  one << 5;
  CHECK_THROWS_AS(pearson(one, one), DegenerateInput);
  Eigen::VectorXd c(2), d(3);
  c << 1, 2;
  d << 1, 2, 3;
  CHECK_THROWS_AS(pearson(c, d), DegenerateInput);
}

TEST_CASE("derived carrier pair is deterministic bipolar and separated") {
  const SecretKey key = SecretKey::from_passphrase("carrier-test");
  const PnPair pair = derive_pn_pair(key, 22);
  CHECK(pair.seq0.size() == 22);
  CHECK(pair.seq1.size() == 22);
  for (int i = 0; i < 22; ++i) {
    CHECK(std::abs(pair.seq0(i)) == 1.0);
    CHECK(std::abs(pair.seq1(i)) == 1.0);
  }
  CHECK(std::abs(pearson(pair.seq0, pair.seq1)) < 0.3);

  const PnPair again = derive_pn_pair(key, 22);
  CHECK((pair.seq0.array() == again.seq0.array()).all());
  CHECK((pair.seq1.array() == again.seq1.array()).all());

  const PnPair other = derive_pn_pair(SecretKey::from_passphrase("different"),
                                      22);
  CHECK((pair.seq0.array() != other.seq0.array()).any());
}

TEST_CASE("carrier separation holds across many keys and lengths") {
  for (int len : {2, 3, 8, 22, 62}) {
    for (int k = 0; k < 20; ++k) {
      const SecretKey key =
          SecretKey::from_passphrase("k" + std::to_string(k));
      const PnPair pair = derive_pn_pair(key, len);
      CHECK(std::abs(pearson(pair.seq0, pair.seq1)) < 0.3);
    }
  }
}

TEST_CASE("carrier length below 2 is rejected") {
  const SecretKey key = SecretKey::from_passphrase("short");
  CHECK_THROWS_AS(derive_pn_pair(key, 1), LengthTooSmall);
  CHECK_THROWS_AS(derive_pn_pair(key, 0), LengthTooSmall);
  CHECK_THROWS_AS(derive_pn_pair(key, -4), LengthTooSmall);
}

TEST_CASE("keyed permutation is a permutation and key-dependent") {
  const SecretKey key = SecretKey::from_passphrase("perm");
  const auto perm = keyed_permutation(key, 4096);
  CHECK(perm.size() == 4096);
  std::set<std::int64_t> seen(perm.begin(), perm.end());
  CHECK(seen.size() == 4096);
  CHECK(*seen.begin() == 0);
  CHECK(*seen.rbegin() == 4095);

  const auto again = keyed_permutation(key, 4096);
  CHECK(perm == again);
  const auto other =
      keyed_permutation(SecretKey::from_passphrase("perm2"), 4096);
  CHECK(perm != other);

  CHECK(keyed_permutation(key, 1) == std::vector<std::int64_t>{0});
  CHECK(keyed_permutation(key, 0).empty());
}
