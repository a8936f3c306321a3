#include <doctest.h>

#include <cmath>
#include <complex>
#include <set>

#include "test_support.hpp"
#include "wmark/spectral.hpp"

using namespace wmark;
using namespace wmark::spectral;

namespace {

// Oracle: direct O(N^4) evaluation of the unnormalized 2D DFT. Slow and
// obviously correct; only used on small planes.
Eigen::MatrixXcd naive_dft2(const Plane& x) {
  const int h = static_cast<int>(x.rows()), w = static_cast<int>(x.cols());
  Eigen::MatrixXcd out(h, w);
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v) {
      std::complex<double> acc = 0.0;
      for (int m = 0; m < h; ++m)
        for (int n = 0; n < w; ++n) {
          const double angle =
              -2.0 * M_PI * (static_cast<double>(u) * m / h +
                             static_cast<double>(v) * n / w);
          acc += x(m, n) * std::polar(1.0, angle);
        }
      out(u, v) = acc;
    }
  return out;
}

// Oracle: textbook orthonormal DCT-II double sum.
Block naive_dct2(const Block& x) {
  Block out;
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v) {
      const double au = u == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      const double av = v == 0 ? std::sqrt(1.0 / 8.0) : std::sqrt(2.0 / 8.0);
      double acc = 0.0;
      for (int m = 0; m < 8; ++m)
        for (int n = 0; n < 8; ++n)
          acc += x(m, n) * std::cos(M_PI * (2 * m + 1) * u / 16.0) *
                 std::cos(M_PI * (2 * n + 1) * v / 16.0);
      out(u, v) = au * av * acc;
    }
  return out;
}

}  // namespace

TEST_CASE("decompose matches the direct DFT oracle") {
  const Plane x = wmark_test::random_plane(16, 12, 7);
  const Eigen::MatrixXcd oracle = naive_dft2(x);
  const Spectrum s = decompose(x);
  for (int u = 0; u < 16; ++u)
    for (int v = 0; v < 12; ++v) {
      CHECK(s.magnitude(u, v) ==
            doctest::Approx(std::abs(oracle(u, v))).epsilon(1e-9).scale(1.0));
      if (std::abs(oracle(u, v)) > 1e-6) {
        // Compare phases through the unit circle to dodge the +/-pi seam.
        const std::complex<double> a = std::polar(1.0, s.phase(u, v));
        const std::complex<double> b = oracle(u, v) / std::abs(oracle(u, v));
        CHECK(std::abs(a - b) < 1e-9);
      }
    }
}

TEST_CASE("constant plane concentrates everything in the DC bin") {
  Plane x(8, 8);
  x.setConstant(100.0);
  const Spectrum s = decompose(x);
  CHECK(s.magnitude(0, 0) == doctest::Approx(6400.0).epsilon(1e-12));
  for (int u = 0; u < 8; ++u)
    for (int v = 0; v < 8; ++v)
      if (u || v) CHECK(std::abs(s.magnitude(u, v)) < 1e-9);
}

TEST_CASE("dft round trip is exact to 1e-8") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Plane x = wmark_test::random_plane(64, 64, seed);
    const Plane back = reconstruct(decompose(x));
    CHECK((back - x).abs().maxCoeff() < 1e-8);
  }
}

TEST_CASE("dft round trip handles non-power-of-two sizes") {
  const Plane x = wmark_test::random_plane(24, 40, 11);
  const Plane back = reconstruct(decompose(x));
  CHECK((back - x).abs().maxCoeff() < 1e-8);
}

TEST_CASE("magnitude spectrum of a real plane is Hermitian") {
  const Plane x = wmark_test::random_plane(32, 16, 13);
  const Spectrum s = decompose(x);
  const int h = 32, w = 16;
  for (int u = 0; u < h; ++u)
    for (int v = 0; v < w; ++v) {
      const double twin = s.magnitude((h - u) % h, (w - v) % w);
      CHECK(s.magnitude(u, v) ==
            doctest::Approx(twin).epsilon(1e-9).scale(1.0));
    }
}

TEST_CASE("parseval holds for the DFT") {
  const Plane x = wmark_test::random_plane(40, 24, 17);
  const Spectrum s = decompose(x);
  const double spatial = x.square().sum();
  const double spectral_sum = s.magnitude.square().sum() / (40.0 * 24.0);
  CHECK(spectral_sum == doctest::Approx(spatial).epsilon(1e-6));
}

TEST_CASE("negative magnitudes reconstruct as a phase flip") {
  const Plane x = wmark_test::random_plane(16, 16, 19);
  const Spectrum s = decompose(x);
  const Spectrum negated{-s.magnitude, s.phase};
  const Plane back = reconstruct(negated);
  CHECK((back + x).abs().maxCoeff() < 1e-8);
}

TEST_CASE("reconstruct rejects mismatched shapes") {
  Spectrum s{Plane::Zero(8, 8), Plane::Zero(8, 16)};
  CHECK_THROWS_AS(reconstruct(s), DimensionMismatch);
}

TEST_CASE("fftshift centers DC and is its own inverse on even sizes") {
  Plane x = Plane::Zero(8, 12);
  x(0, 0) = 1.0;
  const Plane shifted = fftshift(x);
  CHECK(shifted(4, 6) == 1.0);
  CHECK(shifted.sum() == 1.0);
  const Plane back = ifftshift(shifted);
  CHECK((back - x).abs().maxCoeff() == 0.0);
  const Plane y = wmark_test::random_plane(16, 8, 23);
  CHECK((ifftshift(fftshift(y)) - y).abs().maxCoeff() == 0.0);
}

TEST_CASE("dct2_block matches the double-sum oracle") {
  std::uint64_t state = 29;
  Block x;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      x(r, c) = 255.0 * wmark_test::next_unit(state);
  const Block mine = dct2_block(x);
  const Block oracle = naive_dct2(x);
  CHECK((mine - oracle).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("dct of a constant block is pure DC") {
  Block x;
  x.setConstant(50.0);
  const Block d = dct2_block(x);
  CHECK(d(0, 0) == doctest::Approx(400.0).epsilon(1e-12));
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      if (r || c) CHECK(std::abs(d(r, c)) < 1e-10);
}

TEST_CASE("dct round trip and orthonormality") {
  std::uint64_t state = 31;
  Block x;
  for (int r = 0; r < 8; ++r)
    for (int c = 0; c < 8; ++c)
      x(r, c) = 500.0 * (wmark_test::next_unit(state) - 0.5);
  const Block d = dct2_block(x);
  CHECK((idct2_block(d) - x).cwiseAbs().maxCoeff() < 1e-10);
  // Orthonormal transforms preserve energy exactly.
  CHECK(d.squaredNorm() == doctest::Approx(x.squaredNorm()).epsilon(1e-12));
}

TEST_CASE("blockwise dct transforms tiles independently") {
  const Plane x = wmark_test::random_plane(16, 24, 37);
  const Plane d = blockwise_dct(x);
  // Each tile must equal the single-block transform of that tile.
  for (int br = 0; br < 16; br += 8)
    for (int bc = 0; bc < 24; bc += 8) {
      const Block tile = x.block<8, 8>(br, bc).matrix();
      const Block expect = dct2_block(tile);
      CHECK((d.block<8, 8>(br, bc).matrix() - expect).cwiseAbs().maxCoeff() <
            1e-12);
    }
  const Plane back = blockwise_idct(d);
  CHECK((back - x).abs().maxCoeff() < 1e-10);
}

TEST_CASE("blockwise transforms reject off-grid shapes") {
  CHECK_THROWS_AS(blockwise_dct(Plane::Zero(12, 16)),
                  DimensionNotMultipleOf8);
  CHECK_THROWS_AS(blockwise_idct(Plane::Zero(16, 12)),
                  DimensionNotMultipleOf8);
}

TEST_CASE("zigzag order walks the standard diagonal path") {
  const auto& zz = zigzag_order();
  const std::array<std::pair<int, int>, 10> head{{{0, 0},
                                                  {0, 1},
                                                  {1, 0},
                                                  {2, 0},
                                                  {1, 1},
                                                  {0, 2},
                                                  {0, 3},
                                                  {1, 2},
                                                  {2, 1},
                                                  {3, 0}}};
  for (std::size_t i = 0; i < head.size(); ++i) CHECK(zz[i] == head[i]);
  CHECK(zz[63] == std::pair<int, int>{7, 7});
  std::set<std::pair<int, int>> seen(zz.begin(), zz.end());
  CHECK(seen.size() == 64);  // bijective
}

TEST_CASE("default midband mask is zigzag 9 through 30") {
  const MidbandMask mask = midband_mask();
  CHECK(mask.length() == 22);
  CHECK(mask.positions().front() == std::pair<int, int>{3, 0});
  const auto& zz = zigzag_order();
  for (int i = 0; i < 22; ++i)
    CHECK(mask.positions()[static_cast<std::size_t>(i)] == zz[9 + i]);
  CHECK(mask.str() == "zigzag:9-30");
}

TEST_CASE("mask validation") {
  CHECK_THROWS_AS(midband_mask(0, 5), InvalidMask);   // would include DC
  CHECK_THROWS_AS(midband_mask(5, 64), InvalidMask);  // out of range
  CHECK_THROWS_AS(midband_mask(9, 9), InvalidMask);   // single position
  CHECK_THROWS_AS(MidbandMask({{0, 0}, {1, 0}}), InvalidMask);
  CHECK_THROWS_AS(MidbandMask({{1, 0}, {1, 0}}), InvalidMask);
  CHECK_THROWS_AS(MidbandMask({{1, 0}, {8, 0}}), InvalidMask);
  CHECK_NOTHROW(MidbandMask({{1, 0}, {0, 1}}));
}

TEST_CASE("mask text forms parse and round trip") {
  const MidbandMask zz = parse_mask("zigzag:9-30");
  CHECK(zz.length() == 22);
  CHECK(parse_mask(zz.str()).positions() == zz.positions());

  const MidbandMask pos = parse_mask("pos:3,0;2,1;1,2");
  CHECK(pos.length() == 3);
  CHECK(pos.positions()[1] == std::pair<int, int>{2, 1});
  CHECK(pos.str() == "pos:3,0;2,1;1,2");
  CHECK(parse_mask(pos.str()).positions() == pos.positions());

  CHECK_THROWS_AS(parse_mask("zigzag:9"), InvalidMask);
  CHECK_THROWS_AS(parse_mask("pos:1"), InvalidMask);
  CHECK_THROWS_AS(parse_mask("bogus"), InvalidMask);
}
