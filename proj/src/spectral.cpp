#include "wmark/spectral.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <sstream>
#include <vector>

namespace wmark::spectral {

namespace {

using ComplexField = Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                                   Eigen::Dynamic, Eigen::RowMajor>;

// Row-wise then column-wise 1D FFTs. Eigen's FFT normalizes nothing on the
// forward pass and divides by N on the inverse, so chaining rows and
// columns yields the unnormalized forward DFT and the 1/(W*H) inverse.
ComplexField fft2(const Plane& plane) {
  const Eigen::Index h = plane.rows(), w = plane.cols();
  Eigen::FFT<double> fft;
  ComplexField field(h, w);
  std::vector<std::complex<double>> in(static_cast<std::size_t>(w)), out(in);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) in[c] = {plane(r, c), 0.0};
    fft.fwd(out, in);
    for (Eigen::Index c = 0; c < w; ++c) field(r, c) = out[c];
  }
  std::vector<std::complex<double>> col_in(static_cast<std::size_t>(h)),
      col_out(col_in);
  for (Eigen::Index c = 0; c < w; ++c) {
    for (Eigen::Index r = 0; r < h; ++r) col_in[r] = field(r, c);
    fft.fwd(col_out, col_in);
    for (Eigen::Index r = 0; r < h; ++r) field(r, c) = col_out[r];
  }
  return field;
}

Plane ifft2_real(const ComplexField& field) {
  const Eigen::Index h = field.rows(), w = field.cols();
  Eigen::FFT<double> fft;
  ComplexField tmp(h, w);
  std::vector<std::complex<double>> col_in(static_cast<std::size_t>(h)),
      col_out(col_in);
  for (Eigen::Index c = 0; c < w; ++c) {
    for (Eigen::Index r = 0; r < h; ++r) col_in[r] = field(r, c);
    fft.inv(col_out, col_in);
    for (Eigen::Index r = 0; r < h; ++r) tmp(r, c) = col_out[r];
  }
  Plane out(h, w);
  std::vector<std::complex<double>> row_in(static_cast<std::size_t>(w)),
      row_out(row_in);
  for (Eigen::Index r = 0; r < h; ++r) {
    for (Eigen::Index c = 0; c < w; ++c) row_in[c] = tmp(r, c);
    fft.inv(row_out, row_in);
    for (Eigen::Index c = 0; c < w; ++c) out(r, c) = row_out[c].real();
  }
  return out;
}

void require_multiple_of_8(const Plane& plane) {
  if (plane.rows() % 8 != 0 || plane.cols() % 8 != 0) {
    std::ostringstream msg;
    msg << "plane is " << plane.cols() << "x" << plane.rows()
        << "; blockwise transforms need multiples of 8";
    throw DimensionNotMultipleOf8(msg.str());
  }
}

const Eigen::Matrix<double, 8, 8>& dct8_matrix() {
  static const Eigen::Matrix<double, 8, 8> d = [] {
    Eigen::Matrix<double, 8, 8> m;
    for (int k = 0; k < 8; ++k) {
      const double amp = k == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
      for (int n = 0; n < 8; ++n)
        m(k, n) = amp * std::cos(M_PI * (2 * n + 1) * k / 16.0);
    }
    return m;
  }();
  return d;
}

}  // namespace

Spectrum decompose(const Plane& plane) {
  const ComplexField field = fft2(plane);
  Spectrum s{Plane(plane.rows(), plane.cols()),
             Plane(plane.rows(), plane.cols())};
  for (Eigen::Index r = 0; r < field.rows(); ++r)
    for (Eigen::Index c = 0; c < field.cols(); ++c) {
      s.magnitude(r, c) = std::abs(field(r, c));
      double ph = std::arg(field(r, c));
      if (ph <= -M_PI) ph = M_PI;  // keep phase in (-pi, pi]
      s.phase(r, c) = ph;
    }
  return s;
}

Plane reconstruct(const Spectrum& spectrum) {
  if (spectrum.magnitude.rows() != spectrum.phase.rows() ||
      spectrum.magnitude.cols() != spectrum.phase.cols())
    throw DimensionMismatch("magnitude and phase shapes differ");
  ComplexField field(spectrum.magnitude.rows(), spectrum.magnitude.cols());
  for (Eigen::Index r = 0; r < field.rows(); ++r)
    for (Eigen::Index c = 0; c < field.cols(); ++c)
      field(r, c) = std::polar(1.0, spectrum.phase(r, c)) *
                    spectrum.magnitude(r, c);
  return ifft2_real(field);
}

Plane fftshift(const Plane& plane) {
  const Eigen::Index h = plane.rows(), w = plane.cols();
  Plane out(h, w);
  const Eigen::Index hr = h / 2, hc = w / 2;
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c)
      out((r + hr) % h, (c + hc) % w) = plane(r, c);
  return out;
}

Plane ifftshift(const Plane& plane) {
  const Eigen::Index h = plane.rows(), w = plane.cols();
  Plane out(h, w);
  const Eigen::Index hr = (h + 1) / 2, hc = (w + 1) / 2;
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c)
      out((r + hr) % h, (c + hc) % w) = plane(r, c);
  return out;
}

Block dct2_block(const Block& block) {
  const auto& d = dct8_matrix();
  return d * block * d.transpose();
}

Block idct2_block(const Block& block) {
  const auto& d = dct8_matrix();
  return d.transpose() * block * d;
}

Plane blockwise_dct(const Plane& plane) {
  require_multiple_of_8(plane);
  Plane out(plane.rows(), plane.cols());
  for (Eigen::Index br = 0; br < plane.rows(); br += 8)
    for (Eigen::Index bc = 0; bc < plane.cols(); bc += 8)
      out.block<8, 8>(br, bc) =
          dct2_block(plane.block<8, 8>(br, bc).matrix()).array();
  return out;
}

Plane blockwise_idct(const Plane& plane) {
  require_multiple_of_8(plane);
  Plane out(plane.rows(), plane.cols());
  for (Eigen::Index br = 0; br < plane.rows(); br += 8)
    for (Eigen::Index bc = 0; bc < plane.cols(); bc += 8)
      out.block<8, 8>(br, bc) =
          idct2_block(plane.block<8, 8>(br, bc).matrix()).array();
  return out;
}

const std::array<std::pair<int, int>, 64>& zigzag_order() {
  static const std::array<std::pair<int, int>, 64> order = [] {
    std::array<std::pair<int, int>, 64> z{};
    int r = 0, c = 0;
    for (int i = 0; i < 64; ++i) {
      z[i] = {r, c};
      if ((r + c) % 2 == 0) {  // moving up-right
        if (c == 7)
          ++r;
        else if (r == 0)
          ++c;
        else {
          --r;
          ++c;
        }
      } else {  // moving down-left
        if (r == 7)
          ++c;
        else if (c == 0)
          ++r;
        else {
          ++r;
          --c;
        }
      }
    }
    return z;
  }();
  return order;
}

MidbandMask::MidbandMask(std::vector<std::pair<int, int>> positions)
    : positions_(std::move(positions)) {
  if (positions_.size() < 2 || positions_.size() > 62)
    throw InvalidMask("mask must hold between 2 and 62 positions");
  std::set<std::pair<int, int>> seen;
  for (const auto& [r, c] : positions_) {
    if (r < 0 || r > 7 || c < 0 || c > 7)
      throw InvalidMask("mask position outside the 8x8 block");
    if (r == 0 && c == 0) throw InvalidMask("mask must not include DC");
    if (!seen.insert({r, c}).second)
      throw InvalidMask("duplicate mask position");
  }
}

std::string MidbandMask::str() const {
  // Emit the compact zigzag form when the mask is a contiguous zigzag run.
  const auto& zz = zigzag_order();
  for (int first = 1; first < 64; ++first) {
    const int last = first + length() - 1;
    if (last > 63) break;
    bool match = true;
    for (int i = 0; i < length(); ++i)
      if (positions_[static_cast<std::size_t>(i)] != zz[first + i]) {
        match = false;
        break;
      }
    if (match)
      return "zigzag:" + std::to_string(first) + "-" + std::to_string(last);
  }
  std::ostringstream out;
  out << "pos:";
  for (std::size_t i = 0; i < positions_.size(); ++i) {
    if (i) out << ";";
    out << positions_[i].first << "," << positions_[i].second;
  }
  return out.str();
}

MidbandMask midband_mask() { return midband_mask(9, 30); }

MidbandMask midband_mask(int zigzag_first, int zigzag_last) {
  if (zigzag_first < 1 || zigzag_last > 63 || zigzag_first > zigzag_last)
    throw InvalidMask("zigzag band must lie within 1..63");
  const auto& zz = zigzag_order();
  std::vector<std::pair<int, int>> positions(
      zz.begin() + zigzag_first, zz.begin() + zigzag_last + 1);
  return MidbandMask(std::move(positions));
}

MidbandMask parse_mask(const std::string& text) {
  if (text.rfind("zigzag:", 0) == 0) {
    const std::string body = text.substr(7);
    const auto dash = body.find('-');
    if (dash == std::string::npos)
      throw InvalidMask("expected zigzag:<first>-<last>: " + text);
    try {
      const int first = std::stoi(body.substr(0, dash));
      const int last = std::stoi(body.substr(dash + 1));
      return midband_mask(first, last);
    } catch (const std::logic_error&) {
      throw InvalidMask("bad zigzag bounds: " + text);
    }
  }
  if (text.rfind("pos:", 0) == 0) {
    std::vector<std::pair<int, int>> positions;
    std::istringstream body(text.substr(4));
    std::string item;
    while (std::getline(body, item, ';')) {
      const auto comma = item.find(',');
      if (comma == std::string::npos)
        throw InvalidMask("expected r,c pairs: " + text);
      try {
        positions.emplace_back(std::stoi(item.substr(0, comma)),
                               std::stoi(item.substr(comma + 1)));
      } catch (const std::logic_error&) {
        throw InvalidMask("bad position: " + item);
      }
    }
    return MidbandMask(std::move(positions));
  }
  throw InvalidMask("unrecognized mask syntax: " + text);
}

}  // namespace wmark::spectral
