#include "wmark/image.hpp"

#include <png.h>

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace wmark {

namespace {

// Reads the next header token of a netpbm file, skipping whitespace and
// '#' comments that run to end of line.
std::string next_token(std::istream& in) {
  std::string tok;
  int ch;
  while ((ch = in.get()) != EOF) {
    if (ch == '#') {
      while ((ch = in.get()) != EOF && ch != '\n') {
      }
      continue;
    }
    if (std::isspace(ch)) {
      if (!tok.empty()) break;
      continue;
    }
    tok.push_back(static_cast<char>(ch));
  }
  return tok;
}

int parse_dim(const std::string& tok, const char* what) {
  if (tok.empty() || tok.find_first_not_of("0123456789") != std::string::npos)
    throw UnsupportedFormat(std::string("bad netpbm ") + what + ": '" + tok +
                            "'");
  long v = std::stol(tok);
  if (v <= 0 || v > 1 << 20)
    throw UnsupportedFormat(std::string("netpbm ") + what + " out of range");
  return static_cast<int>(v);
}

GrayImage load_pgm(std::istream& in) {
  const int width = parse_dim(next_token(in), "width");
  const int height = parse_dim(next_token(in), "height");
  const std::string maxval = next_token(in);
  if (maxval != "255")
    throw UnsupportedFormat("PGM maxval must be 255, got " + maxval);
  // next_token consumed exactly one whitespace byte after the maxval,
  // so raw pixel data starts here.
  PixelArray pixels(height, width);
  in.read(reinterpret_cast<char*>(pixels.data()),
          static_cast<std::streamsize>(pixels.size()));
  if (in.gcount() != static_cast<std::streamsize>(pixels.size()))
    throw IoError("PGM pixel data truncated");
  return GrayImage(std::move(pixels));
}

PixelArray load_pbm(std::istream& in) {
  const int width = parse_dim(next_token(in), "width");
  const int height = parse_dim(next_token(in), "height");
  const int row_bytes = (width + 7) / 8;
  std::vector<std::uint8_t> packed(
      static_cast<std::size_t>(row_bytes) * height);
  in.read(reinterpret_cast<char*>(packed.data()),
          static_cast<std::streamsize>(packed.size()));
  if (in.gcount() != static_cast<std::streamsize>(packed.size()))
    throw IoError("PBM bit data truncated");
  PixelArray bits(height, width);
  for (int r = 0; r < height; ++r)
    for (int c = 0; c < width; ++c) {
      const std::uint8_t byte = packed[static_cast<std::size_t>(r) * row_bytes
                                       + c / 8];
      bits(r, c) = (byte >> (7 - c % 8)) & 1;
    }
  return bits;
}

struct PngImageGuard {
  png_image image{};
  ~PngImageGuard() { png_image_free(&image); }
};

GrayImage load_png(const std::filesystem::path& path) {
  PngImageGuard g;
  g.image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&g.image, path.string().c_str()))
    throw UnsupportedFormat(std::string("PNG read failed: ") +
                            g.image.message);
  if (g.image.format & PNG_FORMAT_FLAG_COLOR)
    throw NotGrayscale("PNG has color channels: " + path.string());
  if (g.image.format & PNG_FORMAT_FLAG_ALPHA)
    throw NotGrayscale("PNG has an alpha channel: " + path.string());
  if (g.image.format & PNG_FORMAT_FLAG_LINEAR)
    throw UnsupportedFormat("16-bit PNG not supported: " + path.string());
  g.image.format = PNG_FORMAT_GRAY;
  PixelArray pixels(g.image.height, g.image.width);
  if (!png_image_finish_read(&g.image, nullptr, pixels.data(), 0, nullptr))
    throw IoError(std::string("PNG decode failed: ") + g.image.message);
  return GrayImage(std::move(pixels));
}

void save_png(const GrayImage& image, const std::filesystem::path& path) {
  PngImageGuard g;
  g.image.version = PNG_IMAGE_VERSION;
  g.image.width = static_cast<png_uint_32>(image.width());
  g.image.height = static_cast<png_uint_32>(image.height());
  g.image.format = PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&g.image, path.string().c_str(), 0,
                               image.pixels().data(), 0, nullptr))
    throw IoError(std::string("PNG write failed: ") + g.image.message);
}

std::ifstream open_binary(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path))
    throw FileNotFound("no such file: " + path.string());
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path.string());
  return in;
}

std::string sniff_magic(std::istream& in) {
  char m[2] = {0, 0};
  in.read(m, 2);
  if (in.gcount() != 2) throw UnsupportedFormat("file shorter than 2 bytes");
  return std::string(m, 2);
}

bool has_png_extension(const std::filesystem::path& path) {
  auto ext = path.extension().string();
  for (auto& ch : ext) ch = static_cast<char>(std::tolower(ch));
  return ext == ".png";
}

}  // namespace

GrayImage load_image(const std::filesystem::path& path) {
  auto in = open_binary(path);
  const std::string magic = sniff_magic(in);
  if (magic == "P5") return load_pgm(in);
  if (magic == "\x89P") return load_png(path);
  if (magic == "P6" || magic == "P3")
    throw NotGrayscale("color PPM not supported: " + path.string());
  if (magic == "P2")
    throw UnsupportedFormat("ASCII PGM not supported; use binary P5");
  if (magic == "P4")
    throw UnsupportedFormat("PBM is a watermark format; expected PGM or PNG");
  throw UnsupportedFormat("unrecognized image format: " + path.string());
}

void save_image(const GrayImage& image, const std::filesystem::path& path) {
  if (has_png_extension(path)) {
    save_png(image, path);
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + path.string());
  out << "P5\n" << image.width() << " " << image.height() << "\n255\n";
  out.write(reinterpret_cast<const char*>(image.pixels().data()),
            static_cast<std::streamsize>(image.pixels().size()));
  if (!out) throw IoError("short write: " + path.string());
}

WatermarkBits load_watermark(const std::filesystem::path& path) {
  auto in = open_binary(path);
  const std::string magic = sniff_magic(in);
  if (magic == "P4") return WatermarkBits(load_pbm(in));
  in.close();
  // Fall back to any loadable grayscale image, thresholded at 128.
  GrayImage img = load_image(path);
  PixelArray bits =
      (img.pixels() >= static_cast<std::uint8_t>(128)).cast<std::uint8_t>();
  return WatermarkBits(std::move(bits));
}

void save_watermark(const WatermarkBits& bits,
                    const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open for write: " + path.string());
  out << "P4\n" << bits.width() << " " << bits.height() << "\n";
  const int row_bytes = (bits.width() + 7) / 8;
  std::vector<std::uint8_t> row(static_cast<std::size_t>(row_bytes));
  for (int r = 0; r < bits.height(); ++r) {
    std::fill(row.begin(), row.end(), 0);
    for (int c = 0; c < bits.width(); ++c)
      if (bits.bits()(r, c)) row[c / 8] |= std::uint8_t(0x80 >> (c % 8));
    out.write(reinterpret_cast<const char*>(row.data()), row_bytes);
  }
  if (!out) throw IoError("short write: " + path.string());
}

Plane to_plane(const GrayImage& image) {
  return image.pixels().cast<double>();
}

GrayImage from_plane(const Plane& plane) {
  if (!plane.isFinite().all())
    throw NonFiniteValue("plane contains NaN or infinity");
  PixelArray pixels(plane.rows(), plane.cols());
  for (Eigen::Index r = 0; r < plane.rows(); ++r)
    for (Eigen::Index c = 0; c < plane.cols(); ++c) {
      const double v = std::round(plane(r, c));  // halves away from zero
      pixels(r, c) = static_cast<std::uint8_t>(std::min(255.0,
                                                        std::max(0.0, v)));
    }
  return GrayImage(std::move(pixels));
}

}  // namespace wmark
