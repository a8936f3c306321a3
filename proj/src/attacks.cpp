#include "wmark/attacks.hpp"

#include <jpeglib.h>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <memory>
#include <sstream>
#include <system_error>

namespace wmark::attacks {

namespace {

// Counter-based generator: every draw is a pure function of (seed, index),
// so results do not depend on evaluation order, threading, or platform.
// The finalizer is the SplitMix64 output stage.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::uint64_t draw_at(std::uint64_t seed, std::uint64_t index) {
  return mix64(seed + (index + 1) * 0x9E3779B97F4A7C15ull);
}

// Uniform in (0, 1): midpoints of 2^53 equal cells, never exactly 0 or 1,
// so Box-Muller's logarithm stays finite.
double uniform_open(std::uint64_t seed, std::uint64_t index) {
  return (static_cast<double>(draw_at(seed, index) >> 11) + 0.5) * 0x1.0p-53;
}

double round_half_away(double v) { return std::round(v); }

std::uint8_t quantize(double v) {
  return static_cast<std::uint8_t>(
      std::min(255.0, std::max(0.0, round_half_away(v))));
}

// Half-sample symmetric reflection of an out-of-range index; a single fold
// suffices because kernel radius (<= 4) never exceeds the 8-pixel minimum
// image side.
Eigen::Index reflect(Eigen::Index i, Eigen::Index n) {
  if (i < 0) return -i - 1;
  if (i >= n) return 2 * n - 1 - i;
  return i;
}

struct JpegErrorTrap {
  jpeg_error_mgr mgr;
  std::jmp_buf env;
  char message[JMSG_LENGTH_MAX];
};

void jpeg_error_exit(j_common_ptr cinfo) {
  auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
  (*cinfo->err->format_message)(cinfo, trap->message);
  std::longjmp(trap->env, 1);
}

int max_depth(const AttackSpec& spec) {
  if (const auto* comp = std::get_if<Composite>(&spec)) {
    int deepest = 0;
    for (const auto& step : comp->steps)
      deepest = std::max(deepest, max_depth(step));
    return 1 + deepest;
  }
  return 1;
}

std::string format_double(double v) {
  std::array<char, 64> buf;
  const auto res =
      std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

double parse_double(const std::string& text, const std::string& context) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::logic_error&) {
    throw InvalidSpec("bad number '" + text + "' in attack '" + context +
                      "'");
  }
}

std::uint64_t parse_u64(const std::string& text, const std::string& context) {
  std::uint64_t v = 0;
  const auto res =
      std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw InvalidSpec("bad seed '" + text + "' in attack '" + context + "'");
  return v;
}

AttackSpec parse_step(const std::string& step) {
  const auto colon = step.find(':');
  const std::string name = step.substr(0, colon);
  std::vector<std::pair<std::string, std::string>> kv;
  if (colon != std::string::npos) {
    std::istringstream args(step.substr(colon + 1));
    std::string item;
    while (std::getline(args, item, ',')) {
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0)
        throw InvalidSpec("expected key=value in attack '" + step + "'");
      kv.emplace_back(item.substr(0, eq), item.substr(eq + 1));
    }
  }
  auto reject_unknown = [&](std::initializer_list<const char*> known) {
    for (const auto& [k, v] : kv)
      if (std::find_if(known.begin(), known.end(), [&](const char* ok) {
            return k == ok;
          }) == known.end())
        throw InvalidSpec("unknown parameter '" + k + "' in attack '" + step +
                          "'");
  };
  auto lookup = [&](const char* k) -> const std::string* {
    for (const auto& [key, value] : kv)
      if (key == k) return &value;
    return nullptr;
  };
  auto require = [&](const char* k) -> const std::string& {
    const std::string* v = lookup(k);
    if (!v)
      throw InvalidSpec(std::string("attack '") + step + "' needs " + k +
                        "=...");
    return *v;
  };

  if (name == "jpeg") {
    reject_unknown({"q"});
    double q = parse_double(require("q"), step);
    if (q != std::floor(q) || q < 1 || q > 100)
      throw InvalidSpec("jpeg quality must be an integer in 1..100");
    return JpegCompress{static_cast<int>(q)};
  }
  if (name == "gauss-noise") {
    reject_unknown({"var", "mean", "seed"});
    GaussianNoise n;
    n.variance = parse_double(require("var"), step);
    if (const auto* m = lookup("mean")) n.mean = parse_double(*m, step);
    if (const auto* s = lookup("seed")) n.seed = parse_u64(*s, step);
    if (n.variance < 0.0 || n.variance > 1.0)
      throw InvalidSpec("gauss-noise variance must lie in [0, 1]");
    if (n.mean < 0.0 || n.mean > 1.0)
      throw InvalidSpec("gauss-noise mean must lie in [0, 1]");
    return n;
  }
  if (name == "sp") {
    reject_unknown({"d", "seed"});
    SaltPepper s;
    s.density = parse_double(require("d"), step);
    if (const auto* sd = lookup("seed")) s.seed = parse_u64(*sd, step);
    if (s.density < 0.0 || s.density > 1.0)
      throw InvalidSpec("salt & pepper density must lie in [0, 1]");
    return s;
  }
  if (name == "gauss-filter") {
    reject_unknown({"w", "sigma"});
    const double w = parse_double(require("w"), step);
    const double sigma = parse_double(require("sigma"), step);
    if (w != 3 && w != 5 && w != 7 && w != 9)
      throw InvalidSpec("gauss-filter window must be 3, 5, 7, or 9");
    if (!(sigma > 0.0))
      throw InvalidSpec("gauss-filter sigma must be positive");
    return GaussianFilter{static_cast<int>(w), sigma};
  }
  if (name == "histeq") {
    reject_unknown({});
    return HistEq{};
  }
  throw InvalidSpec("unknown attack '" + name + "'");
}

}  // namespace

GrayImage jpeg_compress(const GrayImage& image, int quality) {
  if (quality < 1 || quality > 100)
    throw InvalidSpec("jpeg quality must lie in 1..100, got " +
                      std::to_string(quality));

  // Heap holders: locals changed between setjmp and longjmp would be
  // indeterminate afterwards, heap contents reached through an unchanged
  // pointer are not.
  struct MemBuf {
    unsigned char* data = nullptr;
    unsigned long size = 0;
    ~MemBuf() { std::free(data); }
  };
  const auto buf = std::make_unique<MemBuf>();
  const auto trap = std::make_unique<JpegErrorTrap>();

  {
    jpeg_compress_struct enc;
    enc.err = jpeg_std_error(&trap->mgr);
    trap->mgr.error_exit = jpeg_error_exit;
    if (setjmp(trap->env)) {
      jpeg_destroy_compress(&enc);
      throw CodecFailure(std::string("jpeg encode: ") + trap->message);
    }
    jpeg_create_compress(&enc);
    jpeg_mem_dest(&enc, &buf->data, &buf->size);
    enc.image_width = static_cast<JDIMENSION>(image.width());
    enc.image_height = static_cast<JDIMENSION>(image.height());
    enc.input_components = 1;
    enc.in_color_space = JCS_GRAYSCALE;
    jpeg_set_defaults(&enc);
    jpeg_set_quality(&enc, quality, TRUE /* force baseline */);
    jpeg_start_compress(&enc, TRUE);
    const std::uint8_t* pixels = image.pixels().data();
    while (enc.next_scanline < enc.image_height) {
      JSAMPROW row = const_cast<JSAMPROW>(
          pixels + static_cast<std::size_t>(enc.next_scanline) *
                       static_cast<std::size_t>(image.width()));
      jpeg_write_scanlines(&enc, &row, 1);
    }
    jpeg_finish_compress(&enc);
    jpeg_destroy_compress(&enc);
  }

  const auto decoded = std::make_unique<PixelArray>();
  {
    jpeg_decompress_struct dec;
    dec.err = jpeg_std_error(&trap->mgr);
    trap->mgr.error_exit = jpeg_error_exit;
    if (setjmp(trap->env)) {
      jpeg_destroy_decompress(&dec);
      throw CodecFailure(std::string("jpeg decode: ") + trap->message);
    }
    jpeg_create_decompress(&dec);
    jpeg_mem_src(&dec, buf->data, buf->size);
    jpeg_read_header(&dec, TRUE);
    dec.out_color_space = JCS_GRAYSCALE;
    jpeg_start_decompress(&dec);
    decoded->resize(dec.output_height, dec.output_width);
    while (dec.output_scanline < dec.output_height) {
      JSAMPROW row = decoded->data() +
                     static_cast<std::size_t>(dec.output_scanline) *
                         static_cast<std::size_t>(dec.output_width);
      jpeg_read_scanlines(&dec, &row, 1);
    }
    jpeg_finish_decompress(&dec);
    jpeg_destroy_decompress(&dec);
  }

  if (decoded->rows() != image.height() || decoded->cols() != image.width())
    throw CodecFailure("jpeg round trip changed dimensions");
  return GrayImage(std::move(*decoded));
}

GrayImage gaussian_noise(const GrayImage& image, double mean, double variance,
                         std::uint64_t seed) {
  if (variance < 0.0 || variance > 1.0)
    throw InvalidSpec("gauss-noise variance must lie in [0, 1]");
  if (mean < 0.0 || mean > 1.0)
    throw InvalidSpec("gauss-noise mean must lie in [0, 1]");
  const double sigma = std::sqrt(variance) * 255.0;
  const double offset = mean * 255.0;
  PixelArray out(image.height(), image.width());
  const std::uint8_t* src = image.pixels().data();
  std::uint8_t* dst = out.data();
  const std::uint64_t count = static_cast<std::uint64_t>(image.pixels().size());
  for (std::uint64_t i = 0; i < count; ++i) {
    const double u1 = uniform_open(seed, 2 * i);
    const double u2 = uniform_open(seed, 2 * i + 1);
    const double z =
        std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    dst[i] = quantize(static_cast<double>(src[i]) + offset + sigma * z);
  }
  return GrayImage(std::move(out));
}

GrayImage salt_pepper(const GrayImage& image, double density,
                      std::uint64_t seed) {
  if (density < 0.0 || density > 1.0)
    throw InvalidSpec("salt & pepper density must lie in [0, 1]");
  PixelArray out = image.pixels();
  std::uint8_t* dst = out.data();
  const std::uint64_t count = static_cast<std::uint64_t>(out.size());
  for (std::uint64_t i = 0; i < count; ++i) {
    if (uniform_open(seed, 2 * i) < density)
      dst[i] = draw_at(seed, 2 * i + 1) & 1 ? 255 : 0;
  }
  return GrayImage(std::move(out));
}

GrayImage gaussian_filter(const GrayImage& image, int window, double sigma) {
  if (window != 3 && window != 5 && window != 7 && window != 9)
    throw InvalidSpec("gauss-filter window must be 3, 5, 7, or 9");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw InvalidSpec("gauss-filter sigma must be positive");
  const int radius = window / 2;
  Eigen::VectorXd kernel(window);
  for (int t = -radius; t <= radius; ++t)
    kernel(t + radius) = std::exp(-0.5 * (t / sigma) * (t / sigma));
  kernel /= kernel.sum();

  const Eigen::Index h = image.height(), w = image.width();
  Plane horizontal(h, w);
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += kernel(t + radius) *
               static_cast<double>(image.pixels()(r, reflect(c + t, w)));
      horizontal(r, c) = acc;
    }
  PixelArray out(h, w);
  for (Eigen::Index r = 0; r < h; ++r)
    for (Eigen::Index c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += kernel(t + radius) * horizontal(reflect(r + t, h), c);
      out(r, c) = quantize(acc);
    }
  return GrayImage(std::move(out));
}

GrayImage hist_eq(const GrayImage& image) {
  std::array<std::int64_t, 256> count{};
  const std::uint8_t* src = image.pixels().data();
  const std::int64_t n = image.pixels().size();
  for (std::int64_t i = 0; i < n; ++i) ++count[src[i]];

  std::array<std::int64_t, 256> cdf{};
  std::int64_t running = 0;
  std::int64_t cdf_min = 0;
  for (int v = 0; v < 256; ++v) {
    running += count[v];
    cdf[v] = running;
    if (cdf_min == 0 && count[v] > 0) cdf_min = cdf[v];
  }
  if (cdf_min == n) return image;  // single gray level: map is undefined

  std::array<std::uint8_t, 256> map{};
  for (int v = 0; v < 256; ++v) {
    const double scaled = 255.0 * static_cast<double>(cdf[v] - cdf_min) /
                          static_cast<double>(n - cdf_min);
    map[v] = quantize(scaled);
  }
  PixelArray out(image.height(), image.width());
  std::uint8_t* dst = out.data();
  for (std::int64_t i = 0; i < n; ++i) dst[i] = map[src[i]];
  return GrayImage(std::move(out));
}

GrayImage apply_attack(const GrayImage& image, const AttackSpec& spec) {
  if (max_depth(spec) > 4)
    throw InvalidSpec("composite attacks may nest at most 4 deep");
  return std::visit(
      [&](const auto& a) -> GrayImage {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, JpegCompress>)
          return jpeg_compress(image, a.quality);
        else if constexpr (std::is_same_v<T, GaussianNoise>)
          return gaussian_noise(image, a.mean, a.variance, a.seed);
        else if constexpr (std::is_same_v<T, SaltPepper>)
          return salt_pepper(image, a.density, a.seed);
        else if constexpr (std::is_same_v<T, GaussianFilter>)
          return gaussian_filter(image, a.window, a.sigma);
        else if constexpr (std::is_same_v<T, HistEq>)
          return hist_eq(image);
        else {
          if (a.steps.empty())
            throw InvalidSpec("composite attack must have at least one step");
          GrayImage current = image;
          for (const auto& step : a.steps)
            current = apply_attack(current, step);
          return current;
        }
      },
      spec);
}

AttackSpec parse_attack(const std::string& text) {
  if (text.empty()) throw InvalidSpec("empty attack spec");
  std::vector<std::string> steps;
  std::size_t start = 0;
  while (true) {
    const auto plus = text.find('+', start);
    steps.push_back(text.substr(start, plus - start));
    if (plus == std::string::npos) break;
    start = plus + 1;
  }
  if (steps.size() == 1) return parse_step(steps[0]);
  Composite comp;
  for (const auto& step : steps) {
    if (step.empty()) throw InvalidSpec("empty step in '" + text + "'");
    comp.steps.push_back(parse_step(step));
  }
  return comp;
}

std::string format_attack(const AttackSpec& spec) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, JpegCompress>)
          return "jpeg:q=" + std::to_string(a.quality);
        else if constexpr (std::is_same_v<T, GaussianNoise>) {
          std::string out = "gauss-noise:var=" + format_double(a.variance);
          if (a.mean != 0.0) out += ",mean=" + format_double(a.mean);
          if (a.seed != 0) out += ",seed=" + std::to_string(a.seed);
          return out;
        } else if constexpr (std::is_same_v<T, SaltPepper>) {
          std::string out = "sp:d=" + format_double(a.density);
          if (a.seed != 0) out += ",seed=" + std::to_string(a.seed);
          return out;
        } else if constexpr (std::is_same_v<T, GaussianFilter>)
          return "gauss-filter:w=" + std::to_string(a.window) +
                 ",sigma=" + format_double(a.sigma);
        else if constexpr (std::is_same_v<T, HistEq>)
          return "histeq";
        else {
          std::string out;
          for (std::size_t i = 0; i < a.steps.size(); ++i) {
            if (i) out += "+";
            out += format_attack(a.steps[i]);
          }
          return out;
        }
      },
      spec);
}

std::uint64_t attack_seed(const AttackSpec& spec) {
  return std::visit(
      [](const auto& a) -> std::uint64_t {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, GaussianNoise>)
          return a.seed;
        else if constexpr (std::is_same_v<T, SaltPepper>)
          return a.seed;
        else if constexpr (std::is_same_v<T, Composite>) {
          for (const auto& step : a.steps)
            if (const std::uint64_t s = attack_seed(step)) return s;
          return 0;
        } else
          return 0;
      },
      spec);
}

}  // namespace wmark::attacks
