#include "wmark/bench.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

namespace wmark::bench {

namespace {

using nlohmann::json;

// Everything numeric is rounded to six decimals before serialization so
// the CSV and JSON writers show the same values.
double round6(double v) {
  if (!std::isfinite(v)) return v;
  return std::round(v * 1e6) / 1e6;
}

std::string csv_double(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

std::string csv_escape(const std::string& text) {
  if (text.find_first_of(",\"\n") == std::string::npos) return text;
  std::string out = "\"";
  for (const char ch : text) {
    if (ch == '"') out += "\"\"";
    else out += ch;
  }
  out += "\"";
  return out;
}

json json_double(double v) {
  if (std::isfinite(v)) return round6(v);
  return nullptr;
}

std::string fingerprint_salt() {
  const char* salt = std::getenv("WMARK_FINGERPRINT_SALT");
  return salt ? salt : "";
}

std::string stem_of(const std::filesystem::path& path) {
  return path.stem().string();
}

}  // namespace

std::vector<attacks::AttackSpec> paper_preset(std::uint64_t seed) {
  using namespace attacks;
  std::vector<AttackSpec> list;
  for (int q = 60; q <= 90; q += 5) list.push_back(JpegCompress{q});
  list.push_back(GaussianNoise{0.0, 0.001, seed});
  for (const double d : {0.01, 0.02, 0.04, 0.06})
    list.push_back(SaltPepper{d, seed});
  for (const int w : {3, 5, 7, 9}) list.push_back(GaussianFilter{w, 0.5});
  list.push_back(HistEq{});
  list.push_back(
      Composite{{HistEq{}, GaussianNoise{0.0, 0.001, seed}}});
  return list;
}

std::vector<std::filesystem::path> resolve_images(
    const std::vector<std::string>& tokens,
    const std::optional<std::filesystem::path>& fixture_dir) {
  std::filesystem::path dir;
  if (fixture_dir) {
    dir = *fixture_dir;
  } else if (const char* env = std::getenv("WMARK_FIXTURE_DIR")) {
    dir = env;
  } else {
    dir = std::filesystem::path("tests") / "fixtures" / "hosts";
  }
  std::vector<std::filesystem::path> out;
  for (const auto& token : tokens) {
    if (token == "5std") {
      for (const char* name :
           {"camera", "moon", "brick", "grass", "gravel"})
        out.push_back(dir / (std::string(name) + ".pgm"));
    } else {
      out.emplace_back(token);
    }
  }
  return out;
}

std::vector<BenchRow> run_bench(const BenchConfig& config) {
  if (config.gain.has_value() == config.calibrate.has_value())
    throw InvalidSpec("set exactly one of fixed gain or calibration target");
  const std::string fingerprint = config.key.fingerprint(fingerprint_salt());

  std::vector<BenchRow> rows;
  auto push_error_row = [&](const std::string& image_id,
                            const std::string& payload_id,
                            const std::string& attack_text,
                            std::uint64_t seed, double gain,
                            const std::string& message) {
    const double nan = std::nan("");
    rows.push_back(BenchRow{
        metrics::EvalReport{image_id, payload_id, attack_text, nan, nan, nan,
                            nan},
        gain, fingerprint, seed, message});
  };

  for (const auto& image_path : config.images) {
    const std::string image_id = stem_of(image_path);
    for (const auto& payload_path : config.payloads) {
      const std::string payload_id = stem_of(payload_path);

      GrayImage host = GrayImage(PixelArray::Zero(8, 8));
      WatermarkBits payload = WatermarkBits(PixelArray::Ones(1, 1));
      codec::EmbedParams params = config.params;
      std::optional<codec::EmbedOutcome> outcome;
      std::string embed_error;
      try {
        host = load_image(image_path);
        payload = load_watermark(payload_path);
        if (config.calibrate)
          params.gain = codec::calibrate_gain(host, payload, config.key,
                                              config.calibrate->target_psnr_db,
                                              params);
        else
          params.gain = *config.gain;
        outcome = codec::embed(host, payload, config.key, params);
      } catch (const Error& e) {
        embed_error = e.what();
      }

      if (!outcome) {
        push_error_row(image_id, payload_id, "none", 0, params.gain,
                       embed_error);
        for (const auto& attack : config.attack_list)
          push_error_row(image_id, payload_id, attacks::format_attack(attack),
                         attacks::attack_seed(attack), params.gain,
                         "embed failed: " + embed_error);
        continue;
      }

      try {
        const WatermarkBits back =
            codec::extract(outcome->image, payload.width(), payload.height(),
                           config.key, params);
        rows.push_back(BenchRow{
            metrics::EvalReport{
                image_id, payload_id, "none", outcome->psnr_db,
                metrics::psnr(outcome->image, outcome->image),
                metrics::nc(payload, back), metrics::ber(payload, back)},
            params.gain, fingerprint, 0, ""});
      } catch (const Error& e) {
        push_error_row(image_id, payload_id, "none", 0, params.gain,
                       e.what());
      }

      for (const auto& attack : config.attack_list) {
        const std::string attack_text = attacks::format_attack(attack);
        const std::uint64_t seed = attacks::attack_seed(attack);
        try {
          const GrayImage attacked =
              attacks::apply_attack(outcome->image, attack);
          const WatermarkBits back =
              codec::extract(attacked, payload.width(), payload.height(),
                             config.key, params);
          rows.push_back(BenchRow{
              metrics::EvalReport{
                  image_id, payload_id, attack_text,
                  metrics::psnr(host, attacked),
                  metrics::psnr(outcome->image, attacked),
                  metrics::nc(payload, back), metrics::ber(payload, back)},
              params.gain, fingerprint, seed, ""});
        } catch (const Error& e) {
          push_error_row(image_id, payload_id, attack_text, seed, params.gain,
                         e.what());
        }
      }
    }
  }

  std::sort(rows.begin(), rows.end(), [](const BenchRow& a, const BenchRow& b) {
    return std::tie(a.report.image_id, a.report.payload_id, a.report.attack) <
           std::tie(b.report.image_id, b.report.payload_id, b.report.attack);
  });
  return rows;
}

void write_csv(std::ostream& out, const std::vector<BenchRow>& rows) {
  out << "image_id,payload_id,attack_spec,psnr_host_db,psnr_watermarked_db,"
         "nc,ber,gain,key_fingerprint,seed,error\n";
  for (const auto& row : rows) {
    out << csv_escape(row.report.image_id) << ','
        << csv_escape(row.report.payload_id) << ','
        << csv_escape(row.report.attack) << ','
        << csv_double(round6(row.report.psnr_vs_host_db)) << ','
        << csv_double(round6(row.report.psnr_vs_watermarked_db)) << ','
        << csv_double(round6(row.report.nc)) << ','
        << csv_double(round6(row.report.ber)) << ','
        << csv_double(round6(row.gain)) << ','
        << row.key_fingerprint << ','
        << row.seed << ','
        << csv_escape(row.error) << '\n';
  }
}

void write_json(std::ostream& out, const std::vector<BenchRow>& rows) {
  json doc = json::array();
  for (const auto& row : rows) {
    json r{
        {"image_id", row.report.image_id},
        {"payload_id", row.report.payload_id},
        {"attack_spec", row.report.attack},
        {"psnr_host_db", json_double(row.report.psnr_vs_host_db)},
        {"psnr_watermarked_db", json_double(row.report.psnr_vs_watermarked_db)},
        {"nc", json_double(row.report.nc)},
        {"ber", json_double(row.report.ber)},
        {"gain", json_double(row.gain)},
        {"key_fingerprint", row.key_fingerprint},
        {"seed", row.seed},
        {"error", row.error},
    };
    if (std::isinf(row.report.psnr_vs_host_db))
      r["psnr_host_infinite"] = true;
    if (std::isinf(row.report.psnr_vs_watermarked_db))
      r["psnr_watermarked_infinite"] = true;
    doc.push_back(std::move(r));
  }
  out << doc.dump(2) << '\n';
}

BenchConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw FileNotFound("cannot open config: " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::parse_error& e) {
    throw InvalidSpec("config is not valid JSON: " + std::string(e.what()));
  }
  static const std::set<std::string> known{
      "images",  "payloads", "key",  "gain",       "params",
      "attacks", "seed",     "format", "fixture_dir"};
  for (const auto& [k, v] : doc.items())
    if (!known.count(k)) throw InvalidSpec("unknown config key '" + k + "'");

  BenchConfig config;
  try {
    std::optional<std::filesystem::path> fixture_dir;
    if (doc.contains("fixture_dir"))
      fixture_dir = std::filesystem::path(doc["fixture_dir"].get<std::string>());
    config.images = resolve_images(
        doc.at("images").get<std::vector<std::string>>(), fixture_dir);
    for (const auto& p : doc.at("payloads").get<std::vector<std::string>>())
      config.payloads.emplace_back(p);

    const json& key = doc.at("key");
    if (key.contains("passphrase"))
      config.key =
          keying::SecretKey::from_passphrase(key["passphrase"].get<std::string>());
    else if (key.contains("hex"))
      config.key = keying::SecretKey::from_hex(key["hex"].get<std::string>());
    else
      throw InvalidSpec("key needs 'passphrase' or 'hex'");

    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();

    const json& gain = doc.at("gain");
    if (gain.is_number()) {
      config.gain = gain.get<double>();
    } else {
      const std::string text = gain.get<std::string>();
      if (text.rfind("calibrate:", 0) != 0)
        throw InvalidSpec("gain must be a number or 'calibrate:<db>'");
      config.calibrate =
          CalibrateGain{std::stod(text.substr(std::strlen("calibrate:")))};
    }

    if (doc.contains("params")) {
      const json& params = doc["params"];
      static const std::set<std::string> known_params{
          "mask", "layout", "assignment", "block_offset"};
      for (const auto& [k, v] : params.items())
        if (!known_params.count(k))
          throw InvalidSpec("unknown params key '" + k + "'");
      if (params.contains("mask"))
        config.params.mask =
            spectral::parse_mask(params["mask"].get<std::string>());
      if (params.contains("layout"))
        config.params.layout =
            codec::parse_layout(params["layout"].get<std::string>());
      if (params.contains("assignment"))
        config.params.assignment =
            codec::parse_assignment(params["assignment"].get<std::string>());
      if (params.contains("block_offset"))
        config.params.block_offset =
            params["block_offset"].get<std::int64_t>();
    }

    const json& attacks_val = doc.at("attacks");
    if (attacks_val.is_string()) {
      const std::string text = attacks_val.get<std::string>();
      if (text != "preset:paper")
        throw InvalidSpec("attacks must be a list or 'preset:paper'");
      config.attack_list = paper_preset(config.seed);
    } else {
      for (const auto& a : attacks_val.get<std::vector<std::string>>())
        config.attack_list.push_back(attacks::parse_attack(a));
    }

    if (doc.contains("format")) {
      config.format = doc["format"].get<std::string>();
      if (config.format != "csv" && config.format != "json")
        throw InvalidSpec("format must be 'csv' or 'json'");
    }
  } catch (const json::exception& e) {
    throw InvalidSpec("bad config value: " + std::string(e.what()));
  }
  return config;
}

}  // namespace wmark::bench
