#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "test_support.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
  int exit_code;
  std::string output;  // stdout and stderr combined
};

RunResult run_cli(const std::string& args) {
  const fs::path out_path =
      fs::temp_directory_path() / "wmark_cli_test_output.txt";
  const std::string command = std::string(WMARK_CLI_PATH) + " " + args +
                              " > " + out_path.string() + " 2>&1";
  const int status = std::system(command.c_str());
  std::ifstream in(out_path);
  std::string output(std::istreambuf_iterator<char>(in),
                     std::istreambuf_iterator<char>{});
  int code = -1;
  if (WIFEXITED(status)) code = WEXITSTATUS(status);
  return {code, output};
}

std::string value_of(const std::string& output, const std::string& key) {
  std::istringstream lines(output);
  std::string line;
  while (std::getline(lines, line))
    if (line.rfind(key + "=", 0) == 0) return line.substr(key.size() + 1);
  return "";
}

fs::path tmp(const std::string& name) {
  return fs::temp_directory_path() / ("wmark_cli_" + name);
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

const std::string kHost = q(wmark_test::fixture_host("camera"));
const std::string kLogo = q(wmark_test::asset("logo_19x52.pbm"));
const std::string kConfig = q(wmark_test::source_dir() / "configs" /
                              "default.json");

}  // namespace

TEST_CASE("cli without arguments is a usage error") {
  const auto result = run_cli("");
  CHECK(result.exit_code == 2);
}

TEST_CASE("cli help exits zero") {
  const auto result = run_cli("--help");
  CHECK(result.exit_code == 0);
  CHECK(result.output.find("embed") != std::string::npos);
  CHECK(result.output.find("bench") != std::string::npos);
}

TEST_CASE("embed then extract through the cli round trips") {
  const fs::path marked = tmp("marked.pgm");
  const fs::path recovered = tmp("recovered.pbm");

  const auto embed = run_cli("embed --host " + kHost + " --wm " + kLogo +
                             " --key cli-test --config " + kConfig + " --out " +
                             q(marked));
  REQUIRE(embed.exit_code == 0);
  CHECK(value_of(embed.output, "bits_embedded") == "988");
  CHECK(!value_of(embed.output, "psnr_db").empty());

  const auto extract = run_cli(
      "extract --in " + q(marked) + " --wm-width 52 --wm-height 19 --key "
      "cli-test --config " + kConfig + " --out " + q(recovered) +
      " --reference " + kLogo);
  REQUIRE(extract.exit_code == 0);
  CHECK(value_of(extract.output, "nc") == "1.000000");
  CHECK(value_of(extract.output, "ber") == "0.000000");
  CHECK(fs::exists(recovered));
}

TEST_CASE("extract with the wrong key misses") {
  const fs::path marked = tmp("marked_wrongkey.pgm");
  const auto embed = run_cli("embed --host " + kHost + " --wm " + kLogo +
                             " --key right-key --config " + kConfig +
                             " --out " + q(marked));
  REQUIRE(embed.exit_code == 0);
  const auto extract = run_cli(
      "extract --in " + q(marked) + " --wm-width 52 --wm-height 19 --key "
      "wrong-key --config " + kConfig + " --reference " + kLogo);
  REQUIRE(extract.exit_code == 0);
  const double error_rate = std::stod(value_of(extract.output, "ber"));
  CHECK(error_rate > 0.3);
  CHECK(error_rate < 0.7);
}

TEST_CASE("embed without any gain source fails cleanly") {
  const auto result = run_cli("embed --host " + kHost + " --wm " + kLogo +
                              " --key k --config /nonexistent.json --out " +
                              q(tmp("x.pgm")));
  CHECK(result.exit_code == 1);  // FileNotFound for the config
}

TEST_CASE("missing key is a usage error") {
  const auto result = run_cli("embed --host " + kHost + " --wm " + kLogo +
                              " --gain 100 --out " + q(tmp("y.pgm")));
  CHECK(result.exit_code == 2);
}

TEST_CASE("attack subcommand applies and reports") {
  const fs::path out = tmp("attacked.pgm");
  const auto result =
      run_cli("attack --in " + kHost + " --spec jpeg:q=75 --out " + q(out));
  REQUIRE(result.exit_code == 0);
  CHECK(value_of(result.output, "attack") == "jpeg:q=75");
  const double psnr = std::stod(value_of(result.output, "psnr_db"));
  CHECK(psnr > 20.0);
  CHECK(psnr < 60.0);
  CHECK(fs::exists(out));
}

TEST_CASE("malformed attack spec is a usage error") {
  const auto result = run_cli("attack --in " + kHost +
                              " --spec melt:t=9000 --out " + q(tmp("z.pgm")));
  CHECK(result.exit_code == 2);
}

TEST_CASE("metrics subcommand compares images and watermarks") {
  const auto self = run_cli("metrics --a " + kHost + " --b " + kHost);
  REQUIRE(self.exit_code == 0);
  CHECK(value_of(self.output, "mse") == "0.000000");
  CHECK(value_of(self.output, "psnr_db") == "inf");

  const auto marks = run_cli("metrics --wa " + kLogo + " --wb " + kLogo);
  REQUIRE(marks.exit_code == 0);
  CHECK(value_of(marks.output, "nc") == "1.000000");
  CHECK(value_of(marks.output, "ber") == "0.000000");

  const auto nothing = run_cli("metrics");
  CHECK(nothing.exit_code == 2);
}

TEST_CASE("calibrate rejects an impossible target") {
  const auto result = run_cli("calibrate --host " + kHost + " --wm " + kLogo +
                              " --key k --target-db 200");
  CHECK(result.exit_code == 1);
  CHECK(result.output.find("[30, 80]") != std::string::npos);
}

TEST_CASE("bench via flags writes identical reports on repeat runs") {
  const fs::path report_a = tmp("report_a.csv");
  const fs::path report_b = tmp("report_b.csv");
  const std::string base =
      "bench --images " + kHost + " --payloads " + kLogo +
      " --key bench-key --config " + kConfig +
      " --attacks histeq --seed 5 --format csv --out ";
  const auto first = run_cli(base + q(report_a));
  REQUIRE(first.exit_code == 0);
  CHECK(value_of(first.output, "rows") == "2");
  const auto second = run_cli(base + q(report_b));
  REQUIRE(second.exit_code == 0);

  std::ifstream a(report_a, std::ios::binary), b(report_b, std::ios::binary);
  const std::string bytes_a(std::istreambuf_iterator<char>(a),
                            std::istreambuf_iterator<char>{});
  const std::string bytes_b(std::istreambuf_iterator<char>(b),
                            std::istreambuf_iterator<char>{});
  CHECK(bytes_a == bytes_b);
  CHECK(bytes_a.find("histeq") != std::string::npos);
}

TEST_CASE("fetch-fixtures verifies the bundled hosts") {
  const std::string manifest =
      q(wmark_test::source_dir() / "assets" / "fixtures.json");
  const std::string dir =
      q(wmark_test::source_dir() / "tests" / "fixtures" / "hosts");
  const auto result =
      run_cli("fetch-fixtures --manifest " + manifest + " --dir " + dir);
  REQUIRE(result.exit_code == 0);
  CHECK(result.output.find("fixture=camera.pgm status=ok") !=
        std::string::npos);
  CHECK(result.output.find("hash-mismatch") == std::string::npos);
}
