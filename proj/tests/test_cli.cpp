#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "json.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli_path() {
  const char* p = std::getenv("CRAN_CLI");
  REQUIRE(p != nullptr);
  return p;
}

std::string data_dir() {
  const char* p = std::getenv("CRAN_TEST_DATA");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args, const std::string& env = "") {
  std::string cmd = env + (env.empty() ? "" : " ") + "\"" + cli_path() +
                    "\" " + args + " > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path fresh_dir(const std::string& name) {
  fs::path d = fs::temp_directory_path() / ("cran_cli_test_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

}  // namespace

TEST_CASE("eval-region emits the full constraint set for the scalar instance") {
  fs::path out = fresh_dir("eval");
  int rc = run("eval-region --instance \"" + data_dir() +
               "/scalar_unit.json\" --out \"" + out.string() + "\"");
  REQUIRE(rc == 0);
  std::string jd = slurp(out / "jd_constraints.csv");
  // Header plus (2^1 - 1) * 2^1 = 2 rows.
  REQUIRE(std::count(jd.begin(), jd.end(), '\n') == 3);
  REQUIRE(fs::exists(out / "cutset_constraints.csv"));
  REQUIRE(fs::exists(out / "sd_rate_constraints.csv"));
  REQUIRE(fs::exists(out / "sd_fronthaul_usage.csv"));
  auto summary = nlohmann::json::parse(slurp(out / "summary.json"));
  REQUIRE(summary["units"] == "bits per complex dimension");
  REQUIRE(std::abs(summary["jd_sum_rate"].get<double>() - std::log2(1.5)) <
          1e-9);
  // Timestamps live only in meta.json.
  REQUIRE(slurp(out / "summary.json").find("timestamp") == std::string::npos);
  REQUIRE(slurp(out / "meta.json").find("timestamp_unix_ms") !=
          std::string::npos);
}

TEST_CASE("two-user boundary CSV is monotone") {
  fs::path out = fresh_dir("boundary");
  int rc = run("eval-region --random 2,2,1,1,10,42 --out \"" + out.string() +
               "\"");
  REQUIRE(rc == 0);
  std::ifstream in(out / "boundary.csv");
  REQUIRE(in.good());
  std::string line;
  std::getline(in, line);
  REQUIRE(line == "R1_bits_per_complex_dim,R2_bits_per_complex_dim");
  double prev1 = -1.0, prev2 = 1e300;
  int rows = 0;
  while (std::getline(in, line)) {
    auto comma = line.find(',');
    double r1 = std::stod(line.substr(0, comma));
    double r2 = std::stod(line.substr(comma + 1));
    REQUIRE(r1 >= prev1 - 1e-12);
    REQUIRE(r2 <= prev2 + 1e-12);
    prev1 = r1;
    prev2 = r2;
    ++rows;
  }
  REQUIRE(rows >= 2);
}

TEST_CASE("missing input file maps to exit code 2") {
  fs::path out = fresh_dir("missing");
  int rc = run("eval-region --instance /nonexistent/inst.json --out \"" +
               out.string() + "\"");
  REQUIRE(rc == 2);
}

TEST_CASE("oversized instances map to exit code 3") {
  fs::path out = fresh_dir("cap");
  int rc = run("eval-region --random 7,2,1,1,10,1 --out \"" + out.string() +
               "\"");
  REQUIRE(rc == 3);
}

TEST_CASE("optimize matches the scalar closed-form optimum") {
  fs::path out = fresh_dir("opt");
  int rc = run("optimize --instance \"" + data_dir() +
               "/scalar_unit.json\" --objective sd-sum --trace --out \"" +
               out.string() + "\"");
  REQUIRE(rc == 0);
  auto j = nlohmann::json::parse(slurp(out / "solve_result.json"));
  REQUIRE(j["converged"].get<bool>());
  // Scalar optimum: fronthaul C=2 vs air interface; best value computed by
  // sweeping the quantizer, known to be ~0.9276 bits for C=2, P=1.
  double v = j["value"].get<double>();
  REQUIRE(v > 0.5);
  REQUIRE(v < 1.0);
  REQUIRE(fs::exists(out / "trace.csv"));
}

TEST_CASE("exhausted iteration budget maps to exit code 4") {
  fs::path out = fresh_dir("budget");
  int rc = run("optimize --random 2,2,1,1,10,3 --objective sd-sum "
               "--max-iters 1 --out \"" +
               out.string() + "\"");
  REQUIRE(rc == 4);
}

TEST_CASE("verify runs clean and deterministically") {
  fs::path out1 = fresh_dir("verify1");
  fs::path out2 = fresh_dir("verify2");
  std::string args = "verify --count 5 --seed 11 --kmax 2 --lmax 2 --out \"";
  REQUIRE(run(args + out1.string() + "\"") == 0);
  REQUIRE(run(args + out2.string() + "\"") == 0);
  std::string r1 = slurp(out1 / "report.json");
  REQUIRE(r1 == slurp(out2 / "report.json"));
  auto rep = nlohmann::json::parse(r1);
  REQUIRE(rep["violations"].get<int>() == 0);
  // Clean campaigns leave no failure certificates behind.
  REQUIRE(fs::is_empty(out1 / "certificates"));
}

TEST_CASE("corrupted set function is caught with exit code 1") {
  fs::path out = fresh_dir("corrupt");
  int rc = run("verify --theorems lemmas --count 3 --seed 5 --kmax 2 "
               "--lmax 2 --out \"" +
                   out.string() + "\"",
               "CRAN_TEST_CORRUPT_F=1");
  REQUIRE(rc == 1);
  auto rep = nlohmann::json::parse(slurp(out / "report.json"));
  REQUIRE(rep["violations"].get<int>() > 0);
}

TEST_CASE("gap-check passes on the scalar instance") {
  fs::path out = fresh_dir("gap");
  int rc = run("gap-check --instance \"" + data_dir() +
               "/scalar_unit.json\" --out \"" + out.string() + "\"");
  REQUIRE(rc == 0);
  auto j = nlohmann::json::parse(slurp(out / "gap_report.json"));
  REQUIRE(j["jd"]["pass"].get<bool>());
  REQUIRE(j["sd_sum"]["pass"].get<bool>());
  REQUIRE(j["gsd_sum_fronthaul"]["pass"].get<bool>());
  REQUIRE(fs::exists(out / "gap_jd.csv"));
  REQUIRE(fs::exists(out / "gap_gsd_sumfronthaul.csv"));
}
