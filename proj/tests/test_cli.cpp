#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "mdl/errors.hpp"
#include "mdl/primes.hpp"

using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = mdl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("digit-stats csv report") {
  const auto r = run({"digit-stats", "--q", "3", "--X", "7", "--r", "0", "--s", "1", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const auto ls = lines(r.out);
  REQUIRE(ls.size() >= 5);
  CHECK(ls[0] == "# mdl v1 digit-stats q=3 X=7 r=0 s=1");
  CHECK(ls[1] == "# tool=mdl 1.0.0");
  std::vector<std::string> rows;
  bool header_seen = false;
  for (const auto& l : ls) {
    if (l.starts_with("#")) continue;
    if (!header_seen) {
      CHECK(l == "block,count,deviation");
      header_seen = true;
      continue;
    }
    rows.push_back(l);
  }
  REQUIRE(rows.size() == 3);
  CHECK(rows[0].starts_with("0,1,"));
  CHECK(rows[1].starts_with("1,3,"));
  CHECK(rows[2].starts_with("2,0,"));
  CHECK(r.out.find("timestamp") == std::string::npos);

  const auto stamped = run({"digit-stats", "--q", "3", "--X", "7", "--r", "0", "--s", "1"});
  CHECK(stamped.out.find("# timestamp=") != std::string::npos);
}

TEST_CASE("digit-stats json report") {
  const auto r = run({"digit-stats", "--q", "7", "--X", "100", "--r", "0", "--s", "1", "--format", "json",
                      "--no-timestamp"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["tool"] == "mdl");
  CHECK(j["schema"] == "mdl v1");
  CHECK(j["subcommand"] == "digit-stats");
  CHECK(j["inputs"]["q"] == 7);
  CHECK(j["pi_X"] == 25);
  std::vector<std::uint64_t> support;
  std::uint64_t total = 0;
  for (const auto& row : j["counts"]) {
    total += row["count"].get<std::uint64_t>();
    if (row["count"].get<std::uint64_t>() > 0) support.push_back(row["block"].get<std::uint64_t>());
  }
  CHECK(total == 25);
  CHECK(support == std::vector<std::uint64_t>{0, 1, 3});
}

TEST_CASE("json subcommands") {
  auto r = run({"vmvt", "--r", "2", "--k", "1", "--P", "2", "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["count"] == 6);

  r = run({"vmvt", "--r", "2", "--k", "1", "--P", "3", "--monotonicity", "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["monotone"] == true);

  r = run({"vmvt", "--r", "33282", "--k", "129", "--P", "10", "--ford", "--no-timestamp"});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["ford_bound_log"].get<double>() == doctest::Approx(31431517.90696409375).epsilon(1e-14));

  r = run({"discrepancy", "--q", "3", "--gamma", "1", "--X", "10", "--no-timestamp"});
  REQUIRE(r.code == 0);
  auto j = json::parse(r.out);
  CHECK(j["discrepancy_exact"] == "2/3");
  CHECK(j["certified"] == true);

  r = run({"mersenne-sum", "--q", "3", "--gamma", "1", "--a", "1", "--X", "10", "--no-timestamp"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["real"].get<double>() == doctest::Approx(-0.5).epsilon(1e-14));
  CHECK(j["imag"].get<double>() == doctest::Approx(2.5980762113533159403).epsilon(1e-14));

  r = run({"expsum", "--q", "3", "--gamma", "2", "--a", "1", "--g", "2", "--X", "1", "--no-timestamp"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["real"] == 0.0);
  CHECK(j["imag"] == 0.0);

  r = run({"order-structure", "--q", "11", "--g", "3", "--no-timestamp"});
  REQUIRE(r.code == 0);
  j = json::parse(r.out);
  CHECK(j["tau"] == 5);
  CHECK(j["G"] == 2);
}

TEST_CASE("verify-lemmas") {
  const auto r = run({"verify-lemmas", "--q-max", "13", "--g-max", "6", "--n-max", "3", "--index-max", "8",
                      "--m-max", "4", "--no-timestamp"});
  REQUIRE(r.code == 0);
  const auto j = json::parse(r.out);
  CHECK(j["all_passed"] == true);
  for (const auto& c : j["checks"]) {
    CHECK(c["failures"] == 0);
    CHECK(c["cases"].get<std::uint64_t>() > 0);
  }
}

TEST_CASE("exit codes") {
  auto r = run({"digit-stats", "--q", "3", "--X", "12x", "--r", "0", "--s", "1"});
  CHECK(r.code == mdl::cli::kExitPrecondition);
  CHECK_FALSE(r.err.empty());

  r = run({"digit-stats", "--q", "9", "--X", "100", "--r", "0", "--s", "1"});
  CHECK(r.code == mdl::cli::kExitPrecondition);

  r = run({"order-structure", "--q", "3", "--g", "1"});
  CHECK(r.code == mdl::cli::kExitPrecondition);

  r = run({"vmvt", "--r", "12", "--k", "2", "--P", "10"});
  CHECK(r.code == mdl::cli::kExitResourceGuard);

  r = run({"digit-stats", "--q", "3", "--X", "100", "--r", "40", "--s", "40"});
  CHECK(r.code == mdl::cli::kExitResourceGuard);

  r = run({"no-such-command"});
  CHECK(r.code == mdl::cli::kExitPrecondition);

  r = run({"vmvt", "--r", "2", "--k", "1", "--P", "2", "--threads", "0"});
  CHECK(r.code == mdl::cli::kExitPrecondition);
}

TEST_CASE("output is byte-identical across thread counts") {
  const std::vector<std::vector<std::string>> commands = {
      {"digit-stats", "--q", "3", "--X", "200000", "--r", "25", "--s", "2"},
      {"mersenne-sum", "--q", "3", "--gamma", "40", "--a", "5", "--X", "100000"},
      {"expsum", "--q", "5", "--gamma", "12", "--a", "2", "--g", "3", "--X", "100000"},
      {"discrepancy", "--q", "7", "--gamma", "3", "--X", "20000", "--H", "20"},
  };
  for (auto cmd : commands) {
    cmd.push_back("--no-timestamp");
    auto one = cmd;
    one.insert(one.end(), {"--threads", "1"});
    auto eight = cmd;
    eight.insert(eight.end(), {"--threads", "8"});
    const auto a = run(one);
    const auto b = run(eight);
    REQUIRE(a.code == 0);
    REQUIRE(b.code == 0);
    REQUIRE(a.out == b.out);
  }
}

TEST_CASE("--output and the cache directory") {
  const auto dir = std::filesystem::temp_directory_path() / "mdl_cli_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const auto file = dir / "report.csv";

  const auto r = run({"digit-stats", "--q", "5", "--X", "3000", "--r", "2", "--s", "1", "--no-timestamp",
                      "--output", file.string(), "--cache-dir", (dir / "flag").string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(file);
  const std::string written{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  CHECK(written.starts_with("# mdl v1 digit-stats q=5 X=3000 r=2 s=1"));
  CHECK(std::filesystem::exists(mdl::prime_cache_path(dir / "flag", 3000)));

  ::setenv("MDL_CACHE_DIR", (dir / "env").string().c_str(), 1);
  const auto again = run({"digit-stats", "--q", "5", "--X", "3000", "--r", "2", "--s", "1", "--no-timestamp",
                          "--cache-dir", (dir / "ignored").string()});
  ::unsetenv("MDL_CACHE_DIR");
  REQUIRE(again.code == 0);
  CHECK(again.out == written);
  CHECK(std::filesystem::exists(mdl::prime_cache_path(dir / "env", 3000)));
  CHECK_FALSE(std::filesystem::exists(dir / "ignored"));
}

TEST_CASE("integer parsing") {
  CHECK(mdl::cli::parse_unsigned("X", "100000") == 100000);
  CHECK(mdl::cli::parse_signed("g", "-3") == -3);
  CHECK(mdl::cli::parse_integer("a", "-123456789012345678901234567890") ==
        mpz_class("-123456789012345678901234567890"));
  CHECK_THROWS_AS(mdl::cli::parse_unsigned("X", "-1"), mdl::PreconditionError);
  CHECK_THROWS_AS(mdl::cli::parse_unsigned("X", "1e6"), mdl::PreconditionError);
  CHECK_THROWS_AS(mdl::cli::parse_unsigned("X", ""), mdl::PreconditionError);
  CHECK_THROWS_AS(mdl::cli::parse_unsigned("X", "99999999999999999999999"), mdl::PreconditionError);
  CHECK_THROWS_AS(mdl::cli::parse_signed("g", "3.0"), mdl::PreconditionError);
}
