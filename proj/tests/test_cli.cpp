// Copyright 2026 The bellsel Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cstdlib>
#include <numbers>
#include <sstream>

#include "cli.hpp"
#include "test_support.hpp"

namespace fs = std::filesystem;
using namespace bellsel;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result run(std::vector<std::string> args) {
  args.insert(args.begin(), "bellsel");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

nlohmann::json analyze_json(const fs::path& in, std::vector<std::string> extra = {}) {
  std::vector<std::string> args = {"analyze", "--in", in.string(), "--format", "json"};
  args.insert(args.end(), extra.begin(), extra.end());
  const auto r = run(args);
  EXPECT_EQ(r.code, 0) << r.err;
  return nlohmann::json::parse(r.out);
}

const std::string kData = BELLSEL_DATA_DIR;

}  // namespace

TEST(CliVrun, same_flags_same_bytes) {
  const auto dir = testing_util::temp_dir("cli_vrun");
  for (const char* name : {"x.jsonl", "y.jsonl"})
    ASSERT_EQ(run({"vrun", "--state", "c0", "--shots", "1000", "--seed", "7", "--out", (dir / name).string()}).code, 0);
  EXPECT_EQ(testing_util::slurp(dir / "x.jsonl"), testing_util::slurp(dir / "y.jsonl"));
  EXPECT_EQ(testing_util::slurp(dir / "x.jsonl.summary.json"), testing_util::slurp(dir / "y.jsonl.summary.json"));
  EXPECT_TRUE(fs::exists(dir / "x.jsonl.manifest.json"));
  const auto manifest = nlohmann::json::parse(testing_util::slurp(dir / "x.jsonl.manifest.json"));
  EXPECT_EQ(manifest["seed"], 7);
  EXPECT_TRUE(manifest.contains("wall_clock_seconds"));
  const auto e = read_ensemble_file(dir / "x.jsonl");
  EXPECT_EQ(e.size(), 1000u);
  EXPECT_NO_THROW(e.validate());
}

TEST(CliVrun, csv_and_jsonl_carry_identical_records) {
  const auto dir = testing_util::temp_dir("cli_csv");
  ASSERT_EQ(run({"vrun", "--state", "random", "--shots", "500", "--seed", "3", "--out", (dir / "a.jsonl").string()}).code, 0);
  ASSERT_EQ(run({"vrun", "--state", "random", "--shots", "500", "--seed", "3", "--format", "csv", "--out",
                 (dir / "a.csv").string()})
                .code,
            0);
  EXPECT_EQ(read_ensemble_file(dir / "a.jsonl").records, read_ensemble_file(dir / "a.csv").records);
}

TEST(CliVrun, invalid_flags_fail_without_output) {
  const auto dir = testing_util::temp_dir("cli_bad");
  const auto out = (dir / "bad.jsonl").string();
  auto r = run({"vrun", "--shots", "0", "--seed", "1", "--out", out});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--shots"), std::string::npos) << r.err;
  r = run({"vrun", "--state", "c9", "--shots", "10", "--seed", "1", "--out", out});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--state"), std::string::npos) << r.err;
  r = run({"vrun", "--shots", "10", "--seed", "1", "--angles", "0,1,x,2", "--out", out});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--angles"), std::string::npos) << r.err;
  r = run({"vrun", "--state", "weighted", "--weights", "0.5,0.5,0.5,0", "--shots", "10", "--seed", "1", "--out", out});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--weights"), std::string::npos) << r.err;
  EXPECT_FALSE(fs::exists(out));
  EXPECT_TRUE(fs::is_empty(dir));
}

TEST(CliVrun, seed_falls_back_to_environment) {
  const auto dir = testing_util::temp_dir("cli_env");
  ::unsetenv("BELLSEL_SEED");
  auto r = run({"vrun", "--shots", "10", "--out", (dir / "a.jsonl").string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("--seed"), std::string::npos);
  ::setenv("BELLSEL_SEED", "7", 1);
  ASSERT_EQ(run({"vrun", "--shots", "100", "--out", (dir / "env.jsonl").string()}).code, 0);
  ::unsetenv("BELLSEL_SEED");
  ASSERT_EQ(run({"vrun", "--shots", "100", "--seed", "7", "--out", (dir / "flag.jsonl").string()}).code, 0);
  EXPECT_EQ(testing_util::slurp(dir / "env.jsonl"), testing_util::slurp(dir / "flag.jsonl"));
}

TEST(CliPipeline, random_state_ensemble_shows_msbc) {
  const auto dir = testing_util::temp_dir("cli_msbc");
  const auto path = dir / "v.jsonl";
  ASSERT_EQ(run({"vrun", "--state", "random", "--shots", "1000000", "--seed", "1", "--out", path.string()}).code, 0);
  const auto j = analyze_json(path);
  EXPECT_TRUE(j["msbc"]["msbc_holds"].get<bool>());
  EXPECT_TRUE(j["factorizability"]["pass"].get<bool>());
  EXPECT_TRUE(j["nosignal"]["pass"].get<bool>());
  EXPECT_LE(std::abs(j["chsh"][0]["S"].get<double>()), 2.0);
  const auto table = run({"analyze", "--in", path.string(), "--group-by", "sel", "--format", "table"});
  EXPECT_EQ(table.code, 0);
  EXPECT_NE(table.out.find("msbc holds=true"), std::string::npos);
}

TEST(CliPipeline, product_control_has_no_msbc) {
  const auto dir = testing_util::temp_dir("cli_control");
  const auto path = dir / "p.jsonl";
  ASSERT_EQ(run({"vrun", "--state", "product", "--shots", "200000", "--seed", "4", "--out", path.string()}).code, 0);
  EXPECT_FALSE(analyze_json(path, {"--report", "msbc"})["msbc"]["msbc_holds"].get<bool>());
}

TEST(CliPipeline, wrun_grouped_by_outcome_gives_four_violations) {
  const auto dir = testing_util::temp_dir("cli_wrun");
  const auto path = dir / "w.jsonl";
  ASSERT_EQ(run({"wrun", "--shots", "1000000", "--seed", "2", "--out", path.string()}).code, 0);
  const auto summary = nlohmann::json::parse(testing_util::slurp(dir / "w.jsonl.summary.json"));
  for (const char* m : {"M0", "M1", "M2", "M3"}) EXPECT_NEAR(summary["sel_frequencies"][m].get<double>(), 0.25, 0.005);
  const auto j = analyze_json(path, {"--group-by", "sel", "--report", "chsh"});
  ASSERT_EQ(j["chsh"].size(), 4u);
  for (const auto& c : j["chsh"]) EXPECT_TRUE(c["violates_classical"].get<bool>()) << c.dump();
}

TEST(CliAnalyze, missing_setting_pair_is_unavailable_not_error) {
  const auto dir = testing_util::temp_dir("cli_missing");
  const auto path = dir / "m.jsonl";
  {
    std::ofstream f(path);
    f << "{\"run\":0,\"a\":0,\"b\":0,\"A\":0,\"B\":1,\"sel\":\"C0\",\"geometry\":\"V\"}\n";
    f << "{\"run\":1,\"a\":0,\"b\":1,\"A\":1,\"B\":1,\"sel\":\"C0\",\"geometry\":\"V\"}\n";
  }
  const auto j = analyze_json(path, {"--report", "chsh"});
  EXPECT_EQ(j["chsh"][0]["status"], "unavailable");
}

TEST(CliAnalyze, malformed_record_names_line) {
  const auto dir = testing_util::temp_dir("cli_malformed");
  const auto path = dir / "bad.jsonl";
  {
    std::ofstream f(path);
    f << "{\"run\":0,\"a\":0,\"b\":0,\"A\":0,\"B\":1,\"sel\":\"C0\",\"geometry\":\"V\"}\n";
    f << "{\"run\":1,\"a\":0,\"b\":1,\"A\":1,\"B\":1,\"sel\":\"C0\"\n";
  }
  const auto r = run({"analyze", "--in", path.string()});
  EXPECT_NE(r.code, 0);
  EXPECT_NE(r.err.find("line 2"), std::string::npos) << r.err;
  EXPECT_NE(run({"analyze", "--in", (dir / "nope.jsonl").string()}).code, 0);
  EXPECT_NE(run({"analyze", "--in", path.string(), "--report", "bogus"}).code, 0);
}

TEST(CliToy, retention_summary_and_perfect_match) {
  const auto dir = testing_util::temp_dir("cli_toy");
  ASSERT_EQ(run({"toy", "retention", "--shots", "1000000", "--seed", "3", "--out", (dir / "r.jsonl").string()}).code, 0);
  const auto s = nlohmann::json::parse(testing_util::slurp(dir / "r.jsonl.summary.json"));
  EXPECT_NEAR(s["retained_fraction"].get<double>(), 0.25, 0.003);
  ASSERT_EQ(run({"toy", "retention", "--shots", "10000", "--seed", "3", "--rule", "perfect-match", "--out",
                 (dir / "pm.jsonl").string()})
                .code,
            0);
  for (const auto& r : read_ensemble_file(dir / "pm.jsonl").records) EXPECT_EQ(r.A, r.B);
}

TEST(CliToy, hoppers_write_four_files_summing_to_shots) {
  const auto dir = testing_util::temp_dir("cli_hoppers");
  const auto prefix = (dir / "h").string();
  ASSERT_EQ(run({"toy", "hoppers", "--shots", "20000", "--seed", "8", "--out", prefix}).code, 0);
  std::size_t total = 0;
  for (int i = 0; i < 4; ++i) {
    const auto e = read_ensemble_file(prefix + ".H" + std::to_string(i) + ".jsonl");
    EXPECT_NO_THROW(e.validate());
    total += e.size();
  }
  EXPECT_EQ(total, 20000u);
  const auto s = nlohmann::json::parse(testing_util::slurp(prefix + ".summary.json"));
  EXPECT_EQ(s["total"], 20000);
}

TEST(CliForks, parity_collider_and_mice) {
  auto r = run({"forks", "parity", "--synthetic", "--n", "100000", "--seed", "5", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(nlohmann::json::parse(r.out)["restricted"]["corr"].get<double>(), -0.5, 0.02);
  r = run({"forks", "parity", "--digits-a", kData + "/pi_100k.txt", "--digits-b", kData + "/e_100k.txt", "--n", "1000",
           "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["restricted"]["counts"][3], 0);
  r = run({"forks", "collider", "--n", "100000", "--seed", "5", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_DOUBLE_EQ(nlohmann::json::parse(r.out)["restricted"]["corr"].get<double>(), 1.0);
  r = run({"forks", "mice", "--n", "1000000", "--seed", "5", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_NEAR(j["population"]["corr"].get<double>(), 1.0 / 9, 0.02);
  EXPECT_LE(std::abs(j["restricted"]["corr"].get<double>()), 0.02);
  EXPECT_EQ(j["direction"], "masking");
  EXPECT_NE(run({"forks", "parity", "--n", "10"}).code, 0);
  EXPECT_NE(run({"forks", "mice", "--n", "100", "--seed", "1", "--p-white", "2"}).code, 0);
}

TEST(CliForks, msbc_option_appends_comparison) {
  auto r = run({"forks", "parity", "--synthetic", "--n", "100000", "--seed", "5", "--format", "json", "--msbc"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j["msbc"]["flagged"].get<bool>());
  EXPECT_EQ(j["msbc"]["direction"], "inducing");
  r = run({"forks", "parity", "--synthetic", "--n", "1000", "--seed", "5", "--format", "json"});
  EXPECT_FALSE(nlohmann::json::parse(r.out).contains("msbc"));
  r = run({"forks", "mice", "--n", "1000", "--seed", "5", "--preselect", "--msbc", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(nlohmann::json::parse(r.out)["msbc"]["status"], "unavailable");
}

TEST(CliExact, tsirelson_equal_angles_and_flat_mixture) {
  auto r = run({"exact", "--state", "c0", "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NEAR(std::abs(nlohmann::json::parse(r.out)["S"].get<double>()), 2 * std::numbers::sqrt2, 1e-9);
  r = run({"exact", "--state", "c0"});
  EXPECT_NE(r.out.find("|S|=2.828427124"), std::string::npos) << r.out;
  r = run({"exact", "--state", "c0", "--angles", "0,0,0,0", "--format", "json"});
  for (const auto& p : nlohmann::json::parse(r.out)["pairs"]) EXPECT_NEAR(p["E"].get<double>(), -1.0, 1e-12);
  r = run({"exact", "--mixture", "uniform", "--format", "json"});
  for (const auto& p : nlohmann::json::parse(r.out)["pairs"])
    for (const auto& c : p["p"]) EXPECT_NEAR(c.get<double>(), 0.25, 1e-12);
  EXPECT_NE(run({"exact", "--state", "c0", "--mixture", "uniform"}).code, 0);
}
