// Copyright 2026 The compass-coherence Authors
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

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.h"
#include "compass/code_io.h"
#include "compass/sweep_io.h"
#include "json.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = compass::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name) {
    fs::path dir = fs::temp_directory_path() / "compass_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path &p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

TEST(Cli, AnalyticRepetitionAtZero) {
    auto r = run({"channel", "analytic", "--family", "rep", "--l", "3", "--theta-over-pi", "0"});
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = json::parse(r.out);
    EXPECT_EQ(j["epsilon"].get<double>(), 0.0);
    EXPECT_EQ(j["delta"].get<double>(), 0.0);
    EXPECT_EQ(j["kappa"].get<double>(), 0.0);
    EXPECT_EQ(j["r1"].get<double>(), 0.0);
    EXPECT_EQ(j["meta"]["tool"], "compass");
}

TEST(Cli, AnalyticZStackedSuppresses) {
    auto at = [](const std::string &l) {
        auto r = run({"channel", "analytic", "--family", "zstacked", "--l", l, "--h", "3", "--theta-over-pi", "0.1"});
        EXPECT_EQ(r.code, 0) << r.err;
        return json::parse(r.out)["r1"].get<double>();
    };
    EXPECT_LT(at("15"), at("9"));
}

TEST(Cli, AnalyticRejectsBadInput) {
    auto even = run({"channel", "analytic", "--family", "rep", "--l", "4", "--theta-over-pi", "0.1"});
    EXPECT_EQ(even.code, compass::cli::kExitUsage);
    auto j = json::parse(even.err);
    EXPECT_TRUE(j.contains("message"));
    auto stray = run({"channel", "analytic", "--family", "rep", "--l", "3", "--h", "2", "--theta-over-pi", "0.1"});
    EXPECT_EQ(stray.code, compass::cli::kExitUsage);
    EXPECT_EQ(run({"channel", "analytic", "--family", "torus", "--l", "3", "--theta-over-pi", "0"}).code,
              compass::cli::kExitUsage);
    EXPECT_EQ(run({"frobnicate"}).code, compass::cli::kExitUsage);
    EXPECT_EQ(run({}).code, compass::cli::kExitUsage);
}

TEST(Cli, HelpAndVersion) {
    auto h = run({"--help"});
    EXPECT_EQ(h.code, 0);
    EXPECT_NE(h.out.find("sweep"), std::string::npos);
    auto sub = run({"sweep", "--help"});
    EXPECT_EQ(sub.code, 0);
    EXPECT_NE(sub.out.find("--thetas"), std::string::npos);
    auto v = run({"--version"});
    EXPECT_EQ(v.code, 0);
    EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}

TEST(Cli, RandomCodeGenIsReproducible) {
    std::vector<std::string> args{"code", "gen", "--family", "random", "--dx", "5", "--dz", "5", "--q-shor", "0.4",
                                  "--seed", "77"};
    auto a = run(args), b = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    auto file = scratch("random.json");
    args.insert(args.end(), {"--out", file.string()});
    ASSERT_EQ(run(args).code, 0);
    EXPECT_EQ(slurp(file), a.out);
    auto c = compass::load_coloring(file.string());
    EXPECT_EQ(c.d_x, 5u);
    auto meta = json::parse(a.out)["meta"];
    EXPECT_EQ(meta["command"], "code gen");
    EXPECT_EQ(meta["config"]["seed"], 77);
    EXPECT_GE(meta["q_shor_realized"].get<double>(), 0.0);
    auto other = run({"code", "gen", "--family", "random", "--dx", "5", "--dz", "5", "--q-shor", "0.4", "--seed", "78"});
    EXPECT_NE(other.out, a.out);
}

TEST(Cli, CodeGenFlagsMustFitFamily) {
    EXPECT_EQ(run({"code", "gen", "--family", "zshor", "--dx", "3", "--dz", "3", "--seed", "1"}).code,
              compass::cli::kExitUsage);
    EXPECT_EQ(run({"code", "gen", "--family", "zstacked", "--dx", "9"}).code, compass::cli::kExitUsage);
    EXPECT_EQ(run({"code", "gen", "--family", "zshor", "--dx", "3", "--dz", "4"}).code, compass::cli::kExitUsage);
    EXPECT_EQ(run({"code", "gen", "--family", "zstacked", "--dx", "9", "--h", "3"}).code, 0);
}

TEST(Cli, ValidateDecodeAndExactChannel) {
    auto file = scratch("zshor33.json");
    ASSERT_EQ(run({"code", "gen", "--family", "zshor", "--dx", "3", "--dz", "3", "--out", file.string()}).code, 0);
    auto v = run({"code", "validate", file.string()});
    ASSERT_EQ(v.code, 0) << v.err;
    EXPECT_TRUE(json::parse(v.out)["ok"].get<bool>());

    auto d = run({"decode", "--code", file.string(), "--syndrome", "10"});
    ASSERT_EQ(d.code, 0) << d.err;
    EXPECT_EQ(d.out, "100000000\n");
    auto o = run({"decode", "--code", file.string(), "--syndrome", "10", "--oracle"});
    EXPECT_EQ(o.out, d.out);
    EXPECT_EQ(run({"decode", "--code", file.string(), "--syndrome", "101"}).code, compass::cli::kExitUsage);

    auto dump = scratch("dist.json");
    auto e = run({"channel", "exact", "--code", file.string(), "--theta-over-pi", "0.05", "--dump-distribution",
                  dump.string()});
    ASSERT_EQ(e.code, 0) << e.err;
    auto j = json::parse(e.out);
    auto a = json::parse(run({"channel", "analytic", "--family", "zshor", "--l", "3", "--theta-over-pi", "0.05"}).out);
    EXPECT_NEAR(j["epsilon"].get<double>(), a["epsilon"].get<double>(), 1e-12);
    EXPECT_NEAR(j["delta"].get<double>(), a["delta"].get<double>(), 1e-12);
    EXPECT_NEAR(j["total_probability"].get<double>(), 1.0, 1e-12);
    auto entries = json::parse(slurp(dump));
    ASSERT_EQ(entries.size(), 4u);
    EXPECT_EQ(entries[0]["syndrome"], "00");
    double total = 0.0;
    for (const auto &x : entries) {
        total += x["p"].get<double>();
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
}

TEST(Cli, MalformedCodeFile) {
    auto file = scratch("broken.json");
    std::ofstream(file) << "{\"d_x\": 3, \"d_z\": 3, \"cells\": [[\"Q\", \"X\"], [\"X\", \"Z\"]]}";
    EXPECT_EQ(run({"code", "validate", file.string()}).code, compass::cli::kExitUsage);
    EXPECT_EQ(run({"code", "validate", scratch("missing.json").string()}).code, compass::cli::kExitFailure);
}

TEST(Cli, ExactBackendLimit) {
    auto file = scratch("rsc7.json");
    ASSERT_EQ(run({"code", "gen", "--family", "rsc", "--dx", "7", "--out", file.string()}).code, 0);
    auto r = run({"channel", "exact", "--code", file.string(), "--theta-over-pi", "0.1"});
    EXPECT_EQ(r.code, compass::cli::kExitFailure);
    EXPECT_EQ(json::parse(r.err)["code"], "limit");
}

TEST(Cli, ConfigFileAndPrecedence) {
    auto cfg = scratch("cfg.json");
    std::ofstream(cfg) << R"({"family": "rep", "l": 5, "theta-over-pi": 0.2})";
    auto from_file = run({"--config", cfg.string(), "channel", "analytic"});
    ASSERT_EQ(from_file.code, 0) << from_file.err;
    auto direct = run({"channel", "analytic", "--family", "rep", "--l", "5", "--theta-over-pi", "0.2"});
    EXPECT_EQ(json::parse(from_file.out)["r1"], json::parse(direct.out)["r1"]);
    auto overridden = run({"channel", "analytic", "--config", cfg.string(), "--theta-over-pi", "0.3"});
    ASSERT_EQ(overridden.code, 0) << overridden.err;
    auto at3 = run({"channel", "analytic", "--family", "rep", "--l", "5", "--theta-over-pi", "0.3"});
    EXPECT_EQ(json::parse(overridden.out)["r1"], json::parse(at3.out)["r1"]);
    std::ofstream(cfg) << "[1, 2]";
    EXPECT_EQ(run({"--config", cfg.string(), "channel", "analytic"}).code, compass::cli::kExitUsage);
}

TEST(Cli, SweepThenThreshold) {
    auto csv = scratch("rep.csv");
    auto s = run({"sweep", "--family", "rep", "--thetas", "0.3:0.7:0.05", "--distances", "5,9", "--out", csv.string()});
    ASSERT_EQ(s.code, 0) << s.err;
    auto table = compass::load_table(csv.string());
    EXPECT_EQ(table.rows.size(), 18u);
    EXPECT_EQ(table.meta["config"]["thetas"], "0.3:0.7:0.05");
    EXPECT_EQ(table.rows.back().theta_over_pi, 0.7);
    auto t = run({"threshold", "--in", csv.string(), "--metric", "r1"});
    ASSERT_EQ(t.code, 0) << t.err;
    auto j = json::parse(t.out);
    EXPECT_TRUE(j["meta"]["refined"].get<bool>());
    EXPECT_NEAR(j["lower"].get<double>(), 0.5, 1e-4);
    EXPECT_NEAR(j["upper"].get<double>(), 0.5, 1e-4);
    auto coarse = json::parse(run({"threshold", "--in", csv.string(), "--no-refine"}).out);
    EXPECT_FALSE(coarse["meta"]["refined"].get<bool>());
    EXPECT_LE(coarse["lower"].get<double>(), 0.5);
    EXPECT_GE(coarse["upper"].get<double>(), 0.5);

    auto stdout_csv = run({"sweep", "--family", "rep", "--thetas", "0.3:0.7:0.05", "--distances", "5,9"});
    EXPECT_EQ(stdout_csv.out.substr(stdout_csv.out.find('\n') + 1), slurp(csv).substr(slurp(csv).find('\n') + 1));

    auto js = scratch("rep.json");
    ASSERT_EQ(run({"sweep", "--family", "rep", "--thetas", "0.3,0.5,0.7", "--distances", "5,9", "--out", js.string()}).code, 0);
    EXPECT_EQ(compass::load_table(js.string()).rows.size(), 6u);
}

TEST(Cli, SweepRejectsBadGrids) {
    EXPECT_EQ(run({"sweep", "--family", "rep", "--thetas", "0.3:0.1:0.05", "--distances", "5"}).code,
              compass::cli::kExitUsage);
    EXPECT_EQ(run({"sweep", "--family", "rep", "--thetas", "0.3:0.5", "--distances", "5"}).code,
              compass::cli::kExitUsage);
    EXPECT_EQ(run({"sweep", "--family", "rep", "--thetas", "0.1", "--distances", "4"}).code, compass::cli::kExitUsage);
    EXPECT_EQ(run({"sweep", "--family", "rep", "--thetas", "0.1", "--distances", "5", "--seed", "3"}).code,
              compass::cli::kExitUsage);
    EXPECT_EQ(run({"sweep", "--family", "rsc", "--thetas", "0.1", "--distances", "7", "--backend", "exact"}).code,
              compass::cli::kExitFailure);
}

TEST(Cli, RandomSweepAndInterpolate) {
    std::vector<std::string> args{"sweep", "--family", "random", "--thetas", "0.1,0.2", "--distances", "3",
                                  "--q-shor", "0.5", "--codes", "4", "--samples", "50", "--seed", "9"};
    auto a = run(args);
    ASSERT_EQ(a.code, 0) << a.err;
    args.insert(args.end(), {"--jobs", "3"});
    EXPECT_EQ(run(args).out, a.out);
    auto table = compass::read_csv(*std::make_unique<std::istringstream>(a.out));
    ASSERT_EQ(table.rows.size(), 2u);
    EXPECT_EQ(table.rows[0].provenance, compass::Provenance::Sampled);
    EXPECT_EQ(table.rows[0].seed, 9u);

    auto curve = scratch("curve.csv");
    auto i = run({"interpolate", "--q-shors", "0,1", "--d", "3", "--codes", "2", "--thetas", "0.1,0.2", "--out",
                  curve.string()});
    ASSERT_EQ(i.code, 0) << i.err;
    auto j = json::parse(i.out);
    EXPECT_EQ(j["thresholds"].size(), 2u);
    EXPECT_EQ(compass::load_table(curve.string()).rows.size(), 4u);
    EXPECT_EQ(run({"interpolate", "--q-shors", "1,0", "--thetas", "0.1"}).code, compass::cli::kExitUsage);
}

}  // namespace
