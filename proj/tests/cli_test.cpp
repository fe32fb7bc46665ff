//------------------------------------------------------------------------------
// Copyright 2026 The autotune authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//------------------------------------------------------------------------------
#include <autotune/cli.hpp>

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

using namespace autotune;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "autotune");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        dir = fs::temp_directory_path() /
              ("autotune_cli_" + std::to_string(std::random_device{}()));
        fs::create_directories(dir);
    }
    void TearDown() override { fs::remove_all(dir); }
    std::string path(const char* name) const { return (dir / name).string(); }
    fs::path dir;
};

} // namespace

TEST_F(CliTest, ListShowsRegistry) {
    const auto r = invoke({"list"});
    EXPECT_EQ(r.code, 0);
    for (const char* name : {"raytrace", "primes", "mandelbrot", "substrings", "sleep"})
        EXPECT_NE(r.out.find(std::string(name) + "\t"), std::string::npos) << name;
}

TEST_F(CliTest, ExploreWritesGridCsv) {
    const auto r = invoke({"explore", "--workload", "primes", "--reps", "2", "--threads-max", "2",
                           "--grain-max", "1", "--size", "2000", "--out", path("grid.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = slurp(path("grid.csv"));
    EXPECT_EQ(first_line(text), "workload,threads,grain_index,rep,duration_s");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 4 * 2);
}

TEST_F(CliTest, TuneWritesTraceCsv) {
    const auto r = invoke({"tune", "--workload", "primes", "--runs", "3", "--iters", "12", "--seed",
                           "1", "--threads-max", "4", "--grain-max", "6", "--size", "3000", "--out",
                           path("trace.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = slurp(path("trace.csv"));
    EXPECT_EQ(first_line(text), "workload,run,iteration,threads,grain_index,duration_s");
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 1 + 3 * 12);
}

TEST_F(CliTest, ReportJoinsExploreAndTune) {
    ASSERT_EQ(invoke({"explore", "--workload", "primes", "--reps", "1", "--threads-max", "2",
                      "--grain-max", "11", "--size", "2000", "--out", path("grid.csv")})
                  .code,
              0);
    ASSERT_EQ(invoke({"tune", "--workload", "primes", "--runs", "2", "--iters", "20",
                      "--threads-max", "2", "--grain-max", "11", "--size", "2000", "--out",
                      path("trace.csv")})
                  .code,
              0);
    const auto r = invoke({"report", "--grid", path("grid.csv"), "--traces", path("trace.csv"),
                           "--out", path("report.csv")});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto text = slurp(path("report.csv"));
    EXPECT_EQ(first_line(text), csv::report_header);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 2);
    EXPECT_EQ(text.substr(text.find('\n') + 1, 7), "primes,");
    EXPECT_NE(r.out.find("autotuned ideal"), std::string::npos);
}

TEST_F(CliTest, UsageErrorsExitOne) {
    EXPECT_EQ(invoke({}).code, 1);
    EXPECT_EQ(invoke({"frobnicate"}).code, 1);
    EXPECT_EQ(invoke({"explore"}).code, 1);
    EXPECT_EQ(invoke({"explore", "--workload", "primes", "--reps", "0"}).code, 1);
    EXPECT_EQ(invoke({"tune", "--workload", "primes", "--grain-max", "16"}).code, 1);
    EXPECT_EQ(invoke({"tune", "--workload", "primes", "--runs", "many"}).code, 1);
    const auto r = invoke({"report", "--grid", "g.csv"});
    EXPECT_EQ(r.code, 1);
    EXPECT_FALSE(r.err.empty());
}

TEST_F(CliTest, HelpExitsZero) {
    const auto r = invoke({"--help"});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("explore"), std::string::npos);
}

TEST_F(CliTest, RuntimeFailuresExitTwo) {
    const auto unknown = invoke({"explore", "--workload", "tachyon", "--out", path("g.csv")});
    EXPECT_EQ(unknown.code, 2);
    EXPECT_NE(unknown.err.find("tachyon"), std::string::npos);
    EXPECT_EQ(invoke({"explore", "--workload", "primes", "--max-measurements", "10", "--out",
                      path("g.csv")})
                  .code,
              2);
    EXPECT_EQ(invoke({"report", "--grid", path("absent.csv"), "--traces", path("absent.csv")}).code, 2);
    EXPECT_EQ(invoke({"tune", "--workload", "primes", "--size", "-4", "--out", path("t.csv")}).code, 2);
}

TEST_F(CliTest, TuneIsDeterministicOnSleepWorkload) {
    const std::vector<std::string> base{"tune", "--workload", "sleep", "--runs", "2", "--iters",
                                        "25", "--seed", "5", "--threads-max", "4", "--grain-max",
                                        "3", "--size", "500", "--out"};
    auto run_to = [&](const char* name) {
        auto args = base;
        args.push_back(path(name));
        EXPECT_EQ(invoke(args).code, 0);
        std::ifstream f(path(name));
        const auto table = csv::read_table(f);
        std::vector<std::vector<std::string>> rows;
        for (auto row : table.rows) {
            row.pop_back();
            rows.push_back(std::move(row));
        }
        return rows;
    };
    const auto a = run_to("a.csv");
    const auto b = run_to("b.csv");
    EXPECT_EQ(a.size(), 50u);
    EXPECT_EQ(a, b);
}
