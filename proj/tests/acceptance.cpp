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
//------------------------------------------------------------------------------
// Acceptance suite. Prints one PASS / FAIL / SKIP line per criterion and exits
// non-zero if any criterion fails. Every tolerance and time limit is fixed
// below.
#include <autotune/autotune.hpp>
#include <autotune/cli.hpp>

#include "oracles.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace autotune;

namespace {

enum class Status { pass, fail, skip };

struct Outcome {
    Status status;
    std::string detail;
};

struct Criterion {
    const char* name;
    double limit_s;
    std::function<Outcome()> check;
};

Outcome verdict(bool ok, std::string detail) {
    return {ok ? Status::pass : Status::fail, std::move(detail)};
}

// --- oracle convergence -------------------------------------------------------

constexpr int convergence_searches = 100;
constexpr int convergence_required = 90;
constexpr std::size_t convergence_evaluations = 60;
constexpr double convergence_relative = 0.05;
constexpr double convergence_absolute = 1.0;

Outcome oracle_convergence() {
    const ParameterSet set({make_parameter("threads", 1, 32, 1), make_parameter("grain_index", 0, 9, 0)});
    std::mt19937_64 centres(20140101);
    int hits = 0;
    for (int seed = 0; seed < convergence_searches; ++seed) {
        const oracle::Bowl bowl{std::uniform_real_distribution<double>(1.0, 32.0)(centres),
                                std::uniform_real_distribution<double>(0.0, 9.0)(centres)};
        const double target =
            bowl.grid_minimum(1, 32, 0, 9) * (1.0 + convergence_relative) + convergence_absolute;
        SearchOptions options;
        options.max_evaluations = convergence_evaluations;
        SimplexSearch search(set, static_cast<std::uint64_t>(seed), options);
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t e = 0; e < convergence_evaluations && !search.is_converged(); ++e) {
            const auto c = search.propose();
            const double f = bowl(c[0], c[1]);
            best = std::min(best, f);
            search.report(f);
        }
        if (best <= target)
            ++hits;
    }
    return verdict(hits >= convergence_required,
                   std::to_string(hits) + "/" + std::to_string(convergence_searches) +
                       " searches within 5% + 1.0 of the exhaustive minimum in <= 60 evaluations (need " +
                       std::to_string(convergence_required) + ")");
}

// --- bounds safety ------------------------------------------------------------

constexpr std::size_t bounds_cycles = 100'000;

Outcome bounds_safety() {
    std::mt19937_64 rng(777);
    std::size_t cycles = 0, violations = 0, sets = 0;
    while (cycles < bounds_cycles) {
        const auto k = std::uniform_int_distribution<std::size_t>(1, 4)(rng);
        std::vector<ParameterSpec> specs;
        for (std::size_t d = 0; d < k; ++d) {
            const auto lo = std::uniform_int_distribution<std::int64_t>(-50, 50)(rng);
            const auto hi = lo + std::uniform_int_distribution<std::int64_t>(0, 40)(rng);
            specs.push_back(make_parameter("p" + std::to_string(d), lo, hi, lo));
        }
        const ParameterSet set(std::move(specs));
        ++sets;
        SimplexSearch search(set, rng());
        std::uniform_real_distribution<double> objective(0.0, 100.0);
        for (int i = 0; i < 300 && cycles < bounds_cycles; ++i, ++cycles) {
            if (search.is_converged())
                search.restart();
            const auto c = search.propose();
            bool inside = c.size() == set.size();
            for (std::size_t d = 0; inside && d < c.size(); ++d)
                inside = c[d] >= set[d].lo() && c[d] <= set[d].hi();
            violations += !inside;
            search.report(objective(rng));
        }
    }
    return verdict(violations == 0, std::to_string(cycles) + " cycles over " + std::to_string(sets) +
                                        " random sets (k in 1..4), " + std::to_string(violations) +
                                        " out-of-bounds proposals");
}

// --- runtime correctness ------------------------------------------------------

std::int64_t index_range_size(const WorkloadSpec& spec) {
    if (spec.name == "raytrace" || spec.name == "mandelbrot")
        return spec.size * spec.size;
    if (spec.name == "substrings")
        return spec.size - static_cast<std::int64_t>(kernels::substring_pattern.size()) + 1;
    return spec.size;
}

Outcome runtime_correctness() {
    std::size_t checks = 0, mismatches = 0;
    std::string first_bad;
    for (const auto& w : workload_registry()) {
        if (w.synthetic)
            continue;
        const auto spec = make_workload_spec(w.name);
        const std::int64_t expected = w.sequential(spec.size);
        if (expected != spec.checksum) {
            ++mismatches;
            first_bad = w.name + ": sequential " + std::to_string(expected) + " vs frozen " +
                        std::to_string(spec.checksum);
        }
        if (w.name == "primes") {
            const auto sieve = oracle::prime_count_below(spec.size);
            if (sieve != 78498 || expected != sieve) {
                ++mismatches;
                first_bad = "primes: sieve " + std::to_string(sieve) + " vs kernel " + std::to_string(expected);
            }
        }
        for (std::size_t workers : {1u, 2u, 4u, 8u}) {
            ThreadPool pool(workers);
            for (std::int64_t grain : {std::int64_t{1}, std::int64_t{1} << 5, std::int64_t{1} << 10,
                                       index_range_size(spec)}) {
                const auto got = run_workload(spec, pool, grain);
                ++checks;
                if (got != expected) {
                    ++mismatches;
                    first_bad = w.name + " workers " + std::to_string(workers) + " grain " +
                                std::to_string(grain) + ": " + std::to_string(got);
                }
            }
        }
    }
    return verdict(mismatches == 0, std::to_string(checks) +
                                        " (workload, workers, grain) checksums against the sequential "
                                        "kernels, primes(10^6) = 78498 by sieve" +
                                        (first_bad.empty() ? "" : "; first mismatch " + first_bad));
}

// --- amortization -------------------------------------------------------------

constexpr std::size_t amortization_traces = 10'000;

Outcome amortization_arithmetic() {
    RunTrace hand;
    hand.warmup = 0;
    hand.baseline_default_duration = 1.0;
    std::size_t i = 0;
    for (double d : {1.5, 1.2, 0.8, 0.8, 0.8, 0.8})
        hand.measurements.push_back({Configuration{{0}}, d, ++i});
    const auto n = amortization_iteration(hand);
    const bool hand_ok = n && *n == 6;

    std::mt19937_64 rng(6);
    std::size_t disagreements = 0;
    for (std::size_t t = 0; t < amortization_traces; ++t) {
        RunTrace trace;
        trace.warmup = std::uniform_int_distribution<std::size_t>(0, 5)(rng);
        const auto len = std::uniform_int_distribution<std::size_t>(0, 60)(rng);
        std::uniform_real_distribution<double> dur(0.2, 2.0);
        std::vector<double> post;
        for (std::size_t k = 0; k < len; ++k) {
            const double d = dur(rng);
            trace.measurements.push_back({Configuration{{0}}, d, k + 1});
            if (k >= trace.warmup)
                post.push_back(d);
        }
        trace.baseline_default_duration = warmup_baseline(trace);
        std::optional<std::size_t> expected;
        if (trace.warmup > 0 && len >= trace.warmup) {
            double sum = 0.0;
            for (std::size_t k = 0; k < trace.warmup; ++k)
                sum += trace.measurements[k].duration;
            expected = oracle::amortization(sum / static_cast<double>(trace.warmup), post);
        }
        disagreements += amortization_iteration(trace) != expected;
    }
    return verdict(hand_ok && disagreements == 0,
                   "hand trace -> " + (n ? std::to_string(*n) : std::string("never")) +
                       " (expect 6); " + std::to_string(disagreements) + "/" +
                       std::to_string(amortization_traces) + " random traces disagree with prefix scan");
}

// --- determinism --------------------------------------------------------------

std::vector<std::string> strip_durations(const std::string& csv_text) {
    std::vector<std::string> lines;
    std::istringstream in(csv_text);
    for (std::string line; std::getline(in, line);)
        lines.push_back(line.substr(0, line.rfind(',')));
    return lines;
}

Outcome determinism() {
    const auto dir = std::filesystem::temp_directory_path() /
                     ("autotune_accept_" + std::to_string(std::random_device{}()));
    std::filesystem::create_directories(dir);
    std::vector<std::vector<std::string>> runs;
    std::ostringstream sink;
    for (const char* name : {"first.csv", "second.csv"}) {
        const std::string out = (dir / name).string();
        const char* argv[] = {"autotune", "tune",          "--workload", "sleep", "--runs",
                              "3",        "--iters",       "40",         "--seed", "17",
                              "--threads-max", "4",        "--grain-max", "3",   "--size",
                              "1000",     "--out",         out.c_str()};
        const int code = cli::run(static_cast<int>(std::size(argv)), argv, sink, sink);
        if (code != 0) {
            std::filesystem::remove_all(dir);
            return {Status::fail, "tune exited with " + std::to_string(code) + ": " + sink.str()};
        }
        std::ifstream f(out);
        std::stringstream text;
        text << f.rdbuf();
        runs.push_back(strip_durations(text.str()));
    }
    std::filesystem::remove_all(dir);
    std::size_t differing = 0;
    for (std::size_t i = 0; i < std::max(runs[0].size(), runs[1].size()); ++i)
        differing += i >= runs[0].size() || i >= runs[1].size() || runs[0][i] != runs[1][i];
    return verdict(runs[0].size() == 121 && differing == 0,
                   "two seeded sleep-workload tune runs, " + std::to_string(runs[0].size()) +
                       " lines each, " + std::to_string(differing) + " differ outside duration_s");
}

// --- qualitative shape ----------------------------------------------------------

constexpr std::size_t shape_min_cores = 4;
constexpr double shape_speedup_floor = 0.5;
constexpr double shape_ideal_slack = 1.05;

Outcome qualitative_shape() {
    const std::size_t cores = hardware_cores();
    if (cores < shape_min_cores)
        return {Status::skip, "needs >= 4 cores, detected " + std::to_string(cores)};
    const auto spec = make_workload_spec("mandelbrot");
    const auto set = builtin_parameters(8, 12, cores);
    auto grid = explore_workload(spec, set, 3);
    const auto traces = tune_workload(spec, set, 15, 200, 1);
    const double sequential = grid_sequential(grid, cores);
    const auto row = summarize(traces, grid, sequential, grid_default(set, cores));
    const bool fast = row.best_s <= shape_speedup_floor * sequential;
    const bool ordered = row.best_s <= shape_ideal_slack * row.autotuned_ideal_s;
    return verdict(fast && ordered,
                   "mandelbrot sequential " + csv::fixed(sequential, 4) + " s, best " +
                       csv::fixed(row.best_s, 4) + " s (speedup " + csv::fixed(row.best_speedup, 2) +
                       ", need >= 2), autotuned ideal " + csv::fixed(row.autotuned_ideal_s, 4) +
                       " s (need best <= 1.05 x ideal)");
}

// --- CSV round trip and report arithmetic ---------------------------------------

Outcome csv_and_report() {
    std::mt19937_64 rng(42);
    auto nine_decimals = [&] { return static_cast<double>(1 + rng() % 20'000'000'000ULL) / 1e9; };
    std::vector<std::string> problems;

    // Defaults at the lower bounds, as a reader infers them.
    const ParameterSet set({make_parameter("threads", 1, 6, 1), make_parameter("grain_index", 0, 4, 0)});
    std::vector<GridResult> grids;
    for (const char* name : {"primes", "substrings"}) {
        grids.push_back(explore(set, 3, [&](const Configuration&, std::size_t) { return nine_decimals(); }));
        grids.back().workload = name;
    }
    std::ostringstream grid_text;
    csv::write_grid(grid_text, grids[0]);
    csv::write_grid(grid_text, grids[1], false);
    std::istringstream grid_in(grid_text.str());
    if (csv::read_grids(grid_in) != grids)
        problems.push_back("grid round trip");

    std::vector<RunTrace> traces;
    for (std::size_t r = 0; r < 4; ++r) {
        RunTrace t;
        t.workload = "primes";
        t.run = r;
        t.warmup = default_warmup;
        t.parameters = grids[0].parameters;
        Configuration start{{1, 0}};
        for (std::size_t i = 0; i < 30; ++i) {
            Configuration c = i < default_warmup
                                  ? start
                                  : Configuration{{static_cast<std::int64_t>(1 + rng() % 6),
                                                   static_cast<std::int64_t>(rng() % 5)}};
            t.measurements.push_back({c, nine_decimals(), i + 1});
        }
        t.measurements[5].config = Configuration{{6, 4}};
        t.baseline_default_duration = warmup_baseline(t);
        traces.push_back(std::move(t));
    }
    std::ostringstream trace_text;
    csv::write_traces(trace_text, traces);
    std::istringstream trace_in(trace_text.str());
    const auto back = csv::read_traces(trace_in);
    if (back.size() != traces.size())
        problems.push_back("trace count");
    for (std::size_t r = 0; r < std::min(back.size(), traces.size()); ++r)
        if (back[r].measurements != traces[r].measurements ||
            back[r].baseline_default_duration != traces[r].baseline_default_duration ||
            back[r].workload != traces[r].workload || back[r].run != traces[r].run)
            problems.push_back("trace " + std::to_string(r) + " round trip");
    std::ostringstream trace_again;
    csv::write_traces(trace_again, back);
    if (trace_again.str() != trace_text.str())
        problems.push_back("trace rewrite");

    // Every speedup in the written report re-derives from its own row.
    const auto rows = build_report(grids, back, 2);
    std::ostringstream report_text;
    csv::write_report(report_text, rows);
    std::istringstream report_in(report_text.str());
    const auto table = csv::read_table(report_in);
    std::size_t speedups = 0;
    for (const auto& row : table.rows) {
        const double seq = csv::to_double(row[table.column("sequential_s")]);
        for (const char* col : {"worst", "best", "default", "autotuned_ideal", "autotuned_avg"}) {
            const double time = csv::to_double(row[table.column(std::string(col) + "_s")]);
            ++speedups;
            if (row[table.column(std::string(col) + "_speedup")] != csv::fixed(seq / time, 2))
                problems.push_back(std::string(col) + "_speedup of " + row[0]);
        }
    }
    if (rows.size() != 1)
        problems.push_back("report rows");

    const std::string a = csv::fixed(speedup(12.72, 0.54), 2);
    const std::string b = csv::fixed(speedup(3.20, 42.69), 2);
    if (a != "23.56" || b != "0.07")
        problems.push_back("table values " + a + " " + b);

    std::string detail = "grid + trace round trip, " + std::to_string(speedups) +
                         " report speedups re-derived, 12.72/0.54 -> " + a + ", 3.20/42.69 -> " + b;
    for (const auto& p : problems)
        detail += "; bad " + p;
    return verdict(problems.empty(), detail);
}

} // namespace

int main(int argc, char** argv) {
    // Optional argument: run only the named criterion. Exit 77 if it was skipped.
    const std::string only = argc > 1 ? argv[1] : "";
    const std::vector<Criterion> criteria{
        {"oracle-convergence", 5.0, oracle_convergence},
        {"bounds-safety", 10.0, bounds_safety},
        {"runtime-correctness", 120.0, runtime_correctness},
        {"amortization-arithmetic", 1.0, amortization_arithmetic},
        {"determinism", 30.0, determinism},
        {"qualitative-shape", 600.0, qualitative_shape},
        {"csv-roundtrip-report-arithmetic", 1.0, csv_and_report},
    };
    int failures = 0, skips = 0, ran = 0;
    for (const auto& c : criteria) {
        if (!only.empty() && only != c.name)
            continue;
        ++ran;
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception& e) {
            o = {Status::fail, std::string("threw: ") + e.what()};
        }
        const double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.status == Status::pass && elapsed > c.limit_s)
            o.status = Status::fail;
        const char* tag = o.status == Status::pass ? "PASS" : o.status == Status::fail ? "FAIL" : "SKIP";
        failures += o.status == Status::fail;
        skips += o.status == Status::skip;
        std::cout << tag << ' ' << c.name << ": " << o.detail << " [" << csv::fixed(elapsed, 2)
                  << " s, limit " << csv::fixed(c.limit_s, 0) << " s]" << std::endl;
    }
    if (ran == 0) {
        std::cout << "unknown criterion '" << only << "'" << std::endl;
        return 2;
    }
    std::cout << (failures == 0 ? "acceptance: all criteria passed or skipped"
                                : "acceptance: " + std::to_string(failures) + " criteria failed")
              << std::endl;
    if (failures != 0)
        return 1;
    return !only.empty() && skips == ran ? 77 : 0;
}
