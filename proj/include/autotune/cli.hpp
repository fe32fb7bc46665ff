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
#ifndef AUTOTUNE_CLI_HPP
#define AUTOTUNE_CLI_HPP

#include <autotune/csv.hpp>
#include <autotune/harness.hpp>
#include <autotune/pool.hpp>
#include <autotune/workloads.hpp>

#include <CLI11.hpp>

#include <cstdint>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace autotune::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_usage = 1;
inline constexpr int exit_failure = 2;

namespace detail {

inline std::ofstream open_out(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f)
        throw error(errc::io_error, "cannot write '" + path + "'");
    return f;
}

inline std::ifstream open_in(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f)
        throw error(errc::io_error, "cannot read '" + path + "'");
    return f;
}

inline void print_row(std::ostream& out, const ReportRow& r) {
    auto pair = [](double t, double s) { return csv::fixed(t, 4) + " / " + csv::fixed(s, 2); };
    out << r.workload << ": sequential " << csv::fixed(r.sequential_s, 4) << "  worst "
        << pair(r.worst_s, r.worst_speedup) << "  best " << pair(r.best_s, r.best_speedup)
        << "  default " << pair(r.default_s, r.default_speedup) << "  autotuned ideal "
        << pair(r.autotuned_ideal_s, r.autotuned_ideal_speedup) << "  autotuned avg "
        << pair(r.autotuned_avg_s, r.autotuned_avg_speedup) << "  amortization "
        << (r.amortization ? csv::fixed(*r.amortization, 1)
                           : "never (trace length " + std::to_string(r.trace_length) + ")")
        << (r.noise_warning ? "  [noise: autotuned beat grid best]" : "") << '\n';
}

struct GridOptions {
    std::int64_t threads_max = 32;
    std::int64_t grain_max = max_grain_index;
    std::optional<std::int64_t> size;
};

struct TuneOptions {
    std::size_t runs = 15;
    std::size_t iters = 200;
    std::uint64_t seed = 1;
    std::size_t warmup = default_warmup;
    std::size_t max_evals = SearchOptions{}.max_evaluations;
};

inline void add_grid_options(CLI::App* cmd, GridOptions& o) {
    cmd->add_option("--threads-max", o.threads_max, "largest worker count in the grid")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--grain-max", o.grain_max, "largest grain index (grain = 2^index)")
        ->check(CLI::Range(0, static_cast<int>(max_grain_index)));
    cmd->add_option("--size", o.size, "problem size override");
}

inline void add_tune_options(CLI::App* cmd, TuneOptions& o) {
    cmd->add_option("--runs", o.runs, "independent tuning runs")->check(CLI::PositiveNumber);
    cmd->add_option("--iters", o.iters, "measured iterations per run")->check(CLI::PositiveNumber);
    cmd->add_option("--seed", o.seed, "seed of the first run; run r uses seed + r");
    cmd->add_option("--warmup", o.warmup, "default-configuration iterations per run");
    cmd->add_option("--max-evals", o.max_evals, "search evaluations before holding")
        ->check(CLI::PositiveNumber);
}

} // namespace detail

/// Command-line front end. Returns 0 on success, 1 on usage errors and 2 on
/// runtime failures.
inline int run(int argc, const char* const* argv, std::ostream& out = std::cout,
               std::ostream& err = std::cerr) {
    CLI::App app{"Online autotuning harness: exhaustive grids, tuning runs and reports"};
    app.require_subcommand(1);

    auto* list = app.add_subcommand("list", "list registered workloads");

    std::string workload;
    std::size_t reps = 5;
    std::string out_path;
    std::size_t budget = default_measurement_budget;
    detail::GridOptions grid_opts;

    auto* explore_cmd = app.add_subcommand("explore", "measure every configuration of the grid");
    explore_cmd->add_option("--workload", workload, "workload name")->required();
    explore_cmd->add_option("--reps", reps, "repetitions per configuration")
        ->check(CLI::PositiveNumber);
    explore_cmd->add_option("--out", out_path, "grid CSV")->default_val("grid.csv");
    explore_cmd->add_option("--max-measurements", budget, "refuse larger grids");
    detail::add_grid_options(explore_cmd, grid_opts);

    detail::TuneOptions tune_opts;
    auto* tune_cmd = app.add_subcommand("tune", "run the online autotuner repeatedly");
    tune_cmd->add_option("--workload", workload, "workload name")->required();
    tune_cmd->add_option("--out", out_path, "trace CSV")->default_val("trace.csv");
    detail::add_tune_options(tune_cmd, tune_opts);
    detail::add_grid_options(tune_cmd, grid_opts);

    std::string grid_path, traces_path;
    std::size_t report_warmup = default_warmup;
    auto* report_cmd = app.add_subcommand("report", "summary table of a grid and its traces");
    report_cmd->add_option("--grid", grid_path, "grid CSV from explore")->required();
    report_cmd->add_option("--traces", traces_path, "trace CSV from tune")->required();
    report_cmd->add_option("--out", out_path, "report CSV")->default_val("report.csv");
    report_cmd->add_option("--warmup", report_warmup, "warmup iterations used by tune");

    std::string out_dir = ".";
    std::size_t sweep_reps = 3;
    auto* sweep_cmd = app.add_subcommand("sweep", "explore + tune + report for every workload");
    sweep_cmd->add_option("--reps", sweep_reps, "repetitions per grid cell")
        ->check(CLI::PositiveNumber);
    sweep_cmd->add_option("--out-dir", out_dir, "directory for grid.csv, trace.csv, report.csv");
    sweep_cmd->add_option("--max-measurements", budget, "refuse larger grids");
    detail::add_tune_options(sweep_cmd, tune_opts);
    detail::add_grid_options(sweep_cmd, grid_opts);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << "run with --help for usage\n";
        return exit_usage;
    }

    try {
        auto parameters = [&] {
            return builtin_parameters(grid_opts.threads_max, grid_opts.grain_max);
        };
        auto search_options = [&] {
            SearchOptions o;
            o.max_evaluations = tune_opts.max_evals;
            return o;
        };

        if (list->parsed()) {
            for (const auto& w : workload_registry())
                out << w.name << '\t' << w.default_size << '\t' << w.description << '\n';
            return exit_ok;
        }

        if (explore_cmd->parsed()) {
            const auto spec = make_workload_spec(workload, grid_opts.size);
            const auto grid = explore_workload(spec, parameters(), reps, budget);
            auto f = detail::open_out(out_path);
            csv::write_grid(f, grid);
            out << "wrote " << grid.cells.size() << " cells x " << reps << " reps to " << out_path
                << '\n';
            return exit_ok;
        }

        if (tune_cmd->parsed()) {
            const auto spec = make_workload_spec(workload, grid_opts.size);
            const auto traces = tune_workload(spec, parameters(), tune_opts.runs, tune_opts.iters,
                                              tune_opts.seed, tune_opts.warmup, search_options());
            auto f = detail::open_out(out_path);
            csv::write_traces(f, traces);
            out << "wrote " << traces.size() << " runs x " << tune_opts.iters << " iterations to "
                << out_path << '\n';
            return exit_ok;
        }

        if (report_cmd->parsed()) {
            auto gf = detail::open_in(grid_path);
            const auto grids = csv::read_grids(gf);
            auto tf = detail::open_in(traces_path);
            const auto traces = csv::read_traces(tf, report_warmup);
            const auto rows = build_report(grids, traces);
            if (rows.empty())
                throw error(errc::invalid_argument, "no workload appears in both inputs");
            auto f = detail::open_out(out_path);
            csv::write_report(f, rows);
            for (const auto& r : rows)
                detail::print_row(out, r);
            return exit_ok;
        }

        if (sweep_cmd->parsed()) {
            std::filesystem::create_directories(out_dir);
            const auto dir = std::filesystem::path(out_dir);
            auto grid_file = detail::open_out((dir / "grid.csv").string());
            std::vector<GridResult> grids;
            std::vector<RunTrace> all_traces;
            bool first = true;
            for (const auto& w : workload_registry()) {
                if (w.synthetic)
                    continue;
                const auto spec = make_workload_spec(w.name, grid_opts.size);
                out << w.name << ": exploring\n";
                grids.push_back(explore_workload(spec, parameters(), sweep_reps, budget));
                csv::write_grid(grid_file, grids.back(), first);
                first = false;
                out << w.name << ": tuning\n";
                auto traces = tune_workload(spec, parameters(), tune_opts.runs, tune_opts.iters,
                                            tune_opts.seed, tune_opts.warmup, search_options());
                all_traces.insert(all_traces.end(), traces.begin(), traces.end());
            }
            auto trace_file = detail::open_out((dir / "trace.csv").string());
            csv::write_traces(trace_file, all_traces);
            const auto rows = build_report(grids, all_traces);
            auto report_file = detail::open_out((dir / "report.csv").string());
            csv::write_report(report_file, rows);
            for (const auto& r : rows)
                detail::print_row(out, r);
            return exit_ok;
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_usage;
}

} // namespace autotune::cli

#endif // AUTOTUNE_CLI_HPP
