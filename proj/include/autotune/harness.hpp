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
#ifndef AUTOTUNE_HARNESS_HPP
#define AUTOTUNE_HARNESS_HPP

#include <autotune/csv.hpp>
#include <autotune/error.hpp>
#include <autotune/params.hpp>
#include <autotune/pool.hpp>
#include <autotune/tuner.hpp>
#include <autotune/workloads.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <numeric>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace autotune {

/// Exhaustive measurement of a parameter grid.
struct GridResult {
    std::string workload;
    ParameterSet parameters;
    std::size_t repetitions = 0;
    std::map<Configuration, std::vector<double>> cells;

    double mean(const Configuration& c) const {
        const auto it = cells.find(c);
        if (it == cells.end() || it->second.empty())
            throw error(errc::invalid_argument, "grid has no cell " + to_string(c));
        return std::accumulate(it->second.begin(), it->second.end(), 0.0) /
               static_cast<double>(it->second.size());
    }

    friend bool operator==(const GridResult&, const GridResult&) = default;
};

inline constexpr std::size_t default_measurement_budget = 100'000;

/// Calls `measure(config, rep)` for every configuration in lexicographic
/// order, `repetitions` times each before moving on.
template <typename Measure>
GridResult explore(const ParameterSet& set, std::size_t repetitions, Measure&& measure,
                   std::size_t max_measurements = default_measurement_budget) {
    if (repetitions < 1)
        throw error(errc::invalid_argument, "repetitions must be >= 1");
    const std::uint64_t cells = set.cardinality();
    if (cells > max_measurements / repetitions)
        throw error(errc::budget_exceeded, std::to_string(cells) + " cells x " +
                                               std::to_string(repetitions) +
                                               " repetitions exceeds budget of " +
                                               std::to_string(max_measurements));
    GridResult grid;
    grid.parameters = set;
    grid.repetitions = repetitions;
    for_each_configuration(set, [&](const Configuration& c) {
        auto& durations = grid.cells[c];
        durations.reserve(repetitions);
        for (std::size_t rep = 0; rep < repetitions; ++rep)
            durations.push_back(measure(c, rep));
    });
    return grid;
}

/// Exhaustive exploration of a workload; one fresh pool per configuration,
/// every pass checksum-verified.
inline GridResult explore_workload(const WorkloadSpec& spec, const ParameterSet& set,
                                   std::size_t repetitions,
                                   std::size_t max_measurements = default_measurement_budget) {
    std::optional<ThreadPool> pool;
    std::optional<Configuration> pool_config;
    GridResult grid = explore(
        set, repetitions,
        [&](const Configuration& c, std::size_t) {
            const PoolConfig pc = PoolConfig::from(set, c);
            if (!pool_config || *pool_config != c) {
                pool.reset();
                pool.emplace(pc.workers);
                pool_config = c;
            }
            const auto start = std::chrono::steady_clock::now();
            run_workload_checked(spec, *pool, pc.grain);
            const auto stop = std::chrono::steady_clock::now();
            return std::chrono::duration<double>(stop - start).count();
        },
        max_measurements);
    grid.workload = spec.name;
    return grid;
}

struct GridExtremes {
    Configuration best;
    Configuration worst;
};

/// Argmin / argmax of the cell means; ties go to the lexicographically
/// smallest configuration.
inline GridExtremes grid_extremes(const GridResult& grid) {
    if (grid.cells.empty())
        throw error(errc::invalid_argument, "empty grid");
    std::optional<std::pair<Configuration, double>> best, worst;
    for (const auto& [config, durations] : grid.cells) {
        const double m = grid.mean(config);
        if (!best || m < best->second)
            best = {config, m};
        if (!worst || m > worst->second)
            worst = {config, m};
    }
    return {best->first, worst->first};
}

inline double speedup(double sequential_s, double time_s) {
    if (!(time_s > 0.0))
        throw error(errc::zero_duration, "speedup needs a positive time");
    return sequential_s / time_s;
}

/// Runs `runs` independent tuning runs (seeds base_seed, base_seed + 1, ...),
/// each for `iterations` calls of `job(pool, grain)` through tuned_invoke.
template <typename Job>
std::vector<RunTrace> tune_runs(const ParameterSet& set, std::size_t runs,
                                std::size_t iterations, std::uint64_t base_seed, Job&& job,
                                std::size_t warmup = default_warmup, SearchOptions options = {}) {
    if (runs < 1 || iterations < 1)
        throw error(errc::invalid_argument, "runs and iterations must be >= 1");
    std::vector<RunTrace> traces;
    traces.reserve(runs);
    for (std::size_t r = 0; r < runs; ++r) {
        Tuner tuner(set, base_seed + r, warmup, options);
        ThreadPool pool(PoolConfig::from(set, default_configuration(set)).workers);
        for (std::size_t i = 0; i < iterations; ++i)
            tuned_invoke(pool, tuner, job);
        traces.push_back(std::move(tuner.trace()));
        traces.back().run = r;
    }
    return traces;
}

inline std::vector<RunTrace> tune_workload(const WorkloadSpec& spec, const ParameterSet& set,
                                           std::size_t runs, std::size_t iterations,
                                           std::uint64_t base_seed,
                                           std::size_t warmup = default_warmup,
                                           SearchOptions options = {}) {
    auto traces = tune_runs(
        set, runs, iterations, base_seed,
        [&](ThreadPool& pool, std::int64_t grain) { run_workload_checked(spec, pool, grain); },
        warmup, options);
    for (auto& t : traces)
        t.workload = spec.name;
    return traces;
}

/// The configuration a run settled on (that of its fastest measurement) and
/// the mean of all of the run's measurements at that configuration.
inline std::pair<Configuration, double> converged_incumbent(const RunTrace& trace) {
    if (trace.measurements.empty())
        throw error(errc::invalid_argument, "empty trace");
    const auto fastest = std::min_element(
        trace.measurements.begin(), trace.measurements.end(),
        [](const Measurement& a, const Measurement& b) { return a.duration < b.duration; });
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& m : trace.measurements)
        if (m.config == fastest->config) {
            sum += m.duration;
            ++n;
        }
    return {fastest->config, sum / static_cast<double>(n)};
}

/// One summary line: grid extremes, default and autotuned results.
struct ReportRow {
    std::string workload;
    double sequential_s = 0;
    double worst_s = 0, worst_speedup = 0;
    double best_s = 0, best_speedup = 0;
    double default_s = 0, default_speedup = 0;
    double autotuned_ideal_s = 0, autotuned_ideal_speedup = 0;
    double autotuned_avg_s = 0, autotuned_avg_speedup = 0;
    std::optional<double> amortization; // nullopt = never
    std::size_t trace_length = 0;
    /// Autotuned ideal beat the grid optimum by more than 5%: noise.
    bool noise_warning = false;
    Configuration best, worst, default_config;
};

/// Default configuration of the grid's parameters: builtin defaults for
/// threads / grain_index, the lower bound otherwise, projected into bounds.
inline Configuration grid_default(const ParameterSet& set, std::size_t cores = hardware_cores()) {
    RealPoint p;
    for (const auto& spec : set) {
        if (spec.name() == threads_param)
            p.coords.push_back(static_cast<double>(cores));
        else if (spec.name() == grain_index_param)
            p.coords.push_back(static_cast<double>(default_grain_index));
        else
            p.coords.push_back(static_cast<double>(spec.lo()));
    }
    return project(p, set);
}

/// The single-threaded reference: threads = 1 at the default grain.
inline double grid_sequential(const GridResult& grid, std::size_t cores = hardware_cores()) {
    const auto t = grid.parameters.index_of(threads_param);
    if (!t)
        throw error(errc::invalid_argument, "grid has no threads parameter");
    Configuration c = grid_default(grid.parameters, cores);
    c[*t] = grid.parameters[*t].lo();
    return grid.mean(c);
}

inline ReportRow summarize(std::span<const RunTrace> traces, const GridResult& grid,
                           double sequential_s,
                           std::optional<Configuration> default_config = std::nullopt) {
    if (traces.empty() || grid.cells.empty())
        throw error(errc::invalid_argument, "summarize needs traces and a grid");
    ReportRow row;
    row.workload = grid.workload;
    row.sequential_s = sequential_s;

    const auto ext = grid_extremes(grid);
    row.best = ext.best;
    row.worst = ext.worst;
    row.default_config = default_config.value_or(grid_default(grid.parameters));
    row.best_s = grid.mean(ext.best);
    row.worst_s = grid.mean(ext.worst);
    row.default_s = grid.mean(row.default_config);

    double ideal = 0.0, total = 0.0, amortized_sum = 0.0;
    std::size_t amortized_runs = 0;
    for (std::size_t i = 0; i < traces.size(); ++i) {
        const double d = converged_incumbent(traces[i]).second;
        ideal = i == 0 ? d : std::min(ideal, d);
        total += d;
        if (auto a = amortization_iteration(traces[i])) {
            amortized_sum += static_cast<double>(*a);
            ++amortized_runs;
        }
        row.trace_length = std::max(row.trace_length, traces[i].measurements.size());
    }
    row.autotuned_ideal_s = ideal;
    row.autotuned_avg_s = total / static_cast<double>(traces.size());
    if (amortized_runs > 0)
        row.amortization = amortized_sum / static_cast<double>(amortized_runs);

    row.worst_speedup = speedup(sequential_s, row.worst_s);
    row.best_speedup = speedup(sequential_s, row.best_s);
    row.default_speedup = speedup(sequential_s, row.default_s);
    row.autotuned_ideal_speedup = speedup(sequential_s, row.autotuned_ideal_s);
    row.autotuned_avg_speedup = speedup(sequential_s, row.autotuned_avg_s);
    row.noise_warning = row.autotuned_ideal_s < 0.95 * row.best_s;
    return row;
}

/// Report for every workload present in both inputs, in grid order.
inline std::vector<ReportRow> build_report(std::span<const GridResult> grids,
                                           std::span<const RunTrace> traces,
                                           std::size_t cores = hardware_cores()) {
    std::vector<ReportRow> rows;
    for (const auto& g : grids) {
        std::vector<RunTrace> mine;
        for (const auto& t : traces)
            if (t.workload == g.workload)
                mine.push_back(t);
        if (mine.empty())
            continue;
        rows.push_back(summarize(mine, g, grid_sequential(g, cores), grid_default(g.parameters, cores)));
    }
    return rows;
}

namespace csv {

/// Header: workload,<parameter names...>,rep,duration_s
inline void write_grid(std::ostream& out, const GridResult& grid, bool header = true) {
    if (header) {
        out << "workload";
        for (const auto& p : grid.parameters)
            out << ',' << p.name();
        out << ",rep,duration_s\n";
    }
    for (const auto& [config, durations] : grid.cells)
        for (std::size_t rep = 0; rep < durations.size(); ++rep) {
            out << grid.workload;
            for (auto v : config.values)
                out << ',' << v;
            out << ',' << rep << ',' << seconds(durations[rep]) << '\n';
        }
}

/// One GridResult per workload, in order of first appearance. Bounds are
/// inferred from the observed configurations.
inline std::vector<GridResult> read_grids(std::istream& in) {
    const Table t = read_table(in);
    const std::size_t c_rep = t.column("rep");
    const std::size_t c_dur = t.column("duration_s");
    if (t.column("workload") != 0 || c_rep + 2 != t.header.size() || c_dur + 1 != t.header.size() ||
        t.header.size() < 4)
        throw error(errc::parse_error, "unexpected grid header layout");
    const std::vector<std::string> names(t.header.begin() + 1, t.header.end() - 2);

    std::vector<GridResult> grids;
    std::map<std::string, std::size_t> index;
    for (const auto& row : t.rows) {
        auto [it, inserted] = index.try_emplace(row[0], grids.size());
        if (inserted) {
            grids.emplace_back();
            grids.back().workload = row[0];
        }
        Configuration c;
        for (std::size_t i = 0; i < names.size(); ++i)
            c.values.push_back(to_int(row[1 + i]));
        const auto rep = static_cast<std::size_t>(to_int(row[c_rep]));
        auto& durations = grids[it->second].cells[c];
        if (rep != durations.size())
            throw error(errc::parse_error, "repetitions out of order for " + to_string(c));
        durations.push_back(to_double(row[c_dur]));
    }
    for (auto& g : grids) {
        std::vector<Configuration> seen;
        std::size_t reps = 0;
        for (const auto& [c, d] : g.cells) {
            seen.push_back(c);
            if (reps != 0 && d.size() != reps)
                throw error(errc::parse_error, g.workload + ": cells have unequal repetitions");
            reps = d.size();
        }
        g.repetitions = reps;
        g.parameters = infer_parameters(names, seen);
        if (g.parameters.cardinality() != g.cells.size())
            throw error(errc::parse_error, g.workload + ": grid is incomplete");
    }
    return grids;
}

inline constexpr const char* report_header =
    "workload,sequential_s,worst_s,worst_speedup,best_s,best_speedup,default_s,default_speedup,"
    "autotuned_ideal_s,autotuned_ideal_speedup,autotuned_avg_s,autotuned_avg_speedup,"
    "amortization,trace_length,noise_warning";

/// Times with 6 decimals, speedups with 2, amortization with 1 or "never".
inline void write_report(std::ostream& out, std::span<const ReportRow> rows) {
    out << report_header << '\n';
    for (const auto& r : rows) {
        out << r.workload << ',' << fixed(r.sequential_s, 6) << ',' << fixed(r.worst_s, 6) << ','
            << fixed(r.worst_speedup, 2) << ',' << fixed(r.best_s, 6) << ','
            << fixed(r.best_speedup, 2) << ',' << fixed(r.default_s, 6) << ','
            << fixed(r.default_speedup, 2) << ',' << fixed(r.autotuned_ideal_s, 6) << ','
            << fixed(r.autotuned_ideal_speedup, 2) << ',' << fixed(r.autotuned_avg_s, 6) << ','
            << fixed(r.autotuned_avg_speedup, 2) << ','
            << (r.amortization ? fixed(*r.amortization, 1) : std::string("never")) << ','
            << r.trace_length << ',' << (r.noise_warning ? 1 : 0) << '\n';
    }
}

} // namespace csv

} // namespace autotune

#endif // AUTOTUNE_HARNESS_HPP
