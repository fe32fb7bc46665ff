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
#ifndef AUTOTUNE_TUNER_HPP
#define AUTOTUNE_TUNER_HPP

#include <autotune/error.hpp>
#include <autotune/params.hpp>
#include <autotune/simplex.hpp>

#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace autotune {

/// Warmup iterations at the default configuration used to estimate its cost.
inline constexpr std::size_t default_warmup = 5;

struct Measurement {
    Configuration config;
    double duration = 0.0; // seconds
    std::size_t iteration = 0;

    friend bool operator==(const Measurement&, const Measurement&) = default;
};

/// Everything one tuning run observed, in iteration order. The first
/// `warmup` measurements are taken at the default configuration.
struct RunTrace {
    std::string workload;
    std::size_t run = 0;
    std::uint64_t seed = 0;
    ParameterSet parameters;
    std::size_t warmup = 0;
    std::vector<Measurement> measurements;
    std::optional<double> baseline_default_duration;

    friend bool operator==(const RunTrace&, const RunTrace&) = default;
};

/// Mean of the warmup measurements, or nullopt if the trace is too short.
inline std::optional<double> warmup_baseline(const RunTrace& trace) {
    if (trace.warmup == 0 || trace.measurements.size() < trace.warmup)
        return std::nullopt;
    double sum = 0.0;
    for (std::size_t i = 0; i < trace.warmup; ++i)
        sum += trace.measurements[i].duration;
    return sum / static_cast<double>(trace.warmup);
}

/// Smallest n >= 1 such that the first n post-warmup durations sum to at most
/// n * baseline. nullopt stands for "never": no baseline, or no such n.
inline std::optional<std::size_t> amortization_iteration(const RunTrace& trace) {
    if (!trace.baseline_default_duration || trace.measurements.size() < trace.warmup)
        return std::nullopt;
    const double baseline = *trace.baseline_default_duration;
    double cumulative = 0.0;
    std::size_t n = 0;
    for (std::size_t i = trace.warmup; i < trace.measurements.size(); ++i) {
        cumulative += trace.measurements[i].duration;
        ++n;
        if (cumulative <= static_cast<double>(n) * baseline)
            return n;
    }
    return std::nullopt;
}

enum class TunerMode { warmup, tuning, holding };

constexpr const char* to_string(TunerMode m) noexcept {
    switch (m) {
    case TunerMode::warmup: return "Warmup";
    case TunerMode::tuning: return "Tuning";
    case TunerMode::holding: return "Holding";
    }
    return "Unknown";
}

/// The online feedback loop. Code under tuning asks for a configuration,
/// runs with it and reports how long that took; every report is one
/// iteration. After the warmup the search drives the configurations until it
/// converges, then the tuner holds the best configuration seen.
class Tuner {
public:
    Tuner(ParameterSet set, std::uint64_t seed, std::size_t warmup = default_warmup,
          SearchOptions options = {})
        : search_(set, seed, options), warmup_remaining_(warmup) {
        trace_.parameters = std::move(set);
        trace_.seed = seed;
        trace_.warmup = warmup;
        mode_ = warmup > 0 ? TunerMode::warmup : TunerMode::tuning;
    }

    Configuration next_config() {
        switch (mode_) {
        case TunerMode::warmup: return default_configuration(trace_.parameters);
        case TunerMode::tuning: return search_.propose();
        case TunerMode::holding: break;
        }
        return search_.incumbent()->config;
    }

    void report_duration(double seconds) {
        if (!std::isfinite(seconds))
            throw error(errc::non_finite_duration, "duration is not finite");
        if (seconds < 0.0)
            throw error(errc::invalid_argument, "duration must be >= 0");

        Configuration config = next_config();
        switch (mode_) {
        case TunerMode::warmup:
            search_.observe(config, seconds);
            if (--warmup_remaining_ == 0) {
                mode_ = TunerMode::tuning;
                append(std::move(config), seconds);
                trace_.baseline_default_duration = warmup_baseline(trace_);
                return;
            }
            break;
        case TunerMode::tuning:
            search_.report(seconds);
            if (search_.is_converged())
                mode_ = TunerMode::holding;
            break;
        case TunerMode::holding: break;
        }
        append(std::move(config), seconds);
    }

    /// Times one invocation of `body(config)` on the monotonic clock and
    /// reports it. If the body throws, nothing is recorded.
    template <typename Body>
    void measured_section(Body&& body) {
        const Configuration config = next_config();
        const auto start = std::chrono::steady_clock::now();
        body(config);
        const auto stop = std::chrono::steady_clock::now();
        report_duration(std::chrono::duration<double>(stop - start).count());
    }

    /// Starts a fresh simplex and resumes tuning; the incumbent is kept.
    void restart() {
        search_.restart();
        if (mode_ == TunerMode::holding)
            mode_ = TunerMode::tuning;
    }

    TunerMode mode() const noexcept { return mode_; }
    std::size_t warmup_remaining() const noexcept { return warmup_remaining_; }
    std::size_t iterations() const noexcept { return trace_.measurements.size(); }
    const RunTrace& trace() const noexcept { return trace_; }
    RunTrace& trace() noexcept { return trace_; }
    const SimplexSearch& search() const noexcept { return search_; }
    const ParameterSet& parameters() const noexcept { return trace_.parameters; }
    std::optional<std::size_t> amortization() const { return amortization_iteration(trace_); }

private:
    void append(Configuration config, double seconds) {
        trace_.measurements.push_back({std::move(config), seconds, trace_.measurements.size() + 1});
    }

    SimplexSearch search_;
    RunTrace trace_;
    TunerMode mode_ = TunerMode::tuning;
    std::size_t warmup_remaining_ = 0;
};

} // namespace autotune

#endif // AUTOTUNE_TUNER_HPP
