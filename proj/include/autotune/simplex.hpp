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
#ifndef AUTOTUNE_SIMPLEX_HPP
#define AUTOTUNE_SIMPLEX_HPP

#include <autotune/error.hpp>
#include <autotune/params.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace autotune {

/// Reflection, expansion, contraction and shrink factors.
struct Coefficients {
    double alpha = 1.0;
    double gamma = 2.0;
    double rho = 0.5;
    double sigma = 0.5;

    void validate() const {
        if (!(alpha > 0.0) || !(gamma > 1.0) || !(rho > 0.0 && rho < 1.0) ||
            !(sigma > 0.0 && sigma < 1.0))
            throw error(errc::invalid_coefficients,
                        "need alpha > 0, gamma > 1, 0 < rho < 1, 0 < sigma < 1");
    }
};

struct SearchOptions {
    Coefficients coefficients{};
    /// Evaluations per simplex (reset by restart) after which the search
    /// reports convergence.
    std::size_t max_evaluations = 100;
    /// Relative objective spread (max - min) / max below which the simplex
    /// counts as converged.
    double spread_tolerance = 1e-3;
};

struct Vertex {
    Configuration config;
    double objective = 0.0;

    friend bool operator==(const Vertex&, const Vertex&) = default;
};

enum class Phase {
    awaiting_initial,
    awaiting_reflection,
    awaiting_expansion,
    awaiting_contraction,
    awaiting_shrink,
    converged,
};

constexpr const char* to_string(Phase p) noexcept {
    switch (p) {
    case Phase::awaiting_initial: return "AwaitingInitial";
    case Phase::awaiting_reflection: return "AwaitingReflection";
    case Phase::awaiting_expansion: return "AwaitingExpansion";
    case Phase::awaiting_contraction: return "AwaitingContraction";
    case Phase::awaiting_shrink: return "AwaitingShrink";
    case Phase::converged: return "Converged";
    }
    return "Unknown";
}

/// Nelder-Mead over a bounded integer grid, driven one measurement at a time.
///
/// Every candidate point is rounded to the nearest grid point and clamped
/// into bounds before it is handed out. The caller alternates propose() and
/// report(); each report() consumes exactly one objective value. Shrink
/// steps, which need k new points, queue them and hand them out one per
/// report. Vertices that collapse onto an existing vertex during shrink (or
/// after an accepted step) are replaced by a random unused configuration.
///
/// A configuration that is proposed again is measured again; the new value
/// replaces the cached one and the objective of any vertex at that point.
class SimplexSearch {
public:
    SimplexSearch(ParameterSet set, std::uint64_t seed, SearchOptions options = {})
        : set_(std::move(set)), options_(options), rng_(seed) {
        if (set_.empty())
            throw error(errc::empty_parameter_set, "search needs at least one parameter");
        options_.coefficients.validate();
        start_initial();
    }

    /// Starts from an already-evaluated simplex (k + 1 vertices). The search
    /// continues as if those vertices had just been measured.
    static SimplexSearch from_simplex(ParameterSet set, std::vector<Vertex> simplex,
                                      std::uint64_t seed, SearchOptions options = {}) {
        SimplexSearch s(std::move(set), seed, options);
        if (simplex.size() != s.set_.size() + 1)
            throw error(errc::dimension_mismatch, "simplex needs k + 1 vertices");
        for (const auto& v : simplex) {
            if (!s.set_.contains(v.config))
                throw error(errc::invalid_bounds, "vertex " + to_string(v.config) +
                                                      " outside parameter bounds");
            check_objective(v.objective);
            s.remember(v.config, v.objective);
        }
        s.simplex_ = std::move(simplex);
        s.initial_.clear();
        s.finish_step();
        return s;
    }

    /// The configuration to measure next. Stable until report() is called.
    const Configuration& propose() {
        if (phase_ == Phase::converged)
            throw error(errc::search_converged, "no further proposals after convergence");
        outstanding_ = true;
        return pending_;
    }

    /// Binds a measured objective to the outstanding proposal and advances.
    void report(double objective) {
        if (!outstanding_ || phase_ == Phase::converged)
            throw error(errc::no_outstanding_proposal, "report() without a preceding propose()");
        check_objective(objective);
        outstanding_ = false;
        ++evaluations_;
        ++evaluations_since_restart_;
        remember(pending_, objective);

        switch (phase_) {
        case Phase::awaiting_initial: on_initial(objective); break;
        case Phase::awaiting_reflection: on_reflection(objective); break;
        case Phase::awaiting_expansion: on_expansion(objective); break;
        case Phase::awaiting_contraction: on_contraction(objective); break;
        case Phase::awaiting_shrink: on_replacement(objective); break;
        case Phase::converged: break;
        }
        if (phase_ != Phase::converged && budget_spent())
            phase_ = Phase::converged;
    }

    /// Records a measurement taken outside the search (e.g. of the default
    /// configuration). Updates cache and incumbent only.
    void observe(const Configuration& config, double objective) {
        if (!set_.contains(config))
            throw error(errc::invalid_bounds, to_string(config) + " outside parameter bounds");
        check_objective(objective);
        remember(config, objective);
    }

    bool is_converged() const {
        return phase_ == Phase::converged || simplex_converged() || budget_spent();
    }

    /// Fresh random simplex from the continuing PRNG stream. Incumbent and
    /// cache survive.
    void restart() { start_initial(); }

    Phase phase() const noexcept { return phase_; }
    /// Index of the next initial vertex while in AwaitingInitial.
    std::size_t initial_index() const noexcept { return initial_index_; }
    std::span<const Configuration> initial_configurations() const noexcept { return initial_; }
    std::span<const Vertex> simplex() const noexcept { return simplex_; }
    /// Replacement configurations still to be measured in AwaitingShrink.
    std::size_t pending_replacements() const noexcept {
        return phase_ == Phase::awaiting_shrink ? replacements_.size() - replacement_index_ : 0;
    }
    const std::optional<Vertex>& incumbent() const noexcept { return incumbent_; }
    std::size_t evaluations() const noexcept { return evaluations_; }
    std::size_t evaluations_since_restart() const noexcept { return evaluations_since_restart_; }
    const std::map<Configuration, double>& cache() const noexcept { return cache_; }
    const ParameterSet& parameters() const noexcept { return set_; }
    const SearchOptions& options() const noexcept { return options_; }

private:
    struct Replacement {
        std::size_t slot;
        Configuration config;
    };

    static constexpr std::uint64_t enumerate_limit = 4096;

    static void check_objective(double objective) {
        if (!std::isfinite(objective) || objective < 0.0)
            throw error(errc::invalid_objective, "objective must be finite and >= 0, got " +
                                                     std::to_string(objective));
    }

    std::size_t vertex_count() const noexcept { return set_.size() + 1; }

    bool budget_spent() const noexcept {
        return evaluations_since_restart_ >= options_.max_evaluations;
    }

    bool simplex_converged() const {
        if (simplex_.size() != vertex_count())
            return false;
        const bool collapsed = std::all_of(simplex_.begin(), simplex_.end(), [&](const Vertex& v) {
            return v.config == simplex_.front().config;
        });
        if (collapsed)
            return true;
        auto [lo, hi] = std::minmax_element(simplex_.begin(), simplex_.end(),
                                            [](const Vertex& a, const Vertex& b) {
                                                return a.objective < b.objective;
                                            });
        const double spread = hi->objective > 0.0
                                  ? (hi->objective - lo->objective) / hi->objective
                                  : 0.0;
        return spread < options_.spread_tolerance;
    }

    void remember(const Configuration& config, double objective) {
        cache_[config] = objective;
        for (auto& v : simplex_)
            if (v.config == config)
                v.objective = objective;
        for (auto& v : staged_)
            if (v.config == config)
                v.objective = objective;
        if (!incumbent_ || objective < incumbent_->objective)
            incumbent_ = Vertex{config, objective};
    }

    Configuration random_configuration() {
        Configuration c;
        c.values.reserve(set_.size());
        for (const auto& p : set_)
            c.values.push_back(std::uniform_int_distribution<std::int64_t>(p.lo(), p.hi())(rng_));
        return c;
    }

    /// Uniform over configurations not in `excluded`; nullopt if none remain.
    std::optional<Configuration> random_configuration_excluding(
        const std::set<Configuration>& excluded) {
        const std::uint64_t total = set_.cardinality();
        if (total <= excluded.size())
            return std::nullopt;
        if (total <= enumerate_limit) {
            std::vector<Configuration> free;
            for_each_configuration(set_, [&](const Configuration& c) {
                if (!excluded.contains(c))
                    free.push_back(c);
            });
            if (free.empty())
                return std::nullopt;
            std::uniform_int_distribution<std::size_t> pick(0, free.size() - 1);
            return free[pick(rng_)];
        }
        // The space is much larger than the excluded set; rejection terminates quickly.
        for (;;) {
            auto c = random_configuration();
            if (!excluded.contains(c))
                return c;
        }
    }

    std::vector<Configuration> sample_initial() {
        const std::size_t n = vertex_count();
        const std::uint64_t total = set_.cardinality();
        std::vector<Configuration> out;
        if (total <= enumerate_limit) {
            for_each_configuration(set_, [&](const Configuration& c) { out.push_back(c); });
            std::shuffle(out.begin(), out.end(), rng_);
            if (out.size() > n)
                out.resize(n);
            if (out.size() < n) {
                const std::vector<Configuration> all = out;
                std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
                while (out.size() < n)
                    out.push_back(all[pick(rng_)]);
            }
            return out;
        }
        std::set<Configuration> seen;
        while (out.size() < n) {
            auto c = random_configuration();
            if (seen.insert(c).second)
                out.push_back(std::move(c));
        }
        return out;
    }

    void start_initial() {
        initial_ = sample_initial();
        initial_index_ = 0;
        simplex_.clear();
        staged_.clear();
        replacements_.clear();
        replacement_index_ = 0;
        reflected_.reset();
        evaluations_since_restart_ = 0;
        outstanding_ = false;
        phase_ = Phase::awaiting_initial;
        pending_ = initial_.front();
    }

    void sort_simplex() {
        std::stable_sort(simplex_.begin(), simplex_.end(), [](const Vertex& a, const Vertex& b) {
            if (a.objective != b.objective)
                return a.objective < b.objective;
            return a.config < b.config;
        });
    }

    /// Sorts, then either converges, repairs duplicate vertices or reflects.
    void finish_step() {
        sort_simplex();
        if (simplex_converged() || budget_spent()) {
            phase_ = Phase::converged;
            return;
        }
        std::set<Configuration> present;
        std::vector<std::size_t> duplicates;
        for (std::size_t i = 0; i < simplex_.size(); ++i)
            if (!present.insert(simplex_[i].config).second)
                duplicates.push_back(i);
        replacements_.clear();
        for (auto slot : duplicates) {
            auto fresh = random_configuration_excluding(present);
            if (!fresh)
                break;
            present.insert(*fresh);
            replacements_.push_back({slot, std::move(*fresh)});
        }
        if (!replacements_.empty()) {
            begin_replacements();
            return;
        }
        start_reflection();
    }

    RealPoint centroid_without_worst() const {
        RealPoint c;
        c.coords.assign(set_.size(), 0.0);
        const std::size_t m = simplex_.size() - 1;
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t d = 0; d < set_.size(); ++d)
                c.coords[d] += static_cast<double>(simplex_[i].config[d]);
        for (auto& x : c.coords)
            x /= static_cast<double>(m);
        return c;
    }

    /// project(from + t * (to - from))
    Configuration along(const RealPoint& from, const Configuration& to, double t) const {
        RealPoint p = from;
        for (std::size_t d = 0; d < p.size(); ++d)
            p.coords[d] += t * (static_cast<double>(to[d]) - from.coords[d]);
        return project(p, set_);
    }

    void start_reflection() {
        centroid_ = centroid_without_worst();
        reflected_.reset();
        phase_ = Phase::awaiting_reflection;
        // c + alpha * (c - worst) == c + (-alpha) * (worst - c)
        pending_ = along(centroid_, simplex_.back().config, -options_.coefficients.alpha);
    }

    void replace_worst(Vertex v) {
        simplex_.back() = std::move(v);
        finish_step();
    }

    void on_initial(double objective) {
        simplex_.push_back({pending_, objective});
        ++initial_index_;
        if (initial_index_ < initial_.size()) {
            pending_ = initial_[initial_index_];
            return;
        }
        finish_step();
    }

    void on_reflection(double objective) {
        const double best = simplex_.front().objective;
        const double second_worst = simplex_[simplex_.size() - 2].objective;
        if (objective < best) {
            reflected_ = Vertex{pending_, objective};
            phase_ = Phase::awaiting_expansion;
            pending_ = along(centroid_, reflected_->config, options_.coefficients.gamma);
        } else if (objective < second_worst) {
            replace_worst({pending_, objective});
        } else {
            phase_ = Phase::awaiting_contraction;
            pending_ = along(centroid_, simplex_.back().config, options_.coefficients.rho);
        }
    }

    void on_expansion(double objective) {
        if (pending_ == reflected_->config)
            reflected_->objective = objective;
        if (objective < reflected_->objective)
            replace_worst({pending_, objective});
        else
            replace_worst(*reflected_);
    }

    void on_contraction(double objective) {
        if (objective < simplex_.back().objective)
            replace_worst({pending_, objective});
        else
            start_shrink();
    }

    void start_shrink() {
        const Vertex& best = simplex_.front();
        const RealPoint anchor = to_real(best.config);
        std::set<Configuration> taken;
        for (const auto& v : simplex_)
            taken.insert(v.config);
        std::set<Configuration> produced{best.config};
        replacements_.clear();
        for (std::size_t i = 1; i < simplex_.size(); ++i) {
            Configuration c = along(anchor, simplex_[i].config, options_.coefficients.sigma);
            if (taken.contains(c) || produced.contains(c)) {
                std::set<Configuration> excluded = taken;
                excluded.insert(produced.begin(), produced.end());
                if (auto fresh = random_configuration_excluding(excluded))
                    c = std::move(*fresh);
            }
            produced.insert(c);
            replacements_.push_back({i, std::move(c)});
        }
        begin_replacements();
    }

    void begin_replacements() {
        staged_ = simplex_;
        replacement_index_ = 0;
        phase_ = Phase::awaiting_shrink;
        pending_ = replacements_.front().config;
    }

    void on_replacement(double objective) {
        staged_[replacements_[replacement_index_].slot] = Vertex{pending_, objective};
        ++replacement_index_;
        if (replacement_index_ < replacements_.size()) {
            pending_ = replacements_[replacement_index_].config;
            return;
        }
        simplex_ = std::move(staged_);
        staged_.clear();
        replacements_.clear();
        replacement_index_ = 0;
        finish_step();
    }

    ParameterSet set_;
    SearchOptions options_;
    std::mt19937_64 rng_;
    Phase phase_ = Phase::awaiting_initial;

    std::vector<Configuration> initial_;
    std::size_t initial_index_ = 0;
    std::vector<Vertex> simplex_;
    RealPoint centroid_;
    std::optional<Vertex> reflected_;
    std::vector<Replacement> replacements_;
    std::size_t replacement_index_ = 0;
    std::vector<Vertex> staged_;

    Configuration pending_;
    bool outstanding_ = false;

    std::optional<Vertex> incumbent_;
    std::map<Configuration, double> cache_;
    std::size_t evaluations_ = 0;
    std::size_t evaluations_since_restart_ = 0;
};

} // namespace autotune

#endif // AUTOTUNE_SIMPLEX_HPP
