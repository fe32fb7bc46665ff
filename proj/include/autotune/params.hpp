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
#ifndef AUTOTUNE_PARAMS_HPP
#define AUTOTUNE_PARAMS_HPP

#include <autotune/error.hpp>

#include <algorithm>
#include <cmath>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace autotune {

/// One tunable dimension: the inclusive integer interval [lo, hi] and the
/// value used when nobody has tuned it yet.
class ParameterSpec {
public:
    ParameterSpec(std::string name, std::int64_t lo, std::int64_t hi, std::int64_t default_value)
        : name_(std::move(name)), lo_(lo), hi_(hi), default_(default_value) {
        if (name_.empty())
            throw error(errc::empty_name, "parameter name must not be empty");
        if (lo_ > hi_)
            throw error(errc::invalid_bounds, name_ + ": lo " + std::to_string(lo_) + " > hi " +
                                                  std::to_string(hi_));
        if (default_ < lo_ || default_ > hi_)
            throw error(errc::invalid_bounds, name_ + ": default " + std::to_string(default_) +
                                                  " outside [" + std::to_string(lo_) + ", " +
                                                  std::to_string(hi_) + "]");
    }

    const std::string& name() const noexcept { return name_; }
    std::int64_t lo() const noexcept { return lo_; }
    std::int64_t hi() const noexcept { return hi_; }
    std::int64_t default_value() const noexcept { return default_; }

    /// Number of admissible values, saturating at uint64 max.
    std::uint64_t cardinality() const noexcept {
        return static_cast<std::uint64_t>(hi_) - static_cast<std::uint64_t>(lo_) + 1;
    }
    bool contains(std::int64_t v) const noexcept { return v >= lo_ && v <= hi_; }

    friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;

private:
    std::string name_;
    std::int64_t lo_;
    std::int64_t hi_;
    std::int64_t default_;
};

inline ParameterSpec make_parameter(std::string name, std::int64_t lo, std::int64_t hi,
                                    std::int64_t default_value) {
    return ParameterSpec(std::move(name), lo, hi, default_value);
}

/// A point of the discrete search space, one value per parameter in
/// ParameterSet order. Ordered lexicographically.
struct Configuration {
    std::vector<std::int64_t> values;

    std::size_t size() const noexcept { return values.size(); }
    std::int64_t operator[](std::size_t i) const { return values[i]; }
    std::int64_t& operator[](std::size_t i) { return values[i]; }

    friend auto operator<=>(const Configuration&, const Configuration&) = default;
    friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// A continuous point as produced by simplex arithmetic; may lie outside bounds.
struct RealPoint {
    std::vector<double> coords;

    std::size_t size() const noexcept { return coords.size(); }
};

inline std::string to_string(const Configuration& c) {
    std::string out = "(";
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (i)
            out += ", ";
        out += std::to_string(c[i]);
    }
    return out + ")";
}

inline RealPoint to_real(const Configuration& c) {
    RealPoint p;
    p.coords.assign(c.values.begin(), c.values.end());
    return p;
}

/// Ordered list of parameters. The order fixes coordinate order everywhere.
class ParameterSet {
public:
    ParameterSet() = default;

    explicit ParameterSet(std::vector<ParameterSpec> params) : params_(std::move(params)) {
        if (params_.empty())
            throw error(errc::empty_parameter_set, "a parameter set needs at least one parameter");
        for (std::size_t i = 0; i < params_.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                if (params_[i].name() == params_[j].name())
                    throw error(errc::duplicate_name, "parameter '" + params_[i].name() +
                                                          "' appears twice");
    }

    std::size_t size() const noexcept { return params_.size(); }
    bool empty() const noexcept { return params_.empty(); }
    const ParameterSpec& operator[](std::size_t i) const { return params_[i]; }
    auto begin() const noexcept { return params_.begin(); }
    auto end() const noexcept { return params_.end(); }

    std::optional<std::size_t> index_of(const std::string& name) const {
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (params_[i].name() == name)
                return i;
        return std::nullopt;
    }

    /// Number of configurations in the space, saturating at uint64 max.
    std::uint64_t cardinality() const noexcept {
        constexpr auto max = std::numeric_limits<std::uint64_t>::max();
        std::uint64_t n = 1;
        for (const auto& p : params_) {
            const auto c = p.cardinality();
            if (c == 0 || n > max / c)
                return max;
            n *= c;
        }
        return n;
    }

    bool contains(const Configuration& c) const noexcept {
        if (c.size() != params_.size())
            return false;
        for (std::size_t i = 0; i < params_.size(); ++i)
            if (!params_[i].contains(c[i]))
                return false;
        return true;
    }

    friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

private:
    std::vector<ParameterSpec> params_;
};

/// Rounds each coordinate to the nearest integer (halves go toward +inf),
/// then clamps into the parameter's interval.
inline Configuration project(const RealPoint& point, const ParameterSet& set) {
    if (point.size() != set.size())
        throw error(errc::dimension_mismatch, "point has " + std::to_string(point.size()) +
                                                  " coordinates, parameter set has " +
                                                  std::to_string(set.size()));
    Configuration out;
    out.values.resize(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double x = point.coords[i];
        if (!std::isfinite(x))
            throw error(errc::non_finite_coordinate,
                        "coordinate " + std::to_string(i) + " is not finite");
        const double r = std::floor(x + 0.5);
        const auto& p = set[i];
        if (r <= static_cast<double>(p.lo()))
            out[i] = p.lo();
        else if (r >= static_cast<double>(p.hi()))
            out[i] = p.hi();
        else
            out[i] = static_cast<std::int64_t>(r);
    }
    return out;
}

inline Configuration default_configuration(const ParameterSet& set) {
    Configuration out;
    out.values.reserve(set.size());
    for (const auto& p : set)
        out.values.push_back(p.default_value());
    return out;
}

/// Visits every configuration in lexicographic order.
template <typename Fn>
void for_each_configuration(const ParameterSet& set, Fn&& fn) {
    if (set.empty())
        return;
    Configuration c;
    for (const auto& p : set)
        c.values.push_back(p.lo());
    for (;;) {
        fn(static_cast<const Configuration&>(c));
        std::size_t i = set.size();
        while (i > 0) {
            --i;
            if (c[i] < set[i].hi()) {
                ++c[i];
                break;
            }
            c[i] = set[i].lo();
            if (i == 0)
                return;
        }
    }
}

} // namespace autotune

#endif // AUTOTUNE_PARAMS_HPP
