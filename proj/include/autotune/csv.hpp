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
#ifndef AUTOTUNE_CSV_HPP
#define AUTOTUNE_CSV_HPP

#include <autotune/error.hpp>
#include <autotune/params.hpp>
#include <autotune/tuner.hpp>

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace autotune::csv {

/// Fixed-point with `decimals` digits, "." separator regardless of locale.
inline std::string fixed(double v, int decimals) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
    return std::string(buf, res.ptr);
}

inline std::string seconds(double v) { return fixed(v, 9); }

inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find(',', start);
        out.emplace_back(line.substr(start, pos == std::string_view::npos ? pos : pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::size_t column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw error(errc::parse_error, "missing column '" + std::string(name) + "'");
    }
};

inline Table read_table(std::istream& in) {
    Table t;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        auto fields = split(line);
        if (t.header.empty()) {
            t.header = std::move(fields);
            continue;
        }
        if (fields.size() != t.header.size())
            throw error(errc::parse_error, "line " + std::to_string(line_no) + ": expected " +
                                               std::to_string(t.header.size()) + " fields, got " +
                                               std::to_string(fields.size()));
        t.rows.push_back(std::move(fields));
    }
    if (t.header.empty())
        throw error(errc::parse_error, "empty CSV input");
    return t;
}

inline std::int64_t to_int(const std::string& s) {
    std::int64_t v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw error(errc::parse_error, "not an integer: '" + s + "'");
    return v;
}

inline double to_double(const std::string& s) {
    double v = 0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        throw error(errc::parse_error, "not a number: '" + s + "'");
    return v;
}

/// Parameter set spanning the observed values of each column. Defaults are
/// taken from `defaults` when given and in range, else the lower bound.
inline ParameterSet infer_parameters(const std::vector<std::string>& names,
                                     const std::vector<Configuration>& seen,
                                     const std::optional<Configuration>& defaults = std::nullopt) {
    std::vector<ParameterSpec> specs;
    for (std::size_t i = 0; i < names.size(); ++i) {
        std::int64_t lo = seen.front()[i], hi = seen.front()[i];
        for (const auto& c : seen) {
            lo = std::min(lo, c[i]);
            hi = std::max(hi, c[i]);
        }
        std::int64_t d = lo;
        if (defaults && (*defaults)[i] >= lo && (*defaults)[i] <= hi)
            d = (*defaults)[i];
        specs.push_back(make_parameter(names[i], lo, hi, d));
    }
    return ParameterSet(std::move(specs));
}

// --- traces -----------------------------------------------------------------

/// Header: workload,run,iteration,<parameter names...>,duration_s
inline void write_traces(std::ostream& out, std::span<const RunTrace> traces) {
    if (traces.empty())
        return;
    const ParameterSet& set = traces.front().parameters;
    out << "workload,run,iteration";
    for (const auto& p : set)
        out << ',' << p.name();
    out << ",duration_s\n";
    for (const auto& t : traces) {
        if (t.parameters.size() != set.size())
            throw error(errc::dimension_mismatch, "traces use different parameter sets");
        for (const auto& m : t.measurements) {
            out << t.workload << ',' << t.run << ',' << m.iteration;
            for (auto v : m.config.values)
                out << ',' << v;
            out << ',' << seconds(m.duration) << '\n';
        }
    }
}

/// Groups rows by (workload, run) in order of first appearance. Bounds are
/// inferred from the observed values; the first `warmup` measurements of each
/// run form its default-configuration baseline.
inline std::vector<RunTrace> read_traces(std::istream& in, std::size_t warmup = default_warmup) {
    const Table t = read_table(in);
    const std::size_t c_workload = t.column("workload");
    const std::size_t c_run = t.column("run");
    const std::size_t c_iter = t.column("iteration");
    const std::size_t c_dur = t.column("duration_s");
    if (c_workload != 0 || c_run != 1 || c_iter != 2 || c_dur != t.header.size() - 1 ||
        t.header.size() < 5)
        throw error(errc::parse_error, "unexpected trace header layout");
    const std::vector<std::string> names(t.header.begin() + 3, t.header.end() - 1);

    std::vector<RunTrace> traces;
    std::map<std::pair<std::string, std::size_t>, std::size_t> index;
    for (const auto& row : t.rows) {
        const auto run = static_cast<std::size_t>(to_int(row[c_run]));
        auto [it, inserted] = index.try_emplace({row[c_workload], run}, traces.size());
        if (inserted) {
            traces.emplace_back();
            traces.back().workload = row[c_workload];
            traces.back().run = run;
            traces.back().warmup = warmup;
        }
        Measurement m;
        m.iteration = static_cast<std::size_t>(to_int(row[c_iter]));
        for (std::size_t i = 0; i < names.size(); ++i)
            m.config.values.push_back(to_int(row[3 + i]));
        m.duration = to_double(row[c_dur]);
        traces[it->second].measurements.push_back(std::move(m));
    }
    for (auto& tr : traces) {
        std::vector<Configuration> seen;
        for (const auto& m : tr.measurements)
            seen.push_back(m.config);
        std::optional<Configuration> first;
        if (warmup > 0)
            first = tr.measurements.front().config;
        tr.parameters = infer_parameters(names, seen, first);
        tr.baseline_default_duration = warmup_baseline(tr);
    }
    return traces;
}

} // namespace autotune::csv

#endif // AUTOTUNE_CSV_HPP
