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
#ifndef AUTOTUNE_WORKLOADS_HPP
#define AUTOTUNE_WORKLOADS_HPP

#include <autotune/error.hpp>
#include <autotune/pool.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace autotune {

// Each kernel is a pure function of its index, so neither worker count nor
// grain can change a checksum.
namespace kernels {

// --- raytrace -----------------------------------------------------------------

struct Vec3 {
    double x = 0, y = 0, z = 0;
};
constexpr Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
constexpr Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
constexpr Vec3 operator*(Vec3 a, double s) { return {a.x * s, a.y * s, a.z * s}; }
constexpr double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 normalize(Vec3 v) { return v * (1.0 / std::sqrt(dot(v, v))); }

struct Sphere {
    Vec3 center;
    double radius;
    Vec3 color;
};

inline constexpr std::array<Sphere, 8> scene{{
    {{0.0, -1001.0, -6.0}, 1000.0, {0.60, 0.60, 0.55}}, // floor
    {{0.0, 0.0, -6.0}, 1.0, {0.90, 0.20, 0.20}},
    {{-2.2, -0.2, -7.0}, 0.8, {0.20, 0.80, 0.30}},
    {{2.1, -0.4, -5.5}, 0.6, {0.20, 0.30, 0.90}},
    {{-0.9, -0.6, -4.2}, 0.4, {0.90, 0.90, 0.20}},
    {{1.0, 1.2, -8.0}, 1.1, {0.70, 0.30, 0.80}},
    {{-1.6, 1.4, -9.5}, 1.3, {0.30, 0.80, 0.80}},
    {{0.6, -0.7, -3.6}, 0.3, {0.95, 0.55, 0.15}},
}};

inline constexpr Vec3 light_dir_raw{-0.5, 1.0, 0.6};

/// Distance along the ray to the nearest sphere, and its index.
inline bool nearest_hit(Vec3 origin, Vec3 dir, double& t_hit, std::size_t& index) {
    bool hit = false;
    t_hit = 1e30;
    for (std::size_t i = 0; i < scene.size(); ++i) {
        const Vec3 oc = origin - scene[i].center;
        const double b = dot(oc, dir);
        const double c = dot(oc, oc) - scene[i].radius * scene[i].radius;
        const double disc = b * b - c;
        if (disc < 0.0)
            continue;
        const double s = std::sqrt(disc);
        double t = -b - s;
        if (t < 1e-6)
            t = -b + s;
        if (t > 1e-6 && t < t_hit) {
            t_hit = t;
            index = i;
            hit = true;
        }
    }
    return hit;
}

inline Vec3 shade(Vec3 origin, Vec3 dir) {
    double t = 0.0;
    std::size_t i = 0;
    if (!nearest_hit(origin, dir, t, i)) {
        const double sky = 0.5 * (dir.y + 1.0);
        return Vec3{0.55, 0.70, 0.95} * sky + Vec3{1.0, 1.0, 1.0} * (1.0 - sky) * 0.3;
    }
    const Vec3 light = normalize(light_dir_raw);
    const Vec3 p = origin + dir * t;
    const Vec3 n = normalize(p - scene[i].center);
    double lambert = std::max(0.0, dot(n, light));
    if (lambert > 0.0) {
        double ts = 0.0;
        std::size_t j = 0;
        if (nearest_hit(p + n * 1e-4, light, ts, j))
            lambert = 0.0;
    }
    return scene[i].color * (0.12 + 0.88 * lambert);
}

inline std::int64_t quantize(double c) {
    return static_cast<std::int64_t>(std::clamp(c, 0.0, 1.0) * 255.0 + 0.5);
}

/// Packed 0xRRGGBB of pixel `index` in a side x side image, 2x2 supersampled.
inline std::int64_t raytrace_pixel(std::int64_t index, std::int64_t side) {
    const std::int64_t px = index % side;
    const std::int64_t py = index / side;
    const double aspect_scale = std::tan(0.5 * 60.0 * 3.14159265358979323846 / 180.0);
    Vec3 sum{};
    for (int sy = 0; sy < 2; ++sy)
        for (int sx = 0; sx < 2; ++sx) {
            const double u = (2.0 * (static_cast<double>(px) + 0.25 + 0.5 * sx) /
                                  static_cast<double>(side) - 1.0) * aspect_scale;
            const double v = (1.0 - 2.0 * (static_cast<double>(py) + 0.25 + 0.5 * sy) /
                                        static_cast<double>(side)) * aspect_scale;
            sum = sum + shade({0.0, 0.0, 0.0}, normalize({u, v, -1.0}));
        }
    sum = sum * 0.25;
    return (quantize(sum.x) << 16) | (quantize(sum.y) << 8) | quantize(sum.z);
}

// --- mandelbrot ---------------------------------------------------------------

inline constexpr int mandelbrot_max_iterations = 1000;

/// Escape iteration count of pixel `index` over the viewport [-2, 1] x [-1.5, 1.5].
inline std::int64_t mandelbrot_pixel(std::int64_t index, std::int64_t side) {
    const std::int64_t px = index % side;
    const std::int64_t py = index / side;
    const double cx = -2.0 + 3.0 * (static_cast<double>(px) + 0.5) / static_cast<double>(side);
    const double cy = 1.5 - 3.0 * (static_cast<double>(py) + 0.5) / static_cast<double>(side);
    double x = 0.0, y = 0.0;
    int n = 0;
    while (n < mandelbrot_max_iterations && x * x + y * y <= 4.0) {
        const double xt = x * x - y * y + cx;
        y = 2.0 * x * y + cy;
        x = xt;
        ++n;
    }
    return n;
}

// --- primes -------------------------------------------------------------------

/// Trial division up to sqrt(n).
inline bool is_prime(std::int64_t n) {
    if (n < 2)
        return false;
    if (n % 2 == 0)
        return n == 2;
    for (std::int64_t d = 3; d * d <= n; d += 2)
        if (n % d == 0)
            return false;
    return true;
}

// --- substrings ---------------------------------------------------------------

inline constexpr std::string_view substring_pattern = "acgtacga";
inline constexpr std::uint64_t substring_text_seed = 0x5eed'0000'2014ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// Pseudo-random text over {a, c, g, t}; character i depends only on (seed, i).
inline std::string make_text(std::int64_t length, std::uint64_t seed = substring_text_seed) {
    static constexpr char alphabet[] = {'a', 'c', 'g', 't'};
    std::string text(static_cast<std::size_t>(std::max<std::int64_t>(length, 0)), 'a');
    for (std::size_t i = 0; i < text.size(); ++i)
        text[i] = alphabet[splitmix64(seed ^ (i * 0x2545f4914f6cdd1dULL)) >> 62];
    return text;
}

/// Matches of `pattern` whose start index lies in `starts`. Reads up to
/// pattern.size() - 1 characters past the end of `starts`.
inline std::int64_t count_matches_starting_in(std::string_view text, std::string_view pattern,
                                              IndexRange starts) {
    std::int64_t count = 0;
    const auto m = static_cast<std::int64_t>(pattern.size());
    const auto last_start = static_cast<std::int64_t>(text.size()) - m;
    const std::int64_t end = std::min(starts.end, last_start + 1);
    for (std::int64_t s = starts.begin; s < end; ++s)
        if (text.compare(static_cast<std::size_t>(s), pattern.size(), pattern) == 0)
            ++count;
    return count;
}

/// Counts (possibly overlapping) occurrences of `pattern` in `text`; chunks
/// partition the start positions, so matches across chunk borders count once.
inline std::int64_t count_pattern(ThreadPool& pool, std::string_view text,
                                  std::string_view pattern, std::int64_t grain) {
    if (pattern.empty() || pattern.size() > text.size())
        return 0;
    const IndexRange starts{0, static_cast<std::int64_t>(text.size() - pattern.size() + 1)};
    return parallel_reduce(
        pool, starts, grain, std::int64_t{0},
        [&](IndexRange r) { return count_matches_starting_in(text, pattern, r); },
        [](std::int64_t a, std::int64_t b) { return a + b; });
}

inline std::shared_ptr<const std::string> cached_text(std::int64_t length) {
    static std::mutex mutex;
    static std::map<std::int64_t, std::shared_ptr<const std::string>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[length];
    if (!slot)
        slot = std::make_shared<const std::string>(make_text(length));
    return slot;
}

// --- synthetic ----------------------------------------------------------------

inline constexpr std::int64_t sleep_threads_span = 8;
inline constexpr std::int64_t sleep_grain_span = 8;

/// Rank of (threads, grain_index) on a fixed 8 x 8 bowl centred at (3, 4),
/// ties broken lexicographically. Distinct cells get distinct ranks so that
/// sleep durations order configurations robustly against timer jitter.
inline std::int64_t sleep_rank(std::int64_t threads, std::int64_t grain_index) {
    static const std::vector<std::int64_t> ranks = [] {
        std::vector<std::pair<std::int64_t, std::int64_t>> cells; // (score, cell)
        for (std::int64_t t = 1; t <= sleep_threads_span; ++t)
            for (std::int64_t g = 0; g < sleep_grain_span; ++g)
                cells.push_back({(t - 3) * (t - 3) + (g - 4) * (g - 4),
                                 (t - 1) * sleep_grain_span + g});
        std::sort(cells.begin(), cells.end());
        std::vector<std::int64_t> r(cells.size());
        for (std::size_t i = 0; i < cells.size(); ++i)
            r[static_cast<std::size_t>(cells[i].second)] = static_cast<std::int64_t>(i);
        return r;
    }();
    const std::int64_t t = std::clamp<std::int64_t>(threads, 1, sleep_threads_span);
    const std::int64_t g = std::clamp<std::int64_t>(grain_index, 0, sleep_grain_span - 1);
    return ranks[static_cast<std::size_t>((t - 1) * sleep_grain_span + g)];
}

} // namespace kernels

/// Runs one full pass on `pool` with chunks of `grain` and returns its checksum.
using WorkloadRun = std::function<std::int64_t(ThreadPool& pool, std::int64_t grain,
                                               std::int64_t size)>;
/// Plain sequential loop over the same per-index kernel.
using WorkloadOracle = std::function<std::int64_t(std::int64_t size)>;

struct Workload {
    std::string name;
    std::string description;
    std::int64_t default_size = 0;
    /// Checksum of one pass at default_size.
    std::int64_t default_checksum = 0;
    /// Synthetic workloads exist for testing the tuner; sweeps skip them.
    bool synthetic = false;
    WorkloadRun run;
    WorkloadOracle sequential;
};

struct WorkloadSpec {
    std::string name;
    std::int64_t size = 0;
    std::int64_t checksum = 0;

    friend bool operator==(const WorkloadSpec&, const WorkloadSpec&) = default;
};

namespace detail {

template <typename Pixel>
std::int64_t image_sum(ThreadPool& pool, std::int64_t grain, std::int64_t side, Pixel pixel) {
    if (side <= 0)
        return 0;
    std::vector<std::int64_t> image(static_cast<std::size_t>(side * side));
    parallel_for(pool, {0, side * side}, grain, [&](IndexRange r) {
        for (std::int64_t i = r.begin; i < r.end; ++i)
            image[static_cast<std::size_t>(i)] = pixel(i, side);
    });
    return std::accumulate(image.begin(), image.end(), std::int64_t{0});
}

template <typename Pixel>
std::int64_t image_sum_sequential(std::int64_t side, Pixel pixel) {
    std::int64_t sum = 0;
    for (std::int64_t i = 0; i < side * side; ++i)
        sum += pixel(i, side);
    return sum;
}

inline std::int64_t count_primes(ThreadPool& pool, std::int64_t grain, std::int64_t n) {
    if (n <= 2)
        return 0;
    return parallel_reduce(
        pool, IndexRange{2, n}, grain, std::int64_t{0},
        [](IndexRange r) {
            std::int64_t c = 0;
            for (std::int64_t i = r.begin; i < r.end; ++i)
                c += kernels::is_prime(i) ? 1 : 0;
            return c;
        },
        [](std::int64_t a, std::int64_t b) { return a + b; });
}

inline std::int64_t count_primes_sequential(std::int64_t n) {
    std::int64_t c = 0;
    for (std::int64_t i = 2; i < n; ++i)
        c += kernels::is_prime(i) ? 1 : 0;
    return c;
}

inline std::vector<Workload> make_registry() {
    std::vector<Workload> r;
    r.push_back({"raytrace", "ray-sphere tracer over an 8-sphere scene (size = image side)", 512,
                 1'882'909'203'029, false,
                 [](ThreadPool& p, std::int64_t g, std::int64_t s) {
                     return image_sum(p, g, s, kernels::raytrace_pixel);
                 },
                 [](std::int64_t s) { return image_sum_sequential(s, kernels::raytrace_pixel); }});
    r.push_back({"primes", "prime count below size by trial division (parallel reduce)", 1'000'000,
                 78'498, false, count_primes, count_primes_sequential});
    r.push_back({"mandelbrot", "escape-iteration sum of a size x size Mandelbrot image", 512,
                 45'274'904, false,
                 [](ThreadPool& p, std::int64_t g, std::int64_t s) {
                     return image_sum(p, g, s, kernels::mandelbrot_pixel);
                 },
                 [](std::int64_t s) { return image_sum_sequential(s, kernels::mandelbrot_pixel); }});
    r.push_back({"substrings", "occurrences of an 8-character pattern in a random text of length size",
                 1 << 24, 253, false,
                 [](ThreadPool& p, std::int64_t g, std::int64_t s) {
                     const auto text = kernels::cached_text(s);
                     return kernels::count_pattern(p, *text, kernels::substring_pattern, g);
                 },
                 [](std::int64_t s) {
                     const auto text = kernels::cached_text(s);
                     return kernels::count_matches_starting_in(
                         *text, kernels::substring_pattern,
                         {0, static_cast<std::int64_t>(text->size())});
                 }});
    // size = microseconds per rank step.
    r.push_back({"sleep", "synthetic: sleeps 1 ms + rank(threads, grain_index) x size us", 1000, 0,
                 true,
                 [](ThreadPool& p, std::int64_t g, std::int64_t s) {
                     const auto rank =
                         kernels::sleep_rank(static_cast<std::int64_t>(p.size()), std::countr_zero(
                                                 static_cast<std::uint64_t>(g)));
                     std::this_thread::sleep_for(std::chrono::microseconds(1000 + rank * s));
                     return std::int64_t{0};
                 },
                 [](std::int64_t) { return std::int64_t{0}; }});
    return r;
}

} // namespace detail

inline const std::vector<Workload>& workload_registry() {
    static const std::vector<Workload> registry = detail::make_registry();
    return registry;
}

inline const Workload& find_workload(std::string_view name) {
    for (const auto& w : workload_registry())
        if (w.name == name)
            return w;
    throw error(errc::unknown_workload, "no workload named '" + std::string(name) + "'");
}

/// Spec for `name` at `size` (default size if absent). The expected checksum
/// comes from the frozen table or, for other sizes, the sequential kernel.
inline WorkloadSpec make_workload_spec(std::string_view name,
                                       std::optional<std::int64_t> size = std::nullopt) {
    const Workload& w = find_workload(name);
    const std::int64_t s = size.value_or(w.default_size);
    if (s < 0)
        throw error(errc::invalid_argument, "workload size must be >= 0");
    const std::int64_t checksum = s == w.default_size ? w.default_checksum : w.sequential(s);
    return {w.name, s, checksum};
}

inline std::int64_t run_workload(const WorkloadSpec& spec, ThreadPool& pool, std::int64_t grain) {
    return find_workload(spec.name).run(pool, grain, spec.size);
}

/// run_workload that throws ChecksumMismatch on a wrong result.
inline std::int64_t run_workload_checked(const WorkloadSpec& spec, ThreadPool& pool,
                                         std::int64_t grain) {
    const std::int64_t got = run_workload(spec, pool, grain);
    if (got != spec.checksum)
        throw error(errc::checksum_mismatch, spec.name + ": got " + std::to_string(got) +
                                                 ", expected " + std::to_string(spec.checksum));
    return got;
}

} // namespace autotune

#endif // AUTOTUNE_WORKLOADS_HPP
