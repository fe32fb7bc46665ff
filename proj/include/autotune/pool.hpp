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
#ifndef AUTOTUNE_POOL_HPP
#define AUTOTUNE_POOL_HPP

#include <autotune/error.hpp>
#include <autotune/params.hpp>
#include <autotune/tuner.hpp>

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <string>
#include <system_error>
#include <thread>
#include <utility>
#include <vector>

namespace autotune {

/// Overrides hardware core detection when set to a positive integer.
inline constexpr const char* cores_env_var = "AUTOTUNE_CORES";

inline std::size_t hardware_cores() {
    if (const char* env = std::getenv(cores_env_var)) {
        char* end = nullptr;
        const long long v = std::strtoll(env, &end, 10);
        if (end != env && *end == '\0' && v > 0)
            return static_cast<std::size_t>(v);
    }
    const unsigned n = std::thread::hardware_concurrency();
    return n > 0 ? n : 1;
}

inline constexpr const char* threads_param = "threads";
inline constexpr const char* grain_index_param = "grain_index";
inline constexpr std::int64_t max_grain_index = 15;
inline constexpr std::int64_t default_grain_index = 10; // 2^10 = 1024, nearest rung to 1000

inline constexpr std::int64_t grain_from_index(std::int64_t index) noexcept {
    return std::int64_t{1} << index;
}

/// The knobs every construct of the runtime exposes: worker count and the
/// grain exponent (grain = 2^grain_index iterations per chunk).
inline ParameterSet builtin_parameters(std::size_t cores = hardware_cores()) {
    const auto c = static_cast<std::int64_t>(cores);
    return ParameterSet({
        make_parameter(threads_param, 1, std::max<std::int64_t>(32, 2 * c), c),
        make_parameter(grain_index_param, 0, max_grain_index, default_grain_index),
    });
}

/// Builtin parameters with reduced upper bounds, defaults clamped into range.
inline ParameterSet builtin_parameters(std::int64_t threads_max, std::int64_t grain_index_max,
                                       std::size_t cores = hardware_cores()) {
    if (threads_max < 1 || grain_index_max < 0 || grain_index_max > max_grain_index)
        throw error(errc::invalid_argument, "threads_max must be >= 1 and grain_index_max in [0, 15]");
    const auto c = static_cast<std::int64_t>(cores);
    return ParameterSet({
        make_parameter(threads_param, 1, threads_max, std::clamp<std::int64_t>(c, 1, threads_max)),
        make_parameter(grain_index_param, 0, grain_index_max,
                       std::min(default_grain_index, grain_index_max)),
    });
}

struct PoolConfig {
    std::size_t workers = 1;
    std::int64_t grain = grain_from_index(default_grain_index);

    void validate() const {
        if (workers < 1)
            throw error(errc::invalid_argument, "a pool needs at least one worker");
        if (grain < 1)
            throw error(errc::invalid_argument, "grain must be >= 1");
    }

    /// Reads `threads` and `grain_index` from a configuration over a set that
    /// contains the builtin parameters.
    static PoolConfig from(const ParameterSet& set, const Configuration& config) {
        const auto t = set.index_of(threads_param);
        const auto g = set.index_of(grain_index_param);
        if (!t || !g)
            throw error(errc::invalid_argument, "parameter set lacks threads/grain_index");
        PoolConfig pc{static_cast<std::size_t>(config[*t]), grain_from_index(config[*g])};
        pc.validate();
        return pc;
    }
};

struct IndexRange {
    std::int64_t begin = 0;
    std::int64_t end = 0;

    std::int64_t size() const noexcept { return end - begin; }
    bool empty() const noexcept { return end <= begin; }

    friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Fixed set of worker threads that all run the same job when dispatched.
/// Workers park on a condition variable between jobs. The calling thread
/// only waits; it never runs job code itself, so a pool of w workers
/// executes on exactly w threads.
class ThreadPool {
public:
    explicit ThreadPool(std::size_t workers) {
        if (workers < 1)
            throw error(errc::invalid_argument, "a pool needs at least one worker");
        grow(workers);
    }
    explicit ThreadPool(const PoolConfig& config) : ThreadPool(config.workers) {}

    ThreadPool(const ThreadPool&) = delete;
    ThreadPool& operator=(const ThreadPool&) = delete;

    ~ThreadPool() { shrink(0); }

    std::size_t size() const noexcept { return threads_.size(); }

    bool busy() const noexcept { return busy_.load(); }

    /// Changes the worker count. Must not be called while a job runs.
    void resize(std::size_t workers) {
        if (workers < 1)
            throw error(errc::invalid_argument, "a pool needs at least one worker");
        if (busy_.load())
            throw error(errc::busy_pool, "resize during an active construct");
        if (workers > threads_.size())
            grow(workers);
        else if (workers < threads_.size())
            shrink(workers);
    }

    /// Runs `job(worker_index)` once on every worker and returns after all
    /// of them finished. The job must not throw.
    void run(const std::function<void(std::size_t)>& job) {
        if (busy_.exchange(true))
            throw error(errc::busy_pool, "pool is already running a construct");
        {
            std::unique_lock lock(mutex_);
            job_ = &job;
            outstanding_ = threads_.size();
            ++generation_;
            wake_.notify_all();
            done_.wait(lock, [&] { return outstanding_ == 0; });
            job_ = nullptr;
        }
        busy_.store(false);
    }

private:
    void grow(std::size_t workers) {
        std::lock_guard lock(mutex_);
        limit_ = workers;
        try {
            while (threads_.size() < workers) {
                const std::size_t index = threads_.size();
                threads_.emplace_back([this, index, seen = generation_] { work(index, seen); });
            }
        } catch (const std::system_error& e) {
            limit_ = threads_.size();
            throw error(errc::resource_exhausted, e.what());
        }
    }

    void shrink(std::size_t workers) {
        {
            std::lock_guard lock(mutex_);
            limit_ = workers;
            wake_.notify_all();
        }
        while (threads_.size() > workers) {
            threads_.back().join();
            threads_.pop_back();
        }
    }

    void work(std::size_t index, std::uint64_t seen) {
        std::unique_lock lock(mutex_);
        for (;;) {
            wake_.wait(lock, [&] { return index >= limit_ || generation_ != seen; });
            if (index >= limit_)
                return;
            seen = generation_;
            const auto* job = job_;
            lock.unlock();
            try {
                (*job)(index);
            } catch (...) {
                // Constructs catch body failures themselves.
            }
            lock.lock();
            if (--outstanding_ == 0)
                done_.notify_one();
        }
    }

    std::vector<std::thread> threads_;
    std::mutex mutex_;
    std::condition_variable wake_;
    std::condition_variable done_;
    const std::function<void(std::size_t)>* job_ = nullptr;
    std::uint64_t generation_ = 0;
    std::size_t outstanding_ = 0;
    std::size_t limit_ = 0;
    std::atomic<bool> busy_{false};
};

namespace detail {

inline void check_grain(std::int64_t grain) {
    if (grain < 1)
        throw error(errc::invalid_argument, "grain must be >= 1, got " + std::to_string(grain));
}

inline std::int64_t chunk_count(const IndexRange& range, std::int64_t grain) {
    return range.empty() ? 0 : (range.size() + grain - 1) / grain;
}

inline IndexRange chunk(const IndexRange& range, std::int64_t grain, std::int64_t c) {
    const std::int64_t b = range.begin + c * grain;
    return {b, std::min(range.end, b + grain)};
}

/// Hands out chunk indices from a shared cursor until all are claimed.
/// After the first failure the remaining chunks are claimed but skipped.
template <typename PerChunk>
void self_schedule(ThreadPool& pool, std::int64_t chunks, PerChunk&& per_chunk) {
    std::atomic<std::int64_t> cursor{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;

    const std::function<void(std::size_t)> job = [&](std::size_t) {
        for (;;) {
            const std::int64_t c = cursor.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunks)
                return;
            if (failed.load(std::memory_order_relaxed))
                continue;
            try {
                per_chunk(c);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error)
                    first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    pool.run(job);
    if (first_error)
        std::rethrow_exception(first_error);
}

} // namespace detail

/// Splits `range` into consecutive chunks of `grain` iterations (the last
/// one possibly shorter) and calls `body(IndexRange)` once per chunk.
/// Idle workers claim the next unclaimed chunk. Rethrows the first body
/// failure after all workers are done.
template <typename Body>
void parallel_for(ThreadPool& pool, IndexRange range, std::int64_t grain, Body&& body) {
    detail::check_grain(grain);
    const std::int64_t chunks = detail::chunk_count(range, grain);
    if (chunks == 0)
        return;
    detail::self_schedule(pool, chunks,
                          [&](std::int64_t c) { body(detail::chunk(range, grain, c)); });
}

/// Maps every chunk to a value and folds the values in chunk order on the
/// calling thread, starting from `identity`. The result is independent of
/// worker count and scheduling for any associative `combine`.
template <typename T, typename Map, typename Combine>
T parallel_reduce(ThreadPool& pool, IndexRange range, std::int64_t grain, T identity, Map&& map,
                  Combine&& combine) {
    detail::check_grain(grain);
    const std::int64_t chunks = detail::chunk_count(range, grain);
    if (chunks == 0)
        return identity;
    // Wrapped so that vector<bool>-style packing cannot make slots share storage.
    struct Slot {
        T value;
    };
    std::vector<Slot> partial(static_cast<std::size_t>(chunks), Slot{identity});
    detail::self_schedule(pool, chunks, [&](std::int64_t c) {
        partial[static_cast<std::size_t>(c)].value = map(detail::chunk(range, grain, c));
    });
    T acc = std::move(identity);
    for (auto& p : partial)
        acc = combine(std::move(acc), std::move(p.value));
    return acc;
}

/// One tuning iteration of an unmodified job: the tuner picks (threads,
/// grain_index), the pool is resized outside the timed region, and
/// `job(pool, grain)` runs inside the measured section.
template <typename Job>
void tuned_invoke(ThreadPool& pool, Tuner& tuner, Job&& job) {
    const PoolConfig pc = PoolConfig::from(tuner.parameters(), tuner.next_config());
    pool.resize(pc.workers);
    tuner.measured_section([&](const Configuration&) { job(pool, pc.grain); });
}

} // namespace autotune

#endif // AUTOTUNE_POOL_HPP
