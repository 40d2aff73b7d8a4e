#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <type_traits>
#include <vector>

namespace gouflow {

/// Number of workers to use when the caller asks for `requested` (0 = all
/// hardware threads).
inline unsigned resolve_workers(unsigned requested) noexcept
{
    if (requested > 0) {
        return requested;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// out[i] = f(i) for i in [0, n), evaluated on up to `workers` threads.
/// Each result lands at its own index, so the output never depends on the
/// worker count or on scheduling. The first exception thrown by f is
/// rethrown after all workers stop.
template <class F>
auto parallel_map(std::size_t n, unsigned workers, F&& f) -> std::vector<std::invoke_result_t<F&, std::size_t>>
{
    using R = std::invoke_result_t<F&, std::size_t>;
    std::vector<R> out(n);
    const unsigned w = std::min<std::size_t>(resolve_workers(workers), std::max<std::size_t>(n, 1));
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            out[i] = f(i);
        }
        return out;
    }

    constexpr std::size_t chunk = 64;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t begin = next.fetch_add(chunk);
            if (begin >= n) {
                return;
            }
            const std::size_t end = std::min(n, begin + chunk);
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    out[i] = f(i);
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                failed = true;
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (unsigned k = 0; k < w; ++k) {
        pool.emplace_back(work);
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
    return out;
}

}  // namespace gouflow
