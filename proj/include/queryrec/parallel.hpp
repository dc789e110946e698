#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace queryrec {

/// Runs fn(0..n-1) on up to `workers` threads. Tasks must be independent;
/// callers keep determinism by writing results into index-addressed slots.
/// The first exception thrown by any task is rethrown on the calling thread.
inline void parallel_for(std::size_t n, unsigned workers,
                         const std::function<void(std::size_t)>& fn) {
    if (n == 0) {
        return;
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (workers == 0) {
        workers = hw == 0 ? 1 : hw;
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }

    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!first_error) {
                        first_error = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (first_error) {
        std::rethrow_exception(first_error);
    }
}

} // namespace queryrec
