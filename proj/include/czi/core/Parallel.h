/**
 * @file Parallel.h
 * @brief Minimal fork-join loop over an index range
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace czi {

/**
 * @brief Run fn(i) for i in [0, n) on up to @p threads workers.
 *
 * Work items are claimed dynamically; callers write results into pre-sized
 * slots so output order never depends on scheduling. The first exception thrown
 * by any item is rethrown after all workers have joined.
 */
template <class Fn>
void ParallelFor(size_t n, int threads, Fn&& fn) {
    const size_t workers = std::min<size_t>(n, static_cast<size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex errorMutex;
    auto worker = [&] {
        for (size_t i = next++; i < n; i = next++) {
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(errorMutex);
                if (!error) {
                    error = std::current_exception();
                }
                next = n;
            }
        }
    };
    std::vector<std::thread> pool;
    for (size_t w = 0; w < workers; ++w) {
        pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

} // namespace czi
