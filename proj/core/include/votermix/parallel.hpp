#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace votermix {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

/// Run fn(begin, end) over disjoint chunks of [0, n). Work items must be
/// independent and seeded per item so results do not depend on the chunking.
/// The first exception raised in a worker is rethrown on the calling thread.
inline void parallel_chunks(std::size_t n, int threads,
                            const std::function<void(std::size_t, std::size_t)>& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2048) {
        fn(0, n);
        return;
    }
    const std::size_t per = (n + threads - 1) / threads;
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors((n + per - 1) / per);
    std::size_t worker = 0;
    for (std::size_t begin = 0; begin < n; begin += per, ++worker) {
        const std::size_t end = std::min(n, begin + per);
        pool.emplace_back([&fn, begin, end, slot = &errors[worker]] {
            try {
                fn(begin, end);
            } catch (...) {
                *slot = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& error : errors)
        if (error) std::rethrow_exception(error);
}

}  // namespace votermix
