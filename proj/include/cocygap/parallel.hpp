#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace cocygap {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Splits [0, count) into contiguous chunks and runs fn(chunk, begin, end) on
// each. Chunk boundaries depend only on count and the thread count, and callers
// merge per-chunk results in chunk order, so output never depends on scheduling.
template <class Fn>
void parallel_chunks(std::size_t count, int threads, Fn&& fn) {
    std::size_t t = static_cast<std::size_t>(std::max(1, threads));
    t = std::min(t, std::max<std::size_t>(1, count));
    if (t == 1) {
        fn(std::size_t{0}, std::size_t{0}, count);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(t);
    std::size_t step = (count + t - 1) / t;
    for (std::size_t c = 0; c < t; ++c) {
        std::size_t b = std::min(count, c * step), e = std::min(count, b + step);
        pool.emplace_back([&, c, b, e] {
            try {
                fn(c, b, e);
            } catch (...) {
                errors[c] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& err : errors)
        if (err) std::rethrow_exception(err);
}

inline std::size_t chunk_count(std::size_t count, int threads) {
    std::size_t t = static_cast<std::size_t>(std::max(1, threads));
    return std::min(t, std::max<std::size_t>(1, count));
}

}  // namespace cocygap
