#pragma once

#include <algorithm>
#include <cstdlib>
#include <thread>
#include <vector>

namespace cortexlift {

inline unsigned thread_budget() {
    if (const char* env = std::getenv("CORTEXLIFT_THREADS")) {
        long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1u;
}

// Splits [begin, end) into contiguous chunks, one thread each. Results must
// not depend on the chunking: callers only write to disjoint indices.
template <typename Fn>
void parallel_for(std::size_t begin, std::size_t end, Fn&& fn) {
    const std::size_t count = end > begin ? end - begin : 0;
    const unsigned threads =
        std::min<std::size_t>(thread_budget(), std::max<std::size_t>(count, 1));
    if (threads <= 1 || count < 2048) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads - 1);
    const std::size_t chunk = (count + threads - 1) / threads;
    for (unsigned t = 1; t < threads; ++t) {
        std::size_t lo = begin + t * chunk;
        std::size_t hi = std::min(lo + chunk, end);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &fn] {
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (std::size_t i = begin; i < std::min(begin + chunk, end); ++i) fn(i);
    for (auto& th : pool) th.join();
}

}  // namespace cortexlift
