#pragma once

#include <cstddef>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace hotspot {

// Splits [0, total) into at most `workers` contiguous ranges and runs
// fn(begin, end) on each, joining before returning. Work units must be
// independent; callers guarantee output does not depend on the split.
template <typename Fn>
void parallel_for_ranges(std::size_t total, int workers, Fn&& fn) {
    if (workers < 1) workers = 1;
    std::size_t n_chunks = std::min<std::size_t>(static_cast<std::size_t>(workers), total);
    if (n_chunks <= 1) {
        if (total > 0) fn(std::size_t{0}, total);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(n_chunks);
    std::size_t base = total / n_chunks;
    std::size_t rem = total % n_chunks;
    std::size_t begin = 0;
    for (std::size_t c = 0; c < n_chunks; ++c) {
        std::size_t len = base + (c < rem ? 1 : 0);
        std::size_t end = begin + len;
        threads.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
    for (auto& t : threads) t.join();
}

// Default worker count: HOTSPOT_WORKERS if set and positive, else 1.
inline int default_workers() {
    if (const char* env = std::getenv("HOTSPOT_WORKERS")) {
        int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

}  // namespace hotspot
