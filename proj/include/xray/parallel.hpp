#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace xray {

// Runs fn(worker, begin, end) over contiguous index chunks. Workers own
// disjoint ranges; callers merge per-worker results in worker order, which
// keeps outputs independent of scheduling.
template <typename Fn>
void parallel_chunks(std::size_t n_items, int n_workers, Fn&& fn) {
    if (n_workers < 1) n_workers = 1;
    if (n_items == 0) return;
    if (n_workers == 1 || n_items < 2) {
        fn(0, std::size_t{0}, n_items);
        return;
    }
    const std::size_t chunk = (n_items + n_workers - 1) / n_workers;
    std::vector<std::thread> threads;
    for (int w = 0; w < n_workers; ++w) {
        const std::size_t begin = static_cast<std::size_t>(w) * chunk;
        if (begin >= n_items) break;
        const std::size_t end = std::min(begin + chunk, n_items);
        threads.emplace_back([&fn, w, begin, end] { fn(w, begin, end); });
    }
    for (auto& t : threads) t.join();
}

inline int default_workers() {
    const unsigned hc = std::thread::hardware_concurrency();
    return hc == 0 ? 1 : static_cast<int>(hc);
}

}  // namespace xray
