#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace bmc {

/// Worker count resolution: explicit value > 0 wins, otherwise the
/// BMCLAB_WORKERS environment variable, otherwise hardware concurrency.
unsigned resolve_workers(unsigned requested = 0);

/// Runs fn(i) for i in [0, count). Tasks are claimed from a shared atomic
/// counter, so results must be written to per-index storage (or folded
/// with order-independent reductions) to stay deterministic across worker
/// counts.
template <typename Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (count == 0) return;
    if (workers <= 1 || count == 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto body = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    unsigned n = workers < count ? workers : static_cast<unsigned>(count);
    pool.reserve(n - 1);
    for (unsigned t = 1; t < n; ++t) pool.emplace_back(body);
    body();
    for (auto& th : pool) th.join();
}

} // namespace bmc
