#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace cpld {

inline int resolve_workers(int workers) {
    if (workers > 0) return std::min(workers, 256);
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(std::min(hw, 64u));
}

// Deterministic chunked map-reduce over items [0, n): items are cut into
// fixed-size chunks, each chunk is accumulated sequentially in index order,
// and chunk partials are combined in chunk order. The result is therefore
// independent of the worker count and of scheduling.
template <std::size_t K, typename PerItem>
std::array<double, K> chunked_sum(std::int64_t n, int workers, PerItem&& per_item) {
    constexpr std::int64_t kChunk = 8192;
    std::array<double, K> total{};
    if (n <= 0) return total;

    const std::int64_t n_chunks = (n + kChunk - 1) / kChunk;
    std::vector<std::array<double, K>> partial(static_cast<std::size_t>(n_chunks));
    for (auto& p : partial) p.fill(0.0);

    const int n_workers = std::min<std::int64_t>(resolve_workers(workers), n_chunks);
    std::atomic<std::int64_t> next{0};
    auto run = [&]() {
        for (std::int64_t c; (c = next.fetch_add(1, std::memory_order_relaxed)) < n_chunks;) {
            auto& acc = partial[static_cast<std::size_t>(c)];
            const std::int64_t begin = c * kChunk;
            const std::int64_t end = std::min(n, begin + kChunk);
            for (std::int64_t i = begin; i < end; ++i) per_item(i, acc);
        }
    };

    if (n_workers <= 1) {
        run();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_workers));
        for (int w = 0; w < n_workers; ++w) pool.emplace_back(run);
        for (auto& th : pool) th.join();
    }

    for (const auto& p : partial)
        for (std::size_t k = 0; k < K; ++k) total[k] += p[k];
    return total;
}

}  // namespace cpld
