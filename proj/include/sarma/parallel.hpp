#pragma once

#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace sarma {

/// Worker count: SPATIAL_ARMA_THREADS caps it, hardware concurrency is the default.
inline unsigned worker_count() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    if (const char* env = std::getenv("SPATIAL_ARMA_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && v >= 1) return static_cast<unsigned>(v < 256 ? v : 256);
    }
    return hw;
}

/// Runs fn(tile) for every tile in [0, n_tiles). The tile partition is fixed by
/// the caller, so per-tile results are identical for any worker count; callers
/// must reduce tile outputs in tile order to stay bit-deterministic.
template <class F>
void parallel_tiles(std::int64_t n_tiles, F&& fn) {
    const unsigned workers = std::min<std::int64_t>(worker_count(), n_tiles > 0 ? n_tiles : 1);
    if (workers <= 1) {
        for (std::int64_t t = 0; t < n_tiles; ++t) fn(t);
        return;
    }
    std::atomic<std::int64_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::int64_t t = next.fetch_add(1);
            if (t >= n_tiles) return;
            fn(t);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& th : pool) th.join();
}

}  // namespace sarma
