#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace torwalk {

// Chunked parallel loop over [0, count). Chunk boundaries depend only on
// count and the chunk count, never on the worker count, so any per-chunk
// results can be reduced in chunk order for bit-stable output.
inline void parallel_chunks(long long count, int threads,
                            const std::function<void(long long, long long)>& body) {
    if (threads < 1) threads = 1;
    if (count <= 0) return;
    long long nchunks = std::min<long long>(count, static_cast<long long>(threads) * 4);
    if (threads == 1 || nchunks <= 1) {
        body(0, count);
        return;
    }
    std::vector<std::pair<long long, long long>> chunks;
    for (long long c = 0; c < nchunks; ++c) {
        long long lo = count * c / nchunks;
        long long hi = count * (c + 1) / nchunks;
        if (lo < hi) chunks.emplace_back(lo, hi);
    }
    std::vector<std::thread> pool;
    std::atomic<size_t> next{0};
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            for (;;) {
                size_t i = next.fetch_add(1);
                if (i >= chunks.size()) return;
                body(chunks[i].first, chunks[i].second);
            }
        });
    for (auto& th : pool) th.join();
}

} // namespace torwalk
