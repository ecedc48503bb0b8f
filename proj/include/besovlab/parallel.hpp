#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace besovlab {

// Deterministic parallel reduction: work items are grouped into fixed-size
// chunks, each chunk is summed by one task, and chunk results are combined
// in chunk-index order. The result is bit-identical for any thread count,
// so parallel runs reproduce the sequential reference exactly.
inline double chunked_sum(std::size_t n_items,
                          const std::function<double(std::size_t)>& item,
                          unsigned threads = 1,
                          std::size_t chunk_size = 64) {
    if (n_items == 0) return 0.0;
    const std::size_t n_chunks = (n_items + chunk_size - 1) / chunk_size;
    std::vector<double> partial(n_chunks, 0.0);

    auto run_chunk = [&](std::size_t c) {
        const std::size_t lo = c * chunk_size;
        const std::size_t hi = std::min(lo + chunk_size, n_items);
        double s = 0.0;
        for (std::size_t i = lo; i < hi; ++i) s += item(i);
        partial[c] = s;
    };

    if (threads <= 1 || n_chunks == 1) {
        for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    } else {
        const unsigned n_workers = std::min<std::size_t>(threads, n_chunks);
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        std::size_t next = 0;
        std::mutex m;
        for (unsigned w = 0; w < n_workers; ++w) {
            pool.emplace_back([&] {
                for (;;) {
                    std::size_t c;
                    {
                        std::lock_guard<std::mutex> lock(m);
                        if (next >= n_chunks) return;
                        c = next++;
                    }
                    run_chunk(c);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    double total = 0.0;
    for (double s : partial) total += s;  // fixed combine order
    return total;
}

}  // namespace besovlab
