#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace divilab {

/// Number of worker threads to use when the caller passes 0.
[[nodiscard]] inline unsigned default_threads() noexcept {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Splits [begin, end) into fixed-size chunks, evaluates `chunk_fn(lo, hi)`
/// for each chunk on up to `threads` workers and folds the per-chunk results
/// in chunk order. The chunk grid does not depend on `threads`, so the result
/// is identical for any thread count (including floating-point sums).
template <class Result, class ChunkFn, class Merge>
Result chunked_reduce(std::uint64_t begin, std::uint64_t end, std::uint64_t chunk, unsigned threads,
                      Result init, ChunkFn chunk_fn, Merge merge) {
    if (end <= begin) return init;
    chunk = std::max<std::uint64_t>(chunk, 1);
    const std::uint64_t n_chunks = (end - begin + chunk - 1) / chunk;
    std::vector<Result> parts(n_chunks);
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::uint64_t c = next.fetch_add(1);
            if (c >= n_chunks) return;
            const std::uint64_t lo = begin + c * chunk;
            const std::uint64_t hi = std::min(end, lo + chunk);
            try {
                parts[c] = chunk_fn(lo, hi);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(n_chunks);
            }
        }
    };

    if (threads == 0) threads = default_threads();
    const unsigned n_workers = static_cast<unsigned>(std::min<std::uint64_t>(threads, n_chunks));
    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    Result acc = std::move(init);
    for (auto& p : parts) acc = merge(std::move(acc), std::move(p));
    return acc;
}

}  // namespace divilab
