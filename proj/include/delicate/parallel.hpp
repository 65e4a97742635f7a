#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace delicate::par {

// Run `work(chunk_index)` for chunk_index in [0, chunk_count) on up to
// `threads` workers. Chunk geometry is fixed by the caller, so results keyed
// by chunk index are identical no matter how many threads execute them.
// The first exception thrown by any worker is rethrown on the caller.
template <typename Fn>
void run_chunks(uint64_t chunk_count, unsigned threads, Fn&& work) {
    if (chunk_count == 0) return;
    if (threads <= 1 || chunk_count == 1) {
        for (uint64_t c = 0; c < chunk_count; ++c) work(c);
        return;
    }
    std::atomic<uint64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex guard;

    auto body = [&] {
        for (;;) {
            uint64_t c = next.fetch_add(1, std::memory_order_relaxed);
            if (c >= chunk_count || failed.load(std::memory_order_relaxed)) return;
            try {
                work(c);
            } catch (...) {
                std::lock_guard<std::mutex> lk(guard);
                if (!error) error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
                return;
            }
        }
    };

    unsigned n = std::min<uint64_t>(threads, chunk_count);
    std::vector<std::thread> pool;
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(body);
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}   // namespace delicate::par
