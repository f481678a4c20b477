#pragma once

#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

namespace excut {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? int(hc) : 1;
}

/// Run fn(state, replica) for every replica in [0, count), work-stealing over
/// a shared counter. Each worker owns one `state` built by `make_state()`.
/// Replicas must be independent and write only into per-replica slots;
/// reductions then happen sequentially in replica order, which keeps every
/// aggregate bit-identical regardless of thread count.
template <class MakeState, class Fn>
void for_each_replica(std::uint64_t count, int threads, MakeState&& make_state, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || count <= 1) {
        auto state = make_state();
        for (std::uint64_t i = 0; i < count; ++i) fn(state, i);
        return;
    }
    std::atomic<std::uint64_t> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    auto worker = [&]() {
        auto state = make_state();
        for (;;) {
            const std::uint64_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) return;
            try {
                fn(state, i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(err_mutex);
                if (!err) err = std::current_exception();
                next.store(count, std::memory_order_relaxed);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(std::size_t(threads));
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

struct NoState {};

template <class Fn>
void for_each_replica(std::uint64_t count, int threads, Fn&& fn) {
    for_each_replica(
        count, threads, []() { return NoState{}; },
        [&](NoState&, std::uint64_t i) { fn(i); });
}

}  // namespace excut
