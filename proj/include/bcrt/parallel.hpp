#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace bcrt {

/// Runs body(i) for every i in [begin, end) on up to `threads` workers.
/// Work is handed out by an atomic counter; callers write results into
/// slot i so the outcome never depends on scheduling. The first exception
/// thrown by any worker is rethrown on the calling thread.
template <class Body>
void parallel_for(std::size_t begin, std::size_t end, unsigned threads, Body&& body) {
    if (end <= begin) return;
    const std::size_t count = end - begin;
    threads = std::max(1u, threads);
    if (threads == 1 || count == 1) {
        for (std::size_t i = begin; i < end; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{begin};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= end) return;
            try {
                body(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(end);
                return;
            }
        }
    };
    const auto n_workers = static_cast<unsigned>(std::min<std::size_t>(threads, count));
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (unsigned t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
}

inline unsigned default_thread_count() {
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

}  // namespace bcrt
