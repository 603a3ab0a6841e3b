#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace qrt {

/// Worker count: WORKERS if set and positive, otherwise hardware threads.
inline unsigned worker_count() {
    if (const char* env = std::getenv("WORKERS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && v > 0) return static_cast<unsigned>(std::min(v, 1024L));
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1u : hw;
}

/// Calls body(i) for i in [0, n). Tasks are handed out dynamically; callers
/// write into slot i so the result never depends on scheduling.
template <class F>
void parallel_for(std::size_t n, F&& body, unsigned workers = worker_count()) {
    if (n == 0) return;
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto run = [&] {
        try {
            for (std::size_t i = next++; i < n; i = next++) body(i);
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = n;
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(run);
    run();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

/// Fixed chunk layout for reductions over [0, n): identical for any worker count.
struct Chunking {
    std::size_t n, chunk;
    std::size_t count() const noexcept { return n == 0 ? 0 : (n + chunk - 1) / chunk; }
    std::size_t begin(std::size_t c) const noexcept { return c * chunk; }
    std::size_t end(std::size_t c) const noexcept { return std::min(n, (c + 1) * chunk); }
};

inline Chunking chunking(std::size_t n, std::size_t chunk = 4096) { return {n, std::max<std::size_t>(chunk, 1)}; }

}  // namespace qrt
