#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace dgame {

// Worker cap: DGAME_THREADS if set, otherwise hardware concurrency.
inline unsigned& thread_cap_storage() {
    static unsigned cap = [] {
        if (const char* env = std::getenv("DGAME_THREADS")) {
            const long v = std::strtol(env, nullptr, 10);
            if (v > 0) return static_cast<unsigned>(v);
        }
        return std::max(1u, std::thread::hardware_concurrency());
    }();
    return cap;
}

inline unsigned thread_cap() { return thread_cap_storage(); }
inline void set_thread_cap(unsigned n) { thread_cap_storage() = std::max(1u, n); }

// Runs fn(i) for i in [0, count). Each index is processed exactly once; results
// must be written to per-index slots so output does not depend on scheduling.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t min_parallel = 2) {
    const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_cap(), count));
    if (workers <= 1 || count < min_parallel) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto body = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (unsigned w = 1; w < workers; ++w) pool.emplace_back(body);
    body();
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace dgame
