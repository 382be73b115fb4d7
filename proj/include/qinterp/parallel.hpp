// Deterministic index-space parallel loop. Workers pull indices from a shared
// counter and write into caller-owned slots, so results are independent of
// the worker count; reductions stay sequential at the call site.
#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qinterp {

// QINTERP_WORKERS caps the thread count; hardware concurrency otherwise.
inline int worker_limit() {
    const unsigned hw = std::thread::hardware_concurrency();
    int limit = hw ? static_cast<int>(hw) : 1;
    if (const char* env = std::getenv("QINTERP_WORKERS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v >= 1 && v <= 256)
            limit = static_cast<int>(v);
    }
    return std::max(1, limit);
}

inline void parallel_for(int n, const std::function<void(int)>& fn) {
    const int workers = std::min(worker_limit(), n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (int i; (i = next.fetch_add(1)) < n;) {
                if (failed.load()) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!error) error = std::current_exception();
                    failed.store(true);
                    return;
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

}  // namespace qinterp
