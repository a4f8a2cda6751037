#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace patchbench {

/// Run fn(0..n-1) on up to `threads` workers. Callers write to disjoint,
/// index-addressed slots, so results never depend on the schedule.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn)
{
    if (n <= 0)
        return;
    const int workers = std::min(threads, n);
    if (workers <= 1) {
        for (int i = 0; i < n; ++i)
            fn(i);
        return;
    }

    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1))
                fn(i);
        });
    for (std::thread& t : pool)
        t.join();
}

} // namespace patchbench
