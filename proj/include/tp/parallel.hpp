#pragma once

#include <atomic>
#include <cstdlib>
#include <limits>
#include <string>
#include <thread>
#include <vector>

namespace tp {

// Worker count: TP_THREADS if set to a positive integer, else the hardware
// concurrency.
inline unsigned thread_budget() {
    if (const char *env = std::getenv("TP_THREADS")) {
        long v = std::atol(env);
        if (v > 0)
            return static_cast<unsigned>(v);
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

// Runs fn(i) for i in [0, n) on up to thread_budget() threads.  fn must not
// touch shared mutable state.  If any call throws, the exception of the
// smallest throwing index propagates, keeping error reports deterministic.
template <class Fn> void parallel_for(std::size_t n, Fn fn) {
    unsigned workers = static_cast<unsigned>(std::min<std::size_t>(thread_budget(), n));
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    const std::size_t none = std::numeric_limits<std::size_t>::max();
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::size_t> bad_index(workers, none);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
            for (;;) {
                std::size_t i = next.fetch_add(1);
                if (i >= n)
                    return;
                try {
                    fn(i);
                } catch (...) {
                    errors[w] = std::current_exception();
                    bad_index[w] = i;
                    return;
                }
            }
        });
    for (auto &t : pool)
        t.join();
    std::size_t best = none;
    unsigned who = 0;
    for (unsigned w = 0; w < workers; ++w)
        if (bad_index[w] < best) {
            best = bad_index[w];
            who = w;
        }
    if (best != none)
        std::rethrow_exception(errors[who]);
}

} // namespace tp
