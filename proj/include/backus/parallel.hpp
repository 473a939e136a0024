#pragma once
// Minimal worker pool for embarrassingly parallel index loops.
//
// Every parallel_for splits [0, n) into contiguous blocks, one per worker, and
// each worker writes only its own output indices with a fixed inner summation
// order.  Results are therefore byte-identical for any thread count.  The
// worker count is capped by the BACKUS_THREADS environment variable (default
// 1: fully serial reference path).

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <thread>
#include <vector>

namespace backus {

inline int max_threads() {
    static const int cached = [] {
        if (const char* env = std::getenv("BACKUS_THREADS")) {
            int v = std::atoi(env);
            if (v >= 1) return std::min(v, 256);
        }
        return 1;
    }();
    return cached;
}

template <typename F>
void parallel_for(int n, F&& body) {
    const int nt = std::min(max_threads(), n);
    if (nt <= 1) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(nt);
    const int chunk = (n + nt - 1) / nt;
    for (int t = 0; t < nt; ++t) {
        const int lo = t * chunk, hi = std::min(n, lo + chunk);
        pool.emplace_back([&, t, lo, hi] {
            try {
                for (int i = lo; i < hi; ++i) body(i);
            } catch (...) {
                errs[t] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errs)
        if (e) std::rethrow_exception(e);
}

}  // namespace backus
