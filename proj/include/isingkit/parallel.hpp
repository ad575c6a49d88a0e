#pragma once

#include <algorithm>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace isingkit {

// Worker count: ISING_SEMBED_THREADS if set to a positive integer, else the
// hardware concurrency (at least 1).
int thread_count();

// Runs f(i) for i in [0, n) on up to thread_count() threads. Work items are
// independent; the first exception is rethrown after all workers finish.
template <class F>
void parallel_for(int n, F&& f) {
    const int T = std::min(thread_count(), std::max(n, 1));
    if (T <= 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::exception_ptr err;
    std::mutex m;
    std::vector<std::thread> pool;
    for (int t = 0; t < T; ++t) {
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += T) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(m);
                    if (!err) err = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (err) std::rethrow_exception(err);
}

} // namespace isingkit
