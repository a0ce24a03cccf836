// Apache License, Version 2.0, refer to LICENSE.txt
#pragma once

#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace hiercpt {

// Runs fn(task_index) for indices [0, n_tasks) on up to `jobs` workers.
// Each task must be self-contained (own seed, own output slot), which
// makes the result independent of the worker count.
template <typename Fn>
void parallel_for(int n_tasks, int jobs, const Fn& fn) {
    if (jobs < 1) jobs = 1;
    if (jobs == 1 || n_tasks <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (true) {
            int i = next.fetch_add(1);
            if (i >= n_tasks) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    int n_workers = std::min(jobs, n_tasks);
    pool.reserve(n_workers);
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace hiercpt
