// Copyright 2026 The compass-coherence Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef COMPASS_PARALLEL_H
#define COMPASS_PARALLEL_H

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace compass {

/// Number of workers to use when the caller asks for `jobs` (0 = all cores).
inline size_t resolve_jobs(size_t jobs) {
    if (jobs == 0) {
        jobs = std::max<size_t>(1, std::thread::hardware_concurrency());
    }
    return jobs;
}

/// Runs fn(task) for every task in [0, num_tasks) on up to `jobs` threads.
/// Tasks are claimed dynamically; callers write results into per-task slots,
/// so output never depends on scheduling. The first exception is rethrown.
template <typename Fn>
void parallel_for(size_t num_tasks, size_t jobs, Fn &&fn) {
    jobs = std::min(resolve_jobs(jobs), num_tasks);
    if (jobs <= 1) {
        for (size_t t = 0; t < num_tasks; t++) {
            fn(t);
        }
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        while (true) {
            size_t t = next.fetch_add(1);
            if (t >= num_tasks) {
                return;
            }
            try {
                fn(t);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) {
                    error = std::current_exception();
                }
                next.store(num_tasks);
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    for (size_t k = 0; k < jobs; k++) {
        threads.emplace_back(worker);
    }
    for (auto &t : threads) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

}  // namespace compass

#endif  // COMPASS_PARALLEL_H
