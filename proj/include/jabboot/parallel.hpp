#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace jabboot {

[[nodiscard]] inline std::size_t default_workers() noexcept {
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

/// Runs task(i) for i in [0, count) on `workers` threads. Tasks are claimed in
/// index order; each must write only to its own slot. When `cancel` becomes true,
/// unclaimed tasks are skipped. The first exception is rethrown after all threads
/// join.
template <typename Task>
void parallel_for(std::size_t count, std::size_t workers, Task&& task, const std::atomic<bool>* cancel = nullptr) {
    workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto body = [&] {
        while (true) {
            if (cancel != nullptr && cancel->load(std::memory_order_relaxed)) {
                return;
            }
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) {
                return;
            }
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) {
                    failure = std::current_exception();
                }
                next.store(count, std::memory_order_relaxed);
                return;
            }
        }
    };
    if (workers == 1) {
        body();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back(body);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

}  // namespace jabboot
