#include "spinpair/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spinpair {

std::size_t resolve_workers(std::size_t requested) {
    if (requested > 0) return requested;
    return std::max<std::size_t>(1, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n_tasks, std::size_t workers,
                  const std::function<void(std::size_t)>& task) {
    if (n_tasks == 0) return;
    const std::size_t n_threads = std::min(resolve_workers(workers), n_tasks);
    if (n_threads == 1) {
        for (std::size_t i = 0; i < n_tasks; ++i) task(i);
        return;
    }

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    std::size_t error_index = n_tasks;

    auto worker = [&] {
        for (std::size_t i = next.fetch_add(1); i < n_tasks; i = next.fetch_add(1)) {
            try {
                task(i);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (i < error_index) {
                    error_index = i;
                    error = std::current_exception();
                }
            }
        }
    };

    {
        std::vector<std::jthread> threads;
        threads.reserve(n_threads - 1);
        for (std::size_t t = 1; t < n_threads; ++t) threads.emplace_back(worker);
        worker();
    }
    if (error) std::rethrow_exception(error);
}

}  // namespace spinpair
