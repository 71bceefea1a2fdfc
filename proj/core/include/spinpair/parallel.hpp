#pragma once

#include <cstddef>
#include <functional>

namespace spinpair {

/// 0 means "one per hardware thread".
std::size_t resolve_workers(std::size_t requested);

/// Runs task(i) for i in [0, n_tasks) on up to `workers` threads.
///
/// Tasks are independent; callers that reduce results store them per task
/// index and combine in index order afterwards. If tasks throw, the
/// exception of the lowest failing index is rethrown after all threads join.
void parallel_for(std::size_t n_tasks, std::size_t workers,
                  const std::function<void(std::size_t)>& task);

}  // namespace spinpair
