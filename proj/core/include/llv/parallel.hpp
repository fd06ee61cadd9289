#pragma once

#include <cstddef>
#include <functional>

namespace llv {

/// Process-wide worker count used by parallel_for. 1 means run inline.
void set_worker_count(std::size_t workers);
std::size_t worker_count() noexcept;

/// Calls fn(i) for i in [0, n). Work is split in contiguous chunks; callers
/// write into per-index slots so results never depend on the worker count.
/// The first exception thrown by any task is rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace llv
