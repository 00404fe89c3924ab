#pragma once

#include <cstddef>
#include <functional>

namespace hozog {

/// Runs body(i) for i in [0, n) on up to `workers` threads (the caller's
/// thread included). Indices are handed out dynamically, so completion order
/// is unspecified. The first exception thrown (by index) is rethrown after
/// all workers have joined.
void parallel_for(std::size_t n, std::size_t workers, const std::function<void(std::size_t)>& body);

/// Worker count from HOZOG_MAX_WORKERS when set and valid, otherwise `fallback`.
std::size_t max_workers_from_env(std::size_t fallback);

}  // namespace hozog
