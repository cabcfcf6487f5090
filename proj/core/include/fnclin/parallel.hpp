#pragma once

#include <cstddef>
#include <functional>

namespace fnclin {

/// Runs body(i) for i in [0, count) on up to `jobs` threads. Work items must
/// write only to their own output slot, so results never depend on `jobs`.
/// The first exception thrown by any item is rethrown after all threads join.
void parallel_for(std::size_t count, int jobs, const std::function<void(std::size_t)>& body);

}  // namespace fnclin
