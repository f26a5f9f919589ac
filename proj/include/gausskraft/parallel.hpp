#pragma once

#include <cstddef>
#include <functional>

namespace gausskraft {

/// Worker count: GAUSSKRAFT_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
std::size_t thread_count();

/// Calls body(i) for i in [0, count), splitting the range into contiguous
/// blocks across threads when count >= min_parallel. body must only write to
/// per-index outputs; the first exception thrown is rethrown.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t min_parallel = 64);

}  // namespace gausskraft
