#pragma once

#include <cstddef>
#include <functional>

namespace seedscope {

/// SEEDSCOPE_THREADS when set to a positive integer, else the hardware
/// concurrency (at least 1).
std::size_t default_thread_count();

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 means
/// default_thread_count()). Work is handed out by index, so any result the
/// body writes to slot i is independent of scheduling. The first exception
/// thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = 0);

}  // namespace seedscope
