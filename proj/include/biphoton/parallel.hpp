#pragma once

#include <cstddef>
#include <functional>

namespace biphoton {

/// Worker threads used by parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Calls body(i) for i in [0, n) across threads. Each index is processed
/// exactly once; callers write results by index so the outcome is
/// independent of scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace biphoton
