#pragma once

#include <cstddef>
#include <functional>

namespace fracprog {

// Process-wide cap on worker threads. 1 means run inline.
void set_thread_count(unsigned n);
unsigned thread_count();

// Calls body(begin, end) on disjoint contiguous chunks covering [0, n).
// Chunks write disjoint outputs only; any reduction is done by the caller
// in a fixed order, so results do not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace fracprog
