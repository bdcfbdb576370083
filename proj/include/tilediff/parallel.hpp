#pragma once

#include <cstddef>
#include <functional>

namespace tilediff {

// Runs fn(0) ... fn(n - 1) on up to `threads` workers (the caller included).
// Work is handed out in index order. If any call throws, the exception from
// the lowest failing index is rethrown after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& fn);

} // namespace tilediff
