#pragma once

#include <cstddef>
#include <functional>

namespace ckforge {

// Process-wide worker budget set by the CLI; 0 means hardware concurrency.
void set_worker_budget(unsigned n);
unsigned worker_budget();

// Runs body(i) for i in [0, n), spread over the worker budget. Exceptions
// from workers are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace ckforge
