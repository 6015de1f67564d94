#pragma once

#include <cstddef>
#include <functional>

namespace curlgap {

// Worker cap: CURLGAP_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
std::size_t max_threads();

// Runs body(i) for i in [0, n) on up to max_threads() threads. Exceptions are
// rethrown on the calling thread (the first one by index).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace curlgap
