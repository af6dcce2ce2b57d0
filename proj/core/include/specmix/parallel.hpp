#pragma once

#include <cstddef>
#include <functional>

namespace specmix {

// Worker cap used by parallel_for. Defaults to SPECMIX_THREADS when set,
// otherwise std::thread::hardware_concurrency().
unsigned max_threads() noexcept;
void set_max_threads(unsigned n) noexcept;

// Runs body(i) for i in [0, n). Iterations must be independent; the first
// exception thrown by any iteration is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace specmix
