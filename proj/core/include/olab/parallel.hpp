#pragma once

#include <cstddef>
#include <functional>

namespace olab {

/// Worker count used by parallel_for; 0 means hardware concurrency.
void set_thread_count(unsigned n);
unsigned thread_count();

/// Runs body(i) for i in [0, n) over static contiguous chunks.
/// Each index is processed exactly once, so results written per index are deterministic.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Pairwise summation (deterministic, O(log n) error growth).
double pairwise_sum(const double* v, std::size_t n);

}  // namespace olab
