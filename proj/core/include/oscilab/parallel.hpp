#pragma once

#include <cstddef>
#include <functional>

namespace oscilab {

/// Worker count used by parallel loops. Respects the OSCILAB_THREADS
/// environment variable (values < 1 fall back to hardware concurrency).
int worker_count();

/// Runs fn(begin, end) on contiguous index blocks of [0, n), possibly from
/// several threads. Each block is disjoint, so writers that own their output
/// slots produce results independent of the worker count.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace oscilab
