#ifndef EVSCHED_PARALLEL_HPP_
#define EVSCHED_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace evsched {

// Runs fn(i) for i in [0, n). Each index writes only to its own output slot,
// so the result is bitwise independent of the worker count; reductions over
// the slots must be done by the caller in fixed index order.
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace evsched

#endif  // EVSCHED_PARALLEL_HPP_
