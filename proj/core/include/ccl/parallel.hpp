#ifndef CCL_PARALLEL_HPP_
#define CCL_PARALLEL_HPP_

#include <cstddef>
#include <functional>

namespace ccl {

/// Worker count used by parallel loops: hardware concurrency, capped by the
/// CC_THREADS environment variable when set (minimum 1).
int worker_count();

/// Runs fn(block_index) for block_index in [0, block_count). Blocks are
/// distributed dynamically over worker_count() threads; callers must write
/// only to per-block output slots so results do not depend on scheduling.
/// Exceptions from workers are rethrown on the calling thread.
void parallel_for_blocks(std::size_t block_count, const std::function<void(std::size_t)> &fn);

} // namespace ccl

#endif // CCL_PARALLEL_HPP_
