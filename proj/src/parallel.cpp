#include "fico/parallel.hpp"

#include <algorithm>

namespace fico {

Executor::Executor(int threads) : threads_(threads <= 0 ? max_threads() : threads) {
  if (threads_ > 1) arena_ = std::make_unique<tbb::task_arena>(threads_);
}

int max_threads() { return std::max(1, tbb::this_task_arena::max_concurrency()); }

}  // namespace fico
