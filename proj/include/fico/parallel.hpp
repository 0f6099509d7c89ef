#pragma once

#include <cstddef>
#include <memory>

#include <tbb/blocked_range.h>
#include <tbb/parallel_for.h>
#include <tbb/task_arena.h>

namespace fico {

// Fixed-size worker arena. Tasks must write disjoint outputs; results never
// depend on the number of workers.
class Executor {
 public:
  explicit Executor(int threads = 1);

  int threads() const noexcept { return threads_; }

  template <class F>
  void parallel_for(std::size_t n, F&& body) {
    if (threads_ <= 1 || n <= 1) {
      for (std::size_t i = 0; i < n; ++i) body(i);
      return;
    }
    arena_->execute([&] {
      tbb::parallel_for(tbb::blocked_range<std::size_t>(0, n), [&](const tbb::blocked_range<std::size_t>& r) {
        for (std::size_t i = r.begin(); i != r.end(); ++i) body(i);
      });
    });
  }

 private:
  int threads_;
  std::unique_ptr<tbb::task_arena> arena_;
};

// Hardware concurrency as TBB sees it (at least 1).
int max_threads();

}  // namespace fico
