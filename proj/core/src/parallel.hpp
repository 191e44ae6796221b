#pragma once

#include <tbb/global_control.h>
#include <tbb/task_arena.h>

#include <cstddef>
#include <optional>
#include <utility>

namespace sogs::detail {

// Runs f with at most `threads` workers (0: TBB default). Raising the global
// limit lets an explicit thread count oversubscribe small machines, which
// the determinism tests rely on.
template <class F>
void run_with_workers(std::size_t threads, F&& f) {
  if (threads == 0) {
    std::forward<F>(f)();
    return;
  }
  tbb::global_control limit(tbb::global_control::max_allowed_parallelism, threads);
  tbb::task_arena arena(static_cast<int>(threads));
  arena.execute(std::forward<F>(f));
}

}  // namespace sogs::detail
