#pragma once

#include <functional>

namespace repro {

// Runs fn(i) for i in [0, count) across `threads` workers with a static
// block partition. Each index is processed exactly once; callers own any
// per-index output slots, so results are identical for every thread count.
// fn must not throw.
void parallel_for(int count, int threads, const std::function<void(int)>& fn);

}  // namespace repro
