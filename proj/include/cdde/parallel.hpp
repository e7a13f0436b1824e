// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace cdde {

// Worker count used by parallel_for. 0 means hardware concurrency.
void set_threads(unsigned n);
unsigned threads();

// Runs fn(i) for i in [0, n). Each index is visited exactly once; callers
// must write to disjoint outputs. Exceptions from workers are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace cdde
