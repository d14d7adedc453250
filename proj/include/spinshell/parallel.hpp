#pragma once

#include <cstddef>
#include <functional>

namespace spinshell {

/// Runs body(i) for i in [0, count) on up to `threads` workers (0 = one per
/// hardware thread). Tasks must write only to their own slot of any shared
/// output; scheduling order is unspecified, so deterministic results require
/// index-addressed outputs reduced serially afterwards.
void parallel_for(std::size_t count, int threads,
                  const std::function<void(std::size_t)>& body);

}  // namespace spinshell
