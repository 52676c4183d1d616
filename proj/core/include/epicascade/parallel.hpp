#pragma once

#include <cstddef>
#include <functional>

namespace epicascade {

/// Number of workers used by parallel_for: hardware concurrency, capped by the
/// EPICASCADE_WORKERS environment variable when it is set to a positive value.
std::size_t worker_count();

/// Static-chunked parallel loop over [0, n). The body must only touch
/// per-index state, which keeps results independent of the worker count.
/// Small loops run inline on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace epicascade
