#pragma once

#include <cstddef>
#include <functional>

namespace exset {

/// Runs body(i) for i in [0, n) on up to `threads` worker threads. With threads <= 1
/// the calls run inline in index order. Exceptions from body are rethrown (the one
/// with the lowest index wins).
void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body);

}  // namespace exset
