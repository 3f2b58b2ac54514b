#pragma once

#include <cstddef>
#include <functional>

namespace pcae {

/// Worker count: PCAE_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n) over up to thread_count() threads.
/// Iterations must be independent; each index runs exactly once.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pcae
