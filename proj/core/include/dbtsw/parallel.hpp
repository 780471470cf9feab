#pragma once

#include <cstddef>
#include <functional>

namespace dbtsw {

/// Caps the number of worker threads used by library loops. 0 restores the
/// default (hardware concurrency). Results never depend on this value.
void set_num_threads(std::size_t n);
std::size_t num_threads();

/// Runs body(i) for i in [0, count). Work is split into contiguous blocks;
/// every index is processed exactly once and callers write into per-index
/// slots, so reductions done afterwards in index order are deterministic.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace dbtsw
