#pragma once

#include <cstddef>
#include <functional>

namespace pip2 {

// Process-wide worker count for parallel_for. Results never depend on it:
// callers partition work into fixed index ranges and reduce in index order.
void set_thread_count(int n);
int thread_count();

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace pip2
