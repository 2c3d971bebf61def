#pragma once

namespace pip2 {

/// Keeps freed heap memory in the process instead of returning it to the OS. Training
/// allocates and frees the same large tape buffers every iteration; without this glibc
/// maps and faults them in anew each time. No effect on other C libraries.
void retain_heap_memory();

}  // namespace pip2
