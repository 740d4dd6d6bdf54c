#pragma once

#include <cstdint>
#include <functional>

namespace aoiseq {

/// Worker count from AOI_THREADS, else the hardware concurrency.
unsigned thread_count();

/// Calls body(begin, end, chunk) over contiguous chunks of [0, n). Chunk boundaries depend only on
/// n and `chunks`, so per-chunk results reduced in chunk order are independent of the thread count.
void parallel_chunks(std::int64_t n, std::int64_t chunks,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body);

} // namespace aoiseq
