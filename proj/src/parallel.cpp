#include "aoiseq/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace aoiseq {

unsigned thread_count()
{
    if (const char* env = std::getenv("AOI_THREADS")) {
        try {
            int n = std::stoi(env);
            if (n >= 1)
                return static_cast<unsigned>(n);
        } catch (const std::exception&) {
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_chunks(std::int64_t n, std::int64_t chunks,
                     const std::function<void(std::int64_t, std::int64_t, std::int64_t)>& body)
{
    if (n <= 0)
        return;
    chunks = std::clamp<std::int64_t>(chunks, 1, n);
    auto bounds = [&](std::int64_t c) { return n * c / chunks; };

    const auto workers = std::min<std::int64_t>(thread_count(), chunks);
    if (workers <= 1) {
        for (std::int64_t c = 0; c < chunks; ++c)
            body(bounds(c), bounds(c + 1), c);
        return;
    }

    std::atomic<std::int64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    for (std::int64_t t = 0; t < workers; ++t) {
        pool.emplace_back([&] {
            for (std::int64_t c = next++; c < chunks; c = next++) {
                try {
                    body(bounds(c), bounds(c + 1), c);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool)
        th.join();
    if (failure)
        std::rethrow_exception(failure);
}

} // namespace aoiseq
