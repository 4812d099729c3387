#include "spectral3/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace spectral3 {

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
    if (count == 0) return;
    unsigned width = threads > 0 ? static_cast<unsigned>(threads) : std::max(1u, std::thread::hardware_concurrency());
    width = static_cast<unsigned>(std::min<std::size_t>(width, count));

    std::exception_ptr first_error;
    std::size_t first_index = count;
    std::mutex guard;
    auto run = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(guard);
            if (i < first_index) {
                first_index = i;
                first_error = std::current_exception();
            }
        }
    };

    if (width <= 1) {
        for (std::size_t i = 0; i < count; ++i) run(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(width);
        for (unsigned w = 0; w < width; ++w)
            pool.emplace_back([&] {
                for (std::size_t i; (i = next.fetch_add(1)) < count;) run(i);
            });
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace spectral3
