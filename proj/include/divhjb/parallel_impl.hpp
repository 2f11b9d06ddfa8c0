#ifndef DIVHJB_PARALLEL_IMPL_HPP
#define DIVHJB_PARALLEL_IMPL_HPP

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace divhjb {

template <typename Body>
void parallel_blocks(std::size_t n_blocks, unsigned threads, Body&& body) {
    threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(n_blocks, 1))));
    if (threads == 1) {
        for (std::size_t b = 0; b < n_blocks; ++b)
            body(b);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto worker = [&]() {
        for (;;) {
            const std::size_t b = next.fetch_add(1);
            if (b >= n_blocks)
                return;
            try {
                body(b);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                next.store(n_blocks);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t)
        pool.emplace_back(worker);
    for (auto& th : pool)
        th.join();
    if (error)
        std::rethrow_exception(error);
}

} // namespace divhjb

#endif // DIVHJB_PARALLEL_IMPL_HPP
