#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace consult::detail {

/// Run fn(i) for i in [0, n) on up to `workers` threads. Results keep index
/// order; the first exception wins and is rethrown after all threads join.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    if (n == 0) return;
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr first_error;
    std::mutex error_mu;
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(error_mu);
                if (!first_error) first_error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

template <typename In, typename Fn>
auto parallel_map(const std::vector<In>& items, std::size_t workers, Fn&& fn)
    -> std::vector<decltype(fn(items.front()))> {
    std::vector<decltype(fn(items.front()))> out(items.size());
    parallel_for(items.size(), workers, [&](std::size_t i) { out[i] = fn(items[i]); });
    return out;
}

}  // namespace consult::detail
