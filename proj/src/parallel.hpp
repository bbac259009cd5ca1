#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace nbsent::detail {

inline unsigned resolve_threads(unsigned requested) {
    if (requested != 0) return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Calls fn(chunk_index, begin, end) over `parts` contiguous chunks of [0, n).
/// Chunk boundaries depend only on n and parts. Rethrows the first worker exception.
template <class Fn>
void parallel_chunks(std::size_t n, unsigned parts, Fn&& fn) {
    parts = std::max(1u, std::min<unsigned>(parts, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
    if (parts == 1) {
        fn(0u, std::size_t{0}, n);
        return;
    }
    std::vector<std::exception_ptr> errors(parts);
    std::vector<std::thread> workers;
    workers.reserve(parts);
    for (unsigned p = 0; p < parts; ++p) {
        const std::size_t begin = n * p / parts;
        const std::size_t end = n * (p + 1) / parts;
        workers.emplace_back([&, p, begin, end] {
            try {
                fn(p, begin, end);
            } catch (...) {
                errors[p] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace nbsent::detail
