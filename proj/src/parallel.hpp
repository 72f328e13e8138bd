#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace npseg::detail {

// Static block partition of [0, count) over hardware threads. Each index is handled
// exactly once and results are written by index, so output does not depend on the
// thread count.
template <typename Fn>
void parallel_for(std::size_t count, Fn&& fn, std::size_t min_per_thread = 64) {
    const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
    const std::size_t threads = std::min(hw, std::max<std::size_t>(1, count / min_per_thread));
    if (threads <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    const std::size_t block = (count + threads - 1) / threads;
    for (std::size_t t = 0; t < threads; ++t) {
        const std::size_t begin = t * block;
        const std::size_t end = std::min(count, begin + block);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] {
            for (std::size_t i = begin; i < end; ++i) fn(i);
        });
    }
}

}  // namespace npseg::detail
