#pragma once

#include <cstddef>
#include <exception>
#include <vector>

#include <omp.h>

namespace mdr::detail {

inline int worker_count(int threads) { return threads > 0 ? threads : omp_get_max_threads(); }

/// Runs fn(i) for i in [0, count) on up to `threads` workers. Each iteration
/// must only write state owned by index i. If iterations throw, the exception
/// of the lowest index is rethrown after the loop, so failures are reported
/// the same way for every worker count.
template <class Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    std::vector<std::exception_ptr> errors(count);
    const auto n = static_cast<long>(count);
#pragma omp parallel for schedule(dynamic, 1) num_threads(worker_count(threads))
    for (long i = 0; i < n; ++i) {
        try {
            fn(static_cast<std::size_t>(i));
        } catch (...) {
            errors[static_cast<std::size_t>(i)] = std::current_exception();
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace mdr::detail
