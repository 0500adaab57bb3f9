#pragma once

// Per-point maps with a serial reference path and an OpenMP path. Both write
// results by index, so the output never depends on scheduling. Exceptions
// thrown inside the parallel loop are captured and the one with the lowest
// index is rethrown, matching what the serial loop would raise.

#include <cstddef>
#include <exception>
#include <optional>
#include <vector>

namespace fk {

enum class Exec { Serial, Parallel };

template <typename T, typename Fn>
auto map_indexed(const std::vector<T>& items, Fn&& fn, Exec exec = Exec::Parallel)
    -> std::vector<decltype(fn(items[0], std::size_t{0}))> {
    using R = decltype(fn(items[0], std::size_t{0}));
    const long count = static_cast<long>(items.size());
    std::vector<std::optional<R>> slots(items.size());
    std::vector<std::exception_ptr> errors(items.size());
    if (exec == Exec::Serial) {
        for (long i = 0; i < count; ++i) {
            const auto k = static_cast<std::size_t>(i);
            slots[k].emplace(fn(items[k], k));
        }
    } else {
#pragma omp parallel for schedule(dynamic)
        for (long i = 0; i < count; ++i) {
            const auto k = static_cast<std::size_t>(i);
            try {
                slots[k].emplace(fn(items[k], k));
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    std::vector<R> out;
    out.reserve(items.size());
    for (auto& s : slots) out.push_back(std::move(*s));
    return out;
}

template <typename T, typename Fn>
auto map_points(const std::vector<T>& items, Fn&& fn, Exec exec = Exec::Parallel) {
    return map_indexed(items, [&](const T& item, std::size_t) { return fn(item); }, exec);
}

void set_thread_count(int threads);
int thread_count();

}  // namespace fk
