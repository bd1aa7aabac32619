#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "capflow/vec.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace capflow::par {

enum class Mode { Serial, OpenMP };

namespace detail {
inline Mode& mode_ref() {
#ifdef _OPENMP
    static Mode m = Mode::OpenMP;
#else
    static Mode m = Mode::Serial;
#endif
    return m;
}

inline bool nested() {
#ifdef _OPENMP
    return omp_in_parallel();
#else
    return false;
#endif
}
}  // namespace detail

inline Mode mode() { return detail::mode_ref(); }
inline void set_mode(Mode m) { detail::mode_ref() = m; }

inline int max_threads() {
#ifdef _OPENMP
    return mode() == Mode::OpenMP ? omp_get_max_threads() : 1;
#else
    return 1;
#endif
}

/// Reductions accumulate into blocks and combine the block partials in index
/// order.  The block size depends only on n, so serial and OpenMP paths (and
/// any thread count) produce bit-identical results.  Loops below the one-
/// block threshold run serially: their bodies are too small to amortize a
/// parallel region, and nesting inside an enclosing region is never spawned.
inline std::int64_t block_size(std::int64_t n) {
    return std::clamp<std::int64_t>((n + 255) / 256, 64, 4096);
}

/// Independent iterations with roughly uniform cost (contiguous static split).
template <class F>
void for_index(std::int64_t n, F&& body) {
#ifdef _OPENMP
    if (mode() == Mode::OpenMP && !detail::nested() && n >= 2) {
        #pragma omp parallel for schedule(static)
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

/// Independent iterations with heavy, uneven cost (work stealing).
template <class F>
void for_index_dynamic(std::int64_t n, F&& body) {
#ifdef _OPENMP
    if (mode() == Mode::OpenMP && !detail::nested() && n >= 2) {
        #pragma omp parallel for schedule(dynamic, 1)
        for (std::int64_t i = 0; i < n; ++i) body(i);
        return;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) body(i);
}

template <class F>
double sum_index(std::int64_t n, F&& term) {
    if (n <= 0) return 0.0;
    const std::int64_t bs = block_size(n);
    const std::int64_t nb = (n + bs - 1) / bs;
    auto block = [&](std::int64_t b) {
        double s = 0.0;
        const std::int64_t end = std::min(n, (b + 1) * bs);
        for (std::int64_t i = b * bs; i < end; ++i) s += term(i);
        return s;
    };
#ifdef _OPENMP
    if (mode() == Mode::OpenMP && !detail::nested() && nb >= 2) {
        std::vector<double> partial(static_cast<std::size_t>(nb));
        #pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < nb; ++b) partial[static_cast<std::size_t>(b)] = block(b);
        double total = 0.0;
        for (double p : partial) total += p;
        return total;
    }
#endif
    double total = 0.0;
    for (std::int64_t b = 0; b < nb; ++b) total += block(b);
    return total;
}

template <class F>
Vec3 sum_index_vec3(std::int64_t n, F&& term) {
    if (n <= 0) return {};
    const std::int64_t bs = block_size(n);
    const std::int64_t nb = (n + bs - 1) / bs;
    auto block = [&](std::int64_t b) {
        Vec3 s{};
        const std::int64_t end = std::min(n, (b + 1) * bs);
        for (std::int64_t i = b * bs; i < end; ++i) s += term(i);
        return s;
    };
#ifdef _OPENMP
    if (mode() == Mode::OpenMP && !detail::nested() && nb >= 2) {
        std::vector<Vec3> partial(static_cast<std::size_t>(nb));
        #pragma omp parallel for schedule(static)
        for (std::int64_t b = 0; b < nb; ++b) partial[static_cast<std::size_t>(b)] = block(b);
        Vec3 total{};
        for (const Vec3& p : partial) total += p;
        return total;
    }
#endif
    Vec3 total{};
    for (std::int64_t b = 0; b < nb; ++b) total += block(b);
    return total;
}

/// Max is order-independent, so a plain reduction is already deterministic.
template <class F>
double max_index(std::int64_t n, F&& term, double init) {
    double m = init;
#ifdef _OPENMP
    if (mode() == Mode::OpenMP && !detail::nested() && n >= 512) {
        #pragma omp parallel for schedule(static) reduction(max : m)
        for (std::int64_t i = 0; i < n; ++i) m = std::max(m, term(i));
        return m;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) m = std::max(m, term(i));
    return m;
}

template <class F>
std::int64_t count_index(std::int64_t n, F&& pred) {
    std::int64_t c = 0;
#ifdef _OPENMP
    if (mode() == Mode::OpenMP && !detail::nested() && n >= 512) {
        #pragma omp parallel for schedule(static) reduction(+ : c)
        for (std::int64_t i = 0; i < n; ++i) c += pred(i) ? 1 : 0;
        return c;
    }
#endif
    for (std::int64_t i = 0; i < n; ++i) c += pred(i) ? 1 : 0;
    return c;
}

/// RAII guard for running a scope in a forced mode (used by tests and the
/// serial-vs-parallel benchmark).
class ScopedMode {
  public:
    explicit ScopedMode(Mode m) : saved_(mode()) { set_mode(m); }
    ~ScopedMode() { set_mode(saved_); }
    ScopedMode(const ScopedMode&) = delete;
    ScopedMode& operator=(const ScopedMode&) = delete;

  private:
    Mode saved_;
};

}  // namespace capflow::par
