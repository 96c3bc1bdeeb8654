#pragma once

#include <algorithm>
#include <cmath>
#include <string_view>
#include <vector>

#include "eventsem/embedding_space.hpp"
#include "eventsem/errors.hpp"
#include "eventsem/vector_ops.hpp"

namespace eventsem {

enum class Kernel { pooled, hausdorff };

inline std::string_view to_string(Kernel k) { return k == Kernel::pooled ? "pooled" : "hausdorff"; }

inline Kernel parse_kernel(std::string_view s) {
    if (s == "pooled") return Kernel::pooled;
    if (s == "hausdorff") return Kernel::hausdorff;
    throw InputError("unknown kernel '" + std::string(s) + "' (expected pooled|hausdorff)");
}

namespace detail {

inline void require_nonempty(const EmbeddedSet& x, const EmbeddedSet& y, const char* who) {
    if (x.empty() || y.empty()) throw InputError(std::string(who) + ": empty point set");
    if (x.dimension() != y.dimension()) throw InputError(std::string(who) + ": dimension mismatch between sets");
}

}  // namespace detail

// Cosine between two already-pooled vectors; zero norm is unscorable.
inline double pooled_cosine(const Vector& x_sum, const Vector& y_sum) {
    const double nx = l2_norm(x_sum), ny = l2_norm(y_sum);
    if (!(nx > 0.0) || !(ny > 0.0)) throw UnscorableError("sum-pooled vector has zero norm");
    return dot(x_sum, y_sum) / (nx * ny);
}

// Cosine of the two sum-pooled sets.
inline double sim_pooled(const EmbeddedSet& x, const EmbeddedSet& y) {
    detail::require_nonempty(x, y, "sim_pooled");
    return pooled_cosine(sum_pool(x), sum_pool(y));
}

/**
 * Lower order statistic at percentile `l` in (0, 100]: the element at
 * ascending index ceil(l/100 * n) - 1. l = 50 is the (lower) median and
 * l = 100 the maximum.
 */
inline double percentile_lower(std::vector<double> values, double l) {
    if (values.empty()) throw InputError("percentile of an empty list");
    if (!(l > 0.0 && l <= 100.0)) throw InputError("percentile must lie in (0, 100]");
    const auto n = values.size();
    auto rank = static_cast<std::size_t>(std::ceil(l / 100.0 * static_cast<double>(n)));
    rank = std::clamp<std::size_t>(rank, 1, n);
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(rank - 1), values.end());
    return values[rank - 1];
}

/**
 * Percentile-based Hausdorff similarity. Each point of one set is matched to
 * its best cosine in the other set; the l-th percentile of those best matches
 * is taken in both directions and the smaller of the two is returned.
 */
inline double sim_hausdorff(const EmbeddedSet& x, const EmbeddedSet& y, double l = 50.0) {
    detail::require_nonempty(x, y, "sim_hausdorff");
    const std::size_t nx = x.size(), ny = y.size();
    std::vector<double> cos(nx * ny);
    for (std::size_t i = 0; i < nx; ++i)
        for (std::size_t j = 0; j < ny; ++j) cos[i * ny + j] = cosine(x.vectors[i], y.vectors[j]);

    std::vector<double> best_for_y(ny), best_for_x(nx);
    for (std::size_t j = 0; j < ny; ++j) {
        double m = cos[j];
        for (std::size_t i = 1; i < nx; ++i) m = std::max(m, cos[i * ny + j]);
        best_for_y[j] = m;
    }
    for (std::size_t i = 0; i < nx; ++i)
        best_for_x[i] = *std::max_element(cos.begin() + static_cast<std::ptrdiff_t>(i * ny),
                                          cos.begin() + static_cast<std::ptrdiff_t>((i + 1) * ny));
    return std::min(percentile_lower(std::move(best_for_y), l), percentile_lower(std::move(best_for_x), l));
}

// Sum of all pairwise dot products. Unnormalized; equals dot(sum_pool(x), sum_pool(y)).
inline double sim_crosssum(const EmbeddedSet& x, const EmbeddedSet& y) {
    detail::require_nonempty(x, y, "sim_crosssum");
    double acc = 0.0;
    for (const auto& xi : x.vectors)
        for (const auto& yj : y.vectors) acc += dot(xi, yj);
    return acc;
}

inline double similarity(Kernel kernel, const EmbeddedSet& x, const EmbeddedSet& y, double percentile = 50.0) {
    return kernel == Kernel::pooled ? sim_pooled(x, y) : sim_hausdorff(x, y, percentile);
}

}  // namespace eventsem
