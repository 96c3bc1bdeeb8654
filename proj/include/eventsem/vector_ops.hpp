#pragma once

#include <cassert>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace eventsem {

using Vector = std::vector<double>;

template <class A, class B>
inline double dot(std::span<const A> a, std::span<const B> b) {
    assert(a.size() == b.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return acc;
}

inline double dot(const Vector& a, const Vector& b) {
    return dot(std::span<const double>(a), std::span<const double>(b));
}

template <class T>
inline double l2_norm(std::span<const T> a) {
    double acc = 0.0;
    for (auto x : a) acc += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(acc);
}

inline double l2_norm(const Vector& a) { return l2_norm(std::span<const double>(a)); }

// Plain cosine. Callers guarantee nonzero norms; a zero norm yields NaN.
inline double cosine(const Vector& a, const Vector& b) {
    return dot(a, b) / (l2_norm(a) * l2_norm(b));
}

template <class T>
inline void add_into(Vector& acc, std::span<const T> x, double scale = 1.0) {
    assert(acc.size() == x.size());
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] += scale * static_cast<double>(x[i]);
}

inline void add_into(Vector& acc, const Vector& x, double scale = 1.0) {
    add_into(acc, std::span<const double>(x), scale);
}

}  // namespace eventsem
