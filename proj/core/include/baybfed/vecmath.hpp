#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "baybfed/errors.hpp"

namespace baybfed {

inline double vec_sum(std::span<const double> v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
}

inline double vec_mean(std::span<const double> v) {
    if (v.empty()) throw InvalidInputError("vec_mean: empty vector");
    return vec_sum(v) / static_cast<double>(v.size());
}

// Population standard deviation (divides by n, not n-1).
inline double vec_std_population(std::span<const double> v) {
    const double m = vec_mean(v);
    double acc = 0.0;
    for (double x : v) {
        const double d = x - m;
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(v.size()));
}

inline double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidInputError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double l2_norm(std::span<const double> v) {
    return std::sqrt(dot(v, v));
}

inline double l2_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw InvalidInputError("l2_distance: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s);
}

// Cosine similarity of two full vectors. A zero-norm operand is an error:
// a zero update is pathological and should surface instead of yielding 0.
inline double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) throw ZeroVectorError("cosine_similarity: zero-norm vector");
    return dot(a, b) / (na * nb);
}

inline bool all_finite(std::span<const double> v) {
    for (double x : v) {
        if (!std::isfinite(x)) return false;
    }
    return true;
}

}  // namespace baybfed
