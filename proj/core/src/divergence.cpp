#include "baybfed/divergence.hpp"

#include <cmath>
#include <numbers>

#include "baybfed/errors.hpp"
#include "baybfed/vecmath.hpp"

namespace baybfed {

std::vector<double> normal_pdf_vec(std::span<const double> points, double mu, double sigma) {
    if (sigma <= 0.0) throw InvalidScaleError("normal_pdf_vec: sigma must be > 0");
    const double inv_norm = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
    std::vector<double> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double d = points[i] - mu;
        out[i] = inv_norm * std::exp(-d * d * inv_two_var);
    }
    return out;
}

ProbVector normalize(std::span<const double> v, double eps_floor) {
    if (v.empty()) throw InvalidInputError("normalize: empty vector");
    if (eps_floor < 0.0) throw InvalidInputError("normalize: eps_floor must be >= 0");
    if (!all_finite(v)) throw InvalidInputError("normalize: non-finite entry");

    std::vector<double> w(v.begin(), v.end());
    double sum = 0.0;
    for (double& x : w) {
        if (x < eps_floor) x = eps_floor;
        sum += x;
    }
    if (sum <= 0.0) {
        throw DegenerateDistributionError("normalize: all entries zero after flooring");
    }
    for (double& x : w) x /= sum;
    return ProbVector{std::move(w)};
}

double entropy(const ProbVector& p) {
    double h = 0.0;
    for (double x : p.weights) {
        if (x > 0.0) h -= x * std::log(x);
    }
    // Rounding can produce a tiny negative total for near-point masses.
    return h < 0.0 ? 0.0 : h;
}

double kl(const ProbVector& p, const ProbVector& q) {
    if (p.size() != q.size()) throw InvalidInputError("kl: length mismatch");
    double d = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double pi = p.weights[i];
        if (pi > 0.0) d += pi * std::log(pi / q.weights[i]);
    }
    return d;
}

double jsd(const ProbVector& p, const ProbVector& q) {
    if (p.size() != q.size()) throw InvalidInputError("jsd: length mismatch");
    ProbVector m;
    m.weights.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) {
        m.weights[i] = 0.5 * (p.weights[i] + q.weights[i]);
    }
    double d = 0.5 * kl(p, m) + 0.5 * kl(q, m);
    if (d < 0.0 && d > -1e-9) d = 0.0;
    if (d > kLn2 && d < kLn2 + 1e-9) d = kLn2;
    return d;
}

}  // namespace baybfed
