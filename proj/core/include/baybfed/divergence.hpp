#pragma once

#include <span>
#include <vector>

namespace baybfed {

// Default floor applied to probability entries during normalization; keeps
// log terms finite in the divergence computations downstream.
inline constexpr double kProbFloor = 1e-12;

// ln(2), the upper bound of the Jensen-Shannon divergence in nats.
inline constexpr double kLn2 = 0.6931471805599453;

// Discrete probability distribution: nonnegative entries summing to 1.
// Construct via normalize() so the floor and sum invariants hold.
struct ProbVector {
    std::vector<double> weights;

    std::size_t size() const { return weights.size(); }
};

/// Elementwise Gaussian density (1/(sigma*sqrt(2*pi))) * exp(-(x-mu)^2 / (2*sigma^2)).
/// Throws InvalidScaleError when sigma <= 0.
std::vector<double> normal_pdf_vec(std::span<const double> points, double mu, double sigma);

/// Clamps every entry up to at least eps_floor, then divides by the sum.
/// Throws DegenerateDistributionError when the floored vector sums to zero
/// (possible only with eps_floor = 0) and InvalidInputError on NaN/inf input.
ProbVector normalize(std::span<const double> v, double eps_floor = kProbFloor);

/// Shannon entropy -sum p*ln(p) in nats, with 0*ln(0) := 0.
double entropy(const ProbVector& p);

/// Kullback-Leibler divergence sum p*ln(p/q) in nats. Requires equal lengths.
double kl(const ProbVector& p, const ProbVector& q);

/// Jensen-Shannon divergence (1/2)*KL(P||M) + (1/2)*KL(Q||M) with M=(P+Q)/2,
/// in nats. Bounded by [0, ln 2]; rounding noise within 1e-9 of either end
/// is snapped onto the bound.
double jsd(const ProbVector& p, const ProbVector& q);

}  // namespace baybfed
