// Small numerical utilities shared across the library: compensated
// reductions, quadrature rule construction, root bracketing.
#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sigmak {

// Sum by pairwise (tree) reduction.  Deterministic for a fixed input
// order and much better conditioned than left-to-right accumulation.
double pairwise_sum(std::span<const double> v);

// Binomial coefficient as a double.  Exact for the small arguments
// used here (n <= 60 or so).
double binomial(int n, int k);

// Volume of the unit m-sphere S^m embedded in R^{m+1},
// omega_m = 2 pi^{(m+1)/2} / Gamma((m+1)/2).
double sphere_volume(int m);

// Gauss-Legendre nodes and weights on [-1, 1], ascending nodes.
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussRule gauss_legendre(int points);

// Gauss rule for the weight (1 - x^2)^alpha on [-1, 1], alpha > -1,
// ascending nodes.  alpha = 0 reduces to the Legendre rule.
GaussRule gauss_gegenbauer(int points, double alpha);

// Composite Simpson weights for a uniform grid with `count` nodes and
// spacing `step`.  Uses a 3/8 block at the end when the interval count
// is odd.  Requires count >= 4.
std::vector<double> simpson_weights(int count, double step);

// Bisection on [lo, hi]; f(lo) and f(hi) must bracket a sign change.
// Returns the midpoint after the bracket width falls below tol (or a
// fixed iteration cap).
double bisect(const std::function<double(double)>& f, double lo, double hi,
              double tol);

}  // namespace sigmak
