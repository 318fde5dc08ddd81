#pragma once

#include <functional>

#include <Eigen/Dense>

namespace bridgekit {

struct GaussRule {
  Eigen::VectorXd nodes;   // on [-1, 1]
  Eigen::VectorXd weights;
};

/// n-point Gauss-Legendre rule by Golub-Welsch (eigen-decomposition of the
/// symmetric Jacobi matrix).
GaussRule gauss_legendre(int n);

/*
 * Adaptive Gauss-Legendre: a panel is accepted once the n-point estimate on
 * it agrees with the sum over its two halves to within
 * tol * max(1, |total|) (the tolerance is shared out by panel width).
 * Orientation follows the limits, so lo > hi yields the negated integral.
 * Throws std::runtime_error when the depth budget is exhausted.
 */
double integrate_adaptive(const std::function<double(double)> &f, double lo,
                          double hi, int n_nodes, double tol = 1e-10,
                          int max_depth = 60);

/// Ei(x), x < 0, as -int_0^1 exp(x / u) / u du by adaptive quadrature.
/// Independent of the series / continued-fraction evaluation.
double expint_ei_quadrature(double x);

} // namespace bridgekit
