#include "bridgekit/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace bridgekit {

GaussRule gauss_legendre(int n) {
  if (n < 1) {
    throw std::invalid_argument("gauss_legendre: need n >= 1");
  }
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double beta = i / std::sqrt(4.0 * i * i - 1.0);
    jacobi(i, i - 1) = beta;
    jacobi(i - 1, i) = beta;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(jacobi);
  GaussRule rule;
  rule.nodes = solver.eigenvalues();
  rule.weights = 2.0 * solver.eigenvectors().row(0).transpose().array().square();
  return rule;
}

namespace {

const GaussRule &cached_rule(int n) {
  static std::mutex mutex;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) {
    it = cache.emplace(n, gauss_legendre(n)).first;
  }
  return it->second;
}

double panel(const std::function<double(double)> &f, const GaussRule &rule,
             double lo, double hi) {
  const double half = 0.5 * (hi - lo);
  const double mid = 0.5 * (hi + lo);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  }
  return half * sum;
}

double refine(const std::function<double(double)> &f, const GaussRule &rule,
              double lo, double hi, double whole, double tol, int depth) {
  const double mid = 0.5 * (lo + hi);
  const double left = panel(f, rule, lo, mid);
  const double right = panel(f, rule, mid, hi);
  if (std::abs(left + right - whole) <= tol) {
    return left + right;
  }
  if (depth == 0) {
    throw std::runtime_error(
        "integrate_adaptive: failed to converge within tolerance");
  }
  return refine(f, rule, lo, mid, left, 0.5 * tol, depth - 1) +
         refine(f, rule, mid, hi, right, 0.5 * tol, depth - 1);
}

} // namespace

double integrate_adaptive(const std::function<double(double)> &f, double lo,
                          double hi, int n_nodes, double tol, int max_depth) {
  if (lo == hi) {
    return 0.0;
  }
  if (hi < lo) {
    return -integrate_adaptive(f, hi, lo, n_nodes, tol, max_depth);
  }
  const GaussRule &rule = cached_rule(n_nodes);
  const double whole = panel(f, rule, lo, hi);
  const double scale = std::max(1.0, std::abs(whole));
  return refine(f, rule, lo, hi, whole, tol * scale, max_depth);
}

double expint_ei_quadrature(double x) {
  if (!(x < 0.0)) {
    throw std::domain_error("expint_ei_quadrature: requires x < 0");
  }
  // e^z E1(z) = int_1^inf e^{-z (w - 1)}/w dw = int_0^1 e^{-z (1/u - 1)}/u du,
  // which stays O(1/z) so an absolute tolerance is effectively relative.
  const double z = -x;
  const auto integrand = [z](double u) {
    return u > 0.0 ? std::exp(-z * (1.0 / u - 1.0)) / u : 0.0;
  };
  // The integrand vanishes below u ~ z and falls like 1/u above it, so panels
  // double in width from u = z; each one is then smooth.
  const double tol = 1e-14;
  double lo = std::min(z, 1.0);
  double e1 = integrate_adaptive(integrand, 0.0, lo, 20, tol);
  while (lo < 1.0) {
    const double hi = std::min(2.0 * lo, 1.0);
    e1 += integrate_adaptive(integrand, lo, hi, 20, tol);
    lo = hi;
  }
  return -e1 * std::exp(-z);
}

} // namespace bridgekit
