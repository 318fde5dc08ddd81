#include "bridgekit/expint.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace bridgekit {

namespace {

constexpr double kEulerGamma = 0.57721566490153286060651209008240243;
constexpr double kSeriesCutoff = 4.0;
constexpr int kMaxIterations = 500;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// gamma + ln|x| + sum_{n>=1} x^n / (n n!)
double ei_series(double x) {
  double term = 1.0;
  double sum = 0.0;
  for (int n = 1; n <= kMaxIterations; ++n) {
    term *= x / n;
    const double contribution = term / n;
    sum += contribution;
    if (std::abs(contribution) <= kEps * std::abs(sum)) {
      break;
    }
  }
  return kEulerGamma + std::log(-x) + sum;
}

// E1(z), z > 1, by the modified Lentz evaluation of
//   E1(z) = e^{-z} / (z + 1 - 1/(z + 3 - 4/(z + 5 - ...)))
double e1_continued_fraction(double z) {
  constexpr double tiny = 1e-300;
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= kMaxIterations; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) <= kEps) {
      return h * std::exp(-z);
    }
  }
  throw std::runtime_error("expint_ei: continued fraction did not converge");
}

} // namespace

double expint_ei(double x) {
  if (std::isnan(x)) {
    throw std::domain_error("expint_ei: NaN argument");
  }
  if (x == 0.0) {
    throw std::domain_error("expint_ei: singular argument");
  }
  if (x > 0.0) {
    throw std::domain_error("expint_ei: positive arguments are not supported");
  }
  if (std::isinf(x)) {
    return 0.0;
  }
  if (-x <= kSeriesCutoff) {
    return ei_series(x);
  }
  return -e1_continued_fraction(-x);
}

double x_times_expint_ei(double x, double c) {
  if (x < 0.0 || c >= 0.0) {
    throw std::domain_error("x_times_expint_ei: requires x >= 0 and c < 0");
  }
  if (x < 1e-8) {
    return 0.0;
  }
  return x * expint_ei(c * x);
}

} // namespace bridgekit
