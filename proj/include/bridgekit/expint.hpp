#pragma once

namespace bridgekit {

/*
 * Exponential integral Ei(x) for negative arguments.
 *
 *             x
 *            /   t
 *   Ei(x) =  |  e  / t dt ,   x < 0
 *            /
 *          -inf
 *
 * Power series for |x| <= 4, continued fraction for E1(-x) below that.
 * Throws std::domain_error for x >= 0 (logarithmic singularity at 0, and
 * positive arguments are not needed by any schedule here).
 */
double expint_ei(double x);

/// x * Ei(c * x) for x -> 0+, i.e. the finite limit of the BBED term.
double x_times_expint_ei(double x, double c);

} // namespace bridgekit
