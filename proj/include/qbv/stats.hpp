#pragma once

#include "qbv/errors.hpp"

namespace qbv {

// Shape parameters of a Beta distribution. Both shapes must be positive and
// finite; the constructor enforces this so downstream code never sees a
// NaN/overflowed parameter state.
struct BetaParams {
  double alpha;
  double beta;

  BetaParams(double alpha_, double beta_);
};

// Natural log of the Gamma function for x > 0.
// Relative error <= 1e-12 over [1e-3, 1e6].
double log_gamma(double x);

// Regularized incomplete beta function I_x(alpha, beta): the CDF of
// Beta(alpha, beta) evaluated at x in [0, 1]. Absolute error <= 1e-12.
double reg_inc_beta(double x, const BetaParams& p);

// Quantile of Beta(alpha, beta): the x with reg_inc_beta(x, p) = delta,
// for delta in (0, 1). Converges to residual <= 1e-12 (round-trip through
// reg_inc_beta is within 1e-9); throws NumericError after 200 iterations
// rather than returning an unconverged value.
double beta_inv(double delta, const BetaParams& p);

}  // namespace qbv
