#include "qbv/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace qbv {
namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// Lanczos approximation, g = 7, 9 coefficients. Gives |rel err| ~ 1e-15 for
// the gamma function over the positive axis when combined with reflection
// below 0.5.
constexpr double kLanczos[9] = {
    0.99999999999980993,      676.5203681218851,     -1259.1392167224028,
    771.32342877765313,       -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,     9.9843695780195716e-6, 1.5056327351493116e-7};

double log_gamma_lanczos(double x) {
  // Valid for x >= 0.5.
  const double xm1 = x - 1.0;
  double acc = kLanczos[0];
  for (int i = 1; i < 9; ++i) {
    acc += kLanczos[i] / (xm1 + static_cast<double>(i));
  }
  const double t = xm1 + 7.5;
  return 0.5 * std::log(2.0 * kPi) + (xm1 + 0.5) * std::log(t) - t +
         std::log(acc);
}

// Continued fraction for the incomplete beta function, evaluated with the
// modified Lentz algorithm. Only called with x below the symmetry switch
// point (a+1)/(a+b+2), where the fraction converges quickly.
double inc_beta_cf(double x, double a, double b) {
  constexpr double kEps = 1e-16;
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 500;

  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;

  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;

  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;

    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) return h;
  }
  throw NumericError(
      "incomplete beta continued fraction did not converge (a=" +
      std::to_string(a) + ", b=" + std::to_string(b) + ", x=" +
      std::to_string(x) + ")");
}

double log_beta(double a, double b) {
  return log_gamma(a) + log_gamma(b) - log_gamma(a + b);
}

// Beta(a, b) density, computed in log space so extreme shapes cannot
// overflow the intermediate powers.
double beta_pdf(double x, double a, double b) {
  if (x <= 0.0 || x >= 1.0) {
    // Only the interior matters for the Newton step; endpoint densities for
    // a, b < 1 are unbounded and would destabilize the step anyway.
    return 0.0;
  }
  const double lp =
      (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta(a, b);
  return std::exp(lp);
}

// Acklam's rational approximation to the standard normal quantile.
// Accuracy ~1e-9, which is only ever used to seed Newton iterations.
double probit(double p) {
  static const double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                              -2.759285104469687e+02, 1.383577518672690e+02,
                              -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                              -1.556989798598866e+02, 6.680131188771972e+01,
                              -1.328068155288572e+01};
  static const double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                              -2.400758277161838e+00, -2.549732539343734e+00,
                              4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                              2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double kLow = 0.02425;

  if (p < kLow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
            c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - kLow) {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q +
             c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r +
          a[5]) *
         q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

BetaParams::BetaParams(double alpha_, double beta_) : alpha(alpha_), beta(beta_) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw std::domain_error("BetaParams: alpha must be positive and finite");
  }
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw std::domain_error("BetaParams: beta must be positive and finite");
  }
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw std::domain_error("log_gamma: x must be positive and finite");
  }
  if (x < 0.5) {
    // Reflection keeps the Lanczos argument away from the pole at 0, where
    // the direct series loses accuracy.
    return std::log(kPi / std::sin(kPi * x)) - log_gamma_lanczos(1.0 - x);
  }
  return log_gamma_lanczos(x);
}

double reg_inc_beta(double x, const BetaParams& p) {
  if (!(x >= 0.0 && x <= 1.0)) {
    throw std::domain_error("reg_inc_beta: x must lie in [0, 1]");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const double a = p.alpha;
  const double b = p.beta;
  const double lfront =
      a * std::log(x) + b * std::log1p(-x) - log_beta(a, b);

  // Symmetry switch: evaluate the continued fraction on whichever side of
  // (a+1)/(a+b+2) converges fast, using I_x(a,b) = 1 - I_{1-x}(b,a).
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return std::exp(lfront) * inc_beta_cf(x, a, b) / a;
  }
  return 1.0 - std::exp(lfront) * inc_beta_cf(1.0 - x, b, a) / b;
}

double beta_inv(double delta, const BetaParams& p) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("beta_inv: delta must lie in (0, 1)");
  }

  constexpr double kResidualTol = 1e-12;
  constexpr int kMaxIter = 200;

  const double a = p.alpha;
  const double b = p.beta;

  // Moment-matched normal seed, clamped into the open interval.
  const double mean = a / (a + b);
  const double var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
  double x = mean + std::sqrt(var) * probit(delta);
  x = std::clamp(x, 1e-10, 1.0 - 1e-10);

  // Invariant bracket around the root; every iteration either Newton-steps
  // inside it or bisects it, so the loop cannot diverge.
  double lo = 0.0;
  double hi = 1.0;

  for (int iter = 0; iter < kMaxIter; ++iter) {
    const double f = reg_inc_beta(x, p) - delta;
    if (std::fabs(f) <= kResidualTol) return x;
    if (f > 0.0) {
      hi = std::min(hi, x);
    } else {
      lo = std::max(lo, x);
    }
    if (hi - lo <= std::numeric_limits<double>::epsilon() * std::max(lo, 1e-3)) {
      // The bracket has collapsed to adjacent doubles: the residual is then
      // limited by the conditioning of the CDF, not by the iteration.
      return 0.5 * (lo + hi);
    }

    const double dfdx = beta_pdf(x, a, b);
    double next;
    if (dfdx > 0.0 && std::isfinite(dfdx)) {
      next = x - f / dfdx;
    } else {
      next = std::numeric_limits<double>::quiet_NaN();
    }
    if (!(next > lo && next < hi)) {
      next = 0.5 * (lo + hi);  // bisection fallback
    }
    x = next;
  }
  throw NumericError("beta_inv did not converge within 200 iterations");
}

}  // namespace qbv
