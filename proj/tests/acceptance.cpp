// Acceptance gate: ten end-to-end checks, one [PASS]/[FAIL] line each, with
// the measured values printed beside the pinned expectations. The process
// exit code is the number of failed criteria, so CI can gate on zero.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "qbv/harness.hpp"
#include "qbv/rng.hpp"

using namespace qbv;

namespace {

// --- pinned tolerances and targets ------------------------------------------

constexpr double kTopMassTarget = 0.1813;   // ideal ring-8 top-5 mass
constexpr double kTopMassTol = 0.005;
constexpr double kGridMassTol = 1e-9;       // argmax vs exhaustive grid max
constexpr double kAngleTol = 1e-9;          // recovered reference angles
constexpr double kTrajectoryTol = 1e-12;    // closed-form Beta(a,1) quantile
constexpr double kQuantileOracleTol = 1e-10;
constexpr double kRoundTripTol = 1e-9;
constexpr double kConjugacyTvTol = 1e-6;
constexpr double kIdentityTol = 1e-12;      // analytic noise identities
constexpr std::uint64_t kSweepSeed = 14;    // base seed for the pinned sweeps

// --- plumbing ----------------------------------------------------------------

struct Outcome {
  bool ok = true;
  std::string detail;
};

bool run_criterion(const char* id, const char* name, double budget_seconds,
                   const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome outcome;
  try {
    outcome = body();
  } catch (const std::exception& e) {
    outcome.ok = false;
    outcome.detail = std::string("exception: ") + e.what();
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  const bool in_budget = seconds < budget_seconds;
  const bool ok = outcome.ok && in_budget;
  std::printf("[%s] %s %s: %s (%.2fs, budget %.1fs)\n", ok ? "PASS" : "FAIL",
              id, name, outcome.detail.c_str(), seconds, budget_seconds);
  if (!in_budget) {
    std::printf("       %s exceeded its runtime budget\n", id);
  }
  return ok;
}

std::string fmt(double value, int precision = 15) {
  std::ostringstream out;
  out.precision(precision);
  out << value;
  return out.str();
}

// Shared ring-8 ingredients.
const Graph& ring8() {
  static const Graph g = ring_graph(8);
  return g;
}

OutcomeDistribution qaoa_distribution(double gamma, double beta_angle) {
  return distribution(simulate(qaoa_circuit(ring8(), {gamma, beta_angle, 1})));
}

double success_mass(const OutcomeDistribution& dist,
                    const SuccessPredicate& predicate) {
  double mass = 0.0;
  for (const std::string& bits : predicate.success_set) {
    mass += dist.prob(bits);
  }
  return mass;
}

// The reference top-5 mass of the ideal ring-8 distribution at the
// reference angles, under the default (cut-value) ranking.
double reference_mu0() {
  const OutcomeDistribution dist = qaoa_distribution(2.300, 1.200);
  return success_mass(dist, top_k_set(dist, ring8(), 5));
}

// --- criteria ----------------------------------------------------------------

// A01: the ideal top-5 success mass at the reference angles.
Outcome criterion_top5_mass() {
  const OutcomeDistribution dist = qaoa_distribution(2.300, 1.200);
  const double cut_mass = success_mass(
      dist, top_k_set(dist, ring8(), 5, TopKRanking::CutValueThenLex));
  const double prob_mass = success_mass(
      dist, top_k_set(dist, ring8(), 5, TopKRanking::ProbThenCutThenLex));
  Outcome o;
  o.ok = std::abs(cut_mass - kTopMassTarget) <= kTopMassTol;
  o.detail = "mu0(cut-ranked) = " + fmt(cut_mass) + ", target " +
             fmt(kTopMassTarget) + " +/- " + fmt(kTopMassTol) +
             "; mu0(prob-ranked) = " + fmt(prob_mass);
  return o;
}

// A02: grid search returns a global grid argmax; the expected-cut objective
// recovers the reference angles (2.300, 1.200).
Outcome criterion_grid_search() {
  const std::vector<double> gammas = linspace(0.1, 2.9, 15);
  const std::vector<double> betas = linspace(0.1, 1.5, 15);

  double grid_max = -1.0;
  for (const double gamma : gammas) {
    for (const double beta_angle : betas) {
      const OutcomeDistribution dist = qaoa_distribution(gamma, beta_angle);
      grid_max =
          std::max(grid_max, success_mass(dist, top_k_set(dist, ring8(), 5)));
    }
  }

  const QaoaParams mass_star = grid_search_angles(ring8(), 5, gammas, betas);
  const OutcomeDistribution at_star =
      qaoa_distribution(mass_star.gamma, mass_star.beta_angle);
  const double mass_at_star =
      success_mass(at_star, top_k_set(at_star, ring8(), 5));

  const QaoaParams cut_star = grid_search_angles(
      ring8(), 5, gammas, betas, GridObjective::ExpectedCut);

  Outcome o;
  const bool argmax_ok = std::abs(mass_at_star - grid_max) <= kGridMassTol;
  const bool angles_ok = std::abs(cut_star.gamma - 2.300) <= kAngleTol &&
                         std::abs(cut_star.beta_angle - 1.200) <= kAngleTol;
  o.ok = argmax_ok && angles_ok;
  o.detail = "top-5-mass argmax (" + fmt(mass_star.gamma, 6) + ", " +
             fmt(mass_star.beta_angle, 6) + ") mass " + fmt(mass_at_star) +
             " vs exhaustive 225-point max " + fmt(grid_max) +
             "; expected-cut argmax (" + fmt(cut_star.gamma, 6) + ", " +
             fmt(cut_star.beta_angle, 6) + ") expects (2.3, 1.2)";
  return o;
}

// A03: an all-success Bell stream stops at exactly 250 shots for every
// tau <= 0.98, and its checkpoint LCBs match the closed-form Beta(a, 1)
// quantile delta^(1/a).
Outcome criterion_bell_stop_time() {
  const PriorSpec prior{1.0, 20.0};
  const SuccessPredicate predicate = bell_predicate();
  Outcome o;
  double max_err = 0.0;
  std::string stops;
  for (const double tau : {0.85, 0.90, 0.94, 0.98}) {
    VerifierConfig config;
    config.tau = tau;
    config.delta = 0.025;
    config.batch = 50;
    config.n_min = 200;
    config.n_max = 2000;
    config.streak = 2;
    config.target_mode = TargetMode::Absolute;

    Sampler sampler = Sampler::replay(std::vector<std::string>(2000, "00"));
    const VerdictReport report =
        sequential_verify(sampler, predicate, prior, config);
    o.ok = o.ok && report.decision == Decision::PASS && report.n_stop == 250;
    for (const TrajectoryPoint& point : report.trajectory) {
      // All-success posterior is Beta(21 + n, 1), whose delta-quantile is
      // delta^(1/(21+n)).
      const double closed_form =
          std::pow(config.delta, 1.0 / (21.0 + static_cast<double>(point.n)));
      max_err = std::max(max_err, std::abs(point.lcb - closed_form));
      o.ok = o.ok && point.k == point.n;
    }
    o.ok = o.ok && max_err <= kTrajectoryTol;
    stops += (stops.empty() ? "" : ", ") + std::to_string(report.n_stop);
  }
  o.detail = "n_stop = {" + stops + "} (want all 250), max |lcb - delta^(1/a)| = " +
             fmt(max_err, 3) + " (tol " + fmt(kTrajectoryTol) + ")";
  return o;
}

// A04: the zero-noise qaoa-ring8 sweep passes 10/10 with medians in
// [100, 700] for tau <= 0.90 and degrades at tau = 0.95.
Outcome criterion_qaoa_sweep() {
  SweepConfig cfg;
  cfg.workload = "qaoa-ring8";
  cfg.taus = {0.60, 0.80, 0.90, 0.95};
  cfg.runs = 10;
  cfg.base_seed = kSweepSeed;
  cfg.verifier = resolve_workload("qaoa-ring8").defaults;
  cfg.verifier.n_min = 0;  // stop times must reflect the evidence alone
  const SweepResult result = run_sweep(cfg);

  Outcome o;
  for (const RunSummary& s : result.summaries) {
    o.detail += "tau " + fmt(s.tau, 3) + ": " + std::to_string(s.pass_count) +
                "/10 med " + fmt(s.median_stop, 6) + "; ";
    if (s.tau <= 0.90) {
      o.ok = o.ok && s.pass_count == 10 && s.median_stop >= 100.0 &&
             s.median_stop <= 700.0;
    } else {
      o.ok = o.ok && (s.pass_count < 10 || s.median_stop > 1000.0);
    }
  }
  o.detail += "want 10/10 with med in [100, 700] below 0.95, degradation at 0.95";
  return o;
}

// A05: with depolarizing noise calibrated to theta_eff = 0.75 * mu0, pass
// counts fall and median stop shots rise monotonically in tau, and tau = 0.90
// is majority budget-limited.
Outcome criterion_noisy_sweep() {
  const double mu0 = reference_mu0();
  const double uniform_mass = 5.0 / 256.0;
  // Solve (1 - lambda) * mu0 + lambda * 5/256 = 0.75 * mu0 for lambda.
  const double lambda = 0.25 * mu0 / (mu0 - uniform_mass);

  SweepConfig cfg;
  cfg.workload = "qaoa-ring8";
  cfg.taus = {0.60, 0.80, 0.90};
  cfg.runs = 10;
  cfg.base_seed = kSweepSeed;
  cfg.noise.depolarizing = lambda;
  cfg.verifier = resolve_workload("qaoa-ring8").defaults;
  cfg.verifier.n_min = 0;
  const SweepResult result = run_sweep(cfg);

  Outcome o;
  o.detail = "lambda = " + fmt(lambda, 6) + "; ";
  int prev_pass = cfg.runs + 1;
  double prev_median = -1.0;
  for (const RunSummary& s : result.summaries) {
    o.ok = o.ok && s.pass_count <= prev_pass && s.median_stop >= prev_median;
    prev_pass = s.pass_count;
    prev_median = s.median_stop;
    o.detail += "tau " + fmt(s.tau, 3) + ": " + std::to_string(s.pass_count) +
                "/10 med " + fmt(s.median_stop, 6) + "; ";
  }
  int capped = 0;
  for (const RunRecord& rec : result.records) {
    if (rec.tau == 0.90 && rec.n_stop == cfg.verifier.n_max) ++capped;
  }
  o.ok = o.ok && 2 * capped > cfg.runs;
  o.detail += std::to_string(capped) +
              "/10 budget-limited at tau 0.90 (want majority, monotone "
              "pass/medians)";
  return o;
}

// A06: baseline comparison. Sequential stopping never exceeds the shared cap;
// the noiseless Bell sweep saves a median of 1750 shots at tau = 0.85; budget-
// limited runs save exactly 0.
Outcome criterion_baseline_savings() {
  SweepConfig clean;
  clean.workload = "bell";
  clean.taus = {0.85};
  clean.runs = 10;
  clean.base_seed = kSweepSeed;
  clean.verifier = resolve_workload("bell").defaults;
  clean.compare_baseline = true;
  const SweepResult clean_result = run_sweep(clean);

  SweepConfig capped = clean;
  capped.taus = {0.94};
  capped.noise.depolarizing = 0.5;  // success mass 0.75, far below tau
  const SweepResult capped_result = run_sweep(capped);

  Outcome o;
  const RunSummary& s = clean_result.summaries.at(0);
  o.ok = s.median_saving.has_value() &&
         std::abs(*s.median_saving - 1750.0) < 1e-9;
  o.detail = "noiseless bell tau 0.85 median saving = " +
             fmt(s.median_saving.value_or(-1.0), 6) + " (want 1750)";

  bool zero_saving = true;
  for (const RunRecord& rec : capped_result.records) {
    zero_saving = zero_saving && rec.decision == Decision::FAIL &&
                  rec.saving.has_value() && *rec.saving == 0;
  }
  o.ok = o.ok && zero_saving;

  bool within_cap = true;
  for (const SweepResult* result : {&clean_result, &capped_result}) {
    for (const RunRecord& rec : result->records) {
      within_cap = within_cap && rec.n_stop <= 2000;
    }
  }
  o.ok = o.ok && within_cap;
  o.detail += std::string("; budget-limited savings all zero: ") +
              (zero_saving ? "yes" : "NO") + "; n_stop <= cap on all runs: " +
              (within_cap ? "yes" : "NO");
  return o;
}

// A07: beta_inv agrees with an interval-bisection oracle on the CDF, and
// round-trips through reg_inc_beta.
Outcome criterion_quantile_kernel() {
  const std::vector<double> shapes = {0.5, 1.0, 2.0, 21.0, 221.0, 4.626,
                                      17.374};
  const std::vector<double> deltas = {0.001, 0.01, 0.025, 0.1,   0.25,
                                      0.5,   0.75, 0.9,   0.975, 0.999};
  double max_oracle_err = 0.0;
  double max_round_trip_err = 0.0;
  for (const double alpha : shapes) {
    for (const double beta : shapes) {
      const BetaParams p(alpha, beta);
      for (const double delta : deltas) {
        const double q = beta_inv(delta, p);
        double lo = 0.0;
        double hi = 1.0;
        for (int i = 0; i < 200; ++i) {
          const double mid = 0.5 * (lo + hi);
          (reg_inc_beta(mid, p) < delta ? lo : hi) = mid;
        }
        max_oracle_err = std::max(max_oracle_err,
                                  std::abs(q - 0.5 * (lo + hi)));
        max_round_trip_err =
            std::max(max_round_trip_err, std::abs(reg_inc_beta(q, p) - delta));
      }
    }
  }
  Outcome o;
  o.ok = max_oracle_err <= kQuantileOracleTol &&
         max_round_trip_err <= kRoundTripTol;
  o.detail = "max |beta_inv - bisection| = " + fmt(max_oracle_err, 3) +
             " (tol " + fmt(kQuantileOracleTol) + "), max CDF round-trip = " +
             fmt(max_round_trip_err, 3) + " (tol " + fmt(kRoundTripTol) + ")";
  return o;
}

// A08: the conjugate posterior matches grid-based numerical Bayes in total
// variation on 100 random (prior, k, n) cases.
Outcome criterion_conjugacy() {
  // 5-point Gauss-Legendre rule on [-1, 1].
  const double nodes[5] = {0.0, -0.5384693101056831, 0.5384693101056831,
                           -0.9061798459386640, 0.9061798459386640};
  const double weights[5] = {0.5688888888888889, 0.4786286704993665,
                             0.4786286704993665, 0.2369268850561891,
                             0.2369268850561891};

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> mu_dist(0.05, 0.95);
  std::uniform_real_distribution<double> strength_dist(0.0, 50.0);
  std::uniform_int_distribution<long long> n_dist(1, 10000);

  double max_tv = 0.0;
  constexpr int kCases = 100;
  constexpr int kCells = 5000;
  for (int c = 0; c < kCases; ++c) {
    const double mu0 = mu_dist(rng);
    const double strength = strength_dist(rng);
    long long n = n_dist(rng);
    long long k = std::uniform_int_distribution<long long>(0, n)(rng);
    if (c == 0) k = 0;           // all-failure edge
    if (c == 1) k = n;           // all-success edge
    if (c == 2) {                // largest supported batch
      n = 10000;
      k = 5000;
    }

    const BetaParams prior = make_beta_prior({mu0, strength});
    const BetaParams posterior(prior.alpha + static_cast<double>(k),
                               prior.beta + static_cast<double>(n - k));

    // Integration window: +/- 40 posterior standard deviations, clipped.
    const double ab = posterior.alpha + posterior.beta;
    const double mean = posterior.alpha / ab;
    const double sigma =
        std::sqrt(posterior.alpha * posterior.beta / (ab * ab * (ab + 1.0)));
    const double lo = std::max(0.0, mean - 40.0 * sigma);
    const double hi = std::min(1.0, mean + 40.0 * sigma);
    const double h = (hi - lo) / kCells;

    // Numerical Bayes: quadrature of the unnormalized prior x likelihood
    // over each grid cell, normalized across the window. The exponents are
    // evaluated in logs against their maximum for stability.
    const double log_x_exp = prior.alpha - 1.0 + static_cast<double>(k);
    const double log_1mx_exp =
        prior.beta - 1.0 + static_cast<double>(n - k);
    std::vector<double> numeric(kCells);
    double max_log = -1e300;
    std::vector<double> logs(kCells * 5);
    for (int i = 0; i < kCells; ++i) {
      const double a = lo + i * h;
      for (int j = 0; j < 5; ++j) {
        const double x = a + 0.5 * h * (1.0 + nodes[j]);
        const double log_value =
            log_x_exp * std::log(x) + log_1mx_exp * std::log1p(-x);
        logs[i * 5 + j] = log_value;
        max_log = std::max(max_log, log_value);
      }
    }
    double total = 0.0;
    for (int i = 0; i < kCells; ++i) {
      double cell = 0.0;
      for (int j = 0; j < 5; ++j) {
        cell += weights[j] * std::exp(logs[i * 5 + j] - max_log);
      }
      cell *= 0.5 * h;
      numeric[i] = cell;
      total += cell;
    }

    // Conjugate side: exact cell masses from the posterior CDF.
    double tv = 0.0;
    double analytic_mass = 0.0;
    double cdf_left = reg_inc_beta(lo, posterior);
    for (int i = 0; i < kCells; ++i) {
      const double right = (i + 1 == kCells) ? hi : lo + (i + 1) * h;
      const double cdf_right = reg_inc_beta(right, posterior);
      const double analytic = cdf_right - cdf_left;
      analytic_mass += analytic;
      tv += std::abs(numeric[i] / total - analytic);
      cdf_left = cdf_right;
    }
    // Mass the window misses counts against the distance in full.
    tv = 0.5 * tv + 0.5 * (1.0 - analytic_mass);
    max_tv = std::max(max_tv, tv);
  }

  Outcome o;
  o.ok = max_tv <= kConjugacyTvTol;
  o.detail = "max TV over " + std::to_string(kCases) + " cases = " +
             fmt(max_tv, 3) + " (tol " + fmt(kConjugacyTvTol) + ")";
  return o;
}

// A09: the depolarizing success-mass identity holds analytically, and the
// Bell readout channel at eps = 0.02 yields success mass 0.9608.
Outcome criterion_noise_identities() {
  const OutcomeDistribution ideal = qaoa_distribution(2.300, 1.200);
  const SuccessPredicate top5 = top_k_set(ideal, ring8(), 5);
  const double theta_ideal = success_mass(ideal, top5);
  const double uniform_mass =
      static_cast<double>(top5.success_set.size()) / 256.0;

  double max_identity_err = 0.0;
  for (const double lambda : {0.0, 0.1, 0.280193158190714, 0.7, 1.0}) {
    const double measured =
        success_mass(apply_depolarizing(ideal, lambda), top5);
    const double predicted =
        (1.0 - lambda) * theta_ideal + lambda * uniform_mass;
    max_identity_err = std::max(max_identity_err,
                                std::abs(measured - predicted));
  }

  const OutcomeDistribution bell =
      distribution(simulate(bell_circuit(Basis::Z)));
  const double readout_mass =
      success_mass(apply_readout_flip(bell, 0.02), bell_predicate());
  const double readout_err = std::abs(readout_mass - 0.9608);

  Outcome o;
  o.ok = max_identity_err <= kIdentityTol && readout_err <= kIdentityTol;
  o.detail = "max |measured - (1-lambda)*theta + lambda*|S|/256| = " +
             fmt(max_identity_err, 3) + "; bell readout mass at eps 0.02 = " +
             fmt(readout_mass) + " (want 0.9608)";
  return o;
}

// A10: with batch = n_max, n_min = 0, streak = 1, the sequential rule and the
// fixed-budget baseline agree on a shared recorded stream.
Outcome criterion_degenerate_equivalence() {
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> theta_dist(0.45, 0.95);

  const SuccessPredicate bit{1, {"1"}};
  VerifierConfig config;
  config.tau = 0.7;
  config.delta = 0.025;
  config.batch = 400;
  config.n_min = 0;
  config.n_max = 400;
  config.streak = 1;
  config.target_mode = TargetMode::Absolute;
  const PriorSpec prior{0.7, 20.0};

  int pass_count = 0;
  int fail_count = 0;
  bool all_equal = true;
  for (int i = 0; i < 50; ++i) {
    const double theta = theta_dist(rng);
    const std::vector<std::string> tape =
        Sampler::bernoulli(theta, mix_seed(99, i)).draw(config.n_max);
    Sampler sequential_stream = Sampler::replay(tape);
    Sampler fixed_stream = Sampler::replay(tape);
    const VerdictReport sequential =
        sequential_verify(sequential_stream, bit, prior, config);
    const VerdictReport fixed =
        fixed_budget_verify(fixed_stream, bit, prior, config);
    all_equal = all_equal && sequential == fixed;
    (sequential.decision == Decision::PASS ? pass_count : fail_count) += 1;
  }

  Outcome o;
  o.ok = all_equal && pass_count > 0 && fail_count > 0;
  o.detail = std::string("reports identical on all 50 shared streams: ") +
             (all_equal ? "yes" : "NO") + "; decisions seen: " +
             std::to_string(pass_count) + " PASS / " +
             std::to_string(fail_count) + " FAIL";
  return o;
}

}  // namespace

int main() {
  int failures = 0;
  const auto check = [&](const char* id, const char* name, double budget,
                         const std::function<Outcome()>& body) {
    if (!run_criterion(id, name, budget, body)) ++failures;
  };

  check("A01", "ideal top-5 mass", 1.0, criterion_top5_mass);
  check("A02", "angle grid search", 5.0, criterion_grid_search);
  check("A03", "bell noiseless stop time", 0.1, criterion_bell_stop_time);
  check("A04", "qaoa noiseless sweep", 30.0, criterion_qaoa_sweep);
  check("A05", "noisy near-threshold sweep", 60.0, criterion_noisy_sweep);
  check("A06", "baseline savings pattern", 10.0, criterion_baseline_savings);
  check("A07", "beta quantile kernel", 5.0, criterion_quantile_kernel);
  check("A08", "conjugate posterior vs grid Bayes", 10.0, criterion_conjugacy);
  check("A09", "noise calibration identities", 1.0,
        criterion_noise_identities);
  check("A10", "degenerate equivalence", 5.0,
        criterion_degenerate_equivalence);

  std::printf("acceptance: %d/10 criteria passed\n", 10 - failures);
  return failures;
}
