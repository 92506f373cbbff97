#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "qbv/noise.hpp"
#include "qbv/stats.hpp"

namespace qbv {

// Indicator over fixed-width bitstrings: phi(y) = 1 iff y is in success_set.
// The Bernoulli event it defines is what the verifier's theta refers to.
struct SuccessPredicate {
  int width = 0;
  std::set<std::string> success_set;

  bool operator()(std::string_view bits) const {
    if (static_cast<int>(bits.size()) != width) {
      throw std::invalid_argument(
          "SuccessPredicate: outcome width mismatch (predicate width " +
          std::to_string(width) + ", outcome width " +
          std::to_string(bits.size()) + ")");
    }
    return success_set.count(std::string(bits)) > 0;
  }

  void validate() const {
    if (width <= 0) throw std::invalid_argument("SuccessPredicate: width");
    if (success_set.empty()) {
      throw std::invalid_argument("SuccessPredicate: empty success set");
    }
    for (const std::string& s : success_set) {
      if (static_cast<int>(s.size()) != width) {
        throw std::invalid_argument("SuccessPredicate: non-uniform width");
      }
    }
  }
};

// Reference success rate mu0 plus the prior strength s (equivalent prior
// sample size): the prior acts like s pseudo-shots at rate mu0.
struct PriorSpec {
  double mu0;
  double strength;
};

enum class TargetMode { Absolute, RelativeToMu0 };

struct VerifierConfig {
  double tau;
  double delta = 0.025;
  int batch = 50;
  int n_min = 0;
  int n_max = 0;
  int streak = 2;
  TargetMode target_mode = TargetMode::Absolute;

  void validate() const;
};

// Conjugate posterior bookkeeping: with prior Beta(a0, b0) and cumulative
// (k successes, n trials) the posterior is Beta(a0 + k, b0 + n - k).
struct PosteriorState {
  BetaParams prior;
  long long successes = 0;
  long long trials = 0;

  BetaParams posterior() const {
    return BetaParams(prior.alpha + static_cast<double>(successes),
                      prior.beta + static_cast<double>(trials - successes));
  }
};

enum class Decision { PASS, FAIL };

struct TrajectoryPoint {
  long long n;
  long long k;
  double lcb;

  friend bool operator==(const TrajectoryPoint&, const TrajectoryPoint&) = default;
};

struct VerdictReport {
  Decision decision;
  long long n_stop;
  long long successes;
  long long trials;
  std::vector<TrajectoryPoint> trajectory;  // one entry per batch checkpoint
  double effective_target;
  long long n_max;  // the cap this verdict was produced under

  friend bool operator==(const VerdictReport&, const VerdictReport&) = default;
};

// mu0 = fraction of recorded reference outcomes satisfying the predicate.
PriorSpec prior_from_shots(const std::vector<std::string>& reference_outcomes,
                           const SuccessPredicate& predicate, double strength);

// mu0 = total probability mass the reference distribution puts on the
// success set.
PriorSpec prior_from_distribution(const OutcomeDistribution& dist,
                                  const SuccessPredicate& predicate,
                                  double strength);

// Beta(1 + s*mu0, 1 + s*(1 - mu0)). With s = 0 this is the flat Beta(1, 1)
// regardless of mu0.
BetaParams make_beta_prior(const PriorSpec& spec);

// Pure accumulation: adds one batch of results to the posterior state.
PosteriorState update(const PosteriorState& state, long long batch_successes,
                      long long batch_trials);

// One-sided lower credible bound at confidence 1 - delta: the delta-quantile
// of the current posterior.
double lcb(const PosteriorState& state, double delta);

// The threshold actually compared against the LCB: tau itself in Absolute
// mode, tau * mu0 in RelativeToMu0 mode.
double effective_target(const VerifierConfig& config, const PriorSpec& prior);

// Sequential rule: draw batches of `batch` shots; at each checkpoint compute
// the posterior LCB; a checkpoint "passes" iff n >= n_min and
// lcb >= effective target, and any checkpoint that does not pass resets the
// streak counter to zero. PASS fires when `streak` consecutive checkpoints
// pass; otherwise FAIL at the cap with n_stop = n_max. The final batch is
// truncated so cumulative n hits n_max exactly.
VerdictReport sequential_verify(Sampler& sampler,
                                const SuccessPredicate& predicate,
                                const PriorSpec& prior,
                                const VerifierConfig& config);

// Matched one-shot baseline: draws exactly n_max shots, evaluates the same
// LCB rule once, PASSes iff lcb >= effective target. n_stop is always n_max.
VerdictReport fixed_budget_verify(Sampler& sampler,
                                  const SuccessPredicate& predicate,
                                  const PriorSpec& prior,
                                  const VerifierConfig& config);

}  // namespace qbv
