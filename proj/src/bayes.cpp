#include "qbv/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qbv {

void VerifierConfig::validate() const {
  if (!(tau > 0.0 && tau <= 1.0)) {
    throw std::invalid_argument("VerifierConfig: tau must lie in (0, 1]");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("VerifierConfig: delta must lie in (0, 1)");
  }
  if (batch <= 0) throw std::invalid_argument("VerifierConfig: batch must be positive");
  if (n_min < 0) throw std::invalid_argument("VerifierConfig: n_min must be non-negative");
  if (n_max <= 0) throw std::invalid_argument("VerifierConfig: n_max must be positive");
  if (n_min > n_max) throw std::invalid_argument("VerifierConfig: n_min > n_max");
  if (batch > n_max) throw std::invalid_argument("VerifierConfig: batch > n_max");
  if (streak < 1) throw std::invalid_argument("VerifierConfig: streak must be >= 1");
}

PriorSpec prior_from_shots(const std::vector<std::string>& reference_outcomes,
                           const SuccessPredicate& predicate,
                           double strength) {
  if (reference_outcomes.empty()) {
    throw std::invalid_argument(
        "prior_from_shots: empty reference sequence (mu0 undefined)");
  }
  predicate.validate();
  long long k = 0;
  for (const std::string& y : reference_outcomes) {
    if (predicate(y)) ++k;
  }
  return PriorSpec{static_cast<double>(k) /
                       static_cast<double>(reference_outcomes.size()),
                   strength};
}

PriorSpec prior_from_distribution(const OutcomeDistribution& dist,
                                  const SuccessPredicate& predicate,
                                  double strength) {
  dist.validate();
  predicate.validate();
  if (predicate.width != dist.width) {
    throw std::invalid_argument(
        "prior_from_distribution: predicate/distribution width mismatch");
  }
  double mu0 = 0.0;
  for (const std::string& y : predicate.success_set) {
    mu0 += dist.prob(y);
  }
  // The summed mass can poke a few ulps past 1 when the success set covers
  // (numerically) all of the distribution; it is a probability, so clamp.
  mu0 = std::min(1.0, std::max(0.0, mu0));
  return PriorSpec{mu0, strength};
}

BetaParams make_beta_prior(const PriorSpec& spec) {
  if (!(spec.mu0 >= 0.0 && spec.mu0 <= 1.0)) {
    throw std::invalid_argument("make_beta_prior: mu0 must lie in [0, 1]");
  }
  if (!(spec.strength >= 0.0) || !std::isfinite(spec.strength)) {
    throw std::invalid_argument("make_beta_prior: strength must be >= 0");
  }
  return BetaParams(1.0 + spec.strength * spec.mu0,
                    1.0 + spec.strength * (1.0 - spec.mu0));
}

PosteriorState update(const PosteriorState& state, long long batch_successes,
                      long long batch_trials) {
  if (batch_successes < 0 || batch_trials < 0 ||
      batch_successes > batch_trials) {
    throw std::invalid_argument(
        "update: need 0 <= batch_successes <= batch_trials");
  }
  PosteriorState next = state;
  next.successes += batch_successes;
  next.trials += batch_trials;
  return next;
}

double lcb(const PosteriorState& state, double delta) {
  return beta_inv(delta, state.posterior());
}

double effective_target(const VerifierConfig& config, const PriorSpec& prior) {
  const double target = config.target_mode == TargetMode::Absolute
                            ? config.tau
                            : config.tau * prior.mu0;
  if (!(target > 0.0 && target <= 1.0)) {
    throw std::invalid_argument(
        "effective target tau (or tau*mu0) must lie in (0, 1]");
  }
  return target;
}

namespace {

long long count_successes(const std::vector<std::string>& shots,
                          const SuccessPredicate& predicate) {
  long long k = 0;
  for (const std::string& y : shots) {
    if (predicate(y)) ++k;
  }
  return k;
}

}  // namespace

VerdictReport sequential_verify(Sampler& sampler,
                                const SuccessPredicate& predicate,
                                const PriorSpec& prior,
                                const VerifierConfig& config) {
  config.validate();
  predicate.validate();
  const double target = effective_target(config, prior);

  VerdictReport report;
  report.effective_target = target;
  report.n_max = config.n_max;

  PosteriorState state{make_beta_prior(prior)};
  int streak = 0;
  long long n = 0;
  while (n < config.n_max) {
    const int take = static_cast<int>(
        std::min<long long>(config.batch, config.n_max - n));
    const std::vector<std::string> shots = sampler.draw(take);
    state = update(state, count_successes(shots, predicate), take);
    n = state.trials;

    const double bound = lcb(state, config.delta);
    report.trajectory.push_back({n, state.successes, bound});

    if (n >= config.n_min && bound >= target) {
      ++streak;
    } else {
      streak = 0;
    }
    if (streak >= config.streak) {
      report.decision = Decision::PASS;
      report.n_stop = n;
      report.successes = state.successes;
      report.trials = state.trials;
      return report;
    }
  }

  report.decision = Decision::FAIL;
  report.n_stop = config.n_max;
  report.successes = state.successes;
  report.trials = state.trials;
  return report;
}

VerdictReport fixed_budget_verify(Sampler& sampler,
                                  const SuccessPredicate& predicate,
                                  const PriorSpec& prior,
                                  const VerifierConfig& config) {
  config.validate();
  predicate.validate();
  const double target = effective_target(config, prior);

  PosteriorState state{make_beta_prior(prior)};
  const std::vector<std::string> shots = sampler.draw(config.n_max);
  state = update(state, count_successes(shots, predicate), config.n_max);
  const double bound = lcb(state, config.delta);

  VerdictReport report;
  report.effective_target = target;
  report.n_max = config.n_max;
  report.decision = bound >= target ? Decision::PASS : Decision::FAIL;
  report.n_stop = config.n_max;
  report.successes = state.successes;
  report.trials = state.trials;
  report.trajectory.push_back({state.trials, state.successes, bound});
  return report;
}

}  // namespace qbv
