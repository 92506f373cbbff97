#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include "qbv/rng.hpp"
#include "qbv/sim.hpp"

namespace qbv {

// Measurement basis tag carried by recorded Bell shots.
enum class Basis { Z, X };

// Synthetic noise applied to exact outcome distributions. `depolarizing` is
// the mixture weight toward the uniform distribution; `readout_flip` is the
// independent per-bit classical flip probability.
struct NoiseSpec {
  double depolarizing = 0.0;
  double readout_flip = 0.0;
};

// p'(y) = (1 - lambda) p(y) + lambda / |Y|.
OutcomeDistribution apply_depolarizing(const OutcomeDistribution& dist,
                                       double lambda);

// Pushes the distribution through independent per-bit flips with probability
// epsilon. Computed exactly (one 2x2 stochastic channel per bit), not by
// sampling.
OutcomeDistribution apply_readout_flip(const OutcomeDistribution& dist,
                                       double epsilon);

// Fixed composition order: depolarizing first, then readout flip.
OutcomeDistribution apply_noise(const OutcomeDistribution& dist,
                                const NoiseSpec& noise);

// A deterministic shot source. Same construction + seed => same stream.
// Draws are i.i.d. from the backing distribution (Ideal/Noisy), Bernoulli
// success/failure tokens ("1"/"0"), or recorded shots in order (Replay).
class Sampler {
 public:
  enum class Kind { Ideal, Noisy, Replay, Bernoulli };

  static Sampler ideal(OutcomeDistribution dist, std::uint64_t seed);
  static Sampler noisy(OutcomeDistribution dist, const NoiseSpec& noise,
                       std::uint64_t seed);
  static Sampler bernoulli(double theta, std::uint64_t seed);
  static Sampler replay(std::vector<std::string> shots);

  // Returns exactly `shots` outcomes. A replay source that runs out of
  // recorded shots raises OperationalError (an operational fault, not a
  // statistical verdict).
  std::vector<std::string> draw(int shots);

  Kind kind() const { return kind_; }

  // Remaining recorded shots (Replay only).
  std::size_t remaining() const { return tape_.size() - cursor_; }

 private:
  Sampler(Kind kind, std::uint64_t seed) : kind_(kind), rng_(seed) {}

  Kind kind_;
  Rng rng_;
  // Distribution-backed state: inclusive prefix sums of the probabilities in
  // basis-index order (== lexicographic bitstring order), so inverse-CDF
  // sampling is deterministic and order-stable.
  int width_ = 0;
  std::vector<double> cdf_;
  double theta_ = 0.0;  // Bernoulli
  std::vector<std::string> tape_;
  std::size_t cursor_ = 0;
};

// One parsed replay record: a bitstring plus an optional basis tag.
struct ReplayRecord {
  std::string bits;
  std::optional<Basis> basis;
};

// Replay file format: one shot per line, "<bits>" or "<bits> <Z|X>"; blank
// lines and lines starting with '#' are ignored. Malformed lines raise
// OperationalError naming the line number.
std::vector<ReplayRecord> parse_replay(std::istream& in);
std::vector<ReplayRecord> load_replay(const std::filesystem::path& path);

// Projections used when handing records to samplers. Both enforce their
// expectation about basis tags and raise OperationalError otherwise:
// untagged_bits requires that no record carries a tag; split_by_basis
// requires that every record carries one.
std::vector<std::string> untagged_bits(const std::vector<ReplayRecord>& records);
std::pair<std::vector<std::string>, std::vector<std::string>> split_by_basis(
    const std::vector<ReplayRecord>& records);

}  // namespace qbv
