#pragma once

#include <cstdint>
#include <random>

namespace qbv {

// SplitMix64 output function (Steele, Lea & Flood; the java.util.SplittableRandom
// finalizer). Used both as a seed scrambler and as the documented stream-split
// rule below.
inline std::uint64_t splitmix64_finalize(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// The index-th output of the SplitMix64 sequence seeded at `base`.
//
// This is the project-wide stream-split rule: run seeds are
// mix_seed(base_seed, run_index), and per-role sub-streams within a run are
// mix_seed(run_seed, role_tag). Keeping the rule a published, named function
// (rather than an implementation detail of any particular engine) is what
// makes sweep results reproducible from a config file alone.
inline std::uint64_t mix_seed(std::uint64_t base, std::uint64_t index) {
  return splitmix64_finalize(base + (index + 1) * 0x9E3779B97F4A7C15ULL);
}

// Sub-stream role tags used by the experiment harness. A run's shot streams
// depend only on (base_seed, run_index, role) — never on the threshold being
// swept — so sweeps over tau see identical shots per run and per-run
// comparisons across tau are paired, not merely independent.
inline constexpr std::uint64_t kStreamPrimary = 0;    // single-basis runs; Z basis
inline constexpr std::uint64_t kStreamX = 1;          // X basis of dual-basis runs
inline constexpr std::uint64_t kStreamBaseline = 2;   // fixed-budget baseline; Z basis
inline constexpr std::uint64_t kStreamBaselineX = 3;  // fixed-budget baseline, X basis

// Deterministic uniform source: std::mt19937_64 with the explicit 53-bit
// mapping to doubles. The engine and the mapping are both pinned so a stream
// is fully determined by its seed, independent of standard-library
// distribution implementations (std::uniform_real_distribution is not
// specified bit-for-bit across toolchains).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on [0, 1) with 53 random bits: (x >> 11) * 2^-53.
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qbv
