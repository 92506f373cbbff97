#include "qbv/noise.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "qbv/errors.hpp"

namespace qbv {

OutcomeDistribution apply_depolarizing(const OutcomeDistribution& dist,
                                       double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw std::domain_error("apply_depolarizing: lambda must lie in [0, 1]");
  }
  dist.validate();
  OutcomeDistribution out = dist;
  const double uniform = 1.0 / static_cast<double>(dist.probs.size());
  out.probs = (1.0 - lambda) * dist.probs.array() + lambda * uniform;
  return out;
}

OutcomeDistribution apply_readout_flip(const OutcomeDistribution& dist,
                                       double epsilon) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw std::domain_error("apply_readout_flip: epsilon must lie in [0, 1]");
  }
  dist.validate();
  OutcomeDistribution out = dist;
  // The independent-per-bit channel factorizes: applying the 2x2 stochastic
  // matrix [[1-e, e], [e, 1-e]] once per bit position is exact and costs
  // width * 2^width instead of 4^width.
  const Eigen::Index dim = out.probs.size();
  for (int bit = 0; bit < dist.width; ++bit) {
    const Eigen::Index m = Eigen::Index{1} << bit;
    Eigen::VectorXd next(dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
      next[i] = (1.0 - epsilon) * out.probs[i] + epsilon * out.probs[i ^ m];
    }
    out.probs = std::move(next);
  }
  return out;
}

OutcomeDistribution apply_noise(const OutcomeDistribution& dist,
                                const NoiseSpec& noise) {
  return apply_readout_flip(apply_depolarizing(dist, noise.depolarizing),
                            noise.readout_flip);
}

Sampler Sampler::ideal(OutcomeDistribution dist, std::uint64_t seed) {
  dist.validate();
  Sampler s(Kind::Ideal, seed);
  s.width_ = dist.width;
  s.cdf_.resize(static_cast<std::size_t>(dist.probs.size()));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < dist.probs.size(); ++i) {
    acc += dist.probs[i];
    s.cdf_[static_cast<std::size_t>(i)] = acc;
  }
  // Guard against the total landing a few ulps below 1: uniform() < 1 always,
  // so pinning the last entry keeps every draw in range.
  s.cdf_.back() = std::max(s.cdf_.back(), 1.0);
  return s;
}

Sampler Sampler::noisy(OutcomeDistribution dist, const NoiseSpec& noise,
                       std::uint64_t seed) {
  Sampler s = ideal(apply_noise(dist, noise), seed);
  s.kind_ = Kind::Noisy;
  return s;
}

Sampler Sampler::bernoulli(double theta, std::uint64_t seed) {
  if (!(theta >= 0.0 && theta <= 1.0)) {
    throw std::domain_error("Sampler::bernoulli: theta must lie in [0, 1]");
  }
  Sampler s(Kind::Bernoulli, seed);
  s.theta_ = theta;
  s.width_ = 1;
  return s;
}

Sampler Sampler::replay(std::vector<std::string> shots) {
  Sampler s(Kind::Replay, 0);
  s.tape_ = std::move(shots);
  return s;
}

std::vector<std::string> Sampler::draw(int shots) {
  if (shots < 0) throw std::invalid_argument("draw: negative shot count");
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(shots));
  switch (kind_) {
    case Kind::Ideal:
    case Kind::Noisy: {
      for (int i = 0; i < shots; ++i) {
        const double u = rng_.uniform();
        const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
        const auto idx = static_cast<std::uint64_t>(
            std::min<std::ptrdiff_t>(it - cdf_.begin(),
                                     static_cast<std::ptrdiff_t>(cdf_.size()) - 1));
        out.push_back(bits_of_index(idx, width_));
      }
      break;
    }
    case Kind::Bernoulli: {
      for (int i = 0; i < shots; ++i) {
        out.emplace_back(rng_.uniform() < theta_ ? "1" : "0");
      }
      break;
    }
    case Kind::Replay: {
      if (remaining() < static_cast<std::size_t>(shots)) {
        throw OperationalError(
            "replay source exhausted: " + std::to_string(shots) +
            " shots requested, " + std::to_string(remaining()) + " remaining");
      }
      for (int i = 0; i < shots; ++i) out.push_back(tape_[cursor_++]);
      break;
    }
  }
  return out;
}

namespace {

bool is_bitstring(const std::string& s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return c == '0' || c == '1'; });
}

}  // namespace

std::vector<ReplayRecord> parse_replay(std::istream& in) {
  std::vector<ReplayRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    // Trim trailing CR so files recorded on Windows replay cleanly.
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream fields(line);
    std::string bits, basis, extra;
    if (!(fields >> bits)) continue;           // blank line
    if (bits.front() == '#') continue;         // comment
    if (!is_bitstring(bits)) {
      throw OperationalError("replay line " + std::to_string(line_no) +
                             ": malformed bitstring '" + bits + "'");
    }
    ReplayRecord rec{bits, std::nullopt};
    if (fields >> basis) {
      if (basis == "Z") {
        rec.basis = Basis::Z;
      } else if (basis == "X") {
        rec.basis = Basis::X;
      } else {
        throw OperationalError("replay line " + std::to_string(line_no) +
                               ": basis must be Z or X, got '" + basis + "'");
      }
    }
    if (fields >> extra) {
      throw OperationalError("replay line " + std::to_string(line_no) +
                             ": unexpected trailing field '" + extra + "'");
    }
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<ReplayRecord> load_replay(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw OperationalError("cannot open replay file: " + path.string());
  }
  return parse_replay(in);
}

std::vector<std::string> untagged_bits(
    const std::vector<ReplayRecord>& records) {
  std::vector<std::string> out;
  out.reserve(records.size());
  for (const ReplayRecord& r : records) {
    if (r.basis.has_value()) {
      throw OperationalError(
          "replay record carries a basis tag but the workload is "
          "single-basis; remove the tags or use the bell workload");
    }
    out.push_back(r.bits);
  }
  return out;
}

std::pair<std::vector<std::string>, std::vector<std::string>> split_by_basis(
    const std::vector<ReplayRecord>& records) {
  std::pair<std::vector<std::string>, std::vector<std::string>> out;
  for (const ReplayRecord& r : records) {
    if (!r.basis.has_value()) {
      throw OperationalError(
          "replay record lacks a basis tag; dual-basis replay requires "
          "'<bits> Z' or '<bits> X' lines");
    }
    (*r.basis == Basis::Z ? out.first : out.second).push_back(r.bits);
  }
  return out;
}

}  // namespace qbv
