#include "qbv/sim.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>

namespace qbv {
namespace {

using cd = std::complex<double>;

constexpr double kInvSqrt2 = 0.70710678118654752440084436210485;

void check_qubit(int q, int num_qubits) {
  if (q < 0 || q >= num_qubits) {
    throw std::out_of_range("qubit index " + std::to_string(q) +
                            " out of range for " + std::to_string(num_qubits) +
                            " qubits");
  }
}

// Bit position (shift amount) of qubit q in a basis index: qubit 0 is the
// most significant bit.
inline int bit_pos(int q, int num_qubits) { return num_qubits - 1 - q; }

}  // namespace

std::string bits_of_index(std::uint64_t index, int width) {
  std::string out(static_cast<size_t>(width), '0');
  for (int i = 0; i < width; ++i) {
    if ((index >> (width - 1 - i)) & 1ULL) out[static_cast<size_t>(i)] = '1';
  }
  return out;
}

std::uint64_t index_of_bits(std::string_view bits) {
  std::uint64_t index = 0;
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("bitstring contains non-binary character");
    }
    index = (index << 1) | static_cast<std::uint64_t>(c == '1');
  }
  return index;
}

double OutcomeDistribution::prob(std::string_view bits) const {
  if (static_cast<int>(bits.size()) != width) {
    throw std::invalid_argument("bitstring width mismatch");
  }
  return probs[static_cast<Eigen::Index>(index_of_bits(bits))];
}

std::string OutcomeDistribution::key(Eigen::Index index) const {
  return bits_of_index(static_cast<std::uint64_t>(index), width);
}

std::map<std::string, double> OutcomeDistribution::to_map() const {
  std::map<std::string, double> out;
  for (Eigen::Index i = 0; i < probs.size(); ++i) out[key(i)] = probs[i];
  return out;
}

void OutcomeDistribution::validate() const {
  if (width <= 0 || width > kMaxQubits) {
    throw std::invalid_argument("OutcomeDistribution: invalid width");
  }
  if (probs.size() != (Eigen::Index{1} << width)) {
    throw std::invalid_argument("OutcomeDistribution: size != 2^width");
  }
  if ((probs.array() < 0.0).any()) {
    throw std::invalid_argument("OutcomeDistribution: negative probability");
  }
  if (std::fabs(probs.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("OutcomeDistribution: not normalized");
  }
}

void apply_gate(StateVector& state, const Gate& gate, int num_qubits) {
  check_qubit(gate.q0, num_qubits);
  const Eigen::Index dim = state.size();

  switch (gate.kind) {
    case GateKind::H: {
      const Eigen::Index m = Eigen::Index{1} << bit_pos(gate.q0, num_qubits);
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & m) continue;
        const cd a = state[i];
        const cd b = state[i | m];
        state[i] = (a + b) * kInvSqrt2;
        state[i | m] = (a - b) * kInvSqrt2;
      }
      break;
    }
    case GateKind::X: {
      const Eigen::Index m = Eigen::Index{1} << bit_pos(gate.q0, num_qubits);
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & m) continue;
        std::swap(state[i], state[i | m]);
      }
      break;
    }
    case GateKind::CNOT: {
      check_qubit(gate.q1, num_qubits);
      if (gate.q0 == gate.q1) {
        throw std::invalid_argument("CNOT requires distinct qubits");
      }
      const Eigen::Index mc = Eigen::Index{1} << bit_pos(gate.q0, num_qubits);
      const Eigen::Index mt = Eigen::Index{1} << bit_pos(gate.q1, num_qubits);
      for (Eigen::Index i = 0; i < dim; ++i) {
        if ((i & mc) && !(i & mt)) std::swap(state[i], state[i | mt]);
      }
      break;
    }
    case GateKind::RZ: {
      const Eigen::Index m = Eigen::Index{1} << bit_pos(gate.q0, num_qubits);
      const cd phase0 = std::polar(1.0, -gate.angle / 2.0);
      const cd phase1 = std::polar(1.0, +gate.angle / 2.0);
      for (Eigen::Index i = 0; i < dim; ++i) {
        state[i] *= (i & m) ? phase1 : phase0;
      }
      break;
    }
    case GateKind::RX: {
      const Eigen::Index m = Eigen::Index{1} << bit_pos(gate.q0, num_qubits);
      const double c = std::cos(gate.angle / 2.0);
      const cd s = cd(0.0, -std::sin(gate.angle / 2.0));
      for (Eigen::Index i = 0; i < dim; ++i) {
        if (i & m) continue;
        const cd a = state[i];
        const cd b = state[i | m];
        state[i] = c * a + s * b;
        state[i | m] = s * a + c * b;
      }
      break;
    }
    case GateKind::RZZ: {
      check_qubit(gate.q1, num_qubits);
      if (gate.q0 == gate.q1) {
        throw std::invalid_argument("RZZ requires distinct qubits");
      }
      // diag(e^{-i t/2}, e^{+i t/2}, e^{+i t/2}, e^{-i t/2}): the phase
      // depends only on the parity of the two target bits.
      const Eigen::Index ma = Eigen::Index{1} << bit_pos(gate.q0, num_qubits);
      const Eigen::Index mb = Eigen::Index{1} << bit_pos(gate.q1, num_qubits);
      const cd even = std::polar(1.0, -gate.angle / 2.0);
      const cd odd = std::polar(1.0, +gate.angle / 2.0);
      for (Eigen::Index i = 0; i < dim; ++i) {
        const bool parity = static_cast<bool>(i & ma) != static_cast<bool>(i & mb);
        state[i] *= parity ? odd : even;
      }
      break;
    }
  }
}

StateVector simulate(const Circuit& circuit) {
  if (circuit.num_qubits <= 0 || circuit.num_qubits > kMaxQubits) {
    throw std::invalid_argument("circuit must have between 1 and 12 qubits");
  }
  StateVector state = StateVector::Zero(Eigen::Index{1} << circuit.num_qubits);
  state[0] = cd(1.0, 0.0);
  for (const Gate& g : circuit.gates) {
    apply_gate(state, g, circuit.num_qubits);
  }
  const double norm_err = std::fabs(state.norm() - 1.0);
  if (norm_err > 1e-9) {
    throw NumericError("simulate: final state norm deviates from 1 by " +
                       std::to_string(norm_err));
  }
  return state;
}

OutcomeDistribution distribution(const StateVector& state) {
  OutcomeDistribution dist;
  Eigen::Index dim = state.size();
  int width = 0;
  while ((Eigen::Index{1} << width) < dim) ++width;
  if ((Eigen::Index{1} << width) != dim) {
    throw std::invalid_argument("statevector length is not a power of two");
  }
  dist.width = width;
  dist.probs = state.cwiseAbs2();
  dist.validate();
  return dist;
}

}  // namespace qbv
