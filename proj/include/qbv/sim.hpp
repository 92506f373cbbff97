#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "qbv/errors.hpp"

namespace qbv {

inline constexpr int kMaxQubits = 12;

enum class GateKind { H, X, CNOT, RZ, RX, RZZ };

// One gate application. q1 is used by the two-qubit gates (CNOT, RZZ);
// angle by the rotations (RZ, RX, RZZ).
struct Gate {
  GateKind kind;
  int q0;
  int q1 = -1;
  double angle = 0.0;

  static Gate h(int q) { return {GateKind::H, q}; }
  static Gate x(int q) { return {GateKind::X, q}; }
  static Gate cnot(int control, int target) {
    return {GateKind::CNOT, control, target};
  }
  static Gate rz(int q, double theta) { return {GateKind::RZ, q, -1, theta}; }
  static Gate rx(int q, double theta) { return {GateKind::RX, q, -1, theta}; }
  static Gate rzz(int qa, int qb, double theta) {
    return {GateKind::RZZ, qa, qb, theta};
  }
};

struct Circuit {
  int num_qubits;
  std::vector<Gate> gates;
};

using StateVector = Eigen::VectorXcd;

// Exact outcome probabilities over bitstrings of a fixed width.
//
// Bit-ordering convention (fixed project-wide): character i of a bitstring
// (leftmost = index 0) reports qubit i, and qubit 0 occupies the most
// significant bit of the integer basis index. Consequently the numeric order
// of basis indices coincides with the lexicographic order of bitstrings.
struct OutcomeDistribution {
  int width = 0;
  Eigen::VectorXd probs;  // length 2^width, indexed by basis index

  double prob(std::string_view bits) const;
  std::string key(Eigen::Index index) const;
  std::map<std::string, double> to_map() const;

  // Throws std::invalid_argument unless probabilities are non-negative and
  // sum to 1 within 1e-9.
  void validate() const;
};

std::string bits_of_index(std::uint64_t index, int width);
std::uint64_t index_of_bits(std::string_view bits);

// Applies one gate in place. Exposed separately from simulate() so invariants
// (norm preservation, gate algebra) can be exercised gate-by-gate.
void apply_gate(StateVector& state, const Gate& gate, int num_qubits);

// Runs the circuit on |0...0> and returns the final amplitudes.
// The result's norm is 1 within 1e-10 (checked; a violation indicates an
// internal bug and raises NumericError rather than silently renormalizing).
StateVector simulate(const Circuit& circuit);

// Measurement distribution of a normalized statevector: probs[y] = |amp(y)|^2.
OutcomeDistribution distribution(const StateVector& state);

}  // namespace qbv
