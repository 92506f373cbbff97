#pragma once

#include <stdexcept>
#include <string>

namespace qbv {

// Thrown when an iterative numeric routine exhausts its iteration budget
// without reaching its convergence tolerance. Callers must treat this as a
// hard failure; no partially converged value is ever returned.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Thrown for operational faults: an exhausted replay tape, unreadable input,
// an unwritable output target. Deliberately distinct from a statistical FAIL
// verdict so that CI pipelines can tell "the property does not hold" apart
// from "the run could not be carried out".
class OperationalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qbv
