#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace srfb {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Broken precondition on a vector argument (dimension mismatch, non-finite entries).
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Scalar parameter outside its admissible range (gamma <= 0, nu <= 0, ...).
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A quantity that cannot be computed exactly for the given problem class.
class NotComputable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require_dim(const Vector& x, Index dim, const char* what) {
  if (x.size() != dim) {
    throw ContractViolation(std::string(what) + ": dimension " + std::to_string(x.size()) +
                            " does not match expected " + std::to_string(dim));
  }
}

inline void require_finite(const Vector& x, const char* what) {
  if (!x.allFinite()) throw ContractViolation(std::string(what) + ": non-finite coordinate");
}

inline void require_positive(double value, const char* what) {
  if (!(value > 0.0)) {
    throw InvalidParameter(std::string(what) + " must be positive, got " + std::to_string(value));
  }
}

}  // namespace srfb
