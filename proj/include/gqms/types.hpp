#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace gqms {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;
using Index = Eigen::Index;

/// Default relative tolerance for every "equals zero" decision in the library.
inline constexpr double kDefaultTol = 1e-9;

/// Thrown when an argument has the wrong shape (odd dimension, mismatched sizes).
class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Thrown when a mathematical precondition of an operation does not hold.
class PreconditionError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Thrown when a numerical routine fails to produce a usable result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

template <typename Derived>
double frob(const Eigen::MatrixBase<Derived>& m) {
  return m.norm();
}

inline void require_square_even(const Matrix& m, const std::string& what) {
  if (m.rows() != m.cols()) {
    throw DimensionError(what + ": matrix is " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + ", expected square");
  }
  if (m.rows() == 0 || m.rows() % 2 != 0) {
    throw DimensionError(what + ": dimension " + std::to_string(m.rows()) +
                         " is not a positive even number");
  }
}

inline void require_finite(const Matrix& m, const std::string& what) {
  if (!m.allFinite()) throw DimensionError(what + ": non-finite entries");
}

}  // namespace gqms
