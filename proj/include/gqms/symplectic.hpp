#pragma once

// Real symplectic linear algebra on R^{2d} with coordinates (x_1..x_d, y_1..y_d),
// where z = x + i y.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gqms/linalg.hpp"
#include "gqms/types.hpp"

namespace gqms {

/// Canonical form J = [[0, I], [-I, 0]] on R^{2d}.
inline Matrix standard_form(Index d) {
  if (d < 1) throw DimensionError("standard_form: mode count must be >= 1");
  Matrix j = Matrix::Zero(2 * d, 2 * d);
  j.topRightCorner(d, d).setIdentity();
  j.bottomLeftCorner(d, d) = -Matrix::Identity(d, d);
  return j;
}

inline bool is_symplectic(const Matrix& m, double tol = kDefaultTol) {
  require_square_even(m, "is_symplectic");
  const Matrix j = standard_form(m.rows() / 2);
  const double n = frob(m);
  return frob(m.transpose() * j * m - j) <= tol * (1.0 + n * n);
}

inline bool is_hamiltonian_generator(const Matrix& z, double tol = kDefaultTol) {
  require_square_even(z, "is_hamiltonian_generator");
  const Matrix j = standard_form(z.rows() / 2);
  return frob(z.transpose() * j + j * z) <= tol * (1.0 + frob(z));
}

/// Inverse of a symplectic matrix, M^{-1} = -J Mᵀ J.
inline Matrix symplectic_inverse(const Matrix& m) {
  require_square_even(m, "symplectic_inverse");
  const Matrix j = standard_form(m.rows() / 2);
  return -j * m.transpose() * j;
}

/// Real-linear map z -> A1 z + A2 conj(z) on C^d.
struct RealLinearOp {
  CMatrix a1;
  CMatrix a2;
};

/// Composition (a o b)(z) = a(b(z)).
inline RealLinearOp compose(const RealLinearOp& a, const RealLinearOp& b) {
  return {a.a1 * b.a1 + a.a2 * b.a2.conjugate(), a.a1 * b.a2 + a.a2 * b.a1.conjugate()};
}

inline Matrix embed_real_linear(const RealLinearOp& op) {
  const Index d = op.a1.rows();
  if (op.a1.cols() != d || op.a2.rows() != d || op.a2.cols() != d)
    throw DimensionError("embed_real_linear: A1 and A2 must both be square of equal size");
  Matrix out(2 * d, 2 * d);
  out.topLeftCorner(d, d) = op.a1.real() + op.a2.real();
  out.topRightCorner(d, d) = op.a2.imag() - op.a1.imag();
  out.bottomLeftCorner(d, d) = op.a1.imag() + op.a2.imag();
  out.bottomRightCorner(d, d) = op.a1.real() - op.a2.real();
  return out;
}

/// Real embedding of a complex vector: (Re v, Im v).
inline Vector embed_vector(const CVector& v) {
  Vector out(2 * v.size());
  out << v.real(), v.imag();
  return out;
}

/// Sigma = Mᵀ D M with M symplectic and D = diag(nu, nu), nu sorted descending.
struct WilliamsonDecomposition {
  Matrix M;
  Matrix D;
  Vector nu;
};

namespace detail {

// Mode permutation as a symplectic matrix: new mode k is old mode order[k].
inline Matrix mode_permutation(const std::vector<Index>& order) {
  const Index d = static_cast<Index>(order.size());
  Matrix p = Matrix::Zero(2 * d, 2 * d);
  for (Index k = 0; k < d; ++k) {
    p(k, order[k]) = 1.0;
    p(d + k, d + order[k]) = 1.0;
  }
  return p;
}

}  // namespace detail

inline WilliamsonDecomposition williamson(const Matrix& sigma, double tol = kDefaultTol) {
  require_square_even(sigma, "williamson");
  require_finite(sigma, "williamson");
  const double scale = frob(sigma);
  if (frob(sigma - sigma.transpose()) > tol * std::max(1.0, scale))
    throw PreconditionError("williamson: input is not symmetric");
  const Matrix s = 0.5 * (sigma + sigma.transpose());
  if (linalg::min_eigenvalue_symmetric(s) <= tol * scale)
    throw PreconditionError("williamson: input is not positive definite");
  const Index d = s.rows() / 2;
  WilliamsonDecomposition out;
  out.nu.resize(d);

  // diagonal input with paired entries only needs a mode sort
  const bool diagonal = (s - Matrix(s.diagonal().asDiagonal())).norm() <= tol * scale;
  bool paired = diagonal;
  for (Index k = 0; paired && k < d; ++k)
    paired = std::abs(s(k, k) - s(d + k, d + k)) <= tol * scale;
  if (paired) {
    std::vector<Index> order(d);
    std::iota(order.begin(), order.end(), Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return s(a, a) > s(b, b); });
    for (Index k = 0; k < d; ++k) out.nu(k) = 0.5 * (s(order[k], order[k]) + s(d + order[k], d + order[k]));
    out.M = detail::mode_permutation(order);
    out.D = Matrix::Zero(2 * d, 2 * d);
    out.D.diagonal() << out.nu, out.nu;
    return out;
  }

  // K = S J S is skew; iK is Hermitian with eigenvalues ±nu
  const Matrix sq = linalg::sqrt_psd(s);
  const Matrix k = sq * standard_form(d) * sq;
  const CMatrix ik = Complex(0.0, 1.0) * k.cast<Complex>();
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (ik + ik.adjoint()));
  if (es.info() != Eigen::Success) throw NumericalError("williamson: eigen-solver failed");
  Matrix o(2 * d, 2 * d);
  for (Index j = 0; j < d; ++j) {
    const Index col = 2 * d - 1 - j;  // positive eigenvalues, descending
    out.nu(j) = es.eigenvalues()(col);
    const CVector u = es.eigenvectors().col(col);
    // K Re u = nu Im u, K Im u = -nu Re u
    o.col(j) = std::sqrt(2.0) * u.imag();
    o.col(d + j) = std::sqrt(2.0) * u.real();
  }
  out.D = Matrix::Zero(2 * d, 2 * d);
  out.D.diagonal() << out.nu, out.nu;
  const Vector inv_sqrt_d = out.D.diagonal().cwiseSqrt().cwiseInverse();
  out.M = inv_sqrt_d.asDiagonal() * o.transpose() * sq;
  if (!is_symplectic(out.M, std::max(tol, 1e-9)))
    throw NumericalError("williamson: assembled transformation is not symplectic");
  return out;
}

}  // namespace gqms
