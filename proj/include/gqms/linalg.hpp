#pragma once

// Dense linear-algebra kernels shared by the analysis modules: rank-revealing
// kernels and ranges, ordered spectral subspaces, Lyapunov solves and the
// exact propagation of the moment equations.

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "gqms/types.hpp"

namespace gqms::linalg {

/// Orthonormal basis of ker(A); singular values <= cutoff count as zero.
template <class Mat>
Mat null_space(const Mat& a, double cutoff) {
  const Index n = a.cols();
  if (a.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

/// Orthonormal basis of range(A); singular values <= cutoff count as zero.
template <class Mat>
Mat range_space(const Mat& a, double cutoff) {
  if (a.cols() == 0) return Mat::Zero(a.rows(), 0);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeThinU);
  const auto& s = svd.singularValues();
  Index rank = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) ++rank;
  return svd.matrixU().leftCols(rank);
}

template <class Mat>
double max_singular_value(const Mat& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Mat> svd(a);
  return svd.singularValues()(0);
}

/// Cutoff policy: tol times the larger of the matrix's own scale and a floor.
inline double rank_cutoff(double sigma_max, double tol, double floor_scale = 0.0) {
  return tol * std::max(sigma_max, floor_scale);
}

/// Sine of the largest principal angle by which span(vectors) leaves span(basis).
/// `basis` must have orthonormal columns.
template <class Mat>
double containment_residual(const Mat& basis, const Mat& vectors) {
  if (vectors.cols() == 0) return 0.0;
  const Mat q = range_space(vectors, 1e-12 * std::max(1.0, max_singular_value(vectors)));
  if (q.cols() == 0) return 0.0;
  if (basis.cols() == 0) return 1.0;
  const Mat r = q - basis * (basis.adjoint() * q);
  return max_singular_value(r);
}

/// Symmetric positive square root; negative eigenvalues are clamped to zero.
inline Matrix sqrt_psd(const Matrix& s) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()));
  const Vector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

inline double min_eigenvalue_hermitian(const CMatrix& h) {
  if (h.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (h + h.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

inline double min_eigenvalue_symmetric(const Matrix& s) {
  if (s.rows() == 0) return 0.0;
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (s + s.transpose()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Solves Aᵀ X + X A + Q = 0 through the Kronecker-vectorized system.
/// Intended for small dense problems (n <= 40).
inline Matrix lyapunov(const Matrix& a, const Matrix& q) {
  const Index n = a.rows();
  if (a.cols() != n || q.rows() != n || q.cols() != n)
    throw DimensionError("lyapunov: shape mismatch");
  if (n == 0) return Matrix(0, 0);
  const Matrix id = Matrix::Identity(n, n);
  const Matrix at = a.transpose();
  const Matrix k = Eigen::kroneckerProduct(id, at).eval() + Eigen::kroneckerProduct(at, id).eval();
  Eigen::FullPivLU<Matrix> lu(k);
  if (!lu.isInvertible()) throw NumericalError("lyapunov: singular Kronecker system");
  const Vector rhs = -Eigen::Map<const Vector>(q.data(), n * n);
  Vector x = lu.solve(rhs);
  // one step of iterative refinement
  x += lu.solve(rhs - k * x);
  Matrix sol = Eigen::Map<Matrix>(x.data(), n, n);
  return 0.5 * (sol + sol.transpose());
}

/// Complex Schur form A = U T Uᴴ reordered so that eigenvalues selected by
/// `leading` come first. Returns the number of selected eigenvalues.
struct OrderedSchur {
  CMatrix t;
  CMatrix u;
  Index selected = 0;
};

inline OrderedSchur ordered_schur(const Matrix& a, const std::function<bool(Complex)>& leading) {
  OrderedSchur out;
  const Index n = a.rows();
  if (n == 0) return out;
  Eigen::ComplexSchur<CMatrix> cs(a.cast<Complex>());
  if (cs.info() != Eigen::Success) throw NumericalError("complex Schur decomposition failed");
  out.t = cs.matrixT();
  out.u = cs.matrixU();
  CMatrix& t = out.t;
  CMatrix& u = out.u;
  // bubble selected eigenvalues to the top with adjacent Givens swaps
  Index placed = 0;
  for (Index j = 0; j < n; ++j) {
    if (!leading(t(j, j))) continue;
    for (Index k = j - 1; k >= placed; --k) {
      const Complex a11 = t(k, k), a22 = t(k + 1, k + 1), a12 = t(k, k + 1);
      Eigen::Vector2cd v(a12, a22 - a11);
      const double nv = v.norm();
      if (nv == 0.0) continue;
      v /= nv;
      Eigen::Matrix2cd g;
      g << v(0), -std::conj(v(1)), v(1), std::conj(v(0));
      t.middleRows(k, 2) = g.adjoint() * t.middleRows(k, 2);
      t.middleCols(k, 2) = t.middleCols(k, 2) * g;
      u.middleCols(k, 2) = u.middleCols(k, 2) * g;
      t(k + 1, k) = 0.0;
    }
    ++placed;
  }
  out.selected = placed;
  return out;
}

/// Real orthonormal basis of the A-invariant spectral subspace belonging to
/// the eigenvalues selected by `pred`. `pred` must be closed under complex
/// conjugation for the subspace to be real.
inline Matrix spectral_subspace(const Matrix& a, const std::function<bool(Complex)>& pred) {
  const Index n = a.rows();
  if (n == 0) return Matrix(0, 0);
  const OrderedSchur os = ordered_schur(a, pred);
  const Index k = os.selected;
  if (k == 0) return Matrix::Zero(n, 0);
  const CMatrix q = os.u.leftCols(k);
  Matrix stacked(n, 2 * k);
  stacked << q.real(), q.imag();
  Eigen::JacobiSVD<Matrix> svd(stacked, Eigen::ComputeThinU);
  return svd.matrixU().leftCols(k);
}

/// Largest Z-invariant subspace contained in ker(K), by the shrinking
/// iteration N <- {x in N : Z x in N} with rank-revealing SVD at every step.
template <class Mat>
Mat largest_invariant_in_kernel(const Mat& z, const Mat& k, double tol, double floor_scale) {
  const Index n = z.rows();
  const double kcut = rank_cutoff(max_singular_value(k), tol, floor_scale);
  Mat basis = null_space(k, kcut);
  const double zscale = std::max(1.0, max_singular_value(z));
  while (basis.cols() > 0) {
    const Mat zb = z * basis;
    const Mat leak = zb - basis * (basis.adjoint() * zb);
    const Mat coeff = null_space(leak, tol * zscale);
    if (coeff.cols() == basis.cols()) break;
    basis = basis * coeff;
    // re-orthonormalize
    if (basis.cols() > 0) basis = range_space(basis, 1e-12);
  }
  if (basis.cols() == 0) return Mat::Zero(n, 0);
  return basis;
}

/// Orthonormal basis of span{B, AB, A²B, ...} (controllable subspace).
inline Matrix krylov_span(const Matrix& a, const Matrix& b, double tol) {
  const Index n = a.rows();
  const double scale = std::max(1.0, max_singular_value(b));
  Matrix basis = range_space(b, tol * scale);
  for (Index it = 0; it < n && basis.cols() < n; ++it) {
    Matrix ext(n, basis.cols() * 2);
    ext << basis, a * basis;
    const Matrix next = range_space(ext, tol * std::max(1.0, max_singular_value(ext)));
    if (next.cols() == basis.cols()) break;
    basis = next;
  }
  return basis;
}

/// Exact propagators of dm/dt = Zᵀm - ζ and dΣ/dt = ZᵀΣ + ΣZ + C over [0, t]:
/// phi = e^{tZ}, gram = ∫₀ᵗ e^{sZᵀ} C e^{sZ} ds, drift = ∫₀ᵗ e^{sZᵀ} ζ ds.
struct Propagator {
  Matrix phi;
  Matrix gram;
  Vector drift;
};

namespace detail {

inline Propagator compose(const Propagator& first, const Propagator& second) {
  // first over [0, a], then second over [0, b]; result over [0, a + b]
  Propagator out;
  out.phi = first.phi * second.phi;
  out.gram = first.gram + first.phi.transpose() * second.gram * first.phi;
  out.gram = 0.5 * (out.gram + out.gram.transpose());
  out.drift = first.drift + first.phi.transpose() * second.drift;
  return out;
}

inline Propagator small_step(const Matrix& z, const Matrix& c, const Vector& zeta, double h) {
  const Index n = z.rows();
  Matrix vl = Matrix::Zero(2 * n, 2 * n);
  vl.topLeftCorner(n, n) = -z.transpose();
  vl.topRightCorner(n, n) = c;
  vl.bottomRightCorner(n, n) = z;
  const Matrix e = (h * vl).exp();
  Propagator p;
  p.phi = e.bottomRightCorner(n, n);
  p.gram = p.phi.transpose() * e.topRightCorner(n, n);
  p.gram = 0.5 * (p.gram + p.gram.transpose());
  Matrix aug = Matrix::Zero(n + 1, n + 1);
  aug.topLeftCorner(n, n) = z.transpose();
  aug.topRightCorner(n, 1) = zeta;
  const Matrix ea = (h * aug).exp();
  p.drift = ea.topRightCorner(n, 1);
  return p;
}

}  // namespace detail

inline Propagator propagate(const Matrix& z, const Matrix& c, const Vector& zeta, double t) {
  const Index n = z.rows();
  if (z.cols() != n || c.rows() != n || c.cols() != n || zeta.size() != n)
    throw DimensionError("propagate: shape mismatch");
  if (!(t >= 0.0) || !std::isfinite(t)) throw PreconditionError("propagate: time must be finite and >= 0");
  if (t == 0.0) return {Matrix::Identity(n, n), Matrix::Zero(n, n), Vector::Zero(n)};
  const double znorm = z.cwiseAbs().colwise().sum().maxCoeff();
  int doublings = 0;
  double h = t;
  while (h * znorm > 0.5 && doublings < 80) {
    h *= 0.5;
    ++doublings;
  }
  Propagator p = detail::small_step(z, c, zeta, h);
  for (int i = 0; i < doublings; ++i) p = detail::compose(p, p);
  return p;
}

}  // namespace gqms::linalg
