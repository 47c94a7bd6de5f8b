#pragma once

// Classical Ornstein-Uhlenbeck semigroups dX = (AX + b)dt + B dW and their
// correspondence with the quantum phase-space data.

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "gqms/linalg.hpp"
#include "gqms/model.hpp"
#include "gqms/spectral.hpp"
#include "gqms/types.hpp"

namespace gqms {

struct OuModel {
  Matrix A;  // d x d
  Matrix B;  // d x m
  Vector b;  // d
  Index dim() const { return A.rows(); }
};

inline void validate_ou(const OuModel& m) {
  const Index d = m.A.rows();
  if (d < 1 || m.A.cols() != d) throw DimensionError("ou.A: must be square with d >= 1");
  if (m.B.rows() != d) throw DimensionError("ou.B: must have d rows");
  if (m.b.size() != d) throw DimensionError("ou.b: must have length d");
  if (!m.A.allFinite() || !m.B.allFinite() || !m.b.allFinite()) throw DimensionError("ou: non-finite entries");
}

/// T_t(e^{i<z, .>})(x).
inline Complex ou_char_coefficient(const OuModel& m, const Vector& z, const Vector& x, double t) {
  validate_ou(m);
  if (z.size() != m.dim() || x.size() != m.dim()) throw DimensionError("ou_char_coefficient: z/x length mismatch");
  const linalg::Propagator p = linalg::propagate(m.A.transpose(), m.B * m.B.transpose(), m.b, t);
  // p.phi = e^{tAᵀ}, p.drift = ∫ e^{sA} b ds, p.gram = ∫ e^{sA} BBᵀ e^{sAᵀ} ds
  return std::exp(Complex(-0.5 * z.dot(p.gram * z), z.dot(p.drift) + z.dot(p.phi.transpose() * x)));
}

/// Orthonormal basis of S- = {x : e^{tA}x -> 0}.
inline Matrix ou_stable_subspace(const Matrix& a, double tol = kDefaultTol) {
  const double thr = tol * (1.0 + frob(a));
  return linalg::spectral_subspace(a, [thr](Complex l) { return l.real() < -thr; });
}

struct OuInvariantResult {
  bool exists = false;
  std::optional<Matrix> Sigma_inf;
  Matrix controllable;  // orthonormal basis of span[B, AB, ..., A^{d-1}B]
  double containment = 0.0;
};

/// Existence through containment of the controllable subspace in S-.
inline OuInvariantResult ou_invariant_exists(const OuModel& m, double tol = kDefaultTol) {
  validate_ou(m);
  OuInvariantResult r;
  r.controllable = linalg::krylov_span(m.A, m.B, tol);
  const Matrix s = ou_stable_subspace(m.A, tol);
  r.containment = linalg::containment_residual(s, r.controllable);
  r.exists = r.containment <= kSubspaceTol;
  if (!r.exists) return r;
  if (s.cols() == 0) {
    r.Sigma_inf = Matrix::Zero(m.dim(), m.dim());
    return r;
  }
  const Matrix ar = s.transpose() * m.A * s;
  const Matrix qr = s.transpose() * m.B * m.B.transpose() * s;
  const Matrix x = linalg::lyapunov(ar.transpose(), qr);
  Matrix sig = s * x * s.transpose();
  r.Sigma_inf = 0.5 * (sig + sig.transpose());
  return r;
}

struct OuGramLimit {
  bool converged = false;
  double horizon = 0.0;
  Matrix Sigma;
};

/// Existence through convergence of ∫₀ᵀ e^{sA}BBᵀe^{sAᵀ}ds, comparing T and 2T
/// for T = 1, 2, 4, ... up to 2^max_doublings.
inline OuGramLimit ou_gram_limit(const OuModel& m, double rel_tol = 1e-9, int max_doublings = 48) {
  validate_ou(m);
  const Index d = m.dim();
  linalg::Propagator p = linalg::propagate(m.A.transpose(), m.B * m.B.transpose(), Vector::Zero(d), 1.0);
  OuGramLimit out;
  double horizon = 1.0;
  for (int k = 0; k < max_doublings; ++k) {
    const linalg::Propagator next = linalg::detail::compose(p, p);
    if (!next.gram.allFinite() || !next.phi.allFinite()) break;
    const double diff = frob(next.gram - p.gram);
    if (diff <= rel_tol * frob(next.gram)) {
      out.converged = true;
      out.horizon = 2.0 * horizon;
      out.Sigma = next.gram;
      return out;
    }
    p = next;
    horizon *= 2.0;
  }
  out.horizon = horizon;
  return out;
}

/// True iff no nonzero Aᵀ-invariant subspace lies in ker(BBᵀ).
inline bool ou_irreducible(const OuModel& m, double tol = kDefaultTol) {
  validate_ou(m);
  const Matrix bbt = m.B * m.B.transpose();
  const Matrix at = m.A.transpose();
  return linalg::largest_invariant_in_kernel<Matrix>(at, bbt, tol, frob(at) + frob(bbt)).cols() == 0;
}

/// A = Zᵀ, B = C^{1/2}, b = -ζ.
inline OuModel quantum_classical_correspondence(const DriftDiffusion& dd, double tol = kDefaultTol) {
  validate_shapes(dd);
  if (linalg::min_eigenvalue_symmetric(dd.C) < -tol * std::max(1.0, frob(dd.C)))
    throw PreconditionError("quantum_classical_correspondence: C is not positive semidefinite");
  return {dd.Z.transpose(), linalg::sqrt_psd(dd.C), -dd.zeta};
}

/// Block structure of a representative MX of the process: kernel coordinates,
/// rotation pairs and the stable block. Only linear (not symplectic) changes of
/// coordinates are used.
struct OuNormalForm {
  bool exists_absolutely_continuous = false;
  std::string reason;
  Matrix M;  // new coordinates are M x
  Index kernel_dim = 0;
  std::vector<double> angles;  // nonzero, descending
  Matrix A_minus;
  Matrix BBt_minus;
  Vector b0;
  Vector b_minus;
};

inline OuNormalForm ou_normal_form(const OuModel& m, double tol = kDefaultTol) {
  validate_ou(m);
  const Index d = m.dim();
  OuNormalForm out;
  const SpectrumReport rep = detail::classify_square(m.A, tol);
  if (!rep.satisfies_H2) {
    out.reason = "H2_violated";
    return out;
  }
  if (!rep.imaginary_semisimple) {
    out.reason = "imaginary_not_semisimple";
    return out;
  }
  std::vector<Vector> kernel_cols, first_half, second_half;
  const CMatrix ac = m.A.cast<Complex>();
  for (const auto& cl : rep.imaginary_clusters) {
    const double phi = cl.mean.imag();
    if (phi < -rep.imaginary_threshold) continue;
    const bool zero = phi <= rep.imaginary_threshold;
    const CMatrix shifted = ac - Complex(0.0, zero ? 0.0 : phi) * CMatrix::Identity(d, d);
    if (zero) {
      const Matrix k = linalg::null_space(m.A, linalg::rank_cutoff(linalg::max_singular_value(m.A), tol));
      for (Index c = 0; c < k.cols(); ++c) kernel_cols.push_back(k.col(c));
      continue;
    }
    const CMatrix w = linalg::null_space(shifted, linalg::rank_cutoff(linalg::max_singular_value(shifted), tol));
    for (Index c = 0; c < w.cols(); ++c) {
      // A Im v = phi Re v and A Re v = -phi Im v
      first_half.push_back(w.col(c).imag());
      second_half.push_back(w.col(c).real());
      out.angles.push_back(phi);
    }
  }
  const Matrix s = ou_stable_subspace(m.A, tol);
  std::vector<Vector> cols = kernel_cols;
  cols.insert(cols.end(), first_half.begin(), first_half.end());
  cols.insert(cols.end(), second_half.begin(), second_half.end());
  const Index k0 = static_cast<Index>(cols.size());
  for (Index c = 0; c < s.cols(); ++c) cols.push_back(s.col(c));
  if (static_cast<Index>(cols.size()) != d) {
    out.reason = "basis_completion_failed";
    return out;
  }
  Matrix binv(d, d);
  for (Index c = 0; c < d; ++c) binv.col(c) = cols[c];
  Eigen::FullPivLU<Matrix> lu(binv);
  if (!lu.isInvertible()) {
    out.reason = "basis_completion_failed";
    return out;
  }
  out.M = lu.inverse();
  out.kernel_dim = static_cast<Index>(kernel_cols.size());
  const Matrix at = out.M * m.A * binv;
  const Matrix bbt = out.M * m.B * m.B.transpose() * out.M.transpose();
  const Vector bt = out.M * m.b;
  out.A_minus = at.bottomRightCorner(d - k0, d - k0);
  out.BBt_minus = bbt.bottomRightCorner(d - k0, d - k0);
  out.b0 = bt.head(k0);
  out.b_minus = bt.tail(d - k0);
  const double bscale = std::max(1.0, frob(bbt));
  if (k0 > 0 && bbt.topRows(k0).norm() > 1e-8 * bscale) {
    out.reason = "noise_on_center";
    return out;
  }
  if (out.b0.head(out.kernel_dim).norm() > tol * (1.0 + m.b.norm()) * std::max(1.0, frob(out.M))) {
    out.reason = "center_displacement_obstruction";
    return out;
  }
  if (k0 < d) {
    // an absolutely continuous invariant measure needs a nondegenerate Gaussian factor
    const Matrix x = linalg::lyapunov(out.A_minus.transpose(), out.BBt_minus);
    if (linalg::min_eigenvalue_symmetric(x) <= tol * (1.0 + frob(x))) {
      out.reason = "degenerate_stable_factor";
      return out;
    }
  }
  out.exists_absolutely_continuous = true;
  out.reason = "ok";
  return out;
}

}  // namespace gqms
