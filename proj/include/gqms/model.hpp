#pragma once

// Phase-space data (Z, C, zeta) of a Gaussian quantum Markov semigroup and
// the transformations acting on it.

#include <string>

#include "gqms/linalg.hpp"
#include "gqms/symplectic.hpp"
#include "gqms/types.hpp"

namespace gqms {

/// Hamiltonian and jump-operator coefficients. U and V are m x d with m <= 2d.
struct GkslSpec {
  CMatrix Omega;
  CMatrix kappa;
  CVector zeta;
  CMatrix U;
  CMatrix V;
};

struct DriftDiffusion {
  Matrix Z;
  Matrix C;
  Vector zeta;

  Index modes() const { return Z.rows() / 2; }
};

inline void validate_shapes(const DriftDiffusion& dd, const std::string& what = "model") {
  require_square_even(dd.Z, what + ".Z");
  if (dd.C.rows() != dd.Z.rows() || dd.C.cols() != dd.Z.cols())
    throw DimensionError(what + ".C: shape does not match Z");
  if (dd.zeta.size() != dd.Z.rows()) throw DimensionError(what + ".zeta: length does not match Z");
  require_finite(dd.Z, what + ".Z");
  require_finite(dd.C, what + ".C");
  if (!dd.zeta.allFinite()) throw DimensionError(what + ".zeta: non-finite entries");
}

/// Checks shapes, Hermitian Omega and symmetric kappa. Returns a copy with
/// both exactly symmetrized.
inline GkslSpec validate_gksl(const GkslSpec& g, double tol = kDefaultTol) {
  const Index d = g.Omega.rows();
  if (d < 1 || g.Omega.cols() != d) throw DimensionError("gksl.Omega: must be square with d >= 1");
  if (g.kappa.rows() != d || g.kappa.cols() != d) throw DimensionError("gksl.kappa: must be d x d");
  if (g.zeta.size() != d) throw DimensionError("gksl.zeta: must have length d");
  if (g.U.cols() != d || g.V.cols() != d) throw DimensionError("gksl.U/V: must have d columns");
  if (g.U.rows() != g.V.rows()) throw DimensionError("gksl.U/V: row counts differ");
  if (g.U.rows() > 2 * d) throw DimensionError("gksl.U/V: more than 2d jump operators");
  const double os = std::max(1.0, g.Omega.norm());
  if ((g.Omega - g.Omega.adjoint()).norm() > tol * os)
    throw PreconditionError("gksl.Omega: not Hermitian");
  const double ks = std::max(1.0, g.kappa.norm());
  if ((g.kappa - g.kappa.transpose()).norm() > tol * ks)
    throw PreconditionError("gksl.kappa: not symmetric");
  GkslSpec out = g;
  out.Omega = 0.5 * (g.Omega + g.Omega.adjoint());
  out.kappa = 0.5 * (g.kappa + g.kappa.transpose());
  return out;
}

/// The Hermitian matrix C + i(ZᵀJ + JZ); positive semidefinite for admissible data.
inline CMatrix admissibility_matrix(const Matrix& z, const Matrix& c) {
  const Matrix j = standard_form(z.rows() / 2);
  const Matrix skew = z.transpose() * j + j * z;
  CMatrix out = c.cast<Complex>() + Complex(0.0, 1.0) * skew.cast<Complex>();
  return 0.5 * (out + out.adjoint());
}

inline bool validate_admissibility(const DriftDiffusion& dd, double tol = kDefaultTol) {
  validate_shapes(dd);
  const Matrix j = standard_form(dd.modes());
  const double scale = 1.0 + frob(dd.C) + frob(dd.Z.transpose() * j + j * dd.Z);
  return linalg::min_eigenvalue_hermitian(admissibility_matrix(dd.Z, dd.C)) >= -tol * scale;
}

inline DriftDiffusion assemble(const GkslSpec& raw, double tol = kDefaultTol) {
  const GkslSpec s = validate_gksl(raw, tol);
  const Complex i(0.0, 1.0);
  const CMatrix ut = s.U.transpose();
  const CMatrix vt = s.V.transpose();
  RealLinearOp zop{0.5 * (ut * s.U.conjugate() - vt * s.V.conjugate()) + i * s.Omega,
                   0.5 * (ut * s.V - vt * s.U) + i * s.kappa};
  RealLinearOp cop{ut * s.U.conjugate() + vt * s.V.conjugate(), ut * s.V + vt * s.U};
  DriftDiffusion dd;
  dd.Z = embed_real_linear(zop);
  const Matrix c = embed_real_linear(cop);
  dd.C = 0.5 * (c + c.transpose());
  dd.zeta = embed_vector(s.zeta);
  if (!validate_admissibility(dd, tol))
    throw NumericalError("assemble: output violates the admissibility constraint");
  return dd;
}

/// Parameter law of a symplectic change of coordinates: (MZM⁻¹, M⁻ᵀCM⁻¹, M⁻ᵀζ).
inline DriftDiffusion conjugate_symplectic(const DriftDiffusion& dd, const Matrix& m,
                                           double tol = kDefaultTol) {
  validate_shapes(dd);
  if (m.rows() != dd.Z.rows() || m.cols() != dd.Z.cols())
    throw DimensionError("conjugate_symplectic: M shape does not match Z");
  if (!is_symplectic(m, tol)) throw PreconditionError("conjugate_symplectic: M is not symplectic");
  const Matrix minv = symplectic_inverse(m);
  DriftDiffusion out;
  out.Z = m * dd.Z * minv;
  const Matrix c = minv.transpose() * dd.C * minv;
  out.C = 0.5 * (c + c.transpose());
  out.zeta = minv.transpose() * dd.zeta;
  return out;
}

/// Parameter law of a Weyl displacement by w: ζ <- ζ - 2Zᵀw.
inline DriftDiffusion displace_weyl(const DriftDiffusion& dd, const Vector& w) {
  validate_shapes(dd);
  if (w.size() != dd.zeta.size()) throw DimensionError("displace_weyl: w length does not match Z");
  DriftDiffusion out = dd;
  out.zeta = dd.zeta - 2.0 * dd.Z.transpose() * w;
  return out;
}

}  // namespace gqms
