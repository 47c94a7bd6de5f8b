#pragma once

// Time evolution of Gaussian parameters and Weyl symbols, decoherence
// factors, ergodic averages and gap diagnostics.

#include <cmath>
#include <complex>
#include <limits>
#include <map>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "gqms/invariant.hpp"
#include "gqms/linalg.hpp"
#include "gqms/model.hpp"
#include "gqms/spectral.hpp"
#include "gqms/symplectic.hpp"
#include "gqms/types.hpp"

namespace gqms {

struct Trajectory {
  std::vector<double> times;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
};

/// Moments on `t_grid`; (m0, sigma0) is the state at t_grid.front().
inline Trajectory evolve_moments(const DriftDiffusion& dd, const Vector& m0, const Matrix& sigma0,
                                 const std::vector<double>& t_grid, double tol = kDefaultTol) {
  validate_shapes(dd);
  const Index n = dd.Z.rows();
  if (m0.size() != n || sigma0.rows() != n || sigma0.cols() != n)
    throw DimensionError("evolve_moments: initial condition shape does not match the model");
  if (!is_admissible_covariance(sigma0, tol))
    throw PreconditionError("evolve_moments: initial covariance violates Σ + iJ ⪰ 0");
  if (t_grid.empty()) throw PreconditionError("evolve_moments: empty time grid");
  for (size_t k = 0; k < t_grid.size(); ++k) {
    if (!std::isfinite(t_grid[k]) || t_grid[k] < 0.0) throw PreconditionError("evolve_moments: times must be finite and >= 0");
    if (k > 0 && !(t_grid[k] > t_grid[k - 1])) throw PreconditionError("evolve_moments: times must be increasing");
  }
  Trajectory tr;
  tr.times = t_grid;
  tr.means.push_back(m0);
  tr.covariances.push_back(0.5 * (sigma0 + sigma0.transpose()));
  std::map<double, linalg::Propagator> cache;
  for (size_t k = 1; k < t_grid.size(); ++k) {
    const double h = t_grid[k] - t_grid[k - 1];
    auto it = cache.find(h);
    if (it == cache.end()) it = cache.emplace(h, linalg::propagate(dd.Z, dd.C, dd.zeta, h)).first;
    const linalg::Propagator& p = it->second;
    tr.means.push_back(p.phi.transpose() * tr.means.back() - p.drift);
    Matrix s = p.phi.transpose() * tr.covariances.back() * p.phi + p.gram;
    tr.covariances.push_back(0.5 * (s + s.transpose()));
  }
  return tr;
}

inline std::vector<double> uniform_grid(double t_end, Index steps) {
  if (steps < 1) throw PreconditionError("uniform_grid: steps must be >= 1");
  std::vector<double> g(static_cast<size_t>(steps) + 1);
  for (Index k = 0; k <= steps; ++k) g[k] = t_end * static_cast<double>(k) / static_cast<double>(steps);
  return g;
}

struct WeylSymbol {
  Vector z;
  Complex amplitude;
  Vector evolved_z;
};

/// Amplitude exp(-½⟨z, G_t z⟩ + i⟨g_t, z⟩) and argument e^{tZ}z of the evolved Weyl operator.
inline WeylSymbol weyl_symbol(const DriftDiffusion& dd, const Vector& z, double t) {
  validate_shapes(dd);
  if (z.size() != dd.Z.rows()) throw DimensionError("weyl_symbol: z length does not match the model");
  const linalg::Propagator p = linalg::propagate(dd.Z, dd.C, dd.zeta, t);
  WeylSymbol w;
  w.z = z;
  w.amplitude = std::exp(Complex(-0.5 * z.dot(p.gram * z), p.drift.dot(z)));
  w.evolved_z = p.phi * z;
  return w;
}

/// Components z = z1 + z2 with z1 in V0 and z2 in V-.
struct SplitVector {
  Vector z1;
  Vector z2;
  Vector a;  // coordinates of z2 in the V- basis
};

inline SplitVector split_vector(const SpectralSplit& split, const Vector& z) {
  const Index n = z.size();
  const Index k0 = split.V0_basis.cols();
  const Index km = split.Vminus_basis.cols();
  if (split.V0_basis.rows() != n || k0 + km != n) throw DimensionError("split_vector: splitting does not match z");
  Matrix basis(n, n);
  basis << split.V0_basis, split.Vminus_basis;
  Eigen::FullPivLU<Matrix> lu(basis);
  if (!lu.isInvertible()) throw NumericalError("split_vector: V0 and V- do not span the phase space");
  const Vector c = lu.solve(z);
  SplitVector out;
  out.a = c.tail(km);
  out.z1 = split.V0_basis * c.head(k0);
  out.z2 = split.Vminus_basis * out.a;
  return out;
}

/// Limit of the Weyl amplitude of the V- component of z as t -> infinity.
inline Complex decoherence_factor(const DriftDiffusion& dd, const SpectralSplit& split, const Vector& z) {
  validate_shapes(dd);
  const SplitVector sv = split_vector(split, z);
  if (sv.a.size() == 0) return Complex(1.0, 0.0);
  const Matrix& q = split.Vminus_basis;  // orthonormal columns
  const Matrix zr = q.transpose() * dd.Z * q;
  const Matrix x = linalg::lyapunov(zr, q.transpose() * dd.C * q);
  Eigen::FullPivLU<Matrix> lu(zr);
  if (!lu.isInvertible()) throw NumericalError("decoherence_factor: stable block is singular");
  const Vector za = lu.solve(sv.a);
  return std::exp(Complex(-0.5 * sv.a.dot(x * sv.a), -dd.zeta.dot(q * za)));
}

inline double eid_defect(const DriftDiffusion& dd, const SpectralSplit& split, const Vector& z, double t) {
  const SplitVector sv = split_vector(split, z);
  const Complex full = weyl_symbol(dd, z, t).amplitude;
  const Complex center = weyl_symbol(dd, sv.z1, t).amplitude;
  return std::abs(full - decoherence_factor(dd, split, z) * center);
}

inline double decay_rate_estimate(const Matrix& z_minus) {
  if (z_minus.rows() == 0 || z_minus.rows() != z_minus.cols())
    throw PreconditionError("decay_rate_estimate: requires a non-empty square stable block");
  Eigen::EigenSolver<Matrix> es(z_minus, false);
  return -es.eigenvalues().real().maxCoeff();
}

struct ErgodicMean {
  Vector avg_mean;
  Matrix avg_covariance;
  Vector predicted_mean;
  Matrix predicted_covariance;
};

/// Cesàro limit of the moments predicted from the normal form.
inline GaussianParams ergodic_prediction(const NormalForm& nf, const Vector& m0, const Matrix& sigma0,
                                         double tol = kDefaultTol) {
  const Index n = nf.B.rows();
  const Index d = n / 2;
  const Index d0 = nf.d0;
  const Vector mt = nf.B.transpose() * m0;
  const Matrix st = nf.B.transpose() * sigma0 * nf.B;
  const auto i0 = detail::mode_indices(d, 0, d0);
  const auto im = detail::mode_indices(d, d0, d - d0);
  const GaussianParams stat = stationary_gaussian(nf.Z_minus, nf.C_minus, nf.zeta_minus, tol);

  Vector mean_nf = Vector::Zero(n);
  Matrix cov_nf = Matrix::Zero(n, n);
  for (size_t r = 0; r < im.size(); ++r) {
    mean_nf(im[r]) = stat.mean(r);
    for (size_t c = 0; c < im.size(); ++c) cov_nf(im[r], im[c]) = stat.covariance(r, c);
  }
  if (d0 > 0) {
    // mean: rotating modes average to the fixed point 2 w_center, zero-angle modes stay put
    for (Index k = 0; k < d0; ++k) {
      const bool rotating = nf.signed_angles[k] != 0.0;
      mean_nf(i0[k]) = rotating ? 2.0 * nf.w_center(k) : mt(i0[k]);
      mean_nf(i0[d0 + k]) = rotating ? 2.0 * nf.w_center(d0 + k) : mt(i0[d0 + k]);
    }
    // covariance: keep the eigen-components whose frequencies coincide
    CMatrix u = CMatrix::Zero(2 * d0, 2 * d0);
    std::vector<double> freq(2 * d0);
    const double r2 = 1.0 / std::sqrt(2.0);
    for (Index k = 0; k < d0; ++k) {
      const double s = nf.signed_angles[k];
      u(k, k) = r2;
      u(d0 + k, k) = Complex(0.0, -r2);
      u(k, d0 + k) = r2;
      u(d0 + k, d0 + k) = Complex(0.0, r2);
      freq[k] = s;
      freq[d0 + k] = -s;
    }
    const Matrix s00 = detail::select(st, i0, i0);
    CMatrix sp = u.adjoint() * s00.cast<Complex>() * u;
    for (Index a = 0; a < 2 * d0; ++a)
      for (Index b = 0; b < 2 * d0; ++b)
        if (std::abs(freq[a] - freq[b]) > 1e-8 * (1.0 + std::abs(freq[a]) + std::abs(freq[b]))) sp(a, b) = 0.0;
    const Matrix avg = (u * sp * u.adjoint()).real();
    for (size_t r = 0; r < i0.size(); ++r)
      for (size_t c = 0; c < i0.size(); ++c) cov_nf(i0[r], i0[c]) = avg(r, c);
  }
  GaussianParams out;
  out.mean = nf.M.transpose() * mean_nf;
  out.covariance = nf.M.transpose() * cov_nf * nf.M;
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

/// Trapezoid time averages of the moments over [0, T] next to their predicted limits.
inline ErgodicMean ergodic_mean(const DriftDiffusion& dd, const Vector& m0, const Matrix& sigma0, double t_end,
                                Index n_steps, double tol = kDefaultTol) {
  if (n_steps < 1000) throw PreconditionError("ergodic_mean: n_steps must be >= 1000");
  if (!(t_end > 0.0)) throw PreconditionError("ergodic_mean: T must be positive");
  const ExistenceVerdict v = decide_existence(dd, tol);
  if (!v.exists) throw PreconditionError("ergodic_mean: no invariant state (" + to_string(v.reason) + ")");
  const Trajectory tr = evolve_moments(dd, m0, sigma0, uniform_grid(t_end, n_steps), tol);
  const double h = t_end / static_cast<double>(n_steps);
  ErgodicMean out;
  out.avg_mean = 0.5 * (tr.means.front() + tr.means.back());
  out.avg_covariance = 0.5 * (tr.covariances.front() + tr.covariances.back());
  for (size_t k = 1; k + 1 < tr.times.size(); ++k) {
    out.avg_mean += tr.means[k];
    out.avg_covariance += tr.covariances[k];
  }
  out.avg_mean *= h / t_end;
  out.avg_covariance *= h / t_end;
  const GaussianParams pred = ergodic_prediction(*v.normal_form, m0, sigma0, tol);
  out.predicted_mean = pred.mean;
  out.predicted_covariance = pred.covariance;
  return out;
}

/// f(x) = csch(arccoth x), defined for x > 1.
inline double kms_f(double x) {
  if (!(x > 1.0 + 1e-12)) throw PreconditionError("kms_f: argument must exceed 1");
  const double acoth = 0.5 * std::log1p(2.0 / (x - 1.0));
  return 1.0 / std::sinh(acoth);
}

struct KmsGapResult {
  bool holds = false;
  double witness_min_eig = 0.0;
};

inline KmsGapResult kms_gap_condition(const Matrix& z_minus, const Matrix& sigma_inf, double tol = kDefaultTol) {
  require_square_even(z_minus, "kms_gap_condition.Z_minus");
  if (sigma_inf.rows() != z_minus.rows() || sigma_inf.cols() != z_minus.cols())
    throw DimensionError("kms_gap_condition: Sigma_inf shape does not match Z_minus");
  if (!is_faithful({Vector::Zero(sigma_inf.rows()), sigma_inf}, tol))
    throw PreconditionError("kms_gap_condition: stationary covariance is not faithful");
  const WilliamsonDecomposition w = williamson(sigma_inf, tol);
  const Index d = w.nu.size();
  Vector fd(2 * d);
  for (Index k = 0; k < d; ++k) fd(k) = fd(d + k) = kms_f(w.nu(k));
  const Matrix f = w.M.transpose() * fd.asDiagonal() * w.M;
  const Matrix k = -(z_minus.transpose() * f + f * z_minus);
  KmsGapResult out;
  out.witness_min_eig = linalg::min_eigenvalue_symmetric(k);
  out.holds = out.witness_min_eig > tol * (1.0 + frob(z_minus) * frob(f));
  return out;
}

struct SemigroupGap {
  double gap_form = 0.0;
  double gap_decay = 0.0;
};

/// Form bound and decay rate of e^{tA} on range(I - E).
inline SemigroupGap semigroup_gap_finite(const Matrix& a, const Matrix& e, double tol = kDefaultTol) {
  const Index n = a.rows();
  if (n == 0 || a.cols() != n || e.rows() != n || e.cols() != n)
    throw DimensionError("semigroup_gap_finite: A and E must be square of equal size");
  const double scale = 1.0 + frob(a);
  if (frob(e - e.transpose()) > 1e-8 || frob(e * e - e) > 1e-8)
    throw PreconditionError("semigroup_gap_finite: E is not an orthogonal projector");
  const Matrix sym = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(sym, Eigen::EigenvaluesOnly);
  if (es.eigenvalues().maxCoeff() > tol * scale)
    throw PreconditionError("semigroup_gap_finite: A does not generate a contraction semigroup");
  if (frob(a * e - e * a) > tol * scale)
    throw PreconditionError("semigroup_gap_finite: A does not commute with E");
  const Matrix p = linalg::range_space<Matrix>(Matrix::Identity(n, n) - e, 0.5);
  SemigroupGap g;
  if (p.cols() == 0) {
    g.gap_form = g.gap_decay = std::numeric_limits<double>::infinity();
    return g;
  }
  g.gap_form = linalg::min_eigenvalue_symmetric(-p.transpose() * sym * p);
  // inf over a geometric grid of -log‖e^{tA} P‖₂ / t
  g.gap_decay = std::numeric_limits<double>::infinity();
  const int samples = 80;
  const double t0 = 1e-6, t1 = 20.0 / std::max(1.0, std::abs(g.gap_form) + 1e-3);
  for (int i = 0; i < samples; ++i) {
    const double t = t0 * std::pow(t1 / t0, static_cast<double>(i) / (samples - 1));
    const Matrix et = (t * a).exp() * p;
    const double nrm = linalg::max_singular_value(et);
    g.gap_decay = std::min(g.gap_decay, -std::log(nrm) / t);
  }
  return g;
}

}  // namespace gqms
