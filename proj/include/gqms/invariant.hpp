#pragma once

// Existence of a normal invariant state, the symplectic normal form, the
// stationary Gaussian factor and the structural flags derived from it.

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "gqms/linalg.hpp"
#include "gqms/model.hpp"
#include "gqms/spectral.hpp"
#include "gqms/symplectic.hpp"
#include "gqms/types.hpp"

namespace gqms {

struct GaussianParams {
  Vector mean;
  Matrix covariance;
  Index modes() const { return mean.size() / 2; }
};

/// Σ + iJ ⪰ -tol (1 + ‖Σ‖).
inline bool is_admissible_covariance(const Matrix& sigma, double tol = kDefaultTol) {
  if (sigma.rows() == 0) return true;
  require_square_even(sigma, "covariance");
  const CMatrix h = sigma.cast<Complex>() + Complex(0.0, 1.0) * standard_form(sigma.rows() / 2).cast<Complex>();
  return linalg::min_eigenvalue_hermitian(h) >= -tol * (1.0 + frob(sigma));
}

struct NormalForm {
  Matrix M;                          // symplectic; transformed data is conjugate_symplectic(dd, M)
  Matrix B;                          // M⁻¹, columns are the preimages of the canonical basis
  Index d0 = 0;
  std::vector<double> Phi;           // angles >= 0, descending, zero angles last
  std::vector<double> signed_angles; // Z0 block is [[0, -diag(s)], [diag(s), 0]]
  Index zero_angle_count = 0;
  Matrix Z_minus;
  Matrix C_minus;
  Vector zeta0;
  Vector zeta_minus;
  Vector w_center;           // in normal-form coordinates of the first d0 modes
  Vector w_center_original;  // the same displacement in the input coordinates
  DriftDiffusion transformed;
  double block_residual = 0.0;
};

enum class ExistenceReason {
  H2_violated,
  imaginary_not_semisimple,
  V0_not_in_kerC,
  center_displacement_obstruction,
  ok
};

inline std::string to_string(ExistenceReason r) {
  switch (r) {
    case ExistenceReason::H2_violated: return "H2_violated";
    case ExistenceReason::imaginary_not_semisimple: return "imaginary_not_semisimple";
    case ExistenceReason::V0_not_in_kerC: return "V0_not_in_kerC";
    case ExistenceReason::center_displacement_obstruction: return "center_displacement_obstruction";
    case ExistenceReason::ok: return "ok";
  }
  return "unknown";
}

inline ExistenceReason existence_reason_from_string(const std::string& s) {
  for (auto r : {ExistenceReason::H2_violated, ExistenceReason::imaginary_not_semisimple,
                 ExistenceReason::V0_not_in_kerC, ExistenceReason::center_displacement_obstruction,
                 ExistenceReason::ok}) {
    if (to_string(r) == s) return r;
  }
  throw std::invalid_argument("unknown existence reason '" + s + "'");
}

struct ExistenceVerdict {
  bool exists = false;
  ExistenceReason reason = ExistenceReason::ok;
  std::optional<NormalForm> normal_form;
};

namespace detail {

// Index of the largest entry of `values`; entries within a relative 1e-9 of the
// maximum count as ties and the first one wins.
inline Index pivot_index(const std::vector<double>& values) {
  double best = 0.0;
  for (double v : values) best = std::max(best, v);
  if (best <= 0.0) return -1;
  for (Index i = 0; i < static_cast<Index>(values.size()); ++i)
    if (values[i] >= best * (1.0 - 1e-9)) return i;
  return -1;
}

// Rotates v so that its largest-modulus entry is real and positive.
inline CVector normalize_phase(const CVector& v) {
  std::vector<double> mods(v.size());
  for (Index i = 0; i < v.size(); ++i) mods[i] = std::abs(v(i));
  const Index p = pivot_index(mods);
  if (p < 0) return v;
  return v * (std::abs(v(p)) / v(p));
}

// Eigenvectors for i*phi, normalized so that <Re v, J Im v> = ±1 and chosen
// canonically from projections of the coordinate vectors.
struct ComplexPair {
  CVector v;
  int q;  // sign of <Re v, J Im v>
};

inline std::vector<ComplexPair> imaginary_cluster_vectors(const Matrix& z, double phi, Index multiplicity,
                                                          double tol) {
  const Index n = z.rows();
  const CMatrix j = standard_form(n / 2).cast<Complex>();
  const CMatrix shifted = z.cast<Complex>() - Complex(0.0, phi) * CMatrix::Identity(n, n);
  CMatrix w = linalg::null_space(shifted, linalg::rank_cutoff(linalg::max_singular_value(shifted), tol));
  if (w.cols() != multiplicity)
    throw NumericalError("normal_form: eigenspace for angle " + std::to_string(phi) + " has dimension " +
                         std::to_string(w.cols()) + ", expected " + std::to_string(multiplicity));
  const CMatrix form = Complex(0.0, -0.5) * w.adjoint() * j * w;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (form + form.adjoint()));
  const double fscale = std::max(1e-300, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<ComplexPair> out;
  for (int sign : {-1, +1}) {
    std::vector<Index> cols;
    for (Index k = 0; k < es.eigenvalues().size(); ++k) {
      const double lam = es.eigenvalues()(k);
      if (std::abs(lam) <= 1e-8 * fscale)
        throw NumericalError("normal_form: degenerate symplectic pairing in the eigenspace for angle " +
                             std::to_string(phi));
      if ((lam > 0.0) == (sign > 0)) cols.push_back(k);
    }
    if (cols.empty()) continue;
    CMatrix s(n, static_cast<Index>(cols.size()));
    for (Index c = 0; c < s.cols(); ++c) s.col(c) = w * es.eigenvectors().col(cols[c]);
    // positive definite form on the group, in the coordinates of s
    const CMatrix f = static_cast<double>(sign) * (Complex(0.0, -0.5) * s.adjoint() * j * s);
    std::vector<CVector> chosen;  // coordinates u with uᴴ f u = 1
    std::vector<CVector> cand(n);
    for (Index i = 0; i < n; ++i) cand[i] = s.row(i).adjoint();  // coordinates of the projection of e_i
    for (Index step = 0; step < s.cols(); ++step) {
      std::vector<double> weight(n);
      std::vector<CVector> resid(n);
      for (Index i = 0; i < n; ++i) {
        CVector r = cand[i];
        for (const auto& u : chosen) r -= u * (u.adjoint() * f * r)(0);
        resid[i] = r;
        weight[i] = std::max(0.0, (r.adjoint() * f * r)(0).real());
      }
      const Index p = pivot_index(weight);
      if (p < 0) throw NumericalError("normal_form: pairing basis completion failed for angle " + std::to_string(phi));
      chosen.push_back(resid[p] / std::sqrt(weight[p]));
    }
    for (const auto& u : chosen) out.push_back({normalize_phase(s * u), sign});
  }
  return out;
}

// Symplectic basis (a_k, b_k) with <a_k, J b_k> = 1 of a real subspace,
// chosen from projections of the coordinate vectors.
inline std::vector<std::pair<Vector, Vector>> symplectic_basis(const Matrix& basis, const std::string& what) {
  const Index n = basis.rows();
  const Index k = basis.cols();
  if (k % 2 != 0) throw NumericalError("normal_form: " + what + " has odd dimension " + std::to_string(k));
  const Matrix j = standard_form(n / 2);
  const Matrix q = linalg::range_space(basis, 1e-12);
  std::vector<Vector> cand(n);
  for (Index i = 0; i < n; ++i) cand[i] = q * q.row(i).transpose();
  std::vector<std::pair<Vector, Vector>> pairs;
  auto reduce = [&](const Vector& v) {
    // modified Gram-Schmidt, two passes; a single classical pass loses
    // skew-orthogonality when the pairs are far from orthonormal
    Vector r = v;
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& [e, f] : pairs) {
        r += r.dot(j * e) * f;
        r -= r.dot(j * f) * e;
      }
    return r;
  };
  for (Index step = 0; step < k / 2; ++step) {
    std::vector<Vector> red(n);
    std::vector<double> norms(n);
    for (Index i = 0; i < n; ++i) {
      red[i] = reduce(cand[i]);
      norms[i] = red[i].norm();
    }
    const Index pa = pivot_index(norms);
    if (pa < 0) throw NumericalError("normal_form: symplectic completion of " + what + " failed");
    const Vector a = red[pa];
    std::vector<double> pairing(n);
    // candidates reduced to roundoff carry no direction
    const double floor = 1e-6 * norms[pa];
    for (Index i = 0; i < n; ++i)
      pairing[i] = norms[i] > floor ? std::abs(a.dot(j * red[i])) / norms[i] : 0.0;
    const Index pb = pivot_index(pairing);
    if (pb < 0 || pairing[pb] <= 1e-8 * a.norm())
      throw NumericalError("normal_form: " + what + " is not symplectic (degenerate pairing)");
    Vector e = a;
    Vector f = red[pb] / a.dot(j * red[pb]);
    const double s = std::sqrt(f.norm() / e.norm());
    e *= s;
    f /= s;
    pairs.emplace_back(e, f);
  }
  return pairs;
}

inline Matrix select(const Matrix& m, const std::vector<Index>& rows, const std::vector<Index>& cols) {
  Matrix out(rows.size(), cols.size());
  for (size_t r = 0; r < rows.size(); ++r)
    for (size_t c = 0; c < cols.size(); ++c) out(r, c) = m(rows[r], cols[c]);
  return out;
}

inline Vector select(const Vector& v, const std::vector<Index>& rows) {
  Vector out(rows.size());
  for (size_t r = 0; r < rows.size(); ++r) out(r) = v(rows[r]);
  return out;
}

// Coordinate indices (x_k then y_k) of modes [first, first + count) in a d-mode space.
inline std::vector<Index> mode_indices(Index d, Index first, Index count) {
  std::vector<Index> idx;
  for (Index k = 0; k < count; ++k) idx.push_back(first + k);
  for (Index k = 0; k < count; ++k) idx.push_back(d + first + k);
  return idx;
}

}  // namespace detail

/// Builds the symplectic normal form. Requires H2, semisimple imaginary
/// spectrum and V0 inside ker C.
inline NormalForm normal_form(const DriftDiffusion& dd, double tol = kDefaultTol) {
  validate_shapes(dd);
  const Index n = dd.Z.rows();
  const Index d = n / 2;
  const SpectrumReport rep = classify_spectrum(dd.Z, tol);
  if (!rep.satisfies_H2) throw PreconditionError("normal_form: H2_violated");
  if (!rep.imaginary_semisimple) throw PreconditionError("normal_form: imaginary_not_semisimple");
  const SpectralSplit split = invariant_splitting(dd.Z, tol);

  Matrix b = Matrix::Zero(n, n);
  NormalForm nf;
  Index mode = 0;
  auto place = [&](const Vector& e, const Vector& f, double signed_angle) {
    if (mode >= d) throw NumericalError("normal_form: more canonical pairs than modes");
    b.col(mode) = e;
    b.col(d + mode) = f;
    nf.signed_angles.push_back(signed_angle);
    nf.Phi.push_back(std::abs(signed_angle));
    ++mode;
  };

  for (const auto& cl : rep.imaginary_clusters) {
    const double phi = cl.mean.imag();
    if (phi <= rep.imaginary_threshold) continue;
    for (const auto& [v, q] : detail::imaginary_cluster_vectors(dd.Z, phi, cl.multiplicity, tol)) {
      if (q < 0)
        place(v.real(), -v.imag(), phi);
      else
        place(v.real(), v.imag(), -phi);
    }
  }
  // zero-angle modes
  Matrix zero_space = Matrix::Zero(n, 0);
  for (const auto& cl : rep.imaginary_clusters) {
    if (std::abs(cl.mean.imag()) > rep.imaginary_threshold) continue;
    zero_space = linalg::null_space(dd.Z, linalg::rank_cutoff(linalg::max_singular_value(dd.Z), tol));
    if (zero_space.cols() != cl.multiplicity)
      throw NumericalError("normal_form: kernel dimension of Z does not match the multiplicity of 0");
  }
  if (zero_space.cols() > 0) {
    for (const auto& [e, f] : detail::symplectic_basis(zero_space, "the zero-angle subspace")) place(e, f, 0.0);
    nf.zero_angle_count = zero_space.cols() / 2;
  }
  nf.d0 = mode;
  if (2 * nf.d0 != split.V0_basis.cols())
    throw NumericalError("normal_form: oscillator pairs do not span the decoherence-free subspace");
  if (split.Vminus_basis.cols() > 0)
    for (const auto& [e, f] : detail::symplectic_basis(split.Vminus_basis, "the stable subspace")) place(e, f, 0.0);
  nf.signed_angles.resize(nf.d0);
  nf.Phi.resize(nf.d0);
  if (mode != d) throw NumericalError("normal_form: symplectic completion produced too few pairs");

  if (!is_symplectic(b, 1e-8)) throw NumericalError("normal_form: assembled basis is not symplectic");
  nf.B = b;
  nf.M = symplectic_inverse(b);
  DriftDiffusion t;
  t.Z = nf.M * dd.Z * b;
  t.C = b.transpose() * dd.C * b;
  t.C = 0.5 * (t.C + t.C.transpose());
  t.zeta = b.transpose() * dd.zeta;
  nf.transformed = t;

  const auto i0 = detail::mode_indices(d, 0, nf.d0);
  const auto im = detail::mode_indices(d, nf.d0, d - nf.d0);
  nf.Z_minus = detail::select(t.Z, im, im);
  nf.C_minus = detail::select(t.C, im, im);
  nf.zeta0 = detail::select(t.zeta, i0);
  nf.zeta_minus = detail::select(t.zeta, im);
  nf.block_residual = detail::select(t.Z, i0, im).norm() + detail::select(t.Z, im, i0).norm() +
                      detail::select(t.C, i0, i0).norm() + detail::select(t.C, i0, im).norm();
  Matrix z0_expected = Matrix::Zero(2 * nf.d0, 2 * nf.d0);
  for (Index k = 0; k < nf.d0; ++k) {
    z0_expected(k, nf.d0 + k) = -nf.signed_angles[k];
    z0_expected(nf.d0 + k, k) = nf.signed_angles[k];
  }
  nf.block_residual += (detail::select(t.Z, i0, i0) - z0_expected).norm();

  // w solves Z0ᵀ w = ζ0 / 2 on modes with nonzero angle
  nf.w_center = Vector::Zero(2 * nf.d0);
  for (Index k = 0; k < nf.d0; ++k) {
    const double s = nf.signed_angles[k];
    if (s == 0.0) continue;
    nf.w_center(k) = -0.5 * nf.zeta0(nf.d0 + k) / s;
    nf.w_center(nf.d0 + k) = 0.5 * nf.zeta0(k) / s;
  }
  Vector w_full = Vector::Zero(n);
  for (size_t r = 0; r < i0.size(); ++r) w_full(i0[r]) = nf.w_center(r);
  nf.w_center_original = nf.M.transpose() * w_full;
  return nf;
}

/// Decides whether a normal invariant state exists; on success the normal
/// form is attached.
inline ExistenceVerdict decide_existence(const DriftDiffusion& dd, double tol = kDefaultTol) {
  validate_shapes(dd);
  if (!validate_admissibility(dd, tol))
    throw PreconditionError("decide_existence: model violates the admissibility constraint");
  ExistenceVerdict v;
  const SpectrumReport rep = classify_spectrum(dd.Z, tol);
  if (!rep.satisfies_H2) {
    v.reason = ExistenceReason::H2_violated;
    return v;
  }
  if (!rep.imaginary_semisimple) {
    v.reason = ExistenceReason::imaginary_not_semisimple;
    return v;
  }
  const SpectralSplit split = invariant_splitting(dd.Z, tol);
  if (split.V0_basis.cols() > 0) {
    const double scale = std::max(1.0, frob(dd.C));
    if (frob(dd.C * split.V0_basis) > tol * scale * std::sqrt(static_cast<double>(split.V0_basis.cols()))) {
      v.reason = ExistenceReason::V0_not_in_kerC;
      return v;
    }
  }
  NormalForm nf = normal_form(dd, tol);
  double zero_part = 0.0;
  for (Index k = 0; k < nf.d0; ++k) {
    if (nf.signed_angles[k] != 0.0) continue;
    zero_part = std::hypot(zero_part, std::hypot(nf.zeta0(k), nf.zeta0(nf.d0 + k)));
  }
  if (zero_part > tol * (1.0 + dd.zeta.norm())) {
    v.reason = ExistenceReason::center_displacement_obstruction;
    return v;
  }
  v.exists = true;
  v.reason = ExistenceReason::ok;
  v.normal_form = std::move(nf);
  return v;
}

/// Stationary mean and covariance of dm/dt = Zᵀm - ζ, dΣ/dt = ZᵀΣ + ΣZ + C.
inline GaussianParams stationary_gaussian(const Matrix& z, const Matrix& c, const Vector& zeta,
                                          double tol = kDefaultTol) {
  const Index n = z.rows();
  if (z.cols() != n || c.rows() != n || c.cols() != n || zeta.size() != n)
    throw DimensionError("stationary_gaussian: shape mismatch");
  GaussianParams g;
  if (n == 0) {
    g.mean = Vector(0);
    g.covariance = Matrix(0, 0);
    return g;
  }
  Eigen::EigenSolver<Matrix> es(z, false);
  if (es.eigenvalues().real().maxCoeff() >= -tol * (1.0 + frob(z)))
    throw PreconditionError("stationary_gaussian: drift block is not strictly stable");
  Eigen::FullPivLU<Matrix> lu(z.transpose());
  if (!lu.isInvertible()) throw NumericalError("stationary_gaussian: singular drift");
  g.mean = lu.solve(zeta);
  g.covariance = linalg::lyapunov(z, c);
  return g;
}

inline double lyapunov_residual(const Matrix& z, const Matrix& c, const Matrix& sigma) {
  return frob(z.transpose() * sigma + sigma * z + c);
}

inline bool is_faithful(const GaussianParams& stationary, double tol = kDefaultTol) {
  const Matrix& s = stationary.covariance;
  if (s.rows() == 0) return true;
  require_square_even(s, "is_faithful");
  const CMatrix h = s.cast<Complex>() + Complex(0.0, 1.0) * standard_form(s.rows() / 2).cast<Complex>();
  return linalg::min_eigenvalue_hermitian(h) > tol * (1.0 + frob(s));
}

/// True iff no nonzero Z-invariant subspace of C^{2d} lies in ker(C + i(ZᵀJ + JZ)).
inline bool is_irreducible(const DriftDiffusion& dd, double tol = kDefaultTol) {
  validate_shapes(dd);
  const CMatrix cz = admissibility_matrix(dd.Z, dd.C);
  const CMatrix zc = dd.Z.cast<Complex>();
  const CMatrix inv = linalg::largest_invariant_in_kernel<CMatrix>(zc, cz, tol, frob(dd.Z) + frob(cz));
  return inv.cols() == 0;
}

struct RationalDependence {
  bool found = false;
  bool search_complete = true;
  std::vector<int> witness;
};

/// Smallest-L1 nonzero integer vector n with |n_j| <= nmax and |Σ n_j φ_j| small.
inline RationalDependence rational_dependence(const std::vector<double>& angles, int nmax = 12,
                                              double tol = kDefaultTol) {
  RationalDependence out;
  const Index k = static_cast<Index>(angles.size());
  if (k == 0 || nmax < 1) return out;
  double asum = 0.0;
  for (double a : angles) asum += std::abs(a);
  const double window = tol * (1.0 + nmax * asum);

  auto better = [](const std::vector<int>& a, const std::vector<int>& b) {
    int la = 0, lb = 0;
    for (int x : a) la += std::abs(x);
    for (int x : b) lb += std::abs(x);
    if (la != lb) return la < lb;
    return a > b;
  };
  auto canonical = [](std::vector<int> v) {
    for (int x : v) {
      if (x == 0) continue;
      if (x < 0)
        for (int& y : v) y = -y;
      break;
    }
    return v;
  };
  auto consider = [&](const std::vector<int>& cand) {
    bool nonzero = false;
    for (int x : cand) nonzero |= (x != 0);
    if (!nonzero) return;
    const std::vector<int> c = canonical(cand);
    if (!out.found || better(c, out.witness)) {
      out.found = true;
      out.witness = c;
    }
  };

  const Index half = (k + 1) / 2;
  const double per_half = std::pow(2.0 * nmax + 1.0, static_cast<double>(half));
  if (per_half <= 2e6) {
    auto enumerate = [&](Index first, Index count) {
      std::vector<std::pair<double, std::vector<int>>> items;
      std::vector<int> cur(count, -nmax);
      for (;;) {
        double s = 0.0;
        for (Index i = 0; i < count; ++i) s += cur[i] * angles[first + i];
        items.emplace_back(s, cur);
        Index pos = 0;
        while (pos < count && cur[pos] == nmax) cur[pos++] = -nmax;
        if (pos == count) break;
        ++cur[pos];
      }
      return items;
    };
    auto left = enumerate(0, half);
    auto right = enumerate(half, k - half);
    std::sort(right.begin(), right.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [ls, lv] : left) {
      auto lo = std::lower_bound(right.begin(), right.end(), -ls - window,
                                 [](const auto& item, double v) { return item.first < v; });
      for (auto it = lo; it != right.end() && it->first <= -ls + window; ++it) {
        std::vector<int> cand = lv;
        cand.insert(cand.end(), it->second.begin(), it->second.end());
        consider(cand);
      }
    }
    return out;
  }
  // large problems: supports of size at most three
  out.search_complete = false;
  std::vector<int> cand(k, 0);
  for (Index a = 0; a < k; ++a) {
    for (int na = 1; na <= nmax; ++na) {
      cand.assign(k, 0);
      cand[a] = na;
      if (std::abs(na * angles[a]) <= window) consider(cand);
      for (Index b2 = a + 1; b2 < k; ++b2) {
        for (int nb = -nmax; nb <= nmax; ++nb) {
          if (nb == 0) continue;
          cand.assign(k, 0);
          cand[a] = na;
          cand[b2] = nb;
          const double s2 = na * angles[a] + nb * angles[b2];
          if (std::abs(s2) <= window) consider(cand);
          for (Index c = b2 + 1; c < k; ++c) {
            const double need = -s2 / (angles[c] == 0.0 ? 1.0 : angles[c]);
            for (int nc : {static_cast<int>(std::floor(need)), static_cast<int>(std::ceil(need))}) {
              if (nc == 0 || std::abs(nc) > nmax) continue;
              cand.assign(k, 0);
              cand[a] = na;
              cand[b2] = nb;
              cand[c] = nc;
              if (std::abs(s2 + nc * angles[c]) <= window) consider(cand);
            }
          }
        }
      }
    }
  }
  return out;
}

struct InvariantSetDescriptor {
  Index d0 = 0;
  std::vector<double> angles;
  std::vector<double> signed_angles;
  Index zero_angle_count = 0;
  RationalDependence rational_dependence;
  GaussianParams stationary;  // stable factor, normal-form coordinates
  bool faithful = false;
  bool irreducible = false;
};

inline InvariantSetDescriptor invariant_set_descriptor(const DriftDiffusion& dd, double tol = kDefaultTol,
                                                       int nmax = 12) {
  const ExistenceVerdict v = decide_existence(dd, tol);
  if (!v.exists) throw PreconditionError("invariant_set_descriptor: no invariant state (" + to_string(v.reason) + ")");
  const NormalForm& nf = *v.normal_form;
  InvariantSetDescriptor out;
  out.d0 = nf.d0;
  out.angles = nf.Phi;
  out.signed_angles = nf.signed_angles;
  out.zero_angle_count = nf.zero_angle_count;
  out.rational_dependence = rational_dependence(nf.Phi, nmax, tol);
  out.stationary = stationary_gaussian(nf.Z_minus, nf.C_minus, nf.zeta_minus, tol);
  out.faithful = is_faithful(out.stationary, tol);
  out.irreducible = is_irreducible(dd, tol);
  return out;
}

inline bool ground_state_flag(const DriftDiffusion& dd, double tol = kDefaultTol) {
  validate_shapes(dd);
  if (frob(dd.C) > tol * (1.0 + frob(dd.Z)))
    throw PreconditionError("ground_state_flag: requires purely Hamiltonian data (C = 0)");
  const ExistenceVerdict v = decide_existence(dd, tol);
  if (!v.exists) return false;
  for (double s : v.normal_form->signed_angles)
    if (s < -tol) return false;
  return true;
}

struct RecurrenceClassification {
  Index positive_recurrent_dim_defect = 0;
  Index transient_dim = 0;
  bool null_recurrent_trivial = true;
};

/// Symplectic eigenvalues within this distance of 1 count as pure directions.
inline constexpr double kPureTol = 1e-6;

inline RecurrenceClassification recurrence_classification(const InvariantSetDescriptor& desc) {
  RecurrenceClassification r;
  if (desc.stationary.covariance.rows() == 0) return r;
  const WilliamsonDecomposition w = williamson(desc.stationary.covariance);
  for (Index k = 0; k < w.nu.size(); ++k)
    if (std::abs(w.nu(k) - 1.0) <= kPureTol) ++r.positive_recurrent_dim_defect;
  r.transient_dim = r.positive_recurrent_dim_defect;
  return r;
}

}  // namespace gqms
