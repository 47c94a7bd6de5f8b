#pragma once

// Spectral classification of a drift matrix and the invariant subspaces
// built from it.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gqms/linalg.hpp"
#include "gqms/types.hpp"

namespace gqms {

/// Group of numerically coincident eigenvalues.
struct EigenCluster {
  Complex mean;
  Index multiplicity = 0;
  std::vector<Index> members;  // indices into SpectrumReport::eigenvalues
};

struct SpectrumReport {
  std::vector<Complex> eigenvalues;  // sorted: real part descending, then imaginary part descending
  std::vector<Index> class_negative;
  std::vector<Index> class_imaginary;
  std::vector<Index> class_positive;
  std::vector<EigenCluster> imaginary_clusters;
  bool satisfies_H2 = true;
  bool imaginary_semisimple = true;
  double imaginary_threshold = 0.0;
  double cluster_radius = 0.0;
};

/// Eigenvalues closer than this (relative to 1 + ‖Z‖) are treated as one
/// cluster; perturbed Jordan blocks split by about sqrt(eps).
inline constexpr double kClusterRadius = 1e-5;

namespace detail {

// Classification for any square matrix; the public entry point adds the
// phase-space shape checks.
inline SpectrumReport classify_square(const Matrix& z, double tol) {
  if (z.rows() != z.cols()) throw DimensionError("classify_spectrum: matrix is not square");
  const Index n = z.rows();
  Eigen::EigenSolver<Matrix> es(z, false);
  if (es.info() != Eigen::Success) throw NumericalError("classify_spectrum: eigen-solver did not converge");
  SpectrumReport rep;
  for (Index i = 0; i < n; ++i) rep.eigenvalues.push_back(es.eigenvalues()(i));
  std::stable_sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](Complex a, Complex b) {
    if (a.real() != b.real()) return a.real() > b.real();
    return a.imag() > b.imag();
  });
  const double zn = frob(z);
  rep.imaginary_threshold = tol * (1.0 + zn);
  rep.cluster_radius = kClusterRadius * (1.0 + zn);

  // single-linkage clustering
  std::vector<Index> parent(n);
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (std::abs(rep.eigenvalues[i] - rep.eigenvalues[j]) <= rep.cluster_radius) parent[find(i)] = find(j);
  std::vector<EigenCluster> clusters;
  std::vector<Index> cluster_of(n, -1);
  for (Index i = 0; i < n; ++i) {
    const Index r = find(i);
    if (cluster_of[r] < 0) {
      cluster_of[r] = static_cast<Index>(clusters.size());
      clusters.emplace_back();
    }
    clusters[cluster_of[r]].members.push_back(i);
  }
  for (auto& c : clusters) {
    Complex s = 0.0;
    for (Index i : c.members) s += rep.eigenvalues[i];
    c.multiplicity = static_cast<Index>(c.members.size());
    c.mean = s / static_cast<double>(c.multiplicity);
  }

  for (const auto& c : clusters) {
    const double re = c.mean.real();
    std::vector<Index>* target = &rep.class_negative;
    if (std::abs(re) <= rep.imaginary_threshold) {
      target = &rep.class_imaginary;
      EigenCluster ic = c;
      ic.mean = Complex(0.0, c.mean.imag());
      rep.imaginary_clusters.push_back(ic);
    } else if (re > 0.0) {
      target = &rep.class_positive;
    }
    target->insert(target->end(), c.members.begin(), c.members.end());
  }
  for (auto* v : {&rep.class_negative, &rep.class_imaginary, &rep.class_positive}) std::sort(v->begin(), v->end());
  std::sort(rep.imaginary_clusters.begin(), rep.imaginary_clusters.end(),
            [](const EigenCluster& a, const EigenCluster& b) { return a.mean.imag() > b.mean.imag(); });
  rep.satisfies_H2 = rep.class_positive.empty();

  const CMatrix zc = z.cast<Complex>();
  for (const auto& c : rep.imaginary_clusters) {
    const CMatrix shifted = zc - c.mean * CMatrix::Identity(n, n);
    const double cut = linalg::rank_cutoff(linalg::max_singular_value(shifted), tol);
    const Index nullity = linalg::null_space(shifted, cut).cols();
    if (nullity != c.multiplicity) rep.imaginary_semisimple = false;
  }
  return rep;
}

}  // namespace detail

inline SpectrumReport classify_spectrum(const Matrix& z, double tol = kDefaultTol) {
  require_square_even(z, "classify_spectrum");
  require_finite(z, "classify_spectrum");
  return detail::classify_square(z, tol);
}

/// Real bases of the imaginary-spectrum subspace V0 and the stable subspace V-.
struct SpectralSplit {
  Matrix V0_basis;
  Matrix Vminus_basis;
  std::vector<double> angles;  // non-negative, descending, with multiplicity
  Index d0() const { return V0_basis.cols() / 2; }
};

namespace detail {

inline bool near_cluster(const SpectrumReport& rep, Complex lambda) {
  for (const auto& c : rep.imaginary_clusters) {
    if (std::abs(lambda - c.mean) <= rep.cluster_radius) return true;
  }
  return false;
}

}  // namespace detail

inline SpectralSplit invariant_splitting(const Matrix& z, double tol = kDefaultTol) {
  const SpectrumReport rep = classify_spectrum(z, tol);
  if (!rep.satisfies_H2)
    throw PreconditionError("invariant_splitting: H2_violated (eigenvalue with positive real part)");
  if (!rep.imaginary_semisimple)
    throw PreconditionError("invariant_splitting: imaginary_not_semisimple (Jordan block on the imaginary axis)");
  SpectralSplit split;
  auto imaginary = [&](Complex l) { return detail::near_cluster(rep, l); };
  auto stable = [&](Complex l) { return !detail::near_cluster(rep, l); };
  split.V0_basis = linalg::spectral_subspace(z, imaginary);
  split.Vminus_basis = linalg::spectral_subspace(z, stable);
  for (const auto& c : rep.imaginary_clusters) {
    const double phi = c.mean.imag();
    if (phi > rep.imaginary_threshold) {
      for (Index k = 0; k < c.multiplicity; ++k) split.angles.push_back(phi);
    } else if (phi >= -rep.imaginary_threshold) {
      for (Index k = 0; k < c.multiplicity / 2; ++k) split.angles.push_back(0.0);
    }
  }
  std::stable_sort(split.angles.begin(), split.angles.end(), std::greater<double>());
  return split;
}

/// Largest Z-invariant subspace contained in ker C.
inline Matrix df_subspace_general(const Matrix& z, const Matrix& c, double tol = kDefaultTol) {
  require_square_even(z, "df_subspace_general");
  if (c.rows() != z.rows() || c.cols() != z.cols()) throw DimensionError("df_subspace_general: C shape does not match Z");
  return linalg::largest_invariant_in_kernel<Matrix>(z, c, tol, frob(z) + frob(c));
}

/// Subspaces agree when each lies inside the other within this principal-angle sine.
inline constexpr double kSubspaceTol = 1e-6;

inline bool check_perif(const Matrix& z, const Matrix& c, const SpectralSplit& split, double tol = kDefaultTol) {
  const double scale = std::max(1.0, frob(c));
  if (split.V0_basis.cols() > 0 && frob(c * split.V0_basis) > tol * scale * std::sqrt(static_cast<double>(split.V0_basis.cols()))) {
    return false;
  }
  const Matrix n = df_subspace_general(z, c, tol);
  if (n.cols() != split.V0_basis.cols()) return false;
  if (n.cols() == 0) return true;
  const Matrix v0 = linalg::range_space(split.V0_basis, 1e-12);
  return linalg::containment_residual(v0, n) <= kSubspaceTol && linalg::containment_residual(n, v0) <= kSubspaceTol;
}

}  // namespace gqms
