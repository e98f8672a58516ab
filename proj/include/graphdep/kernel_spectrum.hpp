#pragma once

#include <Eigen/Dense>

#include "graphdep/dist_pairs.hpp"

namespace graphdep {

/// Spectrum of the likelihood kernel operator for a finite-alphabet pair.
///
/// M(x,y) = P(x,y)/Q(x) is row-stochastic; its eigenvalues are computed from
/// the symmetric conjugate D^{1/2} M D^{-1/2} with D = diag(Q). Entry 0 of
/// `eigenvalues` is the eigenvalue carried by the all-ones eigenvector
/// (identically 1); the rest are ordered by decreasing magnitude with their
/// signs retained. Immutable after build.
struct KernelSpectrum {
  int alphabet_size = 0;
  Eigen::MatrixXd transition;   // M, row-stochastic
  Eigen::VectorXd eigenvalues;  // lambda_0 = 1 first, then |.|-descending

  /// sum_{i>=1} lambda_i^p (the proof's ||lambda||_p with even p).
  double p_norm(int p) const;

  /// sum_i lambda_i^{2*orbit_length} = trace(L^{2|O|}); includes lambda_0.
  double orbit_moment(int orbit_length) const;

  /// ||lambda||_2 = sum_{i>=1} lambda_i^2 = chi^2(P||Q).
  double chi2_from_spectrum() const { return p_norm(2); }
};

KernelSpectrum build_spectrum(const DistributionPair& pair);

/// Free-function form of the orbit moment.
double orbit_moment(const KernelSpectrum& spectrum, int orbit_length);

/// Finite-alphabet stand-in for a continuous or integer-support pair.
/// Continuous marginals are cut at `cells` quantile edges and the joint
/// mass of each rectangle is integrated; integer support is truncated where
/// the tail mass is negligible. The joint is symmetrized before use, which
/// is exact for exchangeable pairs; `asymmetry` reports the largest
/// pre-symmetrization gap so the approximation is visible to callers.
struct TabularSurrogate {
  DistributionPair pair;
  double asymmetry;    // max |J - J^T| before symmetrization
  double mass_defect;  // |1 - sum J| before normalization
};

TabularSurrogate to_tabular(const DistributionPair& pair, int cells = 64);

/// build_spectrum(to_tabular(pair, cells).pair) in one step.
KernelSpectrum build_spectrum_discretized(const DistributionPair& pair,
                                          int cells = 64);

}  // namespace graphdep
