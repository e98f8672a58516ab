#pragma once

#include <optional>
#include <vector>

#include "graphdep/dist_pairs.hpp"
#include "graphdep/polynomial.hpp"

namespace graphdep {

enum class FamilyTag {
  HermiteType,
  KrawtchoukType,
  CharlierType,
  LaguerreType,
  GramGenerated,
};

/// Orthonormal polynomials of a null marginal: P_0 = 1, deg(P_l) = l,
/// E[P_i P_j] = delta_ij. Built by Gram-Schmidt on the moment (Hankel)
/// matrix; the tag records which classical family this corresponds to.
struct PolynomialFamily {
  FamilyTag tag = FamilyTag::GramGenerated;
  int max_degree = 0;
  std::vector<Poly> polys;

  double evaluate(int degree, double x) const { return poly_eval(polys[degree], x); }
};

/// Throws numeric_error (degree too high) when the Gram matrix condition
/// number exceeds 1e12, e.g. beyond the rank of a finite alphabet.
PolynomialFamily build_family(const DistributionPair& pair, int max_degree);

/// Coefficients of a |-> E[B^order | A=a] for kinds where the conditional
/// moment is an explicit polynomial; nullopt for tabular pairs and the
/// Cauchy member.
std::optional<Poly> conditional_moment_poly(const DistributionPair& pair,
                                            int order);

/// E_P[f(A) g(B)] by exact summation (discrete) or exact conditional-moment
/// algebra (Gaussian, Poisson, ChiSquare).
double pair_moment(const DistributionPair& pair, const Poly& f, const Poly& g);

/// Coefficients of a |-> E[P_degree(B) | A=a].
Poly conditional_family_poly(const DistributionPair& pair,
                             const PolynomialFamily& family, int degree);

struct KappaReport {
  /// kappa_l = E_P[P_l(A) P_l(B)]; zero beyond the alphabet rank.
  std::vector<double> kappa;
  /// Leading coefficient of E[B^l | A=a] read off symbolically; NaN when no
  /// conditional-moment polynomial exists for the kind.
  std::vector<double> kappa_leading;
  double max_cross_moment = 0.0;
  /// The Bernoulli construction reports kappa_l = 0 for all l >= 1 under
  /// the leading-coefficient bookkeeping even though the two-point family
  /// gives kappa_1 = corr; set when the two conventions disagree.
  bool appendix_convention_differs = false;
};

/// Throws not_in_d3_error when any cross moment E[P_l(A) P_m(B)], l != m,
/// exceeds cross_tol.
KappaReport kappa_coefficients(const DistributionPair& pair,
                               const PolynomialFamily& family, int max_degree,
                               double cross_tol = 1e-6);

/// (|corr| D^2)^2 * exp(|corr| D) * exp(|corr| D^2).
double theorem4_bound(double corr, int degree);

/// Exact squared norm of the degree-<=D projection of L_n: enumerates all
/// integer edge-weight matrices alpha, beta with |alpha|+|beta| <= D and
/// averages the kappa-weighted match indicator over S_n. n in [2,5],
/// D in [0,4]. Always >= 1.
double exact_ldp_norm(const DistributionPair& pair, int n, int degree);

}  // namespace graphdep
