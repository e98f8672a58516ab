#pragma once

#include <optional>
#include <vector>

#include "graphdep/dist_pairs.hpp"
#include "graphdep/info_metrics.hpp"
#include "graphdep/kernel_spectrum.hpp"

namespace graphdep {

struct CycleTypeContribution {
  std::vector<int> cycle_type;  // partition of n, descending
  double multiplicity;          // number of permutations of this type
  double orbit_product;         // prod_k (sum_i lambda_i^{2k})^{N_k}
};

struct SecondMomentReport {
  int n = 0;
  double value_formula = 0.0;
  std::optional<double> value_oracle;
  std::vector<CycleTypeContribution> per_cycle_type;
};

/// E_{H0}[L_n^2] by averaging the orbit-moment product over the cycle types
/// of sigma with multinomial multiplicities. n in [2, 8].
SecondMomentReport second_moment_exact(const KernelSpectrum& spectrum, int n);

/// Same expectation by raw enumeration of S_n (n in [2, 6]); exists to
/// cross-check the cycle-type path.
double second_moment_exact_exhaustive(const KernelSpectrum& spectrum, int n);

/// Brute force over every weight assignment of both graphs: sum of
/// Q(A,B) * L_n(A,B)^2 with L_n averaged over all permutations. Entirely
/// independent of the spectral path. Guarded by m^{2 n(n-1)/2} <= 1e8.
double second_moment_oracle(const DistributionPair& pair, int n);

struct TruncationReport {
  double zeta_k = 0.0;        // C(k,2) * E_P^{-1}(2 log(2en/k)/(k-1))
  double zeta_bar = 0.0;      // E_P^{-1}(2 log(2 alpha e)/(alpha n - 1))
  double level_k = 0.0;       // argument handed to E_P^{-1} for zeta(k)
  double level_bar = 0.0;
  ConditionSide condition5{};  // zeta_bar <= (2 log n - 4)/n
  // Maclaurin pieces of the zeta_bar bound, reported without committing to
  // the remainder constant: KL + [2 log(2 alpha e)]/(lambda (alpha n - 1))
  // as the first-order value, lambda * Var_P(LLR) as the second-order term,
  // with lambda = 1/sqrt(log n).
  double first_order = 0.0;
  double second_order_correction = 0.0;
};

TruncationReport truncation_level(const ExponentProfile& profile, int n, int k,
                                  double alpha = 0.5);

}  // namespace graphdep
