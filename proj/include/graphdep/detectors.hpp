#pragma once

#include "graphdep/dist_pairs.hpp"
#include "graphdep/info_metrics.hpp"
#include "graphdep/perm_graphs.hpp"
#include "graphdep/rng.hpp"

namespace graphdep {

/// Outcome of one test application. `permutations_scanned` is 0 for the
/// comparison test. Ties at the threshold decide 1 for LR and GLRT.
struct TestOutcome {
  int decision = 0;
  double statistic = 0.0;
  double threshold_used = 0.0;
  long permutations_scanned = 0;
};

inline constexpr int kDefaultExhaustiveCap = 9;

/// Bayes-optimal statistic: log of the permutation-averaged likelihood
/// ratio, accumulated with a max-shifted log-sum-exp. Decision 1 iff the
/// statistic reaches `threshold`. Throws capacity_error above the cap.
TestOutcome exact_lr_test(const DistributionPair& pair, const GraphPair& g,
                          double threshold, int cap = kDefaultExhaustiveCap);

/// GLRT statistic: max over permutations of the edge-averaged LLR sum.
TestOutcome glrt(const DistributionPair& pair, const GraphPair& g, double tau,
                 int cap = kDefaultExhaustiveCap);

/// Heuristic GLRT for n above the exhaustive cap: random-restart hill
/// climbing over transpositions. No optimality guarantee; the statistic is
/// a lower bound on the true maximum.
TestOutcome glrt_local_search(const DistributionPair& pair, const GraphPair& g,
                              double tau, int restarts, RngStream& rng);

enum class GlrtThresholdRule { Zero, D2Rule, Custom };

struct GlrtThresholdReport {
  double tau = 0.0;
  bool in_guarantee_range = false;  // tau in (-KL(Q||P), KL(P||Q))
  // E_Q(tau) >= 2log(n/e)/(n-1) + 2(1+log n)/(n(n-1)) side
  ConditionSide type1_condition{};
  // E_P(tau) side; the asymptotic omega(n^{-2}) is proxied by 1/n^2
  ConditionSide type2_condition{};
  bool premises_hold = false;
  double chernoff_information = 0.0;    // E_Q(0) lower bound scale
  double hellinger_lower_bound = 0.0;   // -log(1 - H^2/2)
};

/// Threshold selection plus an evaluation of the strong-detection premises
/// at that threshold. For D2Rule pass the verified class constant C.
GlrtThresholdReport glrt_threshold(const ExponentProfile& profile, int n,
                                   GlrtThresholdRule rule, double d2_constant = 0.0,
                                   double custom_tau = 0.0);

/// Linear-time comparison test on T = sum_{i<j}(A_ij - B_ij): accepts H1
/// when |T| <= theta for positively correlated pairs, with the inequality
/// flipped for negative correlation.
TestOutcome comparison_test(const DistributionPair& pair, const GraphPair& g,
                            double theta);

/// theta = z_{1-level/2} * sqrt(n(n-1) Var_Q(A) (1 - |corr|)): the H1
/// Gaussian surrogate accepts with probability 1-level.
double comparison_threshold(const DistributionPair& pair, int n, double level);

}  // namespace graphdep
