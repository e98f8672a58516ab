#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "graphdep/dist_pairs.hpp"

namespace graphdep {

enum class DivergenceKind { KlPq, KlQp, Chi2, Hellinger2, VarLlrP };
enum class EvalMethod { Auto, ClosedForm, Numeric };

struct ValueWithError {
  double value;
  double abs_error;
};

/// E_measure[h(a, b)] for the pair: exact summation on discrete supports,
/// nested adaptive Gauss-Kronrod on continuous ones.
ValueWithError expect_pair(const DistributionPair& pair, Hypothesis measure,
                           const std::function<double(double, double)>& h,
                           double abs_tol = 1e-10);

double divergence(const DistributionPair& pair, DivergenceKind which,
                  EvalMethod method = EvalMethod::Auto);
ValueWithError divergence_estimate(const DistributionPair& pair,
                                   DivergenceKind which,
                                   EvalMethod method = EvalMethod::Auto);

enum class WhichExponent { P, Q };

struct ExponentValue {
  double value;
  double argmax;
};

struct LegendreSample {
  double theta;
  double value;
  double argmax;
};

/// Log-MGFs of the single-letter LLR under P and Q with their finite domain,
/// plus the Chernoff exponents obtained as numerical Legendre transforms.
///
/// Construction (single-threaded) precomputes the divergences, the finite
/// domain of psi_Q and a Legendre table; afterwards the profile is
/// read-only and safe for concurrent evaluation.
class ExponentProfile {
 public:
  explicit ExponentProfile(DistributionPair pair);

  const DistributionPair& pair() const { return pair_; }

  /// +infinity outside the finite domain.
  double psi_q(double lambda) const;
  double psi_p(double lambda) const;
  std::pair<double, double> psi_q_domain() const { return domain_q_; }

  double kl_pq() const { return kl_pq_; }
  double kl_qp() const { return kl_qp_; }
  double var_llr_p() const { return var_llr_p_; }

  /// E(theta) = sup_lambda lambda*theta - psi(lambda), located by bracketing
  /// plus golden-section to |dlambda| < 1e-10. Returns +inf when the
  /// supremum is unbounded.
  ExponentValue exponent(WhichExponent which, double theta) const;

  /// Inverse of E on its increasing branch (theta >= kl_pq for E_P,
  /// theta >= -kl_qp for E_Q); bisection to |E(theta) - y| < 1e-9. At a
  /// discontinuity of E the generalized inverse (the jump point) is
  /// returned.
  double inverse_exponent(WhichExponent which, double y) const;

  /// C(P||Q) = sup_{lambda in [0,1]} -psi_Q(lambda).
  double chernoff_information() const;

  const std::vector<LegendreSample>& legendre_table(WhichExponent which) const;

 private:
  double psi_q_impl(double lambda) const;
  void build_mc_psi_grid();

  DistributionPair pair_;
  std::pair<double, double> domain_q_;
  double kl_pq_ = 0.0;
  double kl_qp_ = 0.0;
  double var_llr_p_ = 0.0;
  std::vector<LegendreSample> table_p_;
  std::vector<LegendreSample> table_q_;
  // Heavy-tailed members get a Monte Carlo psi on a [0,1] lambda grid (the
  // window that carries every maximizer inside the guarantee range); the
  // grid is interpolated and psi_accuracy_ reports its half-width.
  std::vector<double> mc_psi_grid_;
  double psi_accuracy_ = 0.0;
};

enum class Theorem1Form {
  Statement,      // chi2 <= (2-eps)log n/(alpha n)  and  KL + delta*Var <= (2-eps)log n/n
  ReducedD1,      // KL <= (2-eps)log n/n (the boiled-down condition for D1 pairs)
  ProofConstant,  // chi2 <= (2 log(alpha n)-4)/(alpha n) variant of the first condition
};

struct ConditionSide {
  double lhs;
  double rhs;
  bool holds;
};

struct Theorem1Report {
  bool holds;
  ConditionSide condition_a;  // chi-square side (or the reduced KL condition)
  ConditionSide condition_b;  // KL + delta_n * Var side
  Theorem1Form form;
};

/// Evaluates the impossibility conditions at finite n and reports each side.
Theorem1Report theorem1_condition(const DistributionPair& pair, int n,
                                  double alpha, double eps, double delta_n,
                                  Theorem1Form form = Theorem1Form::Statement);

enum class PairClass { D1, D2 };

struct ClassReport {
  bool holds;
  double worst_slack;     // min over checks of rhs - lhs (negative when violated)
  double max_violation;   // max over checks of lhs - rhs
};

/// D1: chi2 <= C * KL(P||Q). D2: the two quadratic log-MGF bounds checked on
/// a 201-point lambda grid over [-1, 1].
ClassReport class_membership(const DistributionPair& pair, PairClass which,
                             double C);

/// Smallest C from a doubling scan making the class inequality hold, or
/// a negative value when none up to c_max works.
double find_class_constant(const DistributionPair& pair, PairClass which,
                           double c_max = 1048576.0);

}  // namespace graphdep
