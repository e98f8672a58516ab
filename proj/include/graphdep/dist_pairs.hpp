#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

#include "graphdep/rng.hpp"

namespace graphdep {

enum class PairKind {
  Gaussian,
  Bernoulli,
  Poisson,
  ChiSquare,
  StableGaussian,
  StableCauchy,
  DiscreteTabular,
};

enum class Support { ContinuousReal, NonnegativeInteger, FiniteAlphabet };

enum class Hypothesis { Null, Planted };

struct GaussianParams {
  double rho;
  double scale;
};
struct BernoulliParams {
  double p;
  double tau;
};
struct PoissonParams {
  double lambda;
  double rho;
};
struct ChiSquareParams {
  double dof;
  double rho;
};
struct CauchyParams {
  double rho;
  double scale;
};

/// A null product law Q = marginal x marginal together with a planted joint
/// law P sharing the same marginals. Exposes sampling under both hypotheses,
/// the log likelihood ratio of the pair, and the Pearson correlation.
///
/// Values are immutable after construction and safe to share across threads.
class DistributionPair {
 public:
  static DistributionPair gaussian(double rho, double scale = 1.0);
  static DistributionPair bernoulli(double p, double tau);
  static DistributionPair poisson(double lambda, double rho);
  static DistributionPair chi_square(double dof, double rho);
  static DistributionPair stable_gaussian(double rho, double scale = 1.0);
  static DistributionPair stable_cauchy(double rho, double scale = 1.0);
  static DistributionPair tabular(Eigen::MatrixXd joint);
  /// Product pair P = Q built from one marginal mass vector (the exact
  /// "no effect" pair; its LLR is identically zero).
  static DistributionPair tabular_product(const Eigen::VectorXd& marginal);

  /// Parse a plain-text spec like "gaussian rho=0.2" or
  /// "bernoulli p=0.1 tau=0.3" or "tabular file=joint.txt".
  static DistributionPair parse(std::string_view text);
  /// Read a DiscreteTabular joint from a stream: header "rows=<m> cols=<m>"
  /// followed by m*m whitespace-separated probabilities.
  static DistributionPair read_tabular(std::istream& in);

  PairKind kind() const { return kind_; }
  Support support() const { return support_; }
  std::string describe() const;

  /// One draw of (a, b): independent marginals under Null, the joint law
  /// under Planted. Deterministic given the stream state.
  std::pair<double, double> sample(Hypothesis h, RngStream& rng) const;
  double sample_marginal(RngStream& rng) const;

  /// log P(a,b) - log Q(a,b). Returns -inf where the planted density
  /// vanishes on the null support; throws support_error off-support.
  double llr(double a, double b) const;
  double likelihood_ratio(double a, double b) const;

  /// cov_P(A,B) / Var_Q(A); throws unsupported_moment_error when the
  /// marginal variance does not exist (Cauchy member).
  double corr() const;
  double null_marginal_mean() const;
  double null_marginal_variance() const;

  // Finite-alphabet access (Bernoulli / DiscreteTabular).
  int alphabet_size() const;
  const Eigen::MatrixXd& joint_table() const;
  const Eigen::VectorXd& marginal_masses() const;

  // Density/CDF plumbing used by quadrature, discretization and tests.
  double marginal_log_pdf(double x) const;
  double marginal_cdf(double x) const;
  double marginal_quantile(double u) const;
  double conditional_cdf(double b, double a) const;

  /// E[x^order] of the null marginal in closed form.
  double marginal_moment(int order) const;

  const GaussianParams* as_gaussian() const;
  const BernoulliParams* as_bernoulli() const;
  const PoissonParams* as_poisson() const;
  const ChiSquareParams* as_chi_square() const;
  const CauchyParams* as_cauchy() const;

  /// Truncation point K such that the Poisson marginal tail beyond K is
  /// below 1e-15 (nonnegative-integer support only).
  int integer_support_bound() const;

 private:
  struct TabularData {
    Eigen::MatrixXd joint;
    Eigen::VectorXd marginal;
    Eigen::VectorXd marginal_cdf;
    Eigen::VectorXd joint_cdf;  // flattened row-major
  };

  DistributionPair() = default;

  double llr_poisson(int a, int b) const;
  int check_symbol(double x) const;

  PairKind kind_ = PairKind::DiscreteTabular;
  Support support_ = Support::FiniteAlphabet;
  std::variant<GaussianParams, BernoulliParams, PoissonParams, ChiSquareParams,
               CauchyParams, std::monostate>
      params_ = std::monostate{};
  TabularData table_;  // populated for finite alphabets
};

std::string to_string(Hypothesis h);
Hypothesis hypothesis_from_string(std::string_view s);

}  // namespace graphdep
