#include "graphdep/dist_pairs.hpp"

#include <algorithm>
#include <boost/math/distributions/cauchy.hpp>
#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/poisson.hpp>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <sstream>

#include "graphdep/errors.hpp"
#include "graphdep/polynomial.hpp"

namespace graphdep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kMarginalTol = 1e-12;

double log_poisson_pmf(int k, double mean) {
  if (k < 0) return -kInf;
  return k * std::log(mean) - mean - std::lgamma(k + 1.0);
}

double log_gamma_pdf(double x, double shape, double scale) {
  if (x <= 0.0) return -kInf;
  return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
         shape * std::log(scale);
}

double log_cauchy_pdf(double x, double scale) {
  return std::log(scale) - std::log(kPi) - std::log(x * x + scale * scale);
}

double log_normal_pdf(double x, double sigma) {
  const double z = x / sigma;
  return -0.5 * z * z - 0.5 * std::log(2.0 * kPi) - std::log(sigma);
}

Eigen::VectorXd cumulative(const Eigen::VectorXd& w) {
  Eigen::VectorXd c(w.size());
  double acc = 0.0;
  for (Eigen::Index i = 0; i < w.size(); ++i) {
    acc += w[i];
    c[i] = acc;
  }
  return c;
}

int inverse_cdf_index(const Eigen::VectorXd& cdf, double u) {
  const auto* begin = cdf.data();
  const auto* end = cdf.data() + cdf.size();
  const auto* it = std::lower_bound(begin, end, u);
  if (it == end) --it;
  return static_cast<int>(it - begin);
}

}  // namespace

DistributionPair DistributionPair::gaussian(double rho, double scale) {
  if (!(std::abs(rho) > 0.0) || !(std::abs(rho) < 1.0))
    throw parameter_error("gaussian: require 0 < |rho| < 1");
  if (!(scale > 0.0)) throw parameter_error("gaussian: scale must be positive");
  DistributionPair pair;
  pair.kind_ = PairKind::Gaussian;
  pair.support_ = Support::ContinuousReal;
  pair.params_ = GaussianParams{rho, scale};
  return pair;
}

DistributionPair DistributionPair::stable_gaussian(double rho, double scale) {
  DistributionPair pair = gaussian(rho, scale);
  pair.kind_ = PairKind::StableGaussian;
  return pair;
}

DistributionPair DistributionPair::stable_cauchy(double rho, double scale) {
  if (!(std::abs(rho) > 0.0) || !(std::abs(rho) < 1.0))
    throw parameter_error("stable_cauchy: require 0 < |rho| < 1");
  if (!(scale > 0.0))
    throw parameter_error("stable_cauchy: scale must be positive");
  DistributionPair pair;
  pair.kind_ = PairKind::StableCauchy;
  pair.support_ = Support::ContinuousReal;
  pair.params_ = CauchyParams{rho, scale};
  return pair;
}

DistributionPair DistributionPair::bernoulli(double p, double tau) {
  if (!(p > 0.0) || p > 1.0) throw parameter_error("bernoulli: require 0 < p <= 1");
  if (tau < 0.0 || tau > 1.0) throw parameter_error("bernoulli: require tau in [0,1]");
  if (!(tau * p < 1.0)) throw parameter_error("bernoulli: require tau*p < 1 strictly");
  const double q = tau * p;
  Eigen::MatrixXd joint(2, 2);
  joint(1, 1) = q * tau;
  joint(1, 0) = q * (1.0 - tau);
  joint(0, 1) = q * (1.0 - tau);
  joint(0, 0) = 1.0 - 2.0 * q + q * tau;
  DistributionPair pair = tabular(std::move(joint));
  pair.kind_ = PairKind::Bernoulli;
  pair.params_ = BernoulliParams{p, tau};
  return pair;
}

DistributionPair DistributionPair::poisson(double lambda, double rho) {
  if (!(lambda > 0.0)) throw parameter_error("poisson: lambda must be positive");
  if (rho < 0.0 || !(rho < 1.0))
    throw parameter_error("poisson: require rho in [0,1)");
  DistributionPair pair;
  pair.kind_ = PairKind::Poisson;
  pair.support_ = Support::NonnegativeInteger;
  pair.params_ = PoissonParams{lambda, rho};
  return pair;
}

DistributionPair DistributionPair::chi_square(double dof, double rho) {
  if (!(dof > 0.0)) throw parameter_error("chi_square: dof must be positive");
  if (rho < 0.0 || !(rho < 1.0))
    throw parameter_error("chi_square: require rho in [0,1)");
  DistributionPair pair;
  pair.kind_ = PairKind::ChiSquare;
  pair.support_ = Support::ContinuousReal;
  pair.params_ = ChiSquareParams{dof, rho};
  return pair;
}

DistributionPair DistributionPair::tabular(Eigen::MatrixXd joint) {
  if (joint.rows() != joint.cols() || joint.rows() < 1)
    throw parameter_error("tabular: joint table must be square and nonempty");
  if ((joint.array() < 0.0).any())
    throw parameter_error("tabular: joint table entries must be nonnegative");
  const double total = joint.sum();
  if (std::abs(total - 1.0) > kMarginalTol)
    throw parameter_error("tabular: joint table must sum to 1");
  const Eigen::VectorXd rows = joint.rowwise().sum();
  const Eigen::VectorXd cols = joint.colwise().sum();
  if ((rows - cols).lpNorm<Eigen::Infinity>() > kMarginalTol)
    throw parameter_error("tabular: row and column marginals must agree");

  DistributionPair pair;
  pair.kind_ = PairKind::DiscreteTabular;
  pair.support_ = Support::FiniteAlphabet;
  pair.table_.joint = std::move(joint);
  pair.table_.marginal = rows;
  pair.table_.marginal_cdf = cumulative(rows);
  Eigen::VectorXd flat(pair.table_.joint.size());
  Eigen::Index k = 0;
  for (Eigen::Index i = 0; i < pair.table_.joint.rows(); ++i)
    for (Eigen::Index j = 0; j < pair.table_.joint.cols(); ++j)
      flat[k++] = pair.table_.joint(i, j);
  pair.table_.joint_cdf = cumulative(flat);
  return pair;
}

DistributionPair DistributionPair::tabular_product(
    const Eigen::VectorXd& marginal) {
  if (marginal.size() < 1 || (marginal.array() < 0.0).any())
    throw parameter_error("tabular_product: invalid marginal");
  const double total = marginal.sum();
  if (std::abs(total - 1.0) > kMarginalTol)
    throw parameter_error("tabular_product: marginal must sum to 1");
  return tabular(marginal * marginal.transpose());
}

std::pair<double, double> DistributionPair::sample(Hypothesis h,
                                                   RngStream& rng) const {
  if (h == Hypothesis::Null) {
    const double a = sample_marginal(rng);
    const double b = sample_marginal(rng);
    return {a, b};
  }
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian: {
      const auto& g = std::get<GaussianParams>(params_);
      const double a = g.scale * rng.normal();
      const double b = g.rho * a +
                       g.scale * std::sqrt(1.0 - g.rho * g.rho) * rng.normal();
      return {a, b};
    }
    case PairKind::StableCauchy: {
      const auto& c = std::get<CauchyParams>(params_);
      const double a = rng.cauchy(c.scale);
      const double b = c.rho * a + rng.cauchy((1.0 - std::abs(c.rho)) * c.scale);
      return {a, b};
    }
    case PairKind::Poisson: {
      const auto& p = std::get<PoissonParams>(params_);
      const int a = rng.poisson(p.lambda);
      const int b = rng.binomial(a, p.rho) + rng.poisson((1.0 - p.rho) * p.lambda);
      return {static_cast<double>(a), static_cast<double>(b)};
    }
    case PairKind::ChiSquare: {
      const auto& c = std::get<ChiSquareParams>(params_);
      const double a = rng.chi_square(c.dof);
      const double b = c.rho * a + rng.gamma((1.0 - c.rho) * c.dof * 0.5, 2.0);
      return {a, b};
    }
    case PairKind::Bernoulli:
    case PairKind::DiscreteTabular: {
      const int m = alphabet_size();
      const int cell = inverse_cdf_index(table_.joint_cdf, rng.uniform01());
      return {static_cast<double>(cell / m), static_cast<double>(cell % m)};
    }
  }
  throw error("sample: unreachable");
}

double DistributionPair::sample_marginal(RngStream& rng) const {
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian:
      return std::get<GaussianParams>(params_).scale * rng.normal();
    case PairKind::StableCauchy:
      return rng.cauchy(std::get<CauchyParams>(params_).scale);
    case PairKind::Poisson:
      return rng.poisson(std::get<PoissonParams>(params_).lambda);
    case PairKind::ChiSquare:
      return rng.chi_square(std::get<ChiSquareParams>(params_).dof);
    case PairKind::Bernoulli:
    case PairKind::DiscreteTabular:
      return inverse_cdf_index(table_.marginal_cdf, rng.uniform01());
  }
  throw error("sample_marginal: unreachable");
}

int DistributionPair::check_symbol(double x) const {
  const double r = std::round(x);
  if (std::abs(x - r) > 1e-9 || r < 0.0 || r >= alphabet_size())
    throw support_error("symbol outside the finite alphabet");
  return static_cast<int>(r);
}

double DistributionPair::llr_poisson(int a, int b) const {
  const auto& p = std::get<PoissonParams>(params_);
  if (p.rho == 0.0) return 0.0;
  // The joint law is exchangeable; evaluate at (min, max) so the identity
  // llr(a,b) == llr(b,a) holds bit-for-bit.
  const int lo = std::min(a, b);
  const int hi = std::max(a, b);
  const double log_rho = std::log(p.rho);
  const double log_1mrho = std::log1p(-p.rho);
  const double mean_rest = (1.0 - p.rho) * p.lambda;
  // log sum_j Binom(j; lo, rho) Poi(hi - j; (1-rho)lambda), max-shifted.
  double max_term = -kInf;
  std::vector<double> terms(lo + 1);
  for (int j = 0; j <= lo; ++j) {
    const double t = std::lgamma(lo + 1.0) - std::lgamma(j + 1.0) -
                     std::lgamma(lo - j + 1.0) + j * log_rho +
                     (lo - j) * log_1mrho + log_poisson_pmf(hi - j, mean_rest);
    terms[j] = t;
    max_term = std::max(max_term, t);
  }
  if (max_term == -kInf) return -kInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - max_term);
  return max_term + std::log(acc) - log_poisson_pmf(hi, p.lambda);
}

double DistributionPair::llr(double a, double b) const {
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian: {
      const auto& g = std::get<GaussianParams>(params_);
      if (!std::isfinite(a) || !std::isfinite(b))
        throw support_error("gaussian llr: arguments must be finite");
      const double u = a / g.scale;
      const double v = b / g.scale;
      const double r2 = g.rho * g.rho;
      // group the symmetric products first so llr(a,b) == llr(b,a) exactly
      const double cross = u * v;
      const double squares = u * u + v * v;
      return -0.5 * std::log1p(-r2) +
             (2.0 * g.rho * cross - r2 * squares) / (2.0 * (1.0 - r2));
    }
    case PairKind::StableCauchy: {
      const auto& c = std::get<CauchyParams>(params_);
      if (!std::isfinite(a) || !std::isfinite(b))
        throw support_error("cauchy llr: arguments must be finite");
      const double c2 = 1.0 - std::abs(c.rho);
      return log_cauchy_pdf(b - c.rho * a, c2 * c.scale) -
             log_cauchy_pdf(b, c.scale);
    }
    case PairKind::Poisson: {
      const double ra = std::round(a);
      const double rb = std::round(b);
      if (std::abs(a - ra) > 1e-9 || std::abs(b - rb) > 1e-9 || ra < 0 || rb < 0)
        throw support_error("poisson llr: arguments must be nonnegative integers");
      return llr_poisson(static_cast<int>(ra), static_cast<int>(rb));
    }
    case PairKind::ChiSquare: {
      const auto& c = std::get<ChiSquareParams>(params_);
      if (!(a > 0.0) || !(b > 0.0))
        throw support_error("chi_square llr: arguments must be positive");
      if (c.rho == 0.0) return 0.0;
      const double z = b - c.rho * a;
      if (z <= 0.0) return -kInf;  // planted density vanishes here
      return log_gamma_pdf(z, (1.0 - c.rho) * c.dof * 0.5, 2.0) -
             log_gamma_pdf(b, c.dof * 0.5, 2.0);
    }
    case PairKind::Bernoulli:
    case PairKind::DiscreteTabular: {
      const int x = check_symbol(a);
      const int y = check_symbol(b);
      const double qx = table_.marginal[x];
      const double qy = table_.marginal[y];
      if (qx <= 0.0 || qy <= 0.0)
        throw support_error("tabular llr: zero-mass symbol");
      const double joint = table_.joint(x, y);
      if (joint <= 0.0) return -kInf;
      // single log of the ratio: exactly zero for product tables and
      // exactly symmetric for symmetric ones
      return std::log(joint / (qx * qy));
    }
  }
  throw error("llr: unreachable");
}

double DistributionPair::likelihood_ratio(double a, double b) const {
  return std::exp(llr(a, b));
}

double DistributionPair::corr() const {
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian:
      return std::get<GaussianParams>(params_).rho;
    case PairKind::StableCauchy:
      throw unsupported_moment_error(
          "corr: Cauchy member has no finite variance");
    case PairKind::Poisson:
      return std::get<PoissonParams>(params_).rho;
    case PairKind::ChiSquare:
      return std::get<ChiSquareParams>(params_).rho;
    case PairKind::Bernoulli: {
      const auto& bp = std::get<BernoulliParams>(params_);
      return bp.tau * (1.0 - bp.p) / (1.0 - bp.tau * bp.p);
    }
    case PairKind::DiscreteTabular: {
      const double mean = marginal_moment(1);
      const double var = marginal_moment(2) - mean * mean;
      if (!(var > 0.0))
        throw unsupported_moment_error("corr: degenerate marginal variance");
      double exy = 0.0;
      const int m = alphabet_size();
      for (int x = 0; x < m; ++x)
        for (int y = 0; y < m; ++y) exy += table_.joint(x, y) * x * y;
      return (exy - mean * mean) / var;
    }
  }
  throw error("corr: unreachable");
}

double DistributionPair::null_marginal_mean() const { return marginal_moment(1); }

double DistributionPair::null_marginal_variance() const {
  const double m1 = marginal_moment(1);
  return marginal_moment(2) - m1 * m1;
}

int DistributionPair::alphabet_size() const {
  if (support_ != Support::FiniteAlphabet)
    throw support_error("alphabet_size: pair is not finite-alphabet");
  return static_cast<int>(table_.joint.rows());
}

const Eigen::MatrixXd& DistributionPair::joint_table() const {
  if (support_ != Support::FiniteAlphabet)
    throw support_error("joint_table: pair is not finite-alphabet");
  return table_.joint;
}

const Eigen::VectorXd& DistributionPair::marginal_masses() const {
  if (support_ != Support::FiniteAlphabet)
    throw support_error("marginal_masses: pair is not finite-alphabet");
  return table_.marginal;
}

double DistributionPair::marginal_log_pdf(double x) const {
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian:
      return log_normal_pdf(x, std::get<GaussianParams>(params_).scale);
    case PairKind::StableCauchy:
      return log_cauchy_pdf(x, std::get<CauchyParams>(params_).scale);
    case PairKind::Poisson: {
      const double r = std::round(x);
      if (std::abs(x - r) > 1e-9 || r < 0) return -kInf;
      return log_poisson_pmf(static_cast<int>(r),
                             std::get<PoissonParams>(params_).lambda);
    }
    case PairKind::ChiSquare:
      return log_gamma_pdf(x, std::get<ChiSquareParams>(params_).dof * 0.5, 2.0);
    case PairKind::Bernoulli:
    case PairKind::DiscreteTabular: {
      const int i = check_symbol(x);
      const double q = table_.marginal[i];
      return q > 0.0 ? std::log(q) : -kInf;
    }
  }
  throw error("marginal_log_pdf: unreachable");
}

double DistributionPair::marginal_cdf(double x) const {
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian: {
      boost::math::normal_distribution<double> d(
          0.0, std::get<GaussianParams>(params_).scale);
      return boost::math::cdf(d, x);
    }
    case PairKind::StableCauchy: {
      boost::math::cauchy_distribution<double> d(
          0.0, std::get<CauchyParams>(params_).scale);
      return boost::math::cdf(d, x);
    }
    case PairKind::ChiSquare: {
      boost::math::gamma_distribution<double> d(
          std::get<ChiSquareParams>(params_).dof * 0.5, 2.0);
      return x <= 0.0 ? 0.0 : boost::math::cdf(d, x);
    }
    case PairKind::Poisson: {
      boost::math::poisson_distribution<double> d(
          std::get<PoissonParams>(params_).lambda);
      return x < 0.0 ? 0.0 : boost::math::cdf(d, std::floor(x));
    }
    case PairKind::Bernoulli:
    case PairKind::DiscreteTabular: {
      double acc = 0.0;
      for (int i = 0; i < alphabet_size() && i <= std::floor(x); ++i)
        acc += table_.marginal[i];
      return acc;
    }
  }
  throw error("marginal_cdf: unreachable");
}

double DistributionPair::marginal_quantile(double u) const {
  if (!(u > 0.0) || !(u < 1.0))
    throw parameter_error("marginal_quantile: u must lie in (0,1)");
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian: {
      boost::math::normal_distribution<double> d(
          0.0, std::get<GaussianParams>(params_).scale);
      return boost::math::quantile(d, u);
    }
    case PairKind::StableCauchy: {
      boost::math::cauchy_distribution<double> d(
          0.0, std::get<CauchyParams>(params_).scale);
      return boost::math::quantile(d, u);
    }
    case PairKind::ChiSquare: {
      boost::math::gamma_distribution<double> d(
          std::get<ChiSquareParams>(params_).dof * 0.5, 2.0);
      return boost::math::quantile(d, u);
    }
    case PairKind::Poisson: {
      boost::math::poisson_distribution<double> d(
          std::get<PoissonParams>(params_).lambda);
      return boost::math::quantile(d, u);
    }
    case PairKind::Bernoulli:
    case PairKind::DiscreteTabular:
      return inverse_cdf_index(table_.marginal_cdf, u);
  }
  throw error("marginal_quantile: unreachable");
}

double DistributionPair::conditional_cdf(double b, double a) const {
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian: {
      const auto& g = std::get<GaussianParams>(params_);
      boost::math::normal_distribution<double> d(
          g.rho * a, g.scale * std::sqrt(1.0 - g.rho * g.rho));
      return boost::math::cdf(d, b);
    }
    case PairKind::StableCauchy: {
      const auto& c = std::get<CauchyParams>(params_);
      boost::math::cauchy_distribution<double> d(
          c.rho * a, (1.0 - std::abs(c.rho)) * c.scale);
      return boost::math::cdf(d, b);
    }
    case PairKind::ChiSquare: {
      const auto& c = std::get<ChiSquareParams>(params_);
      const double z = b - c.rho * a;
      if (z <= 0.0) return 0.0;
      boost::math::gamma_distribution<double> d((1.0 - c.rho) * c.dof * 0.5, 2.0);
      return boost::math::cdf(d, z);
    }
    case PairKind::Bernoulli:
    case PairKind::DiscreteTabular: {
      const int x = check_symbol(a);
      const double qx = table_.marginal[x];
      if (qx <= 0.0) throw support_error("conditional_cdf: zero-mass symbol");
      double acc = 0.0;
      for (int y = 0; y < alphabet_size() && y <= std::floor(b); ++y)
        acc += table_.joint(x, y);
      return acc / qx;
    }
    case PairKind::Poisson:
      throw support_error("conditional_cdf: not provided for Poisson pairs");
  }
  throw error("conditional_cdf: unreachable");
}

double DistributionPair::marginal_moment(int order) const {
  if (order < 0) throw parameter_error("marginal_moment: negative order");
  if (order == 0) return 1.0;
  switch (kind_) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian: {
      if (order % 2 == 1) return 0.0;
      const double s = std::get<GaussianParams>(params_).scale;
      double m = 1.0;
      for (int i = 1; i < order; i += 2) m *= i;  // (order-1)!!
      return m * std::pow(s, order);
    }
    case PairKind::StableCauchy:
      throw unsupported_moment_error("marginal_moment: Cauchy moments diverge");
    case PairKind::Poisson: {
      const double lambda = std::get<PoissonParams>(params_).lambda;
      double acc = 0.0;
      double lp = 1.0;
      for (int i = 1; i <= order; ++i) {
        lp *= lambda;
        acc += stirling2(order, i) * lp;
      }
      return acc;
    }
    case PairKind::ChiSquare: {
      const double dof = std::get<ChiSquareParams>(params_).dof;
      double m = 1.0;
      for (int i = 0; i < order; ++i) m *= dof + 2.0 * i;
      return m;
    }
    case PairKind::Bernoulli:
    case PairKind::DiscreteTabular: {
      double acc = 0.0;
      for (int i = 0; i < alphabet_size(); ++i)
        acc += table_.marginal[i] * std::pow(static_cast<double>(i), order);
      return acc;
    }
  }
  throw error("marginal_moment: unreachable");
}

const GaussianParams* DistributionPair::as_gaussian() const {
  return std::get_if<GaussianParams>(&params_);
}
const BernoulliParams* DistributionPair::as_bernoulli() const {
  return std::get_if<BernoulliParams>(&params_);
}
const PoissonParams* DistributionPair::as_poisson() const {
  return std::get_if<PoissonParams>(&params_);
}
const ChiSquareParams* DistributionPair::as_chi_square() const {
  return std::get_if<ChiSquareParams>(&params_);
}
const CauchyParams* DistributionPair::as_cauchy() const {
  return std::get_if<CauchyParams>(&params_);
}

int DistributionPair::integer_support_bound() const {
  if (support_ != Support::NonnegativeInteger)
    throw support_error("integer_support_bound: not an integer-support pair");
  boost::math::poisson_distribution<double> d(
      std::get<PoissonParams>(params_).lambda);
  return static_cast<int>(boost::math::quantile(d, 1.0 - 1e-15)) + 10;
}

std::string DistributionPair::describe() const {
  std::ostringstream out;
  out.precision(12);
  switch (kind_) {
    case PairKind::Gaussian: {
      const auto& g = std::get<GaussianParams>(params_);
      out << "gaussian rho=" << g.rho;
      if (g.scale != 1.0) out << " scale=" << g.scale;
      break;
    }
    case PairKind::StableGaussian: {
      const auto& g = std::get<GaussianParams>(params_);
      out << "stable rho=" << g.rho;
      if (g.scale != 1.0) out << " scale=" << g.scale;
      break;
    }
    case PairKind::StableCauchy: {
      const auto& c = std::get<CauchyParams>(params_);
      out << "cauchy rho=" << c.rho;
      if (c.scale != 1.0) out << " scale=" << c.scale;
      break;
    }
    case PairKind::Bernoulli: {
      const auto& b = std::get<BernoulliParams>(params_);
      out << "bernoulli p=" << b.p << " tau=" << b.tau;
      break;
    }
    case PairKind::Poisson: {
      const auto& p = std::get<PoissonParams>(params_);
      out << "poisson lambda=" << p.lambda << " rho=" << p.rho;
      break;
    }
    case PairKind::ChiSquare: {
      const auto& c = std::get<ChiSquareParams>(params_);
      out << "chisquare k=" << c.dof << " rho=" << c.rho;
      break;
    }
    case PairKind::DiscreteTabular:
      out << "tabular m=" << table_.joint.rows();
      break;
  }
  return out.str();
}

namespace {

std::map<std::string, std::string> parse_kv(std::istringstream& in) {
  std::map<std::string, std::string> kv;
  std::string tok;
  while (in >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos)
      throw parameter_error("pair spec: expected key=value, got '" + tok + "'");
    kv[tok.substr(0, eq)] = tok.substr(eq + 1);
  }
  return kv;
}

double need(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw parameter_error("pair spec: missing " + key);
  return std::stod(it->second);
}

double get_or(const std::map<std::string, std::string>& kv,
              const std::string& key, double fallback) {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : std::stod(it->second);
}

}  // namespace

DistributionPair DistributionPair::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string kind;
  if (!(in >> kind)) throw parameter_error("pair spec: empty");
  if (kind == "tabular") {
    auto kv = parse_kv(in);
    const auto it = kv.find("file");
    if (it == kv.end()) throw parameter_error("pair spec: tabular needs file=<path>");
    std::ifstream f(it->second);
    if (!f) throw parameter_error("pair spec: cannot open " + it->second);
    return read_tabular(f);
  }
  auto kv = parse_kv(in);
  if (kind == "gaussian")
    return gaussian(need(kv, "rho"), get_or(kv, "scale", 1.0));
  if (kind == "stable")
    return stable_gaussian(need(kv, "rho"), get_or(kv, "scale", 1.0));
  if (kind == "cauchy")
    return stable_cauchy(need(kv, "rho"), get_or(kv, "scale", 1.0));
  if (kind == "bernoulli") return bernoulli(need(kv, "p"), need(kv, "tau"));
  if (kind == "poisson") return poisson(need(kv, "lambda"), need(kv, "rho"));
  if (kind == "chisquare")
    return chi_square(kv.count("k") ? need(kv, "k") : need(kv, "dof"),
                      need(kv, "rho"));
  throw parameter_error("pair spec: unknown kind '" + kind + "'");
}

DistributionPair DistributionPair::read_tabular(std::istream& in) {
  std::string rows_tok, cols_tok;
  if (!(in >> rows_tok >> cols_tok) || rows_tok.rfind("rows=", 0) != 0 ||
      cols_tok.rfind("cols=", 0) != 0)
    throw parameter_error("tabular file: expected header 'rows=<m> cols=<m>'");
  const int rows = std::stoi(rows_tok.substr(5));
  const int cols = std::stoi(cols_tok.substr(5));
  if (rows != cols || rows < 1)
    throw parameter_error("tabular file: need a square table");
  Eigen::MatrixXd joint(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j)
      if (!(in >> joint(i, j)))
        throw parameter_error("tabular file: not enough entries");
  return tabular(std::move(joint));
}

std::string to_string(Hypothesis h) {
  return h == Hypothesis::Null ? "null" : "planted";
}

Hypothesis hypothesis_from_string(std::string_view s) {
  if (s == "null") return Hypothesis::Null;
  if (s == "planted") return Hypothesis::Planted;
  throw parameter_error("hypothesis must be 'null' or 'planted'");
}

}  // namespace graphdep
