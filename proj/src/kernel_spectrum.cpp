#include "graphdep/kernel_spectrum.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "graphdep/errors.hpp"

namespace graphdep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

}  // namespace

double KernelSpectrum::p_norm(int p) const {
  double acc = 0.0;
  for (Eigen::Index i = 1; i < eigenvalues.size(); ++i)
    acc += std::pow(eigenvalues[i], p);
  return acc;
}

double KernelSpectrum::orbit_moment(int orbit_length) const {
  if (orbit_length < 1)
    throw parameter_error("orbit_moment: orbit length must be positive");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigenvalues.size(); ++i)
    acc += std::pow(eigenvalues[i], 2 * orbit_length);
  return acc;
}

double orbit_moment(const KernelSpectrum& spectrum, int orbit_length) {
  return spectrum.orbit_moment(orbit_length);
}

KernelSpectrum build_spectrum(const DistributionPair& pair) {
  if (pair.support() != Support::FiniteAlphabet)
    throw support_error(
        "build_spectrum: finite alphabet required; discretize first");
  const auto& joint = pair.joint_table();
  const auto& q = pair.marginal_masses();
  const int m = pair.alphabet_size();
  for (int x = 0; x < m; ++x)
    if (q[x] <= 0.0) throw support_error("build_spectrum: zero-mass symbol");

  // Symmetric conjugate S(x,y) = P(x,y)/sqrt(q_x q_y).
  Eigen::MatrixXd sym(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      sym(x, y) = joint(x, y) / std::sqrt(q[x] * q[y]);
  const double asym = (sym - sym.transpose()).lpNorm<Eigen::Infinity>();
  if (asym > 1e-12)
    throw support_error(
        "build_spectrum: kernel is not self-adjoint (joint table asymmetric)");
  sym = 0.5 * (sym + sym.transpose()).eval();

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
  if (solver.info() != Eigen::Success)
    throw numeric_error("build_spectrum: eigensolver failed", 0.0);

  // lambda_0 is the eigenvalue whose eigenvector aligns with sqrt(q), not
  // merely the largest one.
  Eigen::VectorXd sqrt_q(m);
  for (int x = 0; x < m; ++x) sqrt_q[x] = std::sqrt(q[x]);
  int top = 0;
  double best = -1.0;
  for (int i = 0; i < m; ++i) {
    const double overlap = std::abs(solver.eigenvectors().col(i).dot(sqrt_q));
    if (overlap > best) {
      best = overlap;
      top = i;
    }
  }

  std::vector<int> order;
  order.reserve(m);
  order.push_back(top);
  std::vector<int> rest;
  for (int i = 0; i < m; ++i)
    if (i != top) rest.push_back(i);
  std::sort(rest.begin(), rest.end(), [&](int a, int b) {
    return std::abs(solver.eigenvalues()[a]) > std::abs(solver.eigenvalues()[b]);
  });
  order.insert(order.end(), rest.begin(), rest.end());

  KernelSpectrum spec;
  spec.alphabet_size = m;
  spec.transition.resize(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y) spec.transition(x, y) = joint(x, y) / q[x];
  spec.eigenvalues.resize(m);
  for (int i = 0; i < m; ++i) spec.eigenvalues[i] = solver.eigenvalues()[order[i]];

  // Post-hoc residual check on M's eigenpairs (D^{-1/2} v).
  for (int i = 0; i < m; ++i) {
    const Eigen::VectorXd v = solver.eigenvectors().col(order[i]);
    Eigen::VectorXd u(m);
    for (int x = 0; x < m; ++x) u[x] = v[x] / sqrt_q[x];
    const double residual =
        (spec.transition * u - spec.eigenvalues[i] * u).lpNorm<Eigen::Infinity>();
    if (residual > 1e-9)
      throw numeric_error("build_spectrum: eigenpair residual too large",
                          residual);
  }
  return spec;
}

namespace {

TabularSurrogate truncate_integer_pair(const DistributionPair& pair) {
  const int bound = pair.integer_support_bound();
  const int m = bound + 1;
  Eigen::MatrixXd joint(m, m);
  for (int a = 0; a < m; ++a) {
    const double la = pair.marginal_log_pdf(a);
    for (int b = 0; b < m; ++b) {
      const double lb = pair.marginal_log_pdf(b);
      const double llr = pair.llr(a, b);
      joint(a, b) = llr == -kInf ? 0.0 : std::exp(llr + la + lb);
    }
  }
  const double asym = (joint - joint.transpose()).lpNorm<Eigen::Infinity>();
  const double defect = std::abs(1.0 - joint.sum());
  joint = 0.5 * (joint + joint.transpose()).eval();
  joint /= joint.sum();
  return {DistributionPair::tabular(std::move(joint)), asym, defect};
}

TabularSurrogate discretize_continuous_pair(const DistributionPair& pair,
                                            int cells) {
  const int m = cells;
  std::vector<double> edges(m + 1);
  edges[0] = pair.kind() == PairKind::ChiSquare ? 0.0 : -kInf;
  edges[m] = kInf;
  for (int j = 1; j < m; ++j)
    edges[j] = pair.marginal_quantile(static_cast<double>(j) / m);

  Eigen::MatrixXd joint(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      auto integrand = [&](double a) {
        const double w = std::exp(pair.marginal_log_pdf(a));
        if (w <= 0.0) return 0.0;
        const double hi_cdf =
            edges[j + 1] == kInf ? 1.0 : pair.conditional_cdf(edges[j + 1], a);
        const double lo_cdf =
            edges[j] == -kInf ? 0.0 : pair.conditional_cdf(edges[j], a);
        return w * std::max(0.0, hi_cdf - lo_cdf);
      };
      joint(i, j) = Quad::integrate(integrand, edges[i], edges[i + 1], 15,
                                    1e-11, nullptr);
    }
  }
  const double asym = (joint - joint.transpose()).lpNorm<Eigen::Infinity>();
  const double defect = std::abs(1.0 - joint.sum());
  joint = joint.cwiseMax(0.0).eval();
  joint = 0.5 * (joint + joint.transpose()).eval();
  joint /= joint.sum();
  return {DistributionPair::tabular(std::move(joint)), asym, defect};
}

}  // namespace

TabularSurrogate to_tabular(const DistributionPair& pair, int cells) {
  if (cells < 2) throw parameter_error("to_tabular: need at least 2 cells");
  switch (pair.support()) {
    case Support::FiniteAlphabet:
      return {pair, 0.0, 0.0};
    case Support::NonnegativeInteger:
      return truncate_integer_pair(pair);
    case Support::ContinuousReal:
      return discretize_continuous_pair(pair, cells);
  }
  throw error("to_tabular: unreachable");
}

KernelSpectrum build_spectrum_discretized(const DistributionPair& pair,
                                          int cells) {
  return build_spectrum(to_tabular(pair, cells).pair);
}

}  // namespace graphdep
