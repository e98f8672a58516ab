#include "graphdep/low_degree.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "graphdep/errors.hpp"
#include "graphdep/perm_graphs.hpp"

namespace graphdep {

namespace {

FamilyTag tag_for(const DistributionPair& pair) {
  switch (pair.kind()) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian:
      return FamilyTag::HermiteType;
    case PairKind::Bernoulli:
      return FamilyTag::KrawtchoukType;
    case PairKind::Poisson:
      return FamilyTag::CharlierType;
    case PairKind::ChiSquare:
      return FamilyTag::LaguerreType;
    default:
      return FamilyTag::GramGenerated;
  }
}

}  // namespace

PolynomialFamily build_family(const DistributionPair& pair, int max_degree) {
  if (max_degree < 0) throw parameter_error("build_family: negative degree");
  const int dim = max_degree + 1;
  Eigen::MatrixXd hankel(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) hankel(i, j) = pair.marginal_moment(i + j);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(hankel);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (!(lo > 0.0) || hi / lo > 1e12)
    throw numeric_error(
        "build_family: Gram matrix ill-conditioned, degree too high for this "
        "marginal",
        lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity());

  Eigen::LLT<Eigen::MatrixXd> llt(hankel);
  if (llt.info() != Eigen::Success)
    throw numeric_error("build_family: Cholesky failed", 0.0);
  // H = L L^T and C = L^{-1} gives C H C^T = I; row l of C holds the
  // coefficients of the degree-l orthonormal polynomial.
  const Eigen::MatrixXd coeff =
      llt.matrixL().solve(Eigen::MatrixXd::Identity(dim, dim));

  PolynomialFamily family;
  family.tag = tag_for(pair);
  family.max_degree = max_degree;
  family.polys.resize(dim);
  for (int l = 0; l < dim; ++l) {
    family.polys[l].assign(l + 1, 0.0);
    for (int j = 0; j <= l; ++j) family.polys[l][j] = coeff(l, j);
  }
  return family;
}

std::optional<Poly> conditional_moment_poly(const DistributionPair& pair,
                                            int order) {
  if (order < 0) throw parameter_error("conditional_moment_poly: negative order");
  if (order == 0) return Poly{1.0};
  switch (pair.kind()) {
    case PairKind::Gaussian:
    case PairKind::StableGaussian: {
      const auto* g = pair.as_gaussian();
      const double noise_sd = g->scale * std::sqrt(1.0 - g->rho * g->rho);
      Poly out(order + 1, 0.0);
      for (int k = 0; k <= order; ++k) {
        if (k % 2 == 1) continue;  // odd noise moments vanish
        double moment = 1.0;
        for (int i = 1; i < k; i += 2) moment *= i;
        out[order - k] = binomial_coefficient(order, k) *
                         std::pow(g->rho, order - k) *
                         std::pow(noise_sd, k) * moment;
      }
      return out;
    }
    case PairKind::Poisson: {
      const auto* p = pair.as_poisson();
      const double rest_mean = (1.0 - p->rho) * p->lambda;
      Poly out{0.0};
      for (int k = 0; k <= order; ++k) {
        // E[M^{order-k}] for M ~ Poisson(rest_mean)
        double m_moment = 0.0;
        if (order - k == 0) {
          m_moment = 1.0;
        } else {
          double lp = 1.0;
          for (int i = 1; i <= order - k; ++i) {
            lp *= rest_mean;
            m_moment += stirling2(order - k, i) * lp;
          }
        }
        // E[N^k | A=a] = sum_i S(k,i) rho^i a^(i) with falling factorials
        Poly n_moment{k == 0 ? 1.0 : 0.0};
        for (int i = 1; i <= k; ++i)
          n_moment = poly_add(
              n_moment, poly_scale(falling_factorial(i),
                                   stirling2(k, i) * std::pow(p->rho, i)));
        out = poly_add(out, poly_scale(n_moment, binomial_coefficient(order, k) *
                                                     m_moment));
      }
      return out;
    }
    case PairKind::ChiSquare: {
      const auto* c = pair.as_chi_square();
      const double rest_dof = (1.0 - c->rho) * c->dof;
      Poly out(order + 1, 0.0);
      for (int k = 0; k <= order; ++k) {
        double z_moment = 1.0;
        for (int i = 0; i < order - k; ++i) z_moment *= rest_dof + 2.0 * i;
        out[k] = binomial_coefficient(order, k) * std::pow(c->rho, k) * z_moment;
      }
      return out;
    }
    case PairKind::Bernoulli: {
      const auto* b = pair.as_bernoulli();
      const double c1 = b->tau;
      const double c0 = b->tau * b->p * (1.0 - b->tau) / (1.0 - b->tau * b->p);
      return Poly{c0, c1 - c0};  // affine regardless of the order
    }
    case PairKind::StableCauchy:
    case PairKind::DiscreteTabular:
      return std::nullopt;
  }
  throw error("conditional_moment_poly: unreachable");
}

double pair_moment(const DistributionPair& pair, const Poly& f, const Poly& g) {
  if (pair.support() == Support::FiniteAlphabet) {
    const auto& joint = pair.joint_table();
    const int m = pair.alphabet_size();
    double acc = 0.0;
    for (int x = 0; x < m; ++x) {
      const double fx = poly_eval(f, x);
      for (int y = 0; y < m; ++y)
        acc += joint(x, y) * fx * poly_eval(g, y);
    }
    return acc;
  }
  // E_P[f(A) g(B)] = E_A[f(A) * sum_r g_r E[B^r | A]], all in closed form.
  Poly g_cond{0.0};
  for (std::size_t r = 0; r < g.size(); ++r) {
    if (g[r] == 0.0) continue;
    const auto cmp = conditional_moment_poly(pair, static_cast<int>(r));
    if (!cmp)
      throw unsupported_moment_error(
          "pair_moment: no conditional moment polynomial for this kind");
    g_cond = poly_add(g_cond, poly_scale(*cmp, g[r]));
  }
  const Poly prod = poly_mul(f, g_cond);
  double acc = 0.0;
  for (std::size_t j = 0; j < prod.size(); ++j)
    if (prod[j] != 0.0)
      acc += prod[j] * pair.marginal_moment(static_cast<int>(j));
  return acc;
}

Poly conditional_family_poly(const DistributionPair& pair,
                             const PolynomialFamily& family, int degree) {
  const Poly& p = family.polys.at(degree);
  Poly out{0.0};
  for (std::size_t r = 0; r < p.size(); ++r) {
    if (p[r] == 0.0) continue;
    const auto cmp = conditional_moment_poly(pair, static_cast<int>(r));
    if (!cmp)
      throw unsupported_moment_error(
          "conditional_family_poly: no conditional moment polynomial");
    out = poly_add(out, poly_scale(*cmp, p[r]));
  }
  return out;
}

KappaReport kappa_coefficients(const DistributionPair& pair,
                               const PolynomialFamily& family, int max_degree,
                               double cross_tol) {
  KappaReport rep;
  rep.kappa.resize(max_degree + 1, 0.0);
  rep.kappa_leading.assign(max_degree + 1,
                           std::numeric_limits<double>::quiet_NaN());
  const int rank = family.max_degree;
  for (int l = 0; l <= max_degree; ++l) {
    if (l <= rank)
      rep.kappa[l] = pair_moment(pair, family.polys[l], family.polys[l]);
    // else zero: the alphabet carries no degree-l component
    const auto cmp = conditional_moment_poly(pair, l);
    if (cmp)
      rep.kappa_leading[l] =
          static_cast<int>(cmp->size()) > l ? (*cmp)[l] : 0.0;
  }
  for (int l = 0; l <= rank; ++l) {
    for (int m = 0; m <= rank; ++m) {
      if (l == m) continue;
      const double cross =
          std::abs(pair_moment(pair, family.polys[l], family.polys[m]));
      rep.max_cross_moment = std::max(rep.max_cross_moment, cross);
    }
  }
  if (rep.max_cross_moment > cross_tol)
    throw not_in_d3_error(
        "kappa_coefficients: off-diagonal projection mass " +
        std::to_string(rep.max_cross_moment) +
        " exceeds tolerance; the pair is not in the supported class");
  if (pair.kind() == PairKind::Bernoulli && max_degree >= 1)
    rep.appendix_convention_differs = rep.kappa[1] != 0.0;
  return rep;
}

double theorem4_bound(double corr, int degree) {
  if (degree < 0) throw parameter_error("theorem4_bound: negative degree");
  const double c = std::abs(corr);
  const double d = static_cast<double>(degree);
  const double base = c * d * d;
  return base * base * std::exp(c * d) * std::exp(c * d * d);
}

namespace {

void compositions_into(int remaining, int cells, std::vector<int>& current,
                       std::vector<std::vector<int>>& out) {
  if (cells == 1) {
    current.push_back(remaining);
    out.push_back(current);
    current.pop_back();
    return;
  }
  for (int take = 0; take <= remaining; ++take) {
    current.push_back(take);
    compositions_into(remaining - take, cells - 1, current, out);
    current.pop_back();
  }
}

std::vector<std::vector<int>> compositions(int total, int cells) {
  std::vector<std::vector<int>> out;
  std::vector<int> current;
  compositions_into(total, cells, current, out);
  return out;
}

}  // namespace

double exact_ldp_norm(const DistributionPair& pair, int n, int degree) {
  if (n < 2 || n > 5) throw capacity_error("exact_ldp_norm: n must lie in [2, 5]");
  if (degree < 0 || degree > 4)
    throw capacity_error("exact_ldp_norm: degree must lie in [0, 4]");
  if (degree == 0) return 1.0;

  int family_degree = degree;
  if (pair.support() == Support::FiniteAlphabet)
    family_degree = std::min(family_degree, pair.alphabet_size() - 1);
  const auto family = build_family(pair, family_degree);
  const auto kappa = kappa_coefficients(pair, family, degree).kappa;

  const int edges_n = edge_count(n);
  const auto edges = edge_list(n);
  std::vector<std::vector<int>> perm_edges;
  {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      std::vector<int> pe(edges_n);
      for (int e = 0; e < edges_n; ++e)
        pe[e] = edge_index(n, p[edges[e].first], p[edges[e].second]);
      perm_edges.push_back(std::move(pe));
    } while (std::next_permutation(p.begin(), p.end()));
  }
  const double n_fact = static_cast<double>(perm_edges.size());

  double norm = 1.0;  // alpha = beta = 0 term
  for (int weight = 1; 2 * weight <= degree; ++weight) {
    const auto alphas = compositions(weight, edges_n);
    for (const auto& alpha : alphas) {
      std::vector<int> alpha_sorted = alpha;
      std::sort(alpha_sorted.begin(), alpha_sorted.end());
      for (const auto& beta : alphas) {
        // pi(alpha) = beta requires matching weight multisets
        std::vector<int> beta_sorted = beta;
        std::sort(beta_sorted.begin(), beta_sorted.end());
        if (beta_sorted != alpha_sorted) continue;
        long matches = 0;
        for (const auto& pe : perm_edges) {
          bool ok = true;
          for (int e = 0; e < edges_n && ok; ++e)
            ok = alpha[e] == beta[pe[e]];
          matches += ok ? 1 : 0;
        }
        if (matches == 0) continue;
        double weight_prod = 1.0;
        for (int e = 0; e < edges_n; ++e)
          if (beta[e] > 0) weight_prod *= kappa[beta[e]];
        const double t = weight_prod * static_cast<double>(matches) / n_fact;
        norm += t * t;
      }
    }
  }
  return norm;
}

}  // namespace graphdep
