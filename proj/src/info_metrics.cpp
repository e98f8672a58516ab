#include "graphdep/info_metrics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>

#include "graphdep/errors.hpp"

namespace graphdep {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kLambdaCap = 1e6;     // search cap for unbounded domains
constexpr double kGoldenTol = 1e-10;   // |dlambda| termination

using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;

double safe_exp(double x) { return x == -kInf ? 0.0 : std::exp(x); }

// Contribution of one point: receives the log of the measure weight so that
// ratio-type integrands (exp(lambda*llr) etc.) can fuse the exponents and
// never hit 0 * inf at the tails.
using WeightedIntegrand = std::function<double(double a, double b, double logw)>;

constexpr int kQuadDepth = 15;

// Adaptive Gauss-Kronrod after a tangent substitution on unbounded sides;
// the compactified integrand stays bounded even for Cauchy-type tails.
double integrate_line(const std::function<double(double)>& f, double lo,
                      double hi, double tol, double* err_out) {
  double err = 0.0;
  double value = 0.0;
  const double half_pi = 0.5 * kPi;
  if (lo == -kInf && hi == kInf) {
    auto g = [&](double t) {
      const double c = std::cos(t);
      const double x = std::tan(t);
      return f(x) / (c * c);
    };
    value = Quad::integrate(g, -half_pi, half_pi, kQuadDepth, tol, &err);
  } else if (hi == kInf) {
    auto g = [&](double t) {
      const double c = std::cos(t);
      const double x = lo + std::tan(t);
      return f(x) / (c * c);
    };
    value = Quad::integrate(g, 0.0, half_pi, kQuadDepth, tol, &err);
  } else {
    value = Quad::integrate(f, lo, hi, kQuadDepth, tol, &err);
  }
  if (err_out) *err_out = err;
  return value;
}

// Same integral with a known interior feature: anchor a tangent transform
// at the split so adaptive refinement clusters around it from both sides.
double integrate_line_split(const std::function<double(double)>& f, double lo,
                            double hi, double split, double tol,
                            double* err_out) {
  if (!(split > lo) || !(split < hi))
    return integrate_line(f, lo, hi, tol, err_out);
  const double half_pi = 0.5 * kPi;
  double err_left = 0.0, err_right = 0.0;
  auto left = [&](double t) {
    const double c = std::cos(t);
    return f(split - std::tan(t)) / (c * c);
  };
  const double t_left = lo == -kInf ? half_pi : std::atan(split - lo);
  const double value_left =
      Quad::integrate(left, 0.0, t_left, kQuadDepth, 0.5 * tol, &err_left);
  auto right = [&](double t) {
    const double c = std::cos(t);
    return f(split + std::tan(t)) / (c * c);
  };
  const double t_right = hi == kInf ? half_pi : std::atan(hi - split);
  const double value_right =
      Quad::integrate(right, 0.0, t_right, kQuadDepth, 0.5 * tol, &err_right);
  if (err_out) *err_out = err_left + err_right;
  return value_left + value_right;
}

struct ContinuousDomain {
  double lo;
  double hi;
};

ContinuousDomain marginal_domain(const DistributionPair& pair) {
  if (pair.kind() == PairKind::ChiSquare) return {0.0, kInf};
  return {-kInf, kInf};
}

// Heavy-tailed member: substituting the marginal quantile on both axes
// (a = gamma tan(alpha), likewise for the second coordinate) turns the
// weights into constants on a finite box, leaving only the likelihood
// ridge, whose location is known and handed to the split integrator.
ValueWithError expect_weighted_cauchy(const DistributionPair& pair,
                                      Hypothesis measure,
                                      const WeightedIntegrand& g, double tol) {
  const auto* cc = pair.as_cauchy();
  const double gamma = cc->scale;
  const double cond_scale = (1.0 - std::abs(cc->rho)) * gamma;
  const double log_uniform = -2.0 * std::log(kPi);
  const double half_pi = 0.5 * kPi;
  double outer_err = 0.0;
  auto outer = [&](double alpha) -> double {
    const double a = gamma * std::tan(alpha);
    if (!(std::abs(a) < 1e100)) return 0.0;
    const double ridge_b = cc->rho * a;
    if (measure == Hypothesis::Null) {
      auto inner = [&](double beta) {
        const double b = gamma * std::tan(beta);
        if (!(std::abs(b) < 1e100)) return 0.0;
        return g(a, b, log_uniform);
      };
      const double split = std::atan(ridge_b / gamma);
      return integrate_line_split(inner, -half_pi, half_pi, split, tol * 0.1,
                                  nullptr);
    }
    auto inner = [&](double zeta) {
      const double z = cond_scale * std::tan(zeta);
      if (!(std::abs(z) < 1e100)) return 0.0;
      return g(a, ridge_b + z, log_uniform);
    };
    return integrate_line_split(inner, -half_pi, half_pi, 0.0, tol * 0.1,
                                nullptr);
  };
  const double value =
      Quad::integrate(outer, -half_pi, half_pi, kQuadDepth, tol, &outer_err);
  return {value, outer_err};
}

ValueWithError expect_weighted_continuous(const DistributionPair& pair,
                                          Hypothesis measure,
                                          const WeightedIntegrand& g,
                                          double tol) {
  if (pair.kind() == PairKind::StableCauchy)
    return expect_weighted_cauchy(pair, measure, g, tol);
  const ContinuousDomain dom = marginal_domain(pair);
  double outer_err = 0.0;
  auto outer = [&](double a) -> double {
    const double logwa = pair.marginal_log_pdf(a);
    if (logwa == -kInf) return 0.0;
    std::function<double(double)> inner;
    double inner_lo = dom.lo, inner_hi = dom.hi;
    if (measure == Hypothesis::Null) {
      inner = [&, a, logwa](double b) {
        return g(a, b, logwa + pair.marginal_log_pdf(b));
      };
      // the single-letter likelihood concentrates / kinks at the
      // conditional location rho*a; anchor the inner quadrature there
      double ridge = 0.0;
      if (const auto* gp = pair.as_gaussian()) ridge = gp->rho * a;
      else if (const auto* cp = pair.as_chi_square()) ridge = cp->rho * a;
      else if (const auto* cc = pair.as_cauchy()) ridge = cc->rho * a;
      return integrate_line_split(inner, inner_lo, inner_hi, ridge, tol * 0.1,
                                  nullptr);
    } else if (const auto* gp = pair.as_gaussian()) {
      // integrate in the conditional noise variable so the mass stays
      // centered regardless of a
      const double mean = gp->rho * a;
      const double sd = gp->scale * std::sqrt(1.0 - gp->rho * gp->rho);
      const double log_norm = -std::log(sd) - 0.5 * std::log(2.0 * kPi);
      inner = [&, a, logwa, mean, sd, log_norm](double z) {
        const double u = z / sd;
        return g(a, mean + z, logwa + log_norm - 0.5 * u * u);
      };
    } else if (const auto* cp = pair.as_chi_square()) {
      const double shape = (1.0 - cp->rho) * cp->dof * 0.5;
      const double log_norm = -std::lgamma(shape) - shape * std::log(2.0);
      const double rho_a = cp->rho * a;
      inner = [&, a, logwa, shape, log_norm, rho_a](double z) {
        if (z <= 0.0) return 0.0;
        const double logw =
            logwa + log_norm + (shape - 1.0) * std::log(z) - 0.5 * z;
        return g(a, rho_a + z, logw);
      };
      inner_lo = 0.0;
      inner_hi = kInf;
    } else if (const auto* cc = pair.as_cauchy()) {
      const double gamma2 = (1.0 - std::abs(cc->rho)) * cc->scale;
      const double rho_a = cc->rho * a;
      inner = [&, a, logwa, gamma2, rho_a](double z) {
        const double logw =
            logwa + std::log(gamma2 / (kPi * (z * z + gamma2 * gamma2)));
        return g(a, rho_a + z, logw);
      };
    } else {
      throw support_error("expect_pair: unsupported continuous kind");
    }
    return integrate_line(inner, inner_lo, inner_hi, tol * 0.1, nullptr);
  };
  const double value = integrate_line(outer, dom.lo, dom.hi, tol, &outer_err);
  return {value, outer_err};
}

ValueWithError expect_weighted_finite(const DistributionPair& pair,
                                      Hypothesis measure,
                                      const WeightedIntegrand& g) {
  const auto& joint = pair.joint_table();
  const auto& q = pair.marginal_masses();
  const int m = pair.alphabet_size();
  double acc = 0.0;
  for (int x = 0; x < m; ++x) {
    for (int y = 0; y < m; ++y) {
      const double w = measure == Hypothesis::Null ? q[x] * q[y] : joint(x, y);
      if (w <= 0.0) continue;
      acc += g(static_cast<double>(x), static_cast<double>(y), std::log(w));
    }
  }
  return {acc, 0.0};
}

ValueWithError expect_weighted_poisson(const DistributionPair& pair,
                                       Hypothesis measure,
                                       const WeightedIntegrand& g) {
  const int limit = pair.integer_support_bound() * 2 + 20;
  double acc = 0.0;
  double last_shell = 0.0;
  for (int shell = 0; shell <= limit; ++shell) {
    double shell_sum = 0.0;
    // cells with max(a,b) == shell
    for (int a = 0; a <= shell; ++a) {
      const int b_lo = (a == shell) ? 0 : shell;
      for (int b = b_lo; b <= shell; ++b) {
        double logw = pair.marginal_log_pdf(a) + pair.marginal_log_pdf(b);
        if (measure == Hypothesis::Planted) logw += pair.llr(a, b);
        if (logw == -kInf) continue;
        shell_sum += g(static_cast<double>(a), static_cast<double>(b), logw);
      }
    }
    acc += shell_sum;
    last_shell = std::abs(shell_sum);
    if (shell > 4 && last_shell < 1e-16 * (1.0 + std::abs(acc))) break;
  }
  return {acc, last_shell};
}

ValueWithError expect_weighted(const DistributionPair& pair, Hypothesis measure,
                               const WeightedIntegrand& g, double tol) {
  switch (pair.support()) {
    case Support::FiniteAlphabet:
      return expect_weighted_finite(pair, measure, g);
    case Support::NonnegativeInteger:
      return expect_weighted_poisson(pair, measure, g);
    case Support::ContinuousReal:
      return expect_weighted_continuous(pair, measure, g, tol);
  }
  throw error("expect_weighted: unreachable");
}

}  // namespace

ValueWithError expect_pair(const DistributionPair& pair, Hypothesis measure,
                           const std::function<double(double, double)>& h,
                           double abs_tol) {
  return expect_weighted(
      pair, measure,
      [&h](double a, double b, double logw) {
        const double w = safe_exp(logw);
        return w == 0.0 ? 0.0 : w * h(a, b);
      },
      abs_tol);
}

namespace {

bool has_gaussian_closed_form(const DistributionPair& pair) {
  return pair.kind() == PairKind::Gaussian ||
         pair.kind() == PairKind::StableGaussian;
}

double gaussian_divergence_closed(double rho, DivergenceKind which) {
  const double r2 = rho * rho;
  switch (which) {
    case DivergenceKind::KlPq:
      return -0.5 * std::log1p(-r2);
    case DivergenceKind::KlQp:
      return r2 / (1.0 - r2) + 0.5 * std::log1p(-r2);
    case DivergenceKind::Chi2:
      return r2 / (1.0 - r2);
    case DivergenceKind::Hellinger2: {
      const double bc = 2.0 * std::pow(1.0 - r2, 0.25) / std::sqrt(4.0 - r2);
      return 2.0 - 2.0 * bc;
    }
    case DivergenceKind::VarLlrP:
      return r2;
  }
  throw error("gaussian_divergence_closed: unreachable");
}

ValueWithError divergence_numeric(const DistributionPair& pair,
                                  DivergenceKind which) {
  const double tol = 1e-10;
  // All integrands are assembled from logw and llr in one exponent so the
  // far tails cannot produce 0 * inf.
  auto llr_times_weight = [&pair](double a, double b, double logw) {
    const double w = safe_exp(logw);
    if (w == 0.0) return 0.0;
    return w * pair.llr(a, b);  // may be -inf where P vanishes on Q-mass
  };
  switch (which) {
    case DivergenceKind::KlPq:
      return expect_weighted(pair, Hypothesis::Planted, llr_times_weight, tol);
    case DivergenceKind::KlQp: {
      auto r = expect_weighted(
          pair, Hypothesis::Null,
          [&](double a, double b, double logw) {
            const double w = safe_exp(logw);
            if (w == 0.0) return 0.0;
            return -w * pair.llr(a, b);
          },
          tol);
      return r;
    }
    case DivergenceKind::Chi2: {
      auto r = expect_weighted(
          pair, Hypothesis::Null,
          [&](double a, double b, double logw) {
            return safe_exp(logw + 2.0 * pair.llr(a, b));
          },
          tol);
      r.value -= 1.0;
      return r;
    }
    case DivergenceKind::Hellinger2:
      // (1 - sqrt(L))^2 expanded to fused exponentials
      return expect_weighted(
          pair, Hypothesis::Null,
          [&](double a, double b, double logw) {
            const double llr = pair.llr(a, b);
            return safe_exp(logw) - 2.0 * safe_exp(logw + 0.5 * llr) +
                   safe_exp(logw + llr);
          },
          tol);
    case DivergenceKind::VarLlrP: {
      const auto mean =
          expect_weighted(pair, Hypothesis::Planted, llr_times_weight, tol);
      auto second = expect_weighted(
          pair, Hypothesis::Planted,
          [&](double a, double b, double logw) {
            const double w = safe_exp(logw);
            if (w == 0.0) return 0.0;
            const double v = pair.llr(a, b);
            return w * v * v;
          },
          tol);
      second.value -= mean.value * mean.value;
      second.abs_error += 2.0 * std::abs(mean.value) * mean.abs_error;
      return second;
    }
  }
  throw error("divergence_numeric: unreachable");
}

}  // namespace

namespace {

// Spec'd fallback for integrands the quadrature cannot settle: plain Monte
// Carlo with a fixed internal seed; abs_error is the 95% half-width.
ValueWithError mc_divergence(const DistributionPair& pair, DivergenceKind which) {
  const long samples = 10000000;
  const Hypothesis measure = (which == DivergenceKind::KlPq ||
                              which == DivergenceKind::VarLlrP)
                                 ? Hypothesis::Planted
                                 : Hypothesis::Null;
  RngStream rng(0x51ab5eedULL + static_cast<std::uint64_t>(which));
  double sum = 0.0, sum_sq = 0.0;
  double llr_sum = 0.0, llr_sq = 0.0;
  for (long t = 0; t < samples; ++t) {
    const auto [a, b] = pair.sample(measure, rng);
    const double llr = pair.llr(a, b);
    double h = 0.0;
    switch (which) {
      case DivergenceKind::KlPq: h = llr; break;
      case DivergenceKind::KlQp: h = -llr; break;
      case DivergenceKind::Chi2: h = safe_exp(2.0 * llr); break;
      case DivergenceKind::Hellinger2: {
        const double s = 1.0 - safe_exp(0.5 * llr);
        h = s * s;
        break;
      }
      case DivergenceKind::VarLlrP:
        h = llr * llr;
        llr_sum += llr;
        llr_sq += llr * llr;
        break;
    }
    sum += h;
    sum_sq += h * h;
  }
  double value = sum / samples;
  double var = sum_sq / samples - value * value;
  if (which == DivergenceKind::Chi2) value -= 1.0;
  if (which == DivergenceKind::VarLlrP) {
    const double mean = llr_sum / samples;
    value = llr_sq / samples - mean * mean;
  }
  return {value, 1.96 * std::sqrt(std::max(var, 0.0) / samples)};
}

}  // namespace

ValueWithError divergence_estimate(const DistributionPair& pair,
                                   DivergenceKind which, EvalMethod method) {
  if (method != EvalMethod::Numeric && has_gaussian_closed_form(pair))
    return {gaussian_divergence_closed(pair.as_gaussian()->rho, which), 0.0};
  if (method != EvalMethod::Numeric && pair.kind() == PairKind::StableCauchy &&
      which == DivergenceKind::Chi2) {
    // the likelihood-ratio ridge carries non-integrable mass for the
    // heavy-tailed member
    return {kInf, 0.0};
  }
  if (method == EvalMethod::ClosedForm)
    throw support_error("divergence: no closed form for this pair kind");
  auto r = divergence_numeric(pair, which);
  if (!std::isfinite(r.value)) return r;  // infinite divergence is legitimate
  if (r.abs_error > 1e-6) {
    const auto mc = mc_divergence(pair, which);
    if (!std::isfinite(mc.value) || mc.abs_error > 1e-2)
      throw numeric_error("divergence: quadrature and MC fallback both failed",
                          std::min(r.abs_error, mc.abs_error));
    return mc;
  }
  return r;
}

double divergence(const DistributionPair& pair, DivergenceKind which,
                  EvalMethod method) {
  return divergence_estimate(pair, which, method).value;
}

// ---------------------------------------------------------------------------
// ExponentProfile
// ---------------------------------------------------------------------------

namespace {

// psi_Q for the Gaussian pair in closed form; +inf outside its domain.
double gaussian_psi_q(double rho, double lambda) {
  const double r1 = rho / (1.0 + rho);
  const double r2 = rho / (1.0 - rho);
  const double arg1 = 1.0 - lambda * r1;
  const double arg2 = 1.0 + lambda * r2;
  if (arg1 <= 0.0 || arg2 <= 0.0) return kInf;
  return -0.5 * (std::log(arg1) + std::log(arg2)) -
         0.5 * lambda * std::log1p(-rho * rho);
}

std::pair<double, double> gaussian_psi_domain(double rho) {
  const double r1 = rho / (1.0 + rho);
  const double r2 = rho / (1.0 - rho);
  double lo = -kLambdaCap, hi = kLambdaCap;
  // 1 - lambda r1 > 0
  if (r1 > 0.0) hi = std::min(hi, 1.0 / r1);
  else if (r1 < 0.0) lo = std::max(lo, 1.0 / r1);
  // 1 + lambda r2 > 0
  if (r2 > 0.0) lo = std::max(lo, -1.0 / r2);
  else if (r2 < 0.0) hi = std::min(hi, -1.0 / r2);
  return {lo, hi};
}

// E_Q[exp(lambda * LLR)] with fused exponents.
ValueWithError expect_pair_mgf(const DistributionPair& pair, double lambda) {
  return expect_weighted(
      pair, Hypothesis::Null,
      [&pair, lambda](double a, double b, double logw) {
        const double shift = lambda == 0.0 ? 0.0 : lambda * pair.llr(a, b);
        return safe_exp(logw + shift);
      },
      1e-9);
}

double psi_discrete(const Eigen::MatrixXd& joint, const Eigen::VectorXd& q,
                    double lambda) {
  double acc = 0.0;
  for (Eigen::Index x = 0; x < joint.rows(); ++x) {
    for (Eigen::Index y = 0; y < joint.cols(); ++y) {
      const double qq = q[x] * q[y];
      if (qq <= 0.0) continue;
      const double p = joint(x, y);
      if (p <= 0.0) {
        if (lambda < 0.0) return kInf;
        if (lambda == 0.0) acc += qq;
        continue;
      }
      acc += std::exp((1.0 - lambda) * std::log(qq) + lambda * std::log(p));
    }
  }
  return std::log(acc);
}

struct ConcaveMaximum {
  double argmax;
  double value;
  bool unbounded;
};

// Maximize a concave g over (lo, hi) by uphill bracketing from `start`
// followed by golden-section. g may evaluate to -inf inside the interval.
ConcaveMaximum maximize_concave(const std::function<double(double)>& g,
                                double lo, double hi, double start) {
  start = std::clamp(start, lo, hi);
  double step = std::max(0.25, 1e-3 * (std::abs(start) + 1.0));
  double m = start, gm = g(m);
  if (gm == -kInf) {
    // scan for a finite anchor before bracketing
    const double span_lo = std::max(lo, -64.0), span_hi = std::min(hi, 64.0);
    for (int i = 1; i <= 64 && gm == -kInf; ++i) {
      const double candidate = span_lo + (span_hi - span_lo) * i / 65.0;
      const double value = g(candidate);
      if (value > -kInf) {
        m = candidate;
        gm = value;
      }
    }
  }
  double l = std::max(lo, m - step), r = std::min(hi, m + step);
  double gl = g(l), gr = g(r);
  // Expand downhill side until the middle dominates both ends.
  int guard = 0;
  while ((gr > gm || gl > gm) && guard++ < 200) {
    if (gr > gm) {
      l = m; gl = gm;
      m = r; gm = gr;
      step *= 2.0;
      r = std::min(hi, m + step);
      gr = g(r);
      if (r >= hi && gr >= gm) {
        if (hi >= kLambdaCap) return {hi, kInf, true};
        return {hi, gr, false};  // supremum at the domain edge
      }
    } else {
      r = m; gr = gm;
      m = l; gm = gl;
      step *= 2.0;
      l = std::max(lo, m - step);
      gl = g(l);
      if (l <= lo && gl >= gm) {
        if (lo <= -kLambdaCap) return {lo, kInf, true};
        return {lo, gl, false};
      }
    }
  }
  // Golden-section on [l, r].
  const double phi = 0.6180339887498949;
  double a = l, b = r;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  while (b - a > kGoldenTol) {
    if (f1 < f2) {
      a = x1;
      x1 = x2; f1 = f2;
      x2 = a + phi * (b - a); f2 = g(x2);
    } else {
      b = x2;
      x2 = x1; f2 = f1;
      x1 = b - phi * (b - a); f1 = g(x1);
    }
  }
  const double xm = 0.5 * (a + b);
  return {xm, g(xm), false};
}

}  // namespace

ExponentProfile::ExponentProfile(DistributionPair pair) : pair_(std::move(pair)) {
  kl_pq_ = divergence(pair_, DivergenceKind::KlPq);
  kl_qp_ = divergence(pair_, DivergenceKind::KlQp);
  var_llr_p_ = divergence(pair_, DivergenceKind::VarLlrP);

  if (has_gaussian_closed_form(pair_)) {
    domain_q_ = gaussian_psi_domain(pair_.as_gaussian()->rho);
  } else if (pair_.kind() == PairKind::StableCauchy) {
    build_mc_psi_grid();
    domain_q_ = {0.0, 1.0};
  } else {
    // Probe the finiteness boundary; psi_Q is always finite on [0,1].
    auto finite_at = [&](double l) { return std::isfinite(psi_q_impl(l)); };
    auto probe = [&](double good, double direction) {
      // invariant: psi finite at `good`, walk outward in `direction`
      double step = 1.0;
      while (std::abs(good + direction * step) < kLambdaCap &&
             finite_at(good + direction * step)) {
        good += direction * step;
        step *= 2.0;
      }
      double bad = good + direction * step;
      if (std::abs(bad) >= kLambdaCap) {
        if (finite_at(direction * kLambdaCap)) return direction * kLambdaCap;
        bad = direction * kLambdaCap;
      }
      for (int i = 0;
           i < 60 && std::abs(bad - good) > 1e-9 * (1.0 + std::abs(good)); ++i) {
        const double mid = 0.5 * (good + bad);
        (finite_at(mid) ? good : bad) = mid;
      }
      return good;
    };
    domain_q_ = {probe(0.0, -1.0), probe(1.0, +1.0)};
  }
  if (domain_q_.second - domain_q_.first < 1e-12)
    throw degenerate_profile_error("psi_Q is infinite everywhere but 0");

  // Legendre cache over the guarantee window; skipped for kinds whose psi
  // requires nested quadrature (table stays empty, evaluation is direct).
  const bool cheap = pair_.support() != Support::ContinuousReal ||
                     has_gaussian_closed_form(pair_);
  if (cheap && std::isfinite(kl_pq_) && std::isfinite(kl_qp_) &&
      kl_pq_ + kl_qp_ > 0.0) {
    const int points = 21;
    const double lo = -kl_qp_, hi = kl_pq_;
    for (int i = 0; i < points; ++i) {
      const double theta = lo + (hi - lo) * i / (points - 1);
      const auto eq = exponent(WhichExponent::Q, theta);
      table_q_.push_back({theta, eq.value, eq.argmax});
      const auto ep = exponent(WhichExponent::P, theta);
      table_p_.push_back({theta, ep.value, ep.argmax});
    }
  }
}

void ExponentProfile::build_mc_psi_grid() {
  // One shared sample set across the whole lambda grid.
  const long samples = 10000000;
  const int grid = 41;
  std::vector<double> sums(grid, 0.0), sums_sq(grid, 0.0);
  RngStream rng(0xca0c4eedULL);
  for (long t = 0; t < samples; ++t) {
    const auto [a, b] = pair_.sample(Hypothesis::Null, rng);
    const double llr = pair_.llr(a, b);
    for (int i = 0; i < grid; ++i) {
      const double v = safe_exp(static_cast<double>(i) / (grid - 1) * llr);
      sums[i] += v;
      sums_sq[i] += v * v;
    }
  }
  mc_psi_grid_.resize(grid);
  psi_accuracy_ = 0.0;
  for (int i = 0; i < grid; ++i) {
    const double mean = sums[i] / samples;
    const double var = std::max(0.0, sums_sq[i] / samples - mean * mean);
    mc_psi_grid_[i] = std::log(mean);
    // delta method: half-width of log(mean)
    psi_accuracy_ = std::max(
        psi_accuracy_, 1.96 * std::sqrt(var / samples) / mean);
  }
  // both endpoints are logs of exact unit integrals
  mc_psi_grid_.front() = 0.0;
  mc_psi_grid_.back() = 0.0;
}

double ExponentProfile::psi_q_impl(double lambda) const {
  if (has_gaussian_closed_form(pair_))
    return gaussian_psi_q(pair_.as_gaussian()->rho, lambda);
  if (!mc_psi_grid_.empty()) {
    if (lambda < 0.0 || lambda > 1.0) return kInf;
    const int grid = static_cast<int>(mc_psi_grid_.size());
    const double x = lambda * (grid - 1);
    const int i = std::min(grid - 2, static_cast<int>(x));
    const double frac = x - i;
    return (1.0 - frac) * mc_psi_grid_[i] + frac * mc_psi_grid_[i + 1];
  }
  if (pair_.support() == Support::FiniteAlphabet)
    return psi_discrete(pair_.joint_table(), pair_.marginal_masses(), lambda);
  // E_Q[L^lambda] with the exponents fused; unbounded growth on the
  // quadrature tail is flagged as +inf.
  const double tail_tol =
      pair_.support() == Support::NonnegativeInteger ? 1e-8 : 1e-4;
  try {
    const auto r = expect_pair_mgf(pair_, lambda);
    if (!std::isfinite(r.value) || r.value > 1e290 ||
        r.abs_error > tail_tol * std::max(1.0, std::abs(r.value)))
      return kInf;
    return std::log(r.value);
  } catch (const std::exception&) {
    return kInf;
  }
}

double ExponentProfile::psi_q(double lambda) const {
  if (lambda == 0.0) return 0.0;
  if (lambda < domain_q_.first || lambda > domain_q_.second) return kInf;
  return psi_q_impl(lambda);
}

double ExponentProfile::psi_p(double lambda) const { return psi_q(lambda + 1.0); }

ExponentValue ExponentProfile::exponent(WhichExponent which, double theta) const {
  const double shift = which == WhichExponent::P ? 1.0 : 0.0;
  const double lo = domain_q_.first - shift;
  const double hi = domain_q_.second - shift;
  auto g = [&](double lambda) {
    const double psi = psi_q(lambda + shift);
    return psi == kInf ? -kInf : lambda * theta - psi;
  };
  // The maximizer sits at 0 when theta is at the zero of the exponent.
  const auto m = maximize_concave(g, lo, hi, 0.0);
  if (m.unbounded) return {kInf, m.argmax};
  return {std::max(m.value, 0.0), m.argmax};
}

double ExponentProfile::inverse_exponent(WhichExponent which, double y) const {
  if (y < 0.0) throw parameter_error("inverse_exponent: level must be >= 0");
  const double zero_point = which == WhichExponent::P ? kl_pq_ : -kl_qp_;
  if (y == 0.0) return zero_point;
  auto value_at = [&](double theta) { return exponent(which, theta).value; };
  double lo = zero_point;
  double step = std::max(0.5, std::abs(zero_point));
  double hi = lo + step;
  int guard = 0;
  while (value_at(hi) < y) {
    step *= 2.0;
    hi = lo + step;
    if (hi > 1e8 || ++guard > 80)
      throw unreachable_level_error(
          "inverse_exponent: level above the curve's reachable range");
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double e = value_at(mid);
    if (std::isfinite(e) && std::abs(e - y) < 1e-9) return mid;
    (e < y ? lo : hi) = mid;
    if (hi - lo < 1e-13 * std::max(1.0, std::abs(hi))) break;
  }
  return 0.5 * (lo + hi);
}

double ExponentProfile::chernoff_information() const {
  auto g = [&](double lambda) {
    const double psi = psi_q(lambda);
    return psi == kInf ? -kInf : -psi;
  };
  const auto m = maximize_concave(g, 0.0, 1.0, 0.5);
  const double c = std::max(m.value, 0.0);
  // c >= -log(1 - H^2/2) holds by evaluating at lambda = 1/2.
  const double h2 = divergence(pair_, DivergenceKind::Hellinger2);
  const double lower = -std::log1p(-0.5 * h2);
  const double slack = std::max(1e-8, 5.0 * psi_accuracy_);
  if (c + slack < lower)
    throw numeric_error("chernoff_information fell below its Hellinger bound",
                        lower - c);
  return c;
}

const std::vector<LegendreSample>& ExponentProfile::legendre_table(
    WhichExponent which) const {
  return which == WhichExponent::P ? table_p_ : table_q_;
}

// ---------------------------------------------------------------------------
// Theorem 1 conditions and distribution classes
// ---------------------------------------------------------------------------

Theorem1Report theorem1_condition(const DistributionPair& pair, int n,
                                  double alpha, double eps, double delta_n,
                                  Theorem1Form form) {
  if (n < 3) throw parameter_error("theorem1_condition: n must be >= 3");
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw parameter_error("theorem1_condition: alpha must lie in (0,1)");
  if (!(eps > 0.0)) throw parameter_error("theorem1_condition: eps must be > 0");
  if (delta_n < 0.0)
    throw parameter_error("theorem1_condition: delta_n must be >= 0");

  const double logn = std::log(static_cast<double>(n));
  const double kl = divergence(pair, DivergenceKind::KlPq);

  if (form == Theorem1Form::ReducedD1) {
    ConditionSide side{kl, (2.0 - eps) * logn / n, false};
    side.holds = side.lhs <= side.rhs;
    return {side.holds, side, side, form};
  }

  const double chi2 = divergence(pair, DivergenceKind::Chi2);
  const double var = divergence(pair, DivergenceKind::VarLlrP);

  ConditionSide a{};
  a.lhs = chi2;
  a.rhs = form == Theorem1Form::ProofConstant
              ? (2.0 * std::log(alpha * n) - 4.0) / (alpha * n)
              : (2.0 - eps) * logn / (alpha * n);
  a.holds = a.lhs <= a.rhs;

  ConditionSide b{};
  b.lhs = kl + delta_n * var;
  b.rhs = (2.0 - eps) * logn / n;
  b.holds = b.lhs <= b.rhs;

  return {a.holds && b.holds, a, b, form};
}

ClassReport class_membership(const DistributionPair& pair, PairClass which,
                             double C) {
  if (!(C > 1.0)) throw parameter_error("class_membership: C must exceed 1");
  if (which == PairClass::D1) {
    const double chi2 = divergence(pair, DivergenceKind::Chi2);
    const double kl = divergence(pair, DivergenceKind::KlPq);
    const double violation = chi2 - C * kl;
    return {violation <= 1e-12, -violation, violation};
  }
  const ExponentProfile profile{pair};
  const double kl_pq = profile.kl_pq();
  const double kl_qp = profile.kl_qp();
  double max_violation = -kInf;
  const int grid = 201;
  for (int i = 0; i < grid; ++i) {
    const double lambda = -1.0 + 2.0 * i / (grid - 1);
    const double bound_p = kl_pq * lambda + C * kl_pq * lambda * lambda;
    const double bound_q = -kl_qp * lambda + C * kl_qp * lambda * lambda;
    max_violation = std::max(max_violation, profile.psi_p(lambda) - bound_p);
    max_violation = std::max(max_violation, profile.psi_q(lambda) - bound_q);
  }
  return {max_violation <= 1e-12, -max_violation, max_violation};
}

double find_class_constant(const DistributionPair& pair, PairClass which,
                           double c_max) {
  for (double c = 1.0000001; c <= c_max; c *= 2.0) {
    if (class_membership(pair, which, c).holds) return c;
  }
  return -1.0;
}

}  // namespace graphdep
