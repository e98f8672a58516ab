#include "graphdep/polynomial.hpp"

#include <cmath>
#include <cstddef>

namespace graphdep {

double poly_eval(const Poly& p, double x) {
  double acc = 0.0;
  for (std::size_t j = p.size(); j-- > 0;) acc = acc * x + p[j];
  return acc;
}

Poly poly_add(const Poly& p, const Poly& q) {
  Poly r(std::max(p.size(), q.size()), 0.0);
  for (std::size_t j = 0; j < p.size(); ++j) r[j] += p[j];
  for (std::size_t j = 0; j < q.size(); ++j) r[j] += q[j];
  return r;
}

Poly poly_scale(const Poly& p, double c) {
  Poly r = p;
  for (double& v : r) v *= c;
  return r;
}

Poly poly_mul(const Poly& p, const Poly& q) {
  if (p.empty() || q.empty()) return {};
  Poly r(p.size() + q.size() - 1, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i)
    for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
  return r;
}

int poly_degree(const Poly& p) {
  for (std::size_t j = p.size(); j-- > 0;)
    if (p[j] != 0.0) return static_cast<int>(j);
  return -1;
}

Poly falling_factorial(int order) {
  Poly r{1.0};
  for (int t = 0; t < order; ++t) r = poly_mul(r, Poly{-static_cast<double>(t), 1.0});
  return r;
}

double stirling2(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  if (n == 0) return k == 0 ? 1.0 : 0.0;
  // S(n,k) = k S(n-1,k) + S(n-1,k-1)
  std::vector<double> row(static_cast<std::size_t>(n) + 1, 0.0);
  row[0] = 1.0;
  for (int i = 1; i <= n; ++i) {
    for (int j = i; j >= 1; --j) row[j] = j * row[j] + row[j - 1];
    row[0] = 0.0;
  }
  return row[k];
}

double binomial_coefficient(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace graphdep
