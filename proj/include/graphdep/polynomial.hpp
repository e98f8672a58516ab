#pragma once

#include <vector>

namespace graphdep {

/// Dense polynomial in one variable, coeffs[j] is the coefficient of x^j.
using Poly = std::vector<double>;

double poly_eval(const Poly& p, double x);
Poly poly_add(const Poly& p, const Poly& q);
Poly poly_scale(const Poly& p, double c);
Poly poly_mul(const Poly& p, const Poly& q);
int poly_degree(const Poly& p);

/// x (x-1) ... (x-order+1); the empty product for order 0.
Poly falling_factorial(int order);

/// Stirling number of the second kind S(n, k).
double stirling2(int n, int k);

/// Binomial coefficient as a double.
double binomial_coefficient(int n, int k);

}  // namespace graphdep
