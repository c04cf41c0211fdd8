#pragma once

#include <vector>

namespace ctmcfit {

/// One c * y^degree term of an update polynomial.
struct UpdateTerm {
  unsigned degree = 1;
  double coeff = 0.0;
};

/// sum_k c_k y^(d_k) + constant, with d_k >= 1, c_k >= 0 and constant <= 0.
///
/// Such a polynomial is nondecreasing and convex on y >= 0, so it has a
/// unique positive root whenever the constant is negative and some term is
/// positive.
struct UpdatePolynomial {
  std::vector<UpdateTerm> terms;
  double constant = 0.0;

  double operator()(double y) const;
  double derivative(double y) const;
  /// Throws ModelError when degrees, coefficients or the constant break the sign rules.
  void validate() const;
};

/// Unique nonnegative root of p.
///
/// Returns 0 when the constant is 0. Otherwise expands the bracket [0, 1]
/// geometrically until p changes sign, then runs Newton steps that fall back
/// to bisection whenever they leave the bracket. Stops when |p(y)| <= tol*|constant|
/// or the bracket collapses to machine precision (at most 200 iterations).
/// Throws NoRootError when constant < 0 and every coefficient is zero.
double positive_root(const UpdatePolynomial& p, double tol = 1e-12);

}  // namespace ctmcfit
