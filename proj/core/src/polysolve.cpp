#include "ctmcfit/polysolve.hpp"

#include <cmath>
#include <limits>

#include "ctmcfit/errors.hpp"

namespace ctmcfit {

double UpdatePolynomial::operator()(double y) const {
  double sum = constant;
  for (const auto& t : terms) sum += t.coeff * std::pow(y, static_cast<double>(t.degree));
  return sum;
}

double UpdatePolynomial::derivative(double y) const {
  double sum = 0.0;
  for (const auto& t : terms)
    sum += t.coeff * static_cast<double>(t.degree) * std::pow(y, static_cast<double>(t.degree) - 1.0);
  return sum;
}

void UpdatePolynomial::validate() const {
  if (!(constant <= 0.0)) throw ModelError("update polynomial constant must be <= 0");
  for (const auto& t : terms) {
    if (t.degree < 1) throw ModelError("update polynomial degrees must be >= 1");
    if (!(t.coeff >= 0.0)) throw ModelError("update polynomial coefficients must be >= 0");
  }
}

double positive_root(const UpdatePolynomial& p, double tol) {
  p.validate();
  if (p.constant == 0.0) return 0.0;
  bool any_positive = false;
  for (const auto& t : p.terms) any_positive = any_positive || t.coeff > 0.0;
  if (!any_positive) throw NoRootError("update polynomial has no positive term; parameter is not identifiable here");

  const double target = tol * std::abs(p.constant);
  double lo = 0.0;
  double hi = 1.0;
  while (p(hi) < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw NoRootError("update polynomial root exceeds double range");
  }

  double y = hi;
  for (int iter = 0; iter < 200; ++iter) {
    const double value = p(y);
    if (std::abs(value) <= target) return y;
    if (value < 0.0) {
      lo = y;
    } else {
      hi = y;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) return 0.5 * (lo + hi);
    const double slope = p.derivative(y);
    double next = slope > 0.0 ? y - value / slope : lo - 1.0;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    y = next;
  }
  return y;
}

}  // namespace ctmcfit
