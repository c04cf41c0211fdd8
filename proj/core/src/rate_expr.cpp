#include "ctmcfit/rate_expr.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ctmcfit/errors.hpp"

namespace ctmcfit {

bool Monomial::is_constant() const noexcept {
  if (coeff == 0.0) return true;
  return std::all_of(exponents.begin(), exponents.end(), [](unsigned a) { return a == 0; });
}

unsigned Monomial::degree() const noexcept {
  return std::accumulate(exponents.begin(), exponents.end(), 0u);
}

double Monomial::evaluate(std::span<const double> valuation) const {
  if (valuation.size() != exponents.size())
    throw DimensionError("valuation has " + std::to_string(valuation.size()) +
                         " entries, expected " + std::to_string(exponents.size()));
  double value = coeff;
  for (std::size_t j = 0; j < exponents.size(); ++j) {
    for (unsigned e = 0; e < exponents[j]; ++e) value *= valuation[j];
  }
  return value;
}

RateExpr RateExpr::constant(std::size_t arity, double value) {
  return from_terms(arity, {Monomial{value, std::vector<unsigned>(arity, 0)}});
}

RateExpr RateExpr::variable(std::size_t arity, std::size_t index, double coeff) {
  if (index >= arity) throw DimensionError("variable index out of range");
  Monomial m{coeff, std::vector<unsigned>(arity, 0)};
  m.exponents[index] = 1;
  return from_terms(arity, {std::move(m)});
}

RateExpr RateExpr::from_terms(std::size_t arity, std::vector<Monomial> terms) {
  RateExpr out(arity);
  for (const auto& t : terms) {
    if (t.exponents.size() != arity) throw DimensionError("monomial arity mismatch");
    if (!(t.coeff >= 0.0)) throw ModelError("rate monomial with negative coefficient");
  }
  out.terms_ = std::move(terms);
  out.canonicalize();
  return out;
}

void RateExpr::canonicalize() {
  std::stable_sort(terms_.begin(), terms_.end(),
                   [](const Monomial& a, const Monomial& b) { return a.exponents < b.exponents; });
  std::vector<Monomial> merged;
  merged.reserve(terms_.size());
  for (auto& t : terms_) {
    if (!merged.empty() && merged.back().exponents == t.exponents) {
      merged.back().coeff += t.coeff;
    } else {
      merged.push_back(std::move(t));
    }
  }
  terms_ = std::move(merged);
}

double RateExpr::evaluate(std::span<const double> valuation) const {
  if (valuation.size() != arity_)
    throw DimensionError("valuation has " + std::to_string(valuation.size()) +
                         " entries, expected " + std::to_string(arity_));
  double sum = 0.0;
  for (const auto& t : terms_) sum += t.evaluate(valuation);
  return sum;
}

double evaluate(const RateExpr& expr, std::span<const double> valuation) {
  return expr.evaluate(valuation);
}

RateExpr rate_add(const RateExpr& a, const RateExpr& b) {
  if (a.arity() != b.arity()) throw DimensionError("rate_add over different parameter spaces");
  std::vector<Monomial> terms = a.terms();
  terms.insert(terms.end(), b.terms().begin(), b.terms().end());
  return RateExpr::from_terms(a.arity(), std::move(terms));
}

RateExpr rate_mul(const RateExpr& a, const RateExpr& b) {
  if (a.arity() != b.arity()) throw DimensionError("rate_mul over different parameter spaces");
  std::vector<Monomial> terms;
  terms.reserve(a.terms().size() * b.terms().size());
  for (const auto& x : a.terms()) {
    for (const auto& y : b.terms()) {
      Monomial m{x.coeff * y.coeff, x.exponents};
      for (std::size_t j = 0; j < m.exponents.size(); ++j) m.exponents[j] += y.exponents[j];
      terms.push_back(std::move(m));
    }
  }
  return RateExpr::from_terms(a.arity(), std::move(terms));
}

}  // namespace ctmcfit
