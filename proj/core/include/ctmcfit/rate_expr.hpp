#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace ctmcfit {

/// coeff * prod_j x_j^exponents[j], with coeff >= 0.
struct Monomial {
  double coeff = 0.0;
  std::vector<unsigned> exponents;

  /// True when no parameter occurs (all exponents zero) or the coefficient is zero.
  bool is_constant() const noexcept;
  /// Total degree, sum of exponents.
  unsigned degree() const noexcept;
  double evaluate(std::span<const double> valuation) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;
};

/// Polynomial with nonnegative coefficients over a fixed number of parameters.
///
/// Terms are kept in canonical order (sorted by exponent vector) and like
/// monomials are merged, so two expressions built from the same sum compare equal.
class RateExpr {
 public:
  explicit RateExpr(std::size_t arity = 0) : arity_(arity) {}

  static RateExpr constant(std::size_t arity, double value);
  static RateExpr variable(std::size_t arity, std::size_t index, double coeff = 1.0);
  static RateExpr from_terms(std::size_t arity, std::vector<Monomial> terms);

  std::size_t arity() const noexcept { return arity_; }
  const std::vector<Monomial>& terms() const noexcept { return terms_; }
  bool empty() const noexcept { return terms_.empty(); }

  double evaluate(std::span<const double> valuation) const;

  friend bool operator==(const RateExpr&, const RateExpr&) = default;

 private:
  void canonicalize();

  std::size_t arity_ = 0;
  std::vector<Monomial> terms_;
};

double evaluate(const RateExpr& expr, std::span<const double> valuation);
RateExpr rate_add(const RateExpr& a, const RateExpr& b);
RateExpr rate_mul(const RateExpr& a, const RateExpr& b);

inline RateExpr operator+(const RateExpr& a, const RateExpr& b) { return rate_add(a, b); }
inline RateExpr operator*(const RateExpr& a, const RateExpr& b) { return rate_mul(a, b); }

}  // namespace ctmcfit
