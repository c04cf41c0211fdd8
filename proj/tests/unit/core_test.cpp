#include <cmath>

#include "doctest.h"
#include "ctmcfit/ctmc.hpp"
#include "ctmcfit/errors.hpp"
#include "ctmcfit/rate_expr.hpp"
#include "ctmcfit/rng.hpp"
#include "oracle.hpp"

using namespace ctmcfit;

namespace {

Monomial mono(double c, std::vector<unsigned> e) { return {c, std::move(e)}; }

RateExpr random_expr(Rng& rng, std::size_t arity) {
  std::vector<Monomial> terms;
  const int n = 1 + static_cast<int>(rng.uniform() * 3);
  for (int k = 0; k < n; ++k) {
    Monomial m{rng.uniform(0.0, 3.0), std::vector<unsigned>(arity, 0)};
    for (auto& e : m.exponents) e = static_cast<unsigned>(rng.uniform() * 3);
    terms.push_back(m);
  }
  return RateExpr::from_terms(arity, terms);
}

}  // namespace

TEST_CASE("param space validates names and fixed values") {
  CHECK_THROWS_AS(ParamSpace({"a", "a"}), ModelError);
  CHECK_THROWS_AS(ParamSpace({""}), ModelError);
  ParamSpace p({"beta", "gamma", "plock"});
  p.fix(2, 0.472081);
  CHECK(p.is_fixed(2));
  CHECK(p.free_names() == std::vector<std::string>{"beta", "gamma"});
  CHECK_THROWS_AS(p.fix(0, -1.0), ModelError);
  CHECK(*p.index_of("gamma") == 1);
  CHECK_FALSE(p.index_of("delta"));
  p.unfix(2);
  CHECK(p.free_indices().size() == 3);
}

TEST_CASE("monomial constancy and degree") {
  CHECK(mono(3, {0, 0}).is_constant());
  CHECK(mono(0, {1, 2}).is_constant());
  CHECK_FALSE(mono(1, {1, 0}).is_constant());
  CHECK(mono(1, {1, 2}).degree() == 3);
}

TEST_CASE("evaluate") {
  const auto e = RateExpr::from_terms(2, {mono(3, {1, 2})});
  CHECK(evaluate(e, std::vector<double>{1, 1}) == 3.0);
  CHECK(evaluate(RateExpr(2), std::vector<double>{0.3, 7}) == 0.0);
  const auto lin = RateExpr::from_terms(1, {mono(2, {1}), mono(5, {0})});
  CHECK(evaluate(lin, std::vector<double>{0.5}) == doctest::Approx(6.0));
  CHECK_THROWS_AS(evaluate(lin, std::vector<double>{0.5, 1}), DimensionError);
}

TEST_CASE("rate_add and rate_mul") {
  const auto x1 = RateExpr::variable(2, 0);
  const auto x2 = RateExpr::variable(2, 1);
  CHECK(rate_mul(x1, x2) == RateExpr::from_terms(2, {mono(1, {1, 1})}));
  CHECK(rate_add(RateExpr::variable(2, 0, 2), RateExpr::variable(2, 0, 3)) ==
        RateExpr::from_terms(2, {mono(5, {1, 0})}));
  const auto a = rate_add(RateExpr::variable(2, 0, 2), RateExpr::constant(2, 1));
  const auto prod = rate_mul(a, RateExpr::variable(2, 1, 3));
  CHECK(prod == RateExpr::from_terms(2, {mono(6, {1, 1}), mono(3, {0, 1})}));
  CHECK(prod.terms().size() == 2);
  CHECK_THROWS_AS(rate_add(x1, RateExpr::variable(3, 0)), DimensionError);
  CHECK_THROWS_AS(RateExpr::from_terms(1, {mono(-1, {1})}), ModelError);
}

TEST_CASE("semiring laws hold at random valuations") {
  Rng rng(7);
  for (int trial = 0; trial < 10; ++trial) {
    const std::size_t n = 3;
    const auto a = random_expr(rng, n), b = random_expr(rng, n), c = random_expr(rng, n);
    for (int k = 0; k < 20; ++k) {
      const auto v = testing::random_valuation(rng, n, 0.0, 2.0);
      auto ev = [&](const RateExpr& e) { return evaluate(e, v); };
      CHECK(ev(a + b) == doctest::Approx(ev(b + a)).epsilon(1e-12));
      CHECK(ev(a * b) == doctest::Approx(ev(b * a)).epsilon(1e-12));
      CHECK(ev((a + b) + c) == doctest::Approx(ev(a + (b + c))).epsilon(1e-12));
      CHECK(ev((a * b) * c) == doctest::Approx(ev(a * (b * c))).epsilon(1e-12));
      CHECK(ev(a * (b + c)) == doctest::Approx(ev(a * b + a * c)).epsilon(1e-12));
      CHECK(ev(a + b) == doctest::Approx(ev(a) + ev(b)).epsilon(1e-12));
      CHECK(ev(a * b) == doctest::Approx(ev(a) * ev(b)).epsilon(1e-12));
    }
    // Canonical form makes algebraically equal sums compare equal.
    CHECK(a + b == b + a);
  }
}

TEST_CASE("parametric ctmc invariants") {
  ParamSpace p({"x"});
  CHECK_THROWS_AS(ParametricCtmc(p, {{0}, {1}}, {0.5, 0.4}, {}), ModelError);
  CHECK_THROWS_AS(ParametricCtmc(p, {{0}, {1}}, {1.0, 0.0}, {{0, 2, mono(1, {1})}}), ModelError);
  CHECK_THROWS_AS(ParametricCtmc(p, {{0}, {1}}, {1.0, 0.0}, {{0, 1, mono(0, {1})}}), ModelError);
  CHECK_THROWS_AS(ParametricCtmc(p, {{0}, {1}}, {1.0, 0.0}, {{0, 1, mono(1, {1, 0})}}), DimensionError);
  const ParametricCtmc m(p, {{0}, {1}}, {1.0, 0.0}, {{0, 1, mono(1, {1})}, {0, 1, mono(2, {0})}});
  CHECK(m.outgoing(0).size() == 2);
  CHECK(m.outgoing(1).empty());
}

TEST_CASE("normalize_transitions splits and drops") {
  ParamSpace p({"x"});
  std::vector<RateEdge> edges;
  edges.push_back({0, 1, RateExpr::from_terms(1, {mono(2, {1}), mono(3, {0})})});
  edges.push_back({1, 0, RateExpr::from_terms(1, {mono(4, {2})})});
  edges.push_back({1, 1, RateExpr::from_terms(1, {mono(0, {0})})});
  const auto m = normalize_transitions(p, {{0}, {1}}, {1.0, 0.0}, edges);
  REQUIRE(m.transition_count() == 3);
  // Canonical order puts the constant term first.
  CHECK(m.transitions()[0].rate == mono(3, {0}));
  CHECK(m.transitions()[1].rate == mono(2, {1}));
  CHECK(m.transitions()[2].rate == mono(4, {2}));
}

TEST_CASE("normalization preserves rates at random valuations") {
  Rng rng(11);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 3, arity = 2;
    std::vector<RateEdge> edges;
    for (std::size_t s = 0; s < n; ++s)
      for (std::size_t t = 0; t < n; ++t)
        if (rng.uniform() < 0.5) edges.push_back({s, t, random_expr(rng, arity)});
    const auto m = normalize_transitions(ParamSpace({"a", "b"}), {{0}, {1}, {2}}, {1.0, 0.0, 0.0}, edges);
    for (int k = 0; k < 5; ++k) {
      const auto v = testing::random_valuation(rng, arity, 0.0, 3.0);
      const auto c = instantiate(m, v);
      for (std::size_t s = 0; s < n; ++s)
        for (std::size_t t = 0; t < n; ++t) {
          double expected = 0.0;
          for (const auto& e : edges)
            if (e.source == s && e.target == t) expected += evaluate(e.rate, v);
          CHECK(testing::relative_difference(c.rate(s, t), expected) <= 1e-12);
        }
    }
  }
}

TEST_CASE("instantiate, exits and embedded chain") {
  ParamSpace p({"x"});
  const ParametricCtmc m(p, {{0}, {1}, {2}}, {1.0, 0.0, 0.0},
                         {{0, 1, mono(1, {1})}, {0, 2, mono(3, {0})}, {1, 2, mono(2, {1})}});
  const auto c = instantiate(m, std::vector<double>{1.0});
  CHECK(c.exit(0) == 4.0);
  CHECK(c.absorbing(2));
  const auto emb = embedded_dtmc(c);
  CHECK(emb.at(0, 1) == doctest::Approx(0.25));
  CHECK(emb.at(0, 2) == doctest::Approx(0.75));
  CHECK(emb.at(2, 2) == 1.0);
  for (std::size_t s = 0; s < 3; ++s) CHECK(emb.row_sum(s) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(instantiate(m, std::vector<double>{-1.0}), ModelError);
  CHECK_THROWS_AS(instantiate(m, std::vector<double>{1.0, 2.0}), DimensionError);
}

TEST_CASE("embedded chain of a two-state chain and a 3-cycle") {
  const ConcreteCtmc two({{0}, {1}}, {1.0, 0.0}, {{0, 1, 3.0}});
  const auto e2 = embedded_dtmc(two);
  CHECK(e2.at(0, 0) == 0.0);
  CHECK(e2.at(0, 1) == 1.0);
  CHECK(e2.at(1, 0) == 0.0);
  CHECK(e2.at(1, 1) == 1.0);
  const ConcreteCtmc cyc({{0}, {1}, {2}}, {1.0, 0.0, 0.0}, {{0, 1, 0.7}, {1, 2, 0.7}, {2, 0, 0.7}});
  const auto e3 = embedded_dtmc(cyc);
  CHECK(e3.at(0, 1) == 1.0);
  CHECK(e3.at(1, 2) == 1.0);
  CHECK(e3.at(2, 0) == 1.0);
}

TEST_CASE("constant chains instantiate identically for every valuation") {
  ParamSpace p({"x"});
  const ParametricCtmc m(p, {{0}, {1}}, {1.0, 0.0}, {{0, 1, mono(2.5, {0})}});
  for (double x : {0.0, 0.1, 5.0}) CHECK(instantiate(m, std::vector<double>{x}).rate(0, 1) == 2.5);
}

TEST_CASE("exit equals summed rates on random chains") {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const auto m = testing::random_model(rng);
    const auto c = instantiate(m, testing::random_valuation(rng, m.params().size()));
    const auto emb = embedded_dtmc(c);
    for (std::size_t s = 0; s < c.state_count(); ++s) {
      double sum = 0.0;
      for (std::size_t t = 0; t < c.state_count(); ++t) sum += c.rate(s, t);
      CHECK(testing::relative_difference(sum, c.exit(s)) <= 1e-12);
      CHECK(std::abs(emb.row_sum(s) - 1.0) <= 1e-12);
    }
  }
}
