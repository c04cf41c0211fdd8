#include <cmath>

#include "doctest.h"
#include "ctmcfit/errors.hpp"
#include "ctmcfit/polysolve.hpp"
#include "ctmcfit/rng.hpp"

using namespace ctmcfit;

TEST_CASE("positive_root on small polynomials") {
  CHECK(positive_root({{{1, 1.0}}, -4.0}) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(positive_root({{{2, 1.0}}, -4.0}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(positive_root({{{1, 1.0}, {2, 1.0}}, -6.0}) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(positive_root({{{3, 2.0}}, 0.0}) == 0.0);
}

TEST_CASE("positive_root errors") {
  CHECK_THROWS_AS(positive_root({{}, -1.0}), NoRootError);
  CHECK_THROWS_AS(positive_root({{{1, 0.0}}, -1.0}), NoRootError);
  CHECK_THROWS_AS(positive_root({{{1, 1.0}}, 1.0}), ModelError);
  CHECK_THROWS_AS(positive_root({{{0, 1.0}}, -1.0}), ModelError);
  CHECK_THROWS_AS(positive_root({{{1, -1.0}}, -1.0}), ModelError);
}

TEST_CASE("single-degree polynomials agree with the closed form") {
  Rng rng(5);
  for (int i = 0; i < 200; ++i) {
    const unsigned d = 1 + static_cast<unsigned>(rng.uniform() * 6);
    const double c = std::exp(rng.uniform(-8, 8));
    const double n = std::exp(rng.uniform(-8, 8));
    const double root = positive_root({{{d, c}}, -n});
    const double closed = std::pow(n / c, 1.0 / d);
    CHECK(std::abs(root - closed) <= 1e-12 * closed);
  }
}

TEST_CASE("random polynomials: root is a sign change and grows with the constant") {
  Rng rng(6);
  for (int i = 0; i < 200; ++i) {
    UpdatePolynomial p;
    const int terms = 1 + static_cast<int>(rng.uniform() * 4);
    for (int k = 0; k < terms; ++k)
      p.terms.push_back({1 + static_cast<unsigned>(rng.uniform() * 5), std::exp(rng.uniform(-4, 4))});
    p.constant = -std::exp(rng.uniform(-4, 4));
    const double y = positive_root(p);
    CHECK(y > 0.0);
    CHECK(std::abs(p(y)) <= 1e-10 * std::abs(p.constant));
    UpdatePolynomial q = p;
    q.constant *= 2.0;
    CHECK(positive_root(q) > y);
  }
}
