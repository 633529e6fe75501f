#include <doctest.h>

#include <cmath>

#include "bcj/exppoly.hpp"

using namespace bcj;

TEST_CASE("terms merge and prune") {
  ExpPolySum f = ExpPolySum::term(2, 1, -3) + ExpPolySum::term(1.5, 1, -3) + ExpPolySum::term(4, 0, 0);
  CHECK(f.terms().size() == 2);
  f += ExpPolySum::term(-4, 0, 0);
  CHECK(f.terms().size() == 1);
  CHECK(f(0) == 0);
  const double t = 0.7;
  CHECK(f(t) == doctest::Approx(3.5 * t * std::exp(-3 * t)));
}

TEST_CASE("value at zero is the constant part") {
  const ExpPolySum f = ExpPolySum::term(2, 0, -1) + ExpPolySum::term(5, 2, 3) + ExpPolySum::term(-1, 0, 4);
  CHECK(f(0) == doctest::Approx(1));
}

TEST_CASE("derivative and product") {
  const ExpPolySum f = ExpPolySum::term(2, 2, -1) + ExpPolySum::constant(1);
  const ExpPolySum g = ExpPolySum::term(3, 0, 2);
  const double t = 0.4, h = 1e-6;
  CHECK(f.derivative()(t) == doctest::Approx((f(t + h) - f(t - h)) / (2 * h)).epsilon(1e-8));
  CHECK((f * g)(t) == doctest::Approx(f(t) * g(t)).epsilon(1e-14));
}

TEST_CASE("linear solve") {
  // y' = -2 y + 3 e^{-t}, y(0) = 1  =>  y = 3 e^{-t} - 2 e^{-2t}
  const auto y = ExpPolySum::solve_linear(-2, 1, ExpPolySum::term(3, 0, -1));
  for (double t : {0.0, 0.3, 2.0}) CHECK(y(t) == doctest::Approx(3 * std::exp(-t) - 2 * std::exp(-2 * t)));
  // resonant forcing: y' = -2 y + e^{-2t}, y(0) = 0  =>  y = t e^{-2t}
  const auto r = ExpPolySum::solve_linear(-2, 0, ExpPolySum::term(1, 0, -2));
  CHECK(r(1.3) == doctest::Approx(1.3 * std::exp(-2.6)));
}
