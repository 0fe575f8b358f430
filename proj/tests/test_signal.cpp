#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "proxkit/signal.hpp"

using namespace proxkit;

TEST_CASE("real vector basics") {
  Signal x = Signal::vec({1.0, -2.0, 3.0});
  CHECK(x.numel() == 3);
  CHECK(x.rsize() == 3);
  CHECK(x[1] == -2.0);
  CHECK(x.modulus(1) == 2.0);
  CHECK(norm1(x) == 6.0);
  CHECK(norm_inf(x) == 3.0);
  CHECK(norm2(x) == doctest::Approx(std::sqrt(14.0)));
}

TEST_CASE("complex storage is interleaved") {
  Signal z = Signal::cvec({{1.0, 2.0}, {-3.0, 4.0}});
  CHECK(z.numel() == 2);
  CHECK(z.rsize() == 4);
  CHECK(z[0] == 1.0);
  CHECK(z[1] == 2.0);
  CHECK(z.cplx(1) == std::complex<double>(-3.0, 4.0));
  CHECK(z.modulus(1) == 5.0);
  CHECK(norm1(z) == doctest::Approx(std::sqrt(5.0) + 5.0));
  // the norm treats C^n as R^2n
  CHECK(norm2(z) == doctest::Approx(std::sqrt(1 + 4 + 9 + 16)));
}

TEST_CASE("inner product is the real part of the hermitian product") {
  Signal a = Signal::cvec({{1.0, 1.0}});
  Signal b = Signal::cvec({{2.0, -1.0}});
  // Re<a,b> = Re((1+i) * conj(2-i)) = Re((1+i)(2+i)) = 1
  CHECK(inner(a, b) == doctest::Approx(1.0));
}

TEST_CASE("axpy family") {
  Signal x = Signal::vec({1.0, 2.0});
  Signal y = Signal::vec({10.0, 20.0});
  Signal r = axpy(2.0, x, y);
  CHECK(r[0] == 12.0);
  CHECK(r[1] == 24.0);
  axpy_inplace(-1.0, x, y);
  CHECK(y[0] == 9.0);
  Signal s = sub(r, scaled(2.0, x));
  CHECK(s[0] == 10.0);
  CHECK(s[1] == 20.0);
}

TEST_CASE("space mismatch is rejected") {
  Signal a = Signal::vec({1.0, 2.0});
  Signal b = Signal::vec({1.0, 2.0, 3.0});
  Signal c = Signal::zeros({2}, Field::Complex);
  CHECK_THROWS_AS(inner(a, b), std::invalid_argument);
  CHECK_THROWS_AS(axpy(1.0, a, c), std::invalid_argument);
}

TEST_CASE("shape data consistency enforced") {
  CHECK_THROWS_AS(Signal({3}, Field::Real, {1.0, 2.0}),
                  std::invalid_argument);
  CHECK_NOTHROW(Signal({2}, Field::Complex, {1.0, 2.0, 3.0, 4.0}));
}

TEST_CASE("tuple lifts behave componentwise") {
  SignalTuple a = {Signal::vec({1.0}), Signal::vec({2.0, 2.0})};
  SignalTuple b = {Signal::vec({3.0}), Signal::vec({1.0, -1.0})};
  CHECK(inner(a, b) == doctest::Approx(3.0 + 2.0 - 2.0));
  CHECK(norm_inf(a) == 2.0);
  SignalTuple r = axpy(2.0, a, b);
  CHECK(r[0][0] == 5.0);
  CHECK(r[1][1] == 3.0);
  CHECK(is_finite(r));
  r[1][0] = std::numeric_limits<double>::quiet_NaN();
  CHECK(!is_finite(r));
}
