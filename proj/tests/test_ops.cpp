#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "proxkit/ops.hpp"

using namespace proxkit;

namespace {

std::vector<std::vector<double>> random_dense(int r, int c,
                                              std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> m(r, std::vector<double>(c));
  for (auto& row : m)
    for (double& v : row) v = g(rng);
  return m;
}

void check_adjoint(const Op& op, unsigned seed, int pairs = 20,
                   double tol = 1e-10) {
  std::mt19937_64 rng(seed);
  for (int p = 0; p < pairs; ++p)
    CHECK(oracle::adjoint_defect(op, rng) <= tol);
}

}  // namespace

TEST_CASE("matrix op matches dense arithmetic and its adjoint") {
  std::mt19937_64 rng(1);
  auto m = random_dense(4, 6, rng);
  OpPtr op = matrix_op(m);
  Signal x = oracle::random_signal({{6}, Field::Real}, rng);
  Signal y = apply(*op, x);
  for (int i = 0; i < 4; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 6; ++j) acc += m[i][j] * x[j];
    CHECK(y[i] == doctest::Approx(acc));
  }
  check_adjoint(*op, 2);
}

TEST_CASE("complex matrix adjoint uses the conjugate transpose") {
  std::vector<std::vector<std::complex<double>>> m = {
      {{1.0, 2.0}, {0.0, -1.0}}, {{3.0, 0.0}, {1.0, 1.0}}};
  OpPtr op = matrix_op_cplx(m);
  check_adjoint(*op, 3);
}

TEST_CASE("convolution matches the naive definition") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> h(7);
  for (double& v : h) v = g(rng);
  int n = 19;
  OpPtr op = conv_op(h, n);
  Signal x = oracle::random_signal({{n}, Field::Real}, rng);
  Signal y = apply(*op, x);
  std::vector<double> xe(x.raw(), x.raw() + n);
  std::vector<double> ye = oracle::naive_conv(h, xe);
  REQUIRE(y.numel() == static_cast<int64_t>(ye.size()));
  for (size_t i = 0; i < ye.size(); ++i)
    CHECK(y[i] == doctest::Approx(ye[i]).epsilon(1e-10));
  check_adjoint(*op, 5);
}

TEST_CASE("dft matches the direct sum and is unitary") {
  std::mt19937_64 rng(6);
  int n = 16;
  OpPtr f = dft_op(n);
  OpPtr fi = idft_op(n);
  Signal x = oracle::random_signal({{n}, Field::Complex}, rng);
  Signal y = apply(*f, x);
  std::vector<std::complex<double>> xe(n);
  for (int i = 0; i < n; ++i) xe[i] = x.cplx(i);
  auto ye = oracle::direct_dft(xe, -1);
  for (int i = 0; i < n; ++i)
    CHECK(std::abs(y.cplx(i) - ye[i]) < 1e-10);
  CHECK(norm2(y) == doctest::Approx(norm2(x)));
  Signal back = apply(*fi, y);
  CHECK(norm2(sub(back, x)) < 1e-10);
  check_adjoint(*f, 7);
  check_adjoint(*fi, 8);
  CHECK(*f->tight_frame_mu() == doctest::Approx(1.0));
}

TEST_CASE("real part of the inverse dft is a tight frame") {
  std::mt19937_64 rng(9);
  int n = 12;
  OpPtr op = idft_real_op(n);
  check_adjoint(*op, 10);
  // A A* = Id on real signals
  Signal y = oracle::random_signal({{n}, Field::Real}, rng);
  Signal round_trip = apply(*op, adjoint1(*op, y));
  CHECK(norm2(sub(round_trip, y)) < 1e-10);
}

TEST_CASE("cosine transform matches the direct sum and inverts") {
  std::mt19937_64 rng(11);
  int n = 24;
  OpPtr d = dct_op(n);
  OpPtr di = idct_op(n);
  Signal x = oracle::random_signal({{n}, Field::Real}, rng);
  Signal y = apply(*d, x);
  std::vector<double> xe(x.raw(), x.raw() + n);
  auto ye = oracle::direct_dct(xe);
  for (int i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(ye[i]));
  CHECK(norm2(y) == doctest::Approx(norm2(x)));
  CHECK(norm2(sub(apply(*di, y), x)) < 1e-10);
  check_adjoint(*d, 12);
  check_adjoint(*di, 13);
}

TEST_CASE("selection and diagonal scaling") {
  std::mt19937_64 rng(14);
  OpPtr s = select_op({4, 0, 2}, 6);
  Signal x = Signal::vec({0.0, 1.0, 2.0, 3.0, 4.0, 5.0});
  Signal y = apply(*s, x);
  CHECK(y[0] == 4.0);
  CHECK(y[1] == 0.0);
  CHECK(y[2] == 2.0);
  check_adjoint(*s, 15);
  CHECK(*s->tight_frame_mu() == doctest::Approx(1.0));

  OpPtr dg = diag_op(Signal::vec({2.0, -1.0, 0.5}));
  Signal z = apply(*dg, Signal::vec({1.0, 1.0, 1.0}));
  CHECK(z[0] == 2.0);
  CHECK(z[1] == -1.0);
  check_adjoint(*dg, 16);
}

TEST_CASE("finite differences on a small grid") {
  OpPtr v = variation_op(2, 3);
  // x = [0 1 3; 2 2 2]
  Signal x({2, 3}, Field::Real, {0.0, 1.0, 3.0, 2.0, 2.0, 2.0});
  Signal y = apply(*v, x);
  // pixel (0,0): vertical 2-0=2, horizontal 1-0=1
  CHECK(y[0] == 2.0);
  CHECK(y[1] == 1.0);
  // pixel (0,2): vertical 2-3=-1, horizontal 0 (last column)
  CHECK(y[4] == -1.0);
  CHECK(y[5] == 0.0);
  // pixel (1,1): vertical 0 (last row), horizontal 0
  CHECK(y[8] == 0.0);
  check_adjoint(*v, 17);
}

TEST_CASE("composition propagates tight frame certificates") {
  OpPtr c = compose(select_op({0, 1, 2}, 8), idft_real_op(8));
  CHECK(c->linear());
  REQUIRE(c->tight_frame_mu().has_value());
  CHECK(*c->tight_frame_mu() == doctest::Approx(1.0));
  check_adjoint(*c, 18);

  OpPtr sc = compose(scale_op(3.0, {{5}, Field::Real}),
                     scale_op(2.0, {{5}, Field::Real}));
  CHECK(*sc->tight_frame_mu() == doctest::Approx(36.0));
}

TEST_CASE("horizontal concatenation sums branch outputs") {
  std::mt19937_64 rng(19);
  auto m1 = random_dense(3, 4, rng);
  auto m2 = random_dense(3, 2, rng);
  OpPtr h = hcat({matrix_op(m1), matrix_op(m2)});
  REQUIRE(h->domain().size() == 2);
  SignalTuple x = oracle::random_tuple(h->domain(), rng);
  Signal y = proxkit::apply(*h, x);
  Signal expect = add(apply(*matrix_op(m1), x[0]), apply(*matrix_op(m2), x[1]));
  CHECK(norm2(sub(y, expect)) < 1e-12);
  check_adjoint(*h, 20);
}

TEST_CASE("random composites keep exact adjoints") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 10; ++trial) {
    auto m = random_dense(5, 5, rng);
    OpPtr base = matrix_op(m);
    OpPtr c = compose(base, compose(dct_op(5), scale_op(1.5, {{5}, Field::Real})));
    OpPtr stacked = hcat({c, select_op({1, 2, 0, 4, 3}, 5)});
    check_adjoint(*stacked, 100 + trial, 20);
  }
}

TEST_CASE("nonlinear nodes use the jacobian adjoint at the cached point") {
  std::mt19937_64 rng(22);
  Space s{{3, 2}, Field::Real};
  OpPtr sg = sigmoid_op(s);
  SignalTuple x = oracle::random_tuple(sg->domain(), rng);
  EvalCache cache;
  Signal y = sg->forward(x, cache);
  for (int64_t i = 0; i < y.rsize(); ++i)
    CHECK(y.raw()[i] == doctest::Approx(1.0 / (1.0 + std::exp(-x[0].raw()[i]))));
  Signal g = oracle::random_signal(space_of(y), rng);
  SignalTuple back = sg->backward(g, cache);
  for (int64_t i = 0; i < y.rsize(); ++i) {
    double sv = y.raw()[i];
    CHECK(back[0].raw()[i] == doctest::Approx(g.raw()[i] * sv * (1.0 - sv)));
  }
}

TEST_CASE("output product differentiates both factors") {
  std::mt19937_64 rng(23);
  // (X1)(X2) with X1 2x3, X2 3x2; gradient of 1/2||X1 X2 - Y||^2
  Space s1{{2, 3}, Field::Real}, s2{{3, 2}, Field::Real};
  OpPtr prod = output_mul(identity_op(s1), identity_op(s2));
  Signal y = oracle::random_signal(prod->codomain(), rng);
  SmoothPtr f = least_squares(prod, y);
  SignalTuple x = oracle::random_tuple(f->domain(), rng);
  SignalTuple g = f->grad(x);
  SignalTuple fd = oracle::finite_diff_grad(*f, x);
  CHECK(oracle::grad_rel_error(g, fd) < 1e-7);
}

TEST_CASE("a node reused in two branches keeps separate cache entries") {
  std::mt19937_64 rng(24);
  Space s{{2, 2}, Field::Real};
  OpPtr sg = sigmoid_op(s);  // one shared node
  OpPtr branch1 = compose(sg, scale_op(2.0, s));
  OpPtr branch2 = compose(sg, scale_op(-1.0, s));
  OpPtr both = hcat({branch1, branch2});
  Signal y = oracle::random_signal(both->codomain(), rng);
  SmoothPtr f = least_squares(both, y);
  SignalTuple x = oracle::random_tuple(f->domain(), rng);
  SignalTuple fd = oracle::finite_diff_grad(*f, x);
  CHECK(oracle::grad_rel_error(f->grad(x), fd) < 1e-7);
}

TEST_CASE("operator norm via power iteration matches a dense reference") {
  std::mt19937_64 rng(25);
  auto m = random_dense(6, 4, rng);
  OpPtr op = matrix_op(m);
  // largest eigenvalue of A^T A through plain vector iteration on the
  // explicit entries, an independent code path
  std::vector<std::vector<double>> ata(4, std::vector<double>(4, 0.0));
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 6; ++k) ata[i][j] += m[k][i] * m[k][j];
  std::vector<double> v(4, 1.0);
  double lam = 0.0;
  for (int it = 0; it < 500; ++it) {
    std::vector<double> w(4, 0.0);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) w[i] += ata[i][j] * v[j];
    double nw = 0.0;
    for (double x : w) nw += x * x;
    nw = std::sqrt(nw);
    lam = 0.0;
    for (int i = 0; i < 4; ++i) lam += v[i] * w[i];
    for (int i = 0; i < 4; ++i) v[i] = w[i] / nw;
  }
  CHECK(op_norm_sq(*op, 200) == doctest::Approx(lam).epsilon(1e-6));
}

TEST_CASE("right multiplication and column broadcast") {
  std::mt19937_64 rng(26);
  auto d = random_dense(3, 5, rng);
  OpPtr rm = rmul_op(d, 2);  // X (2x3) -> X D (2x5)
  SignalTuple x = oracle::random_tuple(rm->domain(), rng);
  Signal y = proxkit::apply(*rm, x);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 5; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += x[0][i * 3 + k] * d[k][j];
      CHECK(y[i * 5 + j] == doctest::Approx(acc));
    }
  check_adjoint(*rm, 27);
  check_adjoint(*broadcast_cols_op(4, 6), 28);
}

TEST_CASE("adjoint as a standalone operator") {
  std::mt19937_64 rng(29);
  auto m = random_dense(3, 5, rng);
  OpPtr a = matrix_op(m);
  OpPtr at = adjoint_op(a);
  Signal y = oracle::random_signal(a->codomain(), rng);
  CHECK(norm2(sub(apply(*at, y), adjoint1(*a, y))) == 0.0);
  check_adjoint(*at, 30);
}

TEST_CASE("shape mismatches are rejected") {
  OpPtr s = select_op({0}, 4);
  CHECK_THROWS_AS(apply(*s, Signal::vec({1.0, 2.0})), std::invalid_argument);
  CHECK_THROWS_AS(compose(select_op({0}, 4), select_op({0}, 3)),
                  std::invalid_argument);
  CHECK_THROWS_AS(select_op({7}, 4), std::invalid_argument);
}
