#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"
#include "oracles.hpp"
#include "proxkit/model.hpp"

using namespace proxkit;

namespace {

Problem make_lasso_problem(int rows, int cols, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<double>> a(rows, std::vector<double>(cols));
  for (auto& row : a)
    for (double& v : row) v = std::normal_distribution<double>()(rng);
  Signal y = oracle::random_signal({{rows}, Field::Real}, rng);
  Problem p;
  p.variables = {{{cols}, Field::Real}};
  p.x0 = {Signal::zeros({cols})};
  p.terms.push_back(Term::smooth(least_squares(matrix_op(a), y), {0}));
  p.terms.push_back(Term::nonsmooth(l1_norm(0.3), 0));
  return p;
}

}  // namespace

TEST_CASE("validation catches malformed problems") {
  Problem p = make_lasso_problem(4, 6, 1);
  CHECK_NOTHROW(p.validate());

  Problem bad_x0 = p;
  bad_x0.x0 = {Signal::zeros({5})};
  CHECK_THROWS_AS(bad_x0.validate(), std::invalid_argument);

  Problem bad_var = p;
  bad_var.terms.push_back(Term::nonsmooth(l1_norm(1.0), 3));
  CHECK_THROWS_AS(bad_var.validate(), std::invalid_argument);

  Problem bad_op = p;
  bad_op.terms[1] = Term::nonsmooth(l1_norm(1.0), 0, dct_op(5));
  CHECK_THROWS_AS(bad_op.validate(), std::invalid_argument);
}

TEST_CASE("splitting a plain regression problem") {
  Problem p = make_lasso_problem(5, 8, 2);
  SplitProblem sp = split(p);
  CHECK(sp.i_f == std::vector<int>{0});
  CHECK(sp.i_g == std::vector<int>{1});
  SolveResult res = solve(sp, p.x0, "panoc", {});
  CHECK(res.status == SolveStatus::Converged);
  // stationarity of the solution under a forward-backward step
  SignalTuple r = fb_residual(*sp.f, *sp.g, res.x, res.gamma);
  CHECK(norm_inf(r) / res.gamma <= 1e-5);
}

TEST_CASE("variables without a nonsmooth term get a free slot") {
  std::mt19937_64 rng(3);
  Space s{{4}, Field::Real};
  Signal y = oracle::random_signal(s, rng);
  Problem p;
  p.variables = {s, s};
  p.x0 = {Signal::zeros({4}), Signal::zeros({4})};
  // 1/2||x0 + x1 - y||^2 + |x0|_1, x1 unconstrained
  p.terms.push_back(Term::smooth(
      composed_smooth(least_squares(identity_op(s), y),
                      hcat({identity_op(s), identity_op(s)})),
      {0, 1}));
  p.terms.push_back(Term::nonsmooth(l1_norm(0.2), 0));
  SplitProblem sp = split(p);
  SolveResult res = solve(sp, p.x0, "fpg", {});
  CHECK(res.status == SolveStatus::Converged);
  // with x1 free the sum matches y exactly and x0 can stay at zero
  CHECK(norm2(sub(add(res.x[0], res.x[1]), y)) < 1e-4);
}

TEST_CASE("tight frame certificates gate nonidentity mappings") {
  Problem p = make_lasso_problem(4, 6, 4);
  p.terms[1] = Term::nonsmooth(l1_norm(0.5), 0, dct_op(6));
  CHECK(check_prox_computable(p).ok);
  CHECK_NOTHROW(split(p));

  std::vector<std::vector<double>> dense(6, std::vector<double>(6, 0.1));
  for (int i = 0; i < 6; ++i) dense[i][i] = 1.0;
  p.terms[1] = Term::nonsmooth(l1_norm(0.5), 0, matrix_op(dense));
  ProxReport rep = check_prox_computable(p);
  CHECK(!rep.ok);
  REQUIRE(!rep.violations.empty());
  CHECK_THROWS_AS(split(p), SplittingError);
}

TEST_CASE("two nonsmooth terms on one variable are rejected") {
  Problem p = make_lasso_problem(4, 6, 5);
  p.terms.push_back(Term::nonsmooth(ball_l2(1.0), 0));
  ProxReport rep = check_prox_computable(p);
  CHECK(!rep.ok);
  try {
    split(p);
    FAIL("expected SplittingError");
  } catch (const SplittingError& e) {
    CHECK(!e.report().ok);
    CHECK(std::string(e.what()).find("variable") != std::string::npos);
  }
}

TEST_CASE("disjoint index selections on one variable merge cleanly") {
  std::mt19937_64 rng(6);
  Space s{{6}, Field::Real};
  Signal y = oracle::random_signal(s, rng);
  Problem p;
  p.variables = {s};
  p.x0 = {Signal::zeros({6})};
  p.terms.push_back(Term::smooth(least_squares(identity_op(s), y), {0}));
  p.terms.push_back(
      Term::nonsmooth(box(-0.1, 0.1), 0, select_op({0, 2, 4}, 6)));
  p.terms.push_back(
      Term::nonsmooth(halfspace_ge(0.0), 0, select_op({1, 3, 5}, 6)));
  CHECK(check_prox_computable(p).ok);
  SplitProblem sp = split(p);
  SolveResult res = solve(sp, p.x0, "panoc", {});
  CHECK(res.status == SolveStatus::Converged);
  for (int i : {0, 2, 4}) {
    CHECK(res.x[0][i] >= -0.1 - 1e-9);
    CHECK(res.x[0][i] <= 0.1 + 1e-9);
  }
  for (int i : {1, 3, 5}) CHECK(res.x[0][i] >= -1e-9);

  // overlapping selections are not separable and must be refused
  Problem q = p;
  q.terms[2] = Term::nonsmooth(halfspace_ge(0.0), 0, select_op({0, 1}, 6));
  CHECK(!check_prox_computable(q).ok);
  CHECK_THROWS_AS(split(q), SplittingError);
}

TEST_CASE("aggregate gradient matches finite differences across shared "
          "variables") {
  std::mt19937_64 rng(7);
  Space s{{4}, Field::Real};
  Signal y1 = oracle::random_signal(s, rng);
  Signal y2 = oracle::random_signal(s, rng);
  Problem p;
  p.variables = {s, s};
  p.x0 = {Signal::zeros({4}), Signal::zeros({4})};
  p.terms.push_back(Term::smooth(least_squares(identity_op(s), y1), {0}));
  p.terms.push_back(Term::smooth(least_squares(identity_op(s), y2), {1}));
  p.terms.push_back(Term::smooth(
      composed_smooth(least_squares(identity_op(s), Signal::zeros({4})),
                      hcat({identity_op(s), scale_op(-1.0, s)})),
      {0, 1}));
  p.terms.push_back(Term::nonsmooth(l1_norm(0.1), 0));
  SplitProblem sp = split(p);
  for (int trial = 0; trial < 5; ++trial) {
    SignalTuple x = oracle::random_tuple(p.variables, rng);
    SignalTuple g = gradient_general(sp, x);
    CHECK(oracle::grad_rel_error(g, oracle::finite_diff_grad(*sp.f, x)) <
          1e-7);
    // hand value: grad_x0 = (x0-y1) + (x0-x1), grad_x1 = (x1-y2) - (x0-x1)
    Signal d = sub(x[0], x[1]);
    CHECK(norm2(sub(g[0], add(sub(x[0], y1), d))) < 1e-12);
    CHECK(norm2(sub(g[1], sub(sub(x[1], y2), d))) < 1e-12);
  }
}

TEST_CASE("low rank plus sparse model splits and refuses a double "
          "penalty") {
  std::mt19937_64 rng(8);
  Space mat{{6, 5}, Field::Real};
  Signal y = oracle::random_signal(mat, rng);
  Problem p;
  p.variables = {mat, mat};
  p.x0 = {mat.zero(), mat.zero()};
  p.terms.push_back(Term::smooth(
      composed_smooth(least_squares(identity_op(mat), y),
                      hcat({identity_op(mat), identity_op(mat)})),
      {0, 1}));
  p.terms.push_back(Term::nonsmooth(rank_ball(1), 0));
  p.terms.push_back(Term::nonsmooth(l1_norm(0.2), 1));
  SplitProblem sp = split(p);
  SignalTuple x = oracle::random_tuple(p.variables, rng);
  SignalTuple g = gradient_general(sp, x);
  Signal resid = sub(add(x[0], x[1]), y);
  CHECK(norm2(sub(g[0], resid)) < 1e-12);
  CHECK(norm2(sub(g[1], resid)) < 1e-12);

  p.terms.push_back(Term::nonsmooth(l1_norm(0.1), 0));
  CHECK_THROWS_AS(split(p), SplittingError);
}

TEST_CASE("scalar duality gap closes") {
  // min 1/2(x-y)^2 + lambda|x| and its dual agree at optimality
  double yv = 3.0, lambda = 1.0;
  Space s{{1}, Field::Real};
  SmoothPtr f = least_squares(identity_op(s), Signal::vec({yv}));
  DualProblem d = fenchel_dual(f, identity_op(s), l1_norm(lambda));
  SolverConfig cfg;
  cfg.tol = 1e-10;
  SolveResult res =
      solve_fpg(*d.dual_f, *single_prox(d.dual_g), {Signal::zeros({1})}, cfg);
  REQUIRE(res.status == SolveStatus::Converged);
  Signal x = dual_to_primal(d, res.x[0]);
  CHECK(x[0] == doctest::Approx(2.0).epsilon(1e-6));
  double primal = 0.5 * (x[0] - yv) * (x[0] - yv) + lambda * std::abs(x[0]);
  double dual = -res.objective;
  CHECK(primal - dual < 1e-8);
}

TEST_CASE("zero dual solution recovers the unconstrained minimizer") {
  std::mt19937_64 rng(9);
  Space s{{3}, Field::Real};
  Signal y = oracle::random_signal(s, rng);
  SmoothPtr f = least_squares(identity_op(s), y);
  DualProblem d = fenchel_dual(f, identity_op(s), l1_norm(100.0));
  Signal x = dual_to_primal(d, Signal::zeros({3}));
  CHECK(norm2(sub(x, y)) < 1e-12);
}

TEST_CASE("dualization requires strong convexity with a conjugate") {
  Space s{{3}, Field::Real};
  // a general least squares with a nontrivial matrix has no stored conjugate
  SmoothPtr f =
      least_squares(matrix_op({{1.0, 2.0, 0.0}, {0.0, 1.0, 1.0}}),
                    Signal::vec({1.0, 0.0}));
  CHECK_THROWS_AS(fenchel_dual(f, identity_op(s), l1_norm(1.0)),
                  std::invalid_argument);
}

TEST_CASE("dual iteration matches the primal solution on a denoising "
          "fixture") {
  std::mt19937_64 rng(10);
  int n = 12;
  Space s{{n}, Field::Real};
  Signal y = oracle::random_signal(s, rng);
  double lambda = 0.4;
  // primal: min 1/2||x-y||^2 + lambda sum |x_{i+1}-x_i| via first differences
  std::vector<std::vector<double>> dm(n - 1, std::vector<double>(n, 0.0));
  for (int i = 0; i + 1 < n; ++i) {
    dm[i][i] = -1.0;
    dm[i][i + 1] = 1.0;
  }
  OpPtr dop = matrix_op(dm);
  SmoothPtr f = least_squares(identity_op(s), y);
  DualProblem d = fenchel_dual(f, dop, l1_norm(lambda));
  SolverConfig cfg;
  cfg.tol = 1e-10;
  cfg.max_iters = 200000;
  SolveResult res = solve_fpg(*d.dual_f, *single_prox(d.dual_g),
                              {Signal::zeros({n - 1})}, cfg);
  REQUIRE(res.status == SolveStatus::Converged);
  Signal x = dual_to_primal(d, res.x[0]);
  // independent check: subgradient optimality of the recovered signal,
  // x - y + lambda D^T s = 0 with s in the sign set of Dx
  Signal dx = apply(*dop, x);
  Signal u = res.x[0];
  for (int i = 0; i + 1 < n; ++i) {
    CHECK(std::abs(u[i]) <= lambda + 1e-8);
    if (std::abs(dx[i]) > 1e-6)
      CHECK(u[i] == doctest::Approx(lambda * (dx[i] > 0 ? 1.0 : -1.0))
                        .epsilon(1e-5));
  }
  CHECK(norm2(sub(x, sub(y, adjoint1(*dop, u)))) < 1e-10);
}

TEST_CASE("envelope smoothing of a term sharpens as beta shrinks") {
  std::mt19937_64 rng(11);
  Space s{{5}, Field::Real};
  Signal y = oracle::random_signal(s, rng, 2.0);
  // min env_beta(|.|_1)(x) + 1/2||x-y||^2 approaches soft thresholding
  Signal prev;
  double prev_dist = std::numeric_limits<double>::infinity();
  Signal target = l1_norm(1.0)->prox(y, 1.0);
  for (double beta : {1.0, 0.1, 0.01}) {
    SmoothPtr fs = smooth_term(l1_norm(1.0), beta, s);
    SmoothPtr fq = least_squares(identity_op(s), y);
    Problem p;
    p.variables = {s};
    p.x0 = {prev.shape().empty() ? Signal::zeros({5}) : prev};
    p.terms.push_back(Term::smooth(fs, {0}));
    p.terms.push_back(Term::smooth(fq, {0}));
    SplitProblem sp = split(p);
    SolverConfig cfg;
    cfg.tol = 1e-9;
    SolveResult res = solve(sp, p.x0, "fpg", cfg);
    REQUIRE(res.status == SolveStatus::Converged);
    double dist = norm2(sub(res.x[0], target));
    CHECK(dist < prev_dist + 1e-12);
    prev_dist = dist;
    prev = res.x[0];
  }
  CHECK(prev_dist < 0.05);
}

TEST_CASE("regularized dualization handles merely convex objectives") {
  std::mt19937_64 rng(12);
  Space s{{4}, Field::Real};
  Signal y = oracle::random_signal(s, rng);
  // f = indicator of a small ball around y via translation, g = l1 on x
  ProxPtr f = translate(ball_l2(0.5), scaled(-1.0, y));
  double beta = 1e-3;
  DualProblem d = regularize_then_dualize(f, identity_op(s), l1_norm(10.0),
                                          beta);
  SolverConfig cfg;
  cfg.tol = 1e-9;
  cfg.max_iters = 100000;
  SolveResult res = solve_fpg(*d.dual_f, *single_prox(d.dual_g),
                              {Signal::zeros({4})}, cfg);
  REQUIRE(res.status == SolveStatus::Converged);
  Signal x = dual_to_primal_regularized(d, res.x[0]);
  // the solution lies in the ball and its l1 norm beats the radial
  // shrinkage of y, a feasible competitor
  CHECK(norm2(sub(x, y)) <= 0.5 + 1e-3);
  Signal competitor = scaled(1.0 - 0.5 / norm2(y), y);
  CHECK(norm1(x) <= norm1(competitor) + 1e-2);

  CHECK_THROWS_AS(
      regularize_then_dualize(f, identity_op(s), l1_norm(1.0), 0.0),
      std::invalid_argument);
}
