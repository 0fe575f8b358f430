#include "proxkit/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

namespace proxkit::bench {

namespace {

using nlohmann::json;

std::vector<int> distinct_indices(int count, int range, std::mt19937_64& rng) {
  std::set<int> picked;
  std::uniform_int_distribution<int> dist(0, range - 1);
  while (static_cast<int>(picked.size()) < count) picked.insert(dist(rng));
  return {picked.begin(), picked.end()};
}

Signal gauss_signal(Space s, std::mt19937_64& rng, double std_dev = 1.0) {
  std::normal_distribution<double> g(0.0, std_dev);
  Signal out = s.zero();
  for (double& v : out.data()) v = g(rng);
  return out;
}

}  // namespace

LassoBench gen_lasso(int n, unsigned seed) {
  if (n < 20) throw std::invalid_argument("gen_lasso: n must be >= 20");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  int rows = n / 5;
  std::vector<std::vector<double>> a(rows, std::vector<double>(n, 0.0));
  for (int p : distinct_indices(n / 4, rows * n, rng))
    a[p / n][p % n] = g(rng);

  LassoBench b;
  b.a = matrix_op(a);
  b.y = gauss_signal({{rows}, Field::Real}, rng);
  b.lambda = 1e-3 * norm_inf(adjoint1(*b.a, b.y));

  b.problem.variables = {{{n}, Field::Real}};
  b.problem.x0 = tup(Signal::zeros({n}));
  b.problem.terms = {Term::smooth(least_squares(b.a, b.y), {0}),
                     Term::nonsmooth(l1_norm(b.lambda), 0)};
  return b;
}

DeconvBench gen_sparse_deconv(int fs, unsigned seed, double lambda_scale,
                              double snr_db) {
  int n = fs / 2;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> amp(0.5, 1.5);

  DeconvBench b;
  b.fir.resize(100);
  double hn = 0.0;
  for (double& v : b.fir) {
    v = g(rng);
    hn += v * v;
  }
  for (double& v : b.fir) v /= std::sqrt(hn);

  b.x_true = Signal::zeros({n});
  int spikes = std::max(5, n / 100);
  for (int p : distinct_indices(spikes, n, rng))
    b.x_true[p] = (g(rng) < 0 ? -1.0 : 1.0) * amp(rng);

  OpPtr conv = conv_op(b.fir, n);
  Signal clean = apply(*conv, b.x_true);
  double noise_std = norm2(clean) / std::sqrt(double(clean.numel())) *
                     std::pow(10.0, -snr_db / 20.0);
  b.y = add(clean, gauss_signal(space_of(clean), rng, noise_std));
  b.lambda = lambda_scale * norm_inf(adjoint1(*conv, b.y));

  b.problem.variables = {{{n}, Field::Real}};
  b.problem.x0 = tup(Signal::zeros({n}));
  b.problem.terms = {Term::smooth(least_squares(conv, b.y), {0}),
                     Term::nonsmooth(l1_norm(b.lambda), 0)};
  return b;
}

double LineSpectraBench::fidelity(const Signal& x) const {
  Signal r = sub(apply(*op, x), y);
  return 0.5 * inner(r, r);
}

LineSpectraBench gen_line_spectra(int n, int s, int n_sin, unsigned seed) {
  int sn = s * n;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> amp(0.5, 2.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);

  LineSpectraBench b;
  b.n_sin = n_sin;
  std::vector<int> bins = distinct_indices(n_sin, sn / 2 - 2, rng);
  for (int& k : bins) k += 1;  // keep away from the zero frequency
  b.y = Signal::zeros({n});
  for (int k : bins) {
    double a = amp(rng), ph = phase(rng);
    for (int t = 0; t < n; ++t)
      b.y[t] += a * std::cos(2.0 * M_PI * k * t / sn + ph);
  }

  std::vector<int> first(n);
  for (int i = 0; i < n; ++i) first[i] = i;
  b.op = compose(select_op(first, sn, Field::Real), idft_real_op(sn));
  b.lambda = 0.1 * norm_inf(adjoint1(*b.op, b.y));

  SmoothPtr fit = least_squares(b.op, b.y);
  b.a.variables = {{{sn}, Field::Complex}};
  b.a.x0 = tup(Signal::zeros({sn}, Field::Complex));
  b.a.terms = {Term::smooth(fit, {0}), Term::nonsmooth(l1_norm(b.lambda), 0)};

  b.b.variables = b.a.variables;
  b.b.x0 = b.a.x0;  // replaced by the warm start before solving
  b.b.terms = {Term::smooth(fit, {0}), Term::nonsmooth(ball_l0(n_sin), 0)};
  return b;
}

// A real signal maps each sinusoid onto a conjugate pair of bins. Folding
// the mirror bin into its lower-half partner represents the same signal
// with half the support, which is what the sparsity-budgeted stage needs
// from its warm start.
Signal fold_spectrum(const Signal& x) {
  Signal out = x;
  int sn = int(x.numel());
  for (int k = 1; k < sn - k; ++k) {
    out.set_cplx(k, out.cplx(k) + std::conj(out.cplx(sn - k)));
    out.set_cplx(sn - k, 0.0);
  }
  return out;
}

double TvBench::primal_objective(const Signal& x) const {
  Signal r = sub(x, y);
  return 0.5 * inner(r, r) + mixed_l21_norm(lambda)->value(apply(*v, x));
}

Signal TvBench::recover(const Signal& u) const {
  return dual_to_primal(dual, u);
}

TvBench gen_tv_denoise(int n, int m, unsigned seed, double lambda) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> lvl(-1.0, 1.0);
  std::uniform_int_distribution<int> ri(0, n - 1), rj(0, m - 1);

  TvBench b;
  b.lambda = lambda;
  b.y = Signal::zeros({n, m});
  for (int r = 0; r < 3; ++r) {  // piecewise constant rectangles
    int i0 = ri(rng), i1 = ri(rng), j0 = rj(rng), j1 = rj(rng);
    if (i0 > i1) std::swap(i0, i1);
    if (j0 > j1) std::swap(j0, j1);
    double v = lvl(rng);
    for (int i = i0; i <= i1; ++i)
      for (int j = j0; j <= j1; ++j) b.y[static_cast<int64_t>(i) * m + j] += v;
  }
  axpy_inplace(1.0, gauss_signal(space_of(b.y), rng, 0.1), b.y);

  b.v = variation_op(n, m);
  b.dual = fenchel_dual(least_squares(identity_op(space_of(b.y)), b.y), b.v,
                        mixed_l21_norm(lambda));

  b.dual_problem.variables = {b.v->codomain()};
  b.dual_problem.x0 = tup(b.v->codomain().zero());
  b.dual_problem.terms = {Term::smooth(b.dual.dual_f, {0}),
                          Term::nonsmooth(b.dual.dual_g, 0)};
  return b;
}

RpcaBench gen_robust_pca(int n, int m, int l, unsigned seed,
                         double noise_std) {
  int rows = n * m;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::uniform_real_distribution<double> amp(1.0, 2.0);
  std::normal_distribution<double> g(0.0, 1.0);

  RpcaBench b;
  std::vector<double> bg(rows), gain(l);
  for (double& v : bg) v = uni(rng);
  for (double& v : gain) v = 1.0 + 0.05 * g(rng);
  b.l_true = Signal::zeros({rows, l});
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < l; ++j)
      b.l_true[static_cast<int64_t>(i) * l + j] = bg[i] * gain[j];

  b.s_true = Signal::zeros({rows, l});
  for (int p : distinct_indices(rows * l / 100, rows * l, rng))
    b.s_true[p] = (g(rng) < 0 ? -1.0 : 1.0) * amp(rng);

  b.y = add(b.l_true, b.s_true);
  if (noise_std > 0)
    axpy_inplace(1.0, gauss_signal(space_of(b.y), rng, noise_std), b.y);
  b.lambda = 0.1;

  Space ms = space_of(b.y);
  b.problem.variables = {ms, ms};
  b.problem.x0 = {ms.zero(), ms.zero()};
  b.problem.terms = {
      Term::smooth(
          least_squares(hcat({identity_op(ms), identity_op(ms)}), b.y),
          {0, 1}),
      Term::nonsmooth(rank_ball(1), 0),
      Term::nonsmooth(l1_norm(b.lambda), 1)};
  return b;
}

DeclipBench gen_declip(int n, double clip_level, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> amp(0.5, 1.5);

  DeclipBench b;
  b.n = n;
  b.eps = 1e-5 * n;

  Signal x_true = Signal::zeros({n});
  for (int p : distinct_indices(25, n / 2, rng))
    x_true[p] = (g(rng) < 0 ? -1.0 : 1.0) * amp(rng);
  b.y_true = apply(*idct_op(n), x_true);
  double peak = norm_inf(b.y_true);
  b.y_true = scaled(1.0 / peak, b.y_true);

  if (clip_level <= 0) {
    std::vector<double> mags(b.y_true.raw(), b.y_true.raw() + n);
    for (double& v : mags) v = std::abs(v);
    std::sort(mags.begin(), mags.end());
    clip_level = mags[(3 * n) / 4];  // about a quarter of samples clip
  }
  b.clip_level = clip_level;

  b.y_clipped = b.y_true;
  for (int i = 0; i < n; ++i) {
    double v = b.y_true[i];
    if (v >= clip_level) {
      b.y_clipped[i] = clip_level;
      b.up.push_back(i);
    } else if (v <= -clip_level) {
      b.y_clipped[i] = -clip_level;
      b.dn.push_back(i);
    } else {
      b.rel.push_back(i);
    }
  }
  return b;
}

SignalTuple DeclipBench::initial_point() const {
  return {apply(*dct_op(n), y_clipped), y_clipped};
}

double DeclipBench::coupling(const SignalTuple& x) const {
  return norm2(sub(apply(*idct_op(n), x[0]), x[1]));
}

Problem DeclipBench::make_problem(int n_active,
                                  const SignalTuple& x0) const {
  Space vs{{n}, Field::Real};
  Problem p;
  p.variables = {vs, vs};
  p.x0 = x0;
  p.terms.push_back(Term::smooth(
      least_squares(hcat({idct_op(n), scale_op(-1.0, vs)}), vs.zero()),
      {0, 1}));
  p.terms.push_back(Term::nonsmooth(ball_l0(n_active), 0));
  if (!rel.empty()) {
    Signal c(std::vector<int>{static_cast<int>(rel.size())}, Field::Real);
    for (size_t k = 0; k < rel.size(); ++k) c[k] = y_clipped[rel[k]];
    p.terms.push_back(Term::nonsmooth(
        translate(ball_l2(std::sqrt(eps)), scaled(-1.0, c)), 1,
        select_op(rel, n)));
  }
  if (!up.empty())
    p.terms.push_back(
        Term::nonsmooth(halfspace_ge(clip_level), 1, select_op(up, n)));
  if (!dn.empty())
    p.terms.push_back(
        Term::nonsmooth(halfspace_le(clip_level), 1, select_op(dn, n)));
  return p;
}

DeclipRun run_declip(const DeclipBench& b, const std::string& solver,
                     SolverConfig cfg) {
  DeclipRun out;
  SignalTuple warm = b.initial_point();
  for (int nact = 30; nact <= b.n; nact += 30) {
    Problem p = b.make_problem(nact, warm);
    SplitProblem sp = split(p);
    SolveResult r = solve(sp, warm, solver, cfg);
    for (TraceRow row : r.trace) {
      row.k += out.total_iters;
      out.trace.push_back(row);
    }
    out.total_iters += r.iters;
    warm = r.x;
    out.final_n_active = nact;
    out.coupling = b.coupling(warm);
    if (out.coupling <= b.eps) {
      out.reached = true;
      break;
    }
  }
  out.x = std::move(warm);
  return out;
}

DnnBench gen_dnn(int n_points, unsigned seed) {
  int h1 = 8, h2 = 4;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);

  DnnBench b;
  b.features = Signal::zeros({2, n_points});
  b.labels = Signal::zeros({1, n_points});
  std::vector<std::vector<double>> x(2, std::vector<double>(n_points));
  for (int j = 0; j < n_points; ++j) {
    int cls = j < n_points / 2 ? 0 : 1;
    double cx = cls == 0 ? -1.0 : 1.0;
    x[0][j] = cx + 0.6 * g(rng);
    x[1][j] = cx + 0.6 * g(rng);
    b.features[j] = x[0][j];
    b.features[n_points + j] = x[1][j];
    b.labels[j] = cls;
  }

  OpPtr layer1 = compose(sigmoid_op({{h1, n_points}, Field::Real}),
                         rmul_op(x, h1));
  OpPtr layer2 = compose(
      sigmoid_op({{h2, n_points}, Field::Real}),
      output_mul(identity_op({{h2, h1}, Field::Real}), layer1));
  b.dag = compose(sigmoid_op({{1, n_points}, Field::Real}),
                  output_mul(identity_op({{1, h2}, Field::Real}), layer2));

  // variables in DAG order: (W3, W2, W1)
  b.problem.variables = {{{1, h2}, Field::Real},
                         {{h2, h1}, Field::Real},
                         {{h1, 2}, Field::Real}};
  b.problem.x0 = {gauss_signal(b.problem.variables[0], rng,
                               1.0 / std::sqrt(double(h2))),
                  gauss_signal(b.problem.variables[1], rng,
                               1.0 / std::sqrt(double(h1))),
                  gauss_signal(b.problem.variables[2], rng,
                               1.0 / std::sqrt(2.0))};
  b.problem.terms = {Term::smooth(cross_entropy(b.dag, b.labels), {0, 1, 2}),
                     Term::nonsmooth(l1_norm(1e-3), 0),
                     Term::nonsmooth(l1_norm(1e-3), 1),
                     Term::nonsmooth(l1_norm(1e-3), 2)};
  return b;
}

// ---- harness ----

namespace {

std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIters: return "max_iters";
    default: return "failed";
  }
}

int status_code(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return 0;
    case SolveStatus::MaxIters: return 2;
    default: return 1;
  }
}

std::vector<double> load_reference(const std::string& path, int64_t size) {
  std::ifstream in(path);
  if (!in) return {};
  std::vector<double> out;
  double v;
  while (in >> v) out.push_back(v);
  if (static_cast<int64_t>(out.size()) != size) return {};
  return out;
}

void save_reference(const std::string& path, const Signal& x) {
  std::ofstream out(path);
  out << std::setprecision(17);
  for (int64_t i = 0; i < x.rsize(); ++i) out << x.raw()[i] << "\n";
}

json spec_json(const BenchmarkSpec& s) {
  return json{{"problem", s.problem}, {"solver", s.solver},
              {"tol", s.tol},         {"max_iters", s.max_iters},
              {"seed", s.seed},       {"n", s.n},
              {"m", s.m},             {"l", s.l},
              {"s", s.s},             {"n_components", s.n_components},
              {"clip_level", s.clip_level}};
}

void write_sidecar(const std::string& csv_path, const json& j) {
  std::ofstream out(csv_path + ".json");
  out << j.dump(2) << "\n";
}

int run_one(const BenchmarkSpec& spec);

int run_compare(const BenchmarkSpec& spec) {
  int threads = 3;
  if (const char* env = std::getenv("PROXKIT_THREADS"))
    threads = std::max(1, std::atoi(env));
  std::vector<std::string> solvers = {"pg", "fpg", "panoc"};
  std::vector<int> codes(solvers.size(), 0);
  std::atomic<size_t> next{0};
  auto worker = [&] {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= solvers.size()) return;
      BenchmarkSpec s = spec;
      s.compare = false;
      s.solver = solvers[i];
      s.out = spec.out + "." + solvers[i] + ".csv";
      codes[i] = run_one(s);
    }
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(threads, solvers.size()); ++t)
    pool.emplace_back(worker);
  for (std::thread& t : pool) t.join();
  // a nonconvex problem legitimately rejects fpg; report the worst of the
  // remaining codes
  int worst = 0;
  for (size_t i = 0; i < solvers.size(); ++i) {
    if (solvers[i] == "fpg" && codes[i] == 1) continue;
    worst = std::max(worst, codes[i]);
  }
  return worst;
}

int run_one(const BenchmarkSpec& spec) {
  SolverConfig cfg;
  cfg.tol = spec.tol;
  cfg.max_iters = spec.max_iters;

  json side = {{"spec", spec_json(spec)}};

  if (spec.problem == "lasso") {
    int n = spec.n > 0 ? spec.n : 1000;
    LassoBench b = gen_lasso(n, spec.seed);
    SplitProblem sp = split(b.problem);

    // reference solution for the normalized error column, cached on disk
    std::string refpath = spec.out + ".ref";
    std::vector<double> ref = load_reference(refpath, n);
    if (ref.empty()) {
      SolverConfig rc;
      rc.tol = 1e-12;
      rc.max_iters = 1000000;
      rc.record_trace = false;
      SolveResult rr = solve_fpg(*sp.f, *sp.g, b.problem.x0, rc);
      ref.assign(rr.x[0].raw(), rr.x[0].raw() + n);
      save_reference(refpath, rr.x[0]);
    }
    Signal xs = Signal({n}, Field::Real, ref);
    double xs_norm = norm2(xs);
    std::vector<double> nerr;
    cfg.on_iterate = [&](int, const SignalTuple& x) {
      double ratio = norm2(sub(x[0], xs)) / xs_norm;
      nerr.push_back(std::log10(std::max(ratio, 1e-300)));
    };

    SolveResult r = solve(sp, b.problem.x0, spec.solver, cfg);
    write_trace_csv(spec.out, r.trace, &nerr);
    side["status"] = status_name(r.status);
    side["iterations"] = r.iters;
    side["objective"] = r.objective;
    side["residual"] = r.residual_inf;
    side["seconds"] = r.seconds;
    side["lambda"] = b.lambda;
    write_sidecar(spec.out, side);
    return status_code(r.status);
  }

  if (spec.problem == "sparse-deconv") {
    int fs = spec.n > 0 ? spec.n : 4000;
    DeconvBench b = gen_sparse_deconv(fs, spec.seed);
    SplitProblem sp = split(b.problem);
    SolveResult r = solve(sp, b.problem.x0, spec.solver, cfg);
    write_trace_csv(spec.out, r.trace);
    side["status"] = status_name(r.status);
    side["iterations"] = r.iters;
    side["objective"] = r.objective;
    side["residual"] = r.residual_inf;
    side["seconds"] = r.seconds;
    side["lambda"] = b.lambda;
    write_sidecar(spec.out, side);
    return status_code(r.status);
  }

  if (spec.problem == "line-spectra") {
    int n = spec.n > 0 ? spec.n : 256;
    int s = spec.s > 0 ? spec.s : 6;
    int nc = spec.n_components > 0 ? spec.n_components : 4;
    LineSpectraBench b = gen_line_spectra(n, s, nc, spec.seed);

    SolveResult ra = solve(split(b.a), b.a.x0, "fpg", cfg);
    SolveResult rb =
        solve(split(b.b), tup(fold_spectrum(ra.x[0])), spec.solver, cfg);
    write_trace_csv(spec.out, rb.trace);
    side["status"] = status_name(rb.status);
    side["iterations"] = rb.iters;
    side["fidelity_a"] = b.fidelity(ra.x[0]);
    side["fidelity_b"] = b.fidelity(rb.x[0]);
    int nnz = 0;
    for (int64_t i = 0; i < rb.x[0].numel(); ++i)
      if (rb.x[0].modulus(i) != 0.0) ++nnz;
    side["nnz_b"] = nnz;
    side["seconds"] = ra.seconds + rb.seconds;
    write_sidecar(spec.out, side);
    return status_code(rb.status);
  }

  if (spec.problem == "tv-denoise") {
    int n = spec.n > 0 ? spec.n : 128;
    int m = spec.m > 0 ? spec.m : 128;
    TvBench b = gen_tv_denoise(n, m, spec.seed);
    SplitProblem sp = split(b.dual_problem);
    SolveResult r = solve(sp, b.dual_problem.x0, spec.solver, cfg);
    Signal x = b.recover(r.x[0]);
    write_trace_csv(spec.out, r.trace);
    side["status"] = status_name(r.status);
    side["iterations"] = r.iters;
    side["dual_objective"] = r.objective;
    side["primal_objective"] = b.primal_objective(x);
    Signal opt_res = add(sub(x, b.y), adjoint1(*b.v, r.x[0]));
    side["duality_residual"] = norm_inf(opt_res);
    side["seconds"] = r.seconds;
    write_sidecar(spec.out, side);
    return status_code(r.status);
  }

  if (spec.problem == "robust-pca") {
    int n = spec.n > 0 ? spec.n : 64;
    int m = spec.m > 0 ? spec.m : 64;
    int l = spec.l > 0 ? spec.l : 30;
    RpcaBench b = gen_robust_pca(n, m, l, spec.seed);
    SplitProblem sp = split(b.problem);
    SolveResult r = solve(sp, b.problem.x0, spec.solver, cfg);
    write_trace_csv(spec.out, r.trace);
    side["status"] = status_name(r.status);
    side["iterations"] = r.iters;
    side["objective"] = r.objective;
    side["residual"] = r.residual_inf;
    side["seconds"] = r.seconds;
    write_sidecar(spec.out, side);
    return status_code(r.status);
  }

  if (spec.problem == "declip") {
    int n = spec.n > 0 ? spec.n : 1024;
    DeclipBench b = gen_declip(n, spec.clip_level, spec.seed);
    if (spec.solver == "fpg")
      throw std::invalid_argument(
          "declip is nonconvex (sparsity budget constraint); the "
          "accelerated method requires convexity. Use pg or panoc.");
    DeclipRun r = run_declip(b, spec.solver, cfg);
    write_trace_csv(spec.out, r.trace);
    side["status"] = r.reached ? "converged" : "max_iters";
    side["iterations"] = r.total_iters;
    side["final_n_active"] = r.final_n_active;
    side["coupling"] = r.coupling;
    side["eps"] = b.eps;
    side["clip_level"] = b.clip_level;
    write_sidecar(spec.out, side);
    return r.reached ? 0 : 2;
  }

  if (spec.problem == "dnn") {
    int n = spec.n > 0 ? spec.n : 200;
    DnnBench b = gen_dnn(n, spec.seed);
    SplitProblem sp = split(b.problem);
    SolveResult r = solve(sp, b.problem.x0, spec.solver, cfg);
    write_trace_csv(spec.out, r.trace);
    side["status"] = status_name(r.status);
    side["iterations"] = r.iters;
    side["objective"] = r.objective;
    side["residual"] = r.residual_inf;
    side["seconds"] = r.seconds;
    write_sidecar(spec.out, side);
    return status_code(r.status);
  }

  throw std::invalid_argument("unknown problem: " + spec.problem);
}

}  // namespace

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& rows,
                     const std::vector<double>* normalized_error) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open trace file: " + path);
  out << std::setprecision(17);
  out << "iteration,objective,fbe,residual,residual2,normalized_error,tau,"
         "gamma,seconds\n";
  for (size_t i = 0; i < rows.size(); ++i) {
    const TraceRow& r = rows[i];
    out << r.k << ',' << r.objective << ',' << r.fbe << ',' << r.residual_inf
        << ',' << r.residual2 << ',';
    if (normalized_error && i < normalized_error->size())
      out << (*normalized_error)[i];
    out << ',' << r.tau << ',' << r.gamma << ',' << r.seconds << "\n";
  }
}

int run(const BenchmarkSpec& spec) {
  try {
    if (spec.compare) return run_compare(spec);
    return run_one(spec);
  } catch (const std::exception& e) {
    std::ofstream err(spec.out + ".json");
    err << json{{"spec", spec_json(spec)},
                {"status", "error"},
                {"message", e.what()}}
               .dump(2)
        << "\n";
    fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}

}  // namespace proxkit::bench
