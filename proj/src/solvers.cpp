#include "proxkit/solvers.hpp"

#include <chrono>
#include <random>

namespace proxkit {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct PointEval {
  double fx = 0.0;
  SignalTuple gfx;
  SignalTuple v;  // prox point
  SignalTuple r;  // x - v
  double gv = 0.0;
  double fbe = 0.0;
};

PointEval eval_point(const SmoothFn& f, const TupleProxFn& g,
                     const SignalTuple& x, double gamma,
                     bool need_fbe = true) {
  PointEval e;
  std::tie(e.fx, e.gfx) = f.value_grad(x);
  e.v = g.prox(axpy(-gamma, e.gfx, x), gamma);
  e.r = sub(x, e.v);
  if (need_fbe) {
    e.gv = g.value(e.v);
    e.fbe = e.fx - inner(e.gfx, e.r) + inner(e.r, e.r) / (2.0 * gamma) + e.gv;
  }
  return e;
}

// quadratic upper bound check at the prox point; slack absorbs roundoff
bool majorized(const SmoothFn& f, const PointEval& e, double gamma) {
  double fv = f.value(e.v);
  double quad =
      e.fx - inner(e.gfx, e.r) + inner(e.r, e.r) / (2.0 * gamma);
  return fv <= quad + 1e-10 * (1.0 + std::abs(fv));
}

void record(std::vector<TraceRow>& trace, bool on, int k, double obj,
            double fbe, double res, double r2, double tau, double gamma,
            Clock::time_point t0) {
  if (on) trace.push_back({k, obj, fbe, res, r2, tau, gamma, elapsed(t0)});
}

}  // namespace

SignalTuple pg_step(const SmoothFn& f, const TupleProxFn& g,
                    const SignalTuple& x, double gamma) {
  return g.prox(axpy(-gamma, f.grad(x), x), gamma);
}

SignalTuple fb_residual(const SmoothFn& f, const TupleProxFn& g,
                        const SignalTuple& x, double gamma) {
  return sub(x, pg_step(f, g, x, gamma));
}

double fb_envelope(const SmoothFn& f, const TupleProxFn& g,
                   const SignalTuple& x, double gamma,
                   SignalTuple* prox_point) {
  PointEval e = eval_point(f, g, x, gamma);
  if (prox_point) *prox_point = e.v;
  return e.fbe;
}

double estimate_lipschitz(const SmoothFn& f, const SignalTuple& x0) {
  if (auto l = f.lipschitz()) return std::max(*l, 1e-12);
  SignalTuple g0 = f.grad(x0);
  double delta = 1e-6 * (1.0 + norm2(x0));
  double best = 0.0;
  for (unsigned seed : {11u, 12u, 13u}) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    SignalTuple d = x0;
    for (Signal& s : d)
      for (double& v : s.data()) v = gauss(rng);
    double nd = norm2(d);
    if (nd == 0.0) continue;
    d = scaled(delta / nd, d);
    SignalTuple g1 = f.grad(add(x0, d));
    best = std::max(best, norm2(sub(g1, g0)) / delta);
  }
  return std::max(2.0 * best, 1e-12);
}

SolveResult solve_pg(const SmoothFn& f, const TupleProxFn& g,
                     const SignalTuple& x0, const SolverConfig& cfg) {
  auto t0 = Clock::now();
  double lip = cfg.lipschitz ? *cfg.lipschitz : estimate_lipschitz(f, x0);
  bool exact_l = cfg.lipschitz.has_value() || f.lipschitz().has_value();
  double gamma = cfg.gamma ? *cfg.gamma : 1.0 / lip;

  SolveResult res;
  SignalTuple x = x0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    PointEval e = eval_point(f, g, x, gamma, cfg.record_trace);
    while (cfg.adaptive_gamma && !exact_l && !cfg.gamma &&
           !majorized(f, e, gamma)) {
      gamma *= 0.5;
      e = eval_point(f, g, x, gamma, cfg.record_trace);
    }
    double rn = norm_inf(e.r) / gamma;
    if (cfg.record_trace)
      record(res.trace, true, k, e.fx + g.value(x), e.fbe, rn,
             norm2(e.r), 1.0, gamma, t0);
    if (cfg.on_iterate) cfg.on_iterate(k, x);
    if (!is_finite(e.v)) {
      res.x = x;
      res.status = SolveStatus::Failed;
      res.iters = k;
      res.residual_inf = rn;
      res.gamma = gamma;
      res.seconds = elapsed(t0);
      return res;
    }
    if (rn <= cfg.tol) {
      res.x = e.v;
      res.status = SolveStatus::Converged;
      res.iters = k;
      res.objective = f.value(e.v) + g.value(e.v);
      res.residual_inf = rn;
      res.gamma = gamma;
      res.seconds = elapsed(t0);
      return res;
    }
    x = std::move(e.v);
  }
  res.x = x;
  res.status = SolveStatus::MaxIters;
  res.iters = cfg.max_iters;
  res.objective = f.value(x) + g.value(x);
  SignalTuple r = fb_residual(f, g, x, gamma);
  res.residual_inf = norm_inf(r) / gamma;
  res.gamma = gamma;
  res.seconds = elapsed(t0);
  return res;
}

SolveResult solve_fpg(const SmoothFn& f, const TupleProxFn& g,
                      const SignalTuple& x0, const SolverConfig& cfg) {
  if (!f.convex() || !g.convex())
    throw std::invalid_argument(
        "solve_fpg: the accelerated method requires a convex problem; "
        "use solve_pg or solve_panoc instead");
  auto t0 = Clock::now();
  double lip = cfg.lipschitz ? *cfg.lipschitz : estimate_lipschitz(f, x0);
  bool exact_l = cfg.lipschitz.has_value() || f.lipschitz().has_value();
  double gamma = cfg.gamma ? *cfg.gamma : 1.0 / lip;

  SolveResult res;
  SignalTuple x = x0;
  SignalTuple x_prev = x0;
  double theta = 1.0;
  for (int k = 0; k < cfg.max_iters; ++k) {
    double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
    SignalTuple v =
        axpy((theta - 1.0) / theta_next, sub(x, x_prev), x);
    PointEval e = eval_point(f, g, v, gamma);
    while (cfg.adaptive_gamma && !exact_l && !cfg.gamma &&
           !majorized(f, e, gamma)) {
      gamma *= 0.5;
      e = eval_point(f, g, v, gamma);
    }
    // residual measured at the current iterate, not the extrapolated point
    SignalTuple rx = fb_residual(f, g, x, gamma);
    double rn = norm_inf(rx) / gamma;
    if (cfg.record_trace)
      record(res.trace, true, k, f.value(x) + g.value(x), e.fbe, rn,
             norm2(rx), 1.0, gamma, t0);
    if (cfg.on_iterate) cfg.on_iterate(k, x);
    if (rn <= cfg.tol) {
      SignalTuple xs = sub(x, rx);
      res.x = xs;
      res.status = SolveStatus::Converged;
      res.iters = k;
      res.objective = f.value(xs) + g.value(xs);
      res.residual_inf = rn;
      res.gamma = gamma;
      res.seconds = elapsed(t0);
      return res;
    }
    x_prev = std::move(x);
    x = std::move(e.v);
    theta = theta_next;
  }
  res.x = x;
  res.status = SolveStatus::MaxIters;
  res.iters = cfg.max_iters;
  res.objective = f.value(x) + g.value(x);
  SignalTuple r = fb_residual(f, g, x, gamma);
  res.residual_inf = norm_inf(r) / gamma;
  res.gamma = gamma;
  res.seconds = elapsed(t0);
  return res;
}

void LbfgsBuffer::push(const SignalTuple& s, const SignalTuple& w) {
  double rho = inner(s, w);
  if (rho <= 1e-12 * norm2(s) * norm2(w)) return;  // curvature safeguard
  if (static_cast<int>(pairs_.size()) == mem_) pairs_.erase(pairs_.begin());
  pairs_.push_back({s, w, rho});
}

void LbfgsBuffer::clear() { pairs_.clear(); }

SignalTuple LbfgsBuffer::apply(const SignalTuple& q0) const {
  SignalTuple q = q0;
  int n = static_cast<int>(pairs_.size());
  if (n == 0) return q;
  std::vector<double> alpha(n);
  for (int i = n - 1; i >= 0; --i) {
    alpha[i] = inner(pairs_[i].s, q) / pairs_[i].rho;
    q = axpy(-alpha[i], pairs_[i].w, q);
  }
  const Pair& last = pairs_.back();
  double h0 = last.rho / inner(last.w, last.w);
  q = scaled(h0, q);
  for (int i = 0; i < n; ++i) {
    double beta = inner(pairs_[i].w, q) / pairs_[i].rho;
    q = axpy(alpha[i] - beta, pairs_[i].s, q);
  }
  return q;
}

SolveResult solve_panoc(const SmoothFn& f, const TupleProxFn& g,
                        const SignalTuple& x0, const SolverConfig& cfg) {
  auto t0 = Clock::now();
  double lip = cfg.lipschitz ? *cfg.lipschitz : estimate_lipschitz(f, x0);
  bool exact_l = cfg.lipschitz.has_value() || f.lipschitz().has_value();
  double gamma = cfg.gamma ? *cfg.gamma : 0.95 / lip;
  auto sigma_for = [&](double gm) {
    if (cfg.sigma) return *cfg.sigma;
    double slack = std::max(1.0 - gm * lip, 0.05);
    return 0.45 * slack / (2.0 * gm);
  };
  double sigma = sigma_for(gamma);

  SolveResult res;
  LbfgsBuffer buf(cfg.lbfgs_mem);
  SignalTuple x = x0;
  PointEval cur = eval_point(f, g, x, gamma);
  bool have_prev = false;
  SignalTuple prev_x, prev_r;

  for (int k = 0; k < cfg.max_iters; ++k) {
    while (cfg.adaptive_gamma && !exact_l && !cfg.gamma &&
           !majorized(f, cur, gamma)) {
      gamma *= 0.5;
      sigma = sigma_for(gamma);
      buf.clear();
      have_prev = false;
      cur = eval_point(f, g, x, gamma);
    }
    double rn = norm_inf(cur.r) / gamma;
    if (have_prev) buf.push(sub(x, prev_x), sub(cur.r, prev_r));
    double obj = cur.fx + g.value(x);
    if (cfg.on_iterate) cfg.on_iterate(k, x);
    if (!is_finite(cur.v)) {
      res.x = x;
      res.status = SolveStatus::Failed;
      res.iters = k;
      res.residual_inf = rn;
      res.gamma = gamma;
      res.sigma = sigma;
      res.seconds = elapsed(t0);
      return res;
    }
    if (rn <= cfg.tol) {
      record(res.trace, cfg.record_trace, k, obj, cur.fbe, rn, norm2(cur.r),
             0.0, gamma, t0);
      res.x = cur.v;
      res.status = SolveStatus::Converged;
      res.iters = k;
      res.objective = f.value(cur.v) + cur.gv;
      res.residual_inf = rn;
      res.gamma = gamma;
      res.sigma = sigma;
      res.seconds = elapsed(t0);
      return res;
    }

    SignalTuple d = scaled(-1.0, buf.apply(cur.r));
    double decrease = sigma * inner(cur.r, cur.r);
    double tau = 1.0;
    bool accepted = false;
    PointEval next;
    SignalTuple xd = add(x, d);
    for (int i = 0; i <= cfg.max_backtracks; ++i) {
      SignalTuple cand = axpy(tau, sub(xd, cur.v), cur.v);
      PointEval e = eval_point(f, g, cand, gamma);
      if (is_finite(e.v) && e.fbe <= cur.fbe - decrease) {
        prev_x = std::move(x);
        prev_r = cur.r;
        x = std::move(cand);
        next = std::move(e);
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    if (!accepted) {
      // fall back to the plain forward-backward step
      tau = 0.0;
      prev_x = std::move(x);
      prev_r = cur.r;
      x = cur.v;
      next = eval_point(f, g, x, gamma);
    }
    record(res.trace, cfg.record_trace, k, obj, cur.fbe, rn, norm2(cur.r), tau,
           gamma, t0);
    cur = std::move(next);
    have_prev = true;
  }
  res.x = x;
  res.status = SolveStatus::MaxIters;
  res.iters = cfg.max_iters;
  res.objective = cur.fx + g.value(x);
  res.residual_inf = norm_inf(cur.r) / gamma;
  res.gamma = gamma;
      res.sigma = sigma;
  res.seconds = elapsed(t0);
  return res;
}

}  // namespace proxkit
