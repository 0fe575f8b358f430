#pragma once

#include <functional>

#include "proxkit/funcs.hpp"

namespace proxkit {

struct SolverConfig {
  std::optional<double> gamma;      // default 1/L (pg, fpg) or 0.95/L (panoc)
  std::optional<double> sigma;      // panoc sufficient-decrease weight
  std::optional<double> lipschitz;  // skip estimation when provided
  int lbfgs_mem = 5;
  int max_iters = 10000;
  double tol = 1e-5;                // on ||R(x)||_inf / gamma
  int max_backtracks = 20;
  bool adaptive_gamma = true;       // halve gamma on majorization failures
  bool record_trace = true;
  // observer invoked once per iteration with the current iterate
  std::function<void(int, const SignalTuple&)> on_iterate;
};

enum class SolveStatus { Converged, MaxIters, Failed };

struct TraceRow {
  int k;
  double objective;
  double fbe;
  double residual_inf;  // ||R(x)||_inf / gamma
  double residual2;     // ||R(x)||_2, unscaled
  double tau;           // line-search step, 1 outside panoc
  double gamma;
  double seconds;
};

struct SolveResult {
  SignalTuple x;
  SolveStatus status = SolveStatus::Failed;
  int iters = 0;
  double objective = 0.0;
  double residual_inf = 0.0;
  double gamma = 0.0;
  double sigma = 0.0;   // panoc sufficient-decrease weight actually used
  double seconds = 0.0;
  std::vector<TraceRow> trace;
};

// one forward-backward step: prox_{gamma g}(x - gamma grad f(x))
SignalTuple pg_step(const SmoothFn& f, const TupleProxFn& g,
                    const SignalTuple& x, double gamma);

// fixed point residual x - pg_step(x)
SignalTuple fb_residual(const SmoothFn& f, const TupleProxFn& g,
                        const SignalTuple& x, double gamma);

// forward-backward envelope at x; also returns the prox point when wanted
double fb_envelope(const SmoothFn& f, const TupleProxFn& g,
                   const SignalTuple& x, double gamma,
                   SignalTuple* prox_point = nullptr);

// Lipschitz constant of grad f: exact when f knows it, otherwise a local
// curvature estimate around x0 refined by the solvers' backtracking
double estimate_lipschitz(const SmoothFn& f, const SignalTuple& x0);

SolveResult solve_pg(const SmoothFn& f, const TupleProxFn& g,
                     const SignalTuple& x0, const SolverConfig& cfg = {});

// accelerated variant; requires both f and g convex
SolveResult solve_fpg(const SmoothFn& f, const TupleProxFn& g,
                      const SignalTuple& x0, const SolverConfig& cfg = {});

SolveResult solve_panoc(const SmoothFn& f, const TupleProxFn& g,
                        const SignalTuple& x0, const SolverConfig& cfg = {});

// limited-memory quasi-Newton state over flattened tuples
class LbfgsBuffer {
 public:
  explicit LbfgsBuffer(int mem) : mem_(mem) {}

  void push(const SignalTuple& s, const SignalTuple& w);
  void clear();
  int size() const { return static_cast<int>(pairs_.size()); }

  // two-loop recursion applied to q; returns H q
  SignalTuple apply(const SignalTuple& q) const;

 private:
  struct Pair {
    SignalTuple s, w;
    double rho;
  };
  int mem_;
  std::vector<Pair> pairs_;
};

}  // namespace proxkit
