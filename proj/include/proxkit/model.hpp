#pragma once

#include "proxkit/solvers.hpp"

namespace proxkit {

// One additive term of a composite objective. Exactly one of h_prox /
// h_smooth is set. A nonsmooth term applies h_prox to op(x_vars) and must
// touch a single variable; a smooth term is a ready-made SmoothFn over the
// sub-tuple picked out by vars (any operator composition already folded in).
struct Term {
  ProxPtr h_prox;
  SmoothPtr h_smooth;
  OpPtr op;                // nonsmooth only; identity when null
  std::vector<int> vars;   // variable indices, in domain order

  static Term smooth(SmoothPtr f, std::vector<int> vars);
  static Term nonsmooth(ProxPtr h, int var, OpPtr op = nullptr);
};

struct Problem {
  std::vector<Space> variables;
  SignalTuple x0;
  std::vector<Term> terms;

  void validate() const;  // shapes, var indices, term well-formedness
};

struct ProxReport {
  bool ok = true;
  std::vector<std::string> violations;
};

class SplittingError : public std::runtime_error {
 public:
  explicit SplittingError(ProxReport r);
  const ProxReport& report() const { return report_; }

 private:
  ProxReport report_;
};

struct SplitProblem {
  std::vector<int> i_f, i_g;  // term indices, disjoint, covering
  SmoothPtr f;
  TupleProxPtr g;
};

// rules: every nonsmooth h has a prox by construction; every nonzero mapping
// in a nonsmooth term carries a tight-frame certificate; every variable is
// touched by at most one nonsmooth term. Disjoint index selections of the
// same variable are merged into one separable term before the last check.
ProxReport check_prox_computable(const Problem& p);

SplitProblem split(const Problem& p);  // throws SplittingError

SignalTuple gradient_general(const SplitProblem& sp, const SignalTuple& x);

SolveResult solve(const SplitProblem& sp, const SignalTuple& x0,
                  const std::string& solver, const SolverConfig& cfg = {});

// ---- duality transforms ----

// minimize f(x) + g(a x) turned into minimize f*(-a* u) + g*(u)
struct DualProblem {
  SmoothPtr dual_f;   // u -> f*(-a* u)
  ProxPtr dual_g;     // convex conjugate of g
  OpPtr a;
  SmoothPtr conj_f;   // f* as a smooth function, kept for primal recovery
};

// requires f strongly convex with an available conjugate
DualProblem fenchel_dual(SmoothPtr f, OpPtr a, ProxPtr g);

// x* = grad f*(-a* u*)
Signal dual_to_primal(const DualProblem& d, const Signal& u);

// Moreau envelope wrapper; beta recorded for continuation schedules
SmoothPtr smooth_term(ProxPtr h, double beta, Space domain_space);

// dualize f(x) + g(a x) for merely-convex prox-friendly f by first adding
// (beta/2)||x||^2; the dual smooth part becomes the envelope of f's conjugate
DualProblem regularize_then_dualize(ProxPtr f, OpPtr a, ProxPtr g,
                                    double beta);
Signal dual_to_primal_regularized(const DualProblem& d, const Signal& u);

}  // namespace proxkit
