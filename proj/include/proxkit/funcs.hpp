#pragma once

#include "proxkit/ops.hpp"

namespace proxkit {

// Possibly-nonsmooth function with an evaluable proximal mapping.
// value() is extended-real: indicators return +inf off their set (with a
// small feasibility slack so that prox outputs evaluate to 0).
class ProxFn {
 public:
  virtual ~ProxFn() = default;

  virtual double value(const Signal& x) const = 0;
  virtual Signal prox(const Signal& x, double gamma) const = 0;
  virtual bool convex() const = 0;
  virtual bool separable() const { return false; }

  // exact conjugate value where a closed form exists; wrappers fall back to
  // a scaled-prox approximation otherwise
  virtual std::optional<double> conjugate_value(const Signal&) const {
    return std::nullopt;
  }
};

using ProxPtr = std::shared_ptr<const ProxFn>;

// ---- catalog (Table-style closed forms) ----

ProxPtr zero_fn();
ProxPtr l1_norm(double lambda);           // soft threshold
ProxPtr l0_pseudo_norm(double lambda);    // hard threshold
ProxPtr l2_norm(double lambda);           // block soft threshold
ProxPtr nuclear_norm(double lambda);      // singular value soft threshold
ProxPtr mixed_l21_norm(double lambda);    // row-wise block soft threshold
ProxPtr least_squares_quadratic(const std::vector<std::vector<double>>& a,
                                const std::vector<double>& b);

// indicators / projections
ProxPtr ball_l0(int m);
ProxPtr ball_l2(double r);
ProxPtr box(double lo, double hi);
ProxPtr halfspace_ge(double c);  // {y : y_i >= c}
ProxPtr halfspace_le(double c);  // {y : y_i <= -c}
ProxPtr rank_ball(int m);
ProxPtr affine_set(const std::vector<std::vector<double>>& a,
                   const std::vector<double>& b);

// ---- prox calculus ----

// h applied blockwise to a flat vector split into the given blocks
ProxPtr separable_sum(std::vector<ProxPtr> fns, std::vector<Space> blocks);
// h applied on selected index sets of a length-n vector; untouched entries
// pass through (index sets must be pairwise disjoint)
ProxPtr masked_separable(std::vector<std::pair<std::vector<int>, ProxPtr>> parts,
                         int n, Field field = Field::Real);
ProxPtr translate(ProxPtr h, const Signal& b);           // h(x + b)
ProxPtr affine_addition(ProxPtr h, const Signal& a);     // h(x) + <a, x>
ProxPtr postcompose(ProxPtr h, double a, double b = 0);  // a h(x) + b
ProxPtr precompose_tight_frame(ProxPtr h, OpPtr a);      // h(A x), A A* = mu I
ProxPtr regularize(ProxPtr h, double rho, const Signal& b);
ProxPtr convex_conjugate(ProxPtr h);  // prox via Moreau decomposition

// ---- smooth functions over signal tuples ----

class SmoothFn {
 public:
  virtual ~SmoothFn() = default;

  virtual double value(const SignalTuple& x) const = 0;
  virtual SignalTuple grad(const SignalTuple& x) const = 0;
  virtual std::pair<double, SignalTuple> value_grad(const SignalTuple& x) const {
    return {value(x), grad(x)};
  }
  virtual std::vector<Space> domain() const = 0;
  virtual bool convex() const = 0;
  virtual std::optional<double> lipschitz() const { return std::nullopt; }
  virtual double strong_modulus() const { return 0.0; }

  virtual bool has_conjugate() const { return false; }
  virtual double conj_value(const SignalTuple&) const {
    throw std::runtime_error("SmoothFn: conjugate not available");
  }
  virtual SignalTuple conj_grad(const SignalTuple&) const {
    throw std::runtime_error("SmoothFn: conjugate not available");
  }
};

using SmoothPtr = std::shared_ptr<const SmoothFn>;

// 1/2 || op(x) - y ||^2 with gradient through the operator DAG
SmoothPtr least_squares(OpPtr op, const Signal& y);
// -sum( yt log y + (1 - yt) log(1 - y) ) on the DAG output, outputs clamped
// to [eps, 1 - eps] before the logs
SmoothPtr cross_entropy(OpPtr dag, const Signal& labels);
// Moreau envelope of h with parameter beta; gradient (x - prox_bh(x))/beta
SmoothPtr moreau_envelope(ProxPtr h, double beta, Space domain_space);
// f(op(u)) for single-slot smooth f and linear op
SmoothPtr composed_smooth(SmoothPtr f, OpPtr op);

// ---- tuple-level nonsmooth interface used by the solvers ----

class TupleProxFn {
 public:
  virtual ~TupleProxFn() = default;
  virtual double value(const SignalTuple& x) const = 0;
  virtual SignalTuple prox(const SignalTuple& x, double gamma) const = 0;
  virtual bool convex() const = 0;
};

using TupleProxPtr = std::shared_ptr<const TupleProxFn>;

// one ProxFn per tuple slot (separable sum across slots)
TupleProxPtr slot_prox(std::vector<ProxPtr> fns);
inline TupleProxPtr single_prox(ProxPtr fn) {
  return slot_prox({std::move(fn)});
}

}  // namespace proxkit
