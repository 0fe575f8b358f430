#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <unordered_map>

#include "proxkit/signal.hpp"

namespace proxkit {

struct Space {
  std::vector<int> shape;
  Field field = Field::Real;

  bool operator==(const Space& o) const {
    return shape == o.shape && field == o.field;
  }
  bool operator!=(const Space& o) const { return !(*this == o); }

  int64_t numel() const {
    int64_t n = 1;
    for (int d : shape) n *= d;
    return n;
  }
  Signal zero() const { return Signal(shape, field); }
  bool contains(const Signal& s) const {
    return s.shape() == shape && s.field() == field;
  }
};

inline Space space_of(const Signal& s) { return {s.shape(), s.field()}; }

// Per-evaluation storage of linearization points. Values are pushed during
// the forward pass and popped in reverse order during the backward pass, so
// a node reused twice in one DAG keeps its two points separate. One cache
// per (DAG, input) evaluation; never shared across solves.
class EvalCache {
 public:
  void push(const void* node, SignalTuple vals) {
    store_[node].push_back(std::move(vals));
  }
  SignalTuple pop(const void* node) {
    auto it = store_.find(node);
    if (it == store_.end() || it->second.empty())
      throw std::runtime_error("EvalCache: missing forward cache entry");
    SignalTuple v = std::move(it->second.back());
    it->second.pop_back();
    return v;
  }
  void clear() { store_.clear(); }

 private:
  std::unordered_map<const void*, std::vector<SignalTuple>> store_;
};

// A mapping from a tuple of signals to one signal, evaluated through
// forward-adjoint oracles. Linear ops expose a cache-free adjoint; nonlinear
// ops store their linearization points during forward() and apply the
// Jacobian adjoint at those points in backward().
class Op {
 public:
  virtual ~Op() = default;

  const std::vector<Space>& domain() const { return dom_; }
  const Space& codomain() const { return cod_; }
  virtual bool linear() const = 0;

  virtual Signal forward(const SignalTuple& x, EvalCache& cache) const = 0;
  virtual SignalTuple backward(const Signal& g, EvalCache& cache) const = 0;

  // mu such that A A* = mu Id, when known
  std::optional<double> tight_frame_mu() const { return mu_; }

 protected:
  void check_domain(const SignalTuple& x) const {
    if (x.size() != dom_.size())
      throw std::invalid_argument("Op: wrong number of inputs");
    for (size_t i = 0; i < x.size(); ++i)
      if (!dom_[i].contains(x[i]))
        throw std::invalid_argument("Op: input shape/field mismatch");
  }
  void check_codomain(const Signal& g) const {
    if (!cod_.contains(g))
      throw std::invalid_argument("Op: codomain shape/field mismatch");
  }

  std::vector<Space> dom_;
  Space cod_;
  std::optional<double> mu_;
};

using OpPtr = std::shared_ptr<const Op>;

// single-input convenience wrappers
Signal apply(const Op& op, const Signal& x);
Signal apply(const Op& op, const SignalTuple& x);
SignalTuple adjoint(const Op& op, const Signal& y);
Signal adjoint1(const Op& op, const Signal& y);

// dag-style entry points; the cache must be threaded from forward to backward
Signal dag_forward(const Op& op, const SignalTuple& x, EvalCache& cache);
SignalTuple dag_backward(const Op& op, const Signal& g, EvalCache& cache);

// ---- calculus rules ----

OpPtr compose(OpPtr a, OpPtr b);           // a after b
OpPtr hcat(std::vector<OpPtr> ops);        // sum of op_j(x_j), shared codomain
OpPtr output_mul(OpPtr a, OpPtr b);        // (A x1)(B x2) matrix product

// ---- operator constructors ----

OpPtr identity_op(Space s);
OpPtr scale_op(double alpha, Space s);
OpPtr matrix_op(const std::vector<std::vector<double>>& m);
OpPtr matrix_op_cplx(const std::vector<std::vector<std::complex<double>>>& m);
OpPtr diag_op(const Signal& d, Field field = Field::Real);
OpPtr conv_op(const std::vector<double>& h, int n);
OpPtr dft_op(int n);
OpPtr idft_op(int n);
// real part of the unitary inverse DFT, C^n -> R^n; adjoint is the unitary
// DFT of a real signal. Still a tight frame with mu = 1.
OpPtr idft_real_op(int n);
OpPtr dct_op(int n);
OpPtr idct_op(int n);
OpPtr select_op(std::vector<int> indices, int n, Field field = Field::Real);
OpPtr variation_op(int n, int m);
OpPtr sigmoid_op(Space s);
// X -> X * D for a constant matrix D (row-major n x m applied to l x n ... )
OpPtr rmul_op(const std::vector<std::vector<double>>& d, int rows);
// replicate a length-h vector into the N columns of an h x N matrix
OpPtr broadcast_cols_op(int h, int n_cols);

// A* as an operator in its own right (single-input linear A only)
OpPtr adjoint_op(OpPtr a, double alpha = 1.0);  // alpha A*

bool is_identity_op(const Op& op);

// largest eigenvalue of A*A by power iteration, i.e. ||A||^2
double op_norm_sq(const Op& op, int iters = 50, unsigned seed = 7);

// access to selection indices (used by the problem splitter to merge
// disjoint selections into one separable prox)
const std::vector<int>* select_indices(const Op& op);

}  // namespace proxkit
