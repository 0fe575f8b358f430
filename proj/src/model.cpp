#include "proxkit/model.hpp"

#include <map>
#include <set>
#include <sstream>

namespace proxkit {

Term Term::smooth(SmoothPtr f, std::vector<int> vars) {
  Term t;
  t.h_smooth = std::move(f);
  t.vars = std::move(vars);
  return t;
}

Term Term::nonsmooth(ProxPtr h, int var, OpPtr op) {
  Term t;
  t.h_prox = std::move(h);
  t.op = std::move(op);
  t.vars = {var};
  return t;
}

void Problem::validate() const {
  if (x0.size() != variables.size())
    throw std::invalid_argument("Problem: x0 does not match variables");
  for (size_t j = 0; j < variables.size(); ++j)
    if (!variables[j].contains(x0[j]))
      throw std::invalid_argument("Problem: x0 slot has wrong space");
  for (size_t i = 0; i < terms.size(); ++i) {
    const Term& t = terms[i];
    if ((t.h_prox == nullptr) == (t.h_smooth == nullptr))
      throw std::invalid_argument(
          "Problem: term must be exactly one of smooth/nonsmooth");
    for (int j : t.vars)
      if (j < 0 || j >= static_cast<int>(variables.size()))
        throw std::invalid_argument("Problem: term references unknown variable");
    if (t.h_smooth) {
      auto dom = t.h_smooth->domain();
      if (dom.size() != t.vars.size())
        throw std::invalid_argument("Problem: smooth term arity mismatch");
      for (size_t k = 0; k < dom.size(); ++k)
        if (dom[k] != variables[t.vars[k]])
          throw std::invalid_argument("Problem: smooth term space mismatch");
    } else {
      if (t.vars.size() != 1)
        throw std::invalid_argument(
            "Problem: nonsmooth term must touch one variable");
      if (t.op) {
        if (t.op->domain().size() != 1 ||
            t.op->domain()[0] != variables[t.vars[0]])
          throw std::invalid_argument(
              "Problem: nonsmooth term mapping domain mismatch");
      }
    }
  }
}

SplittingError::SplittingError(ProxReport r)
    : std::runtime_error([&r] {
        std::ostringstream os;
        os << "problem cannot be split into prox-computable form:";
        for (const std::string& v : r.violations) os << "\n  " << v;
        return os.str();
      }()),
      report_(std::move(r)) {}

namespace {

bool disjoint(const std::vector<int>& a, const std::vector<int>& b) {
  std::set<int> sa(a.begin(), a.end());
  for (int i : b)
    if (sa.count(i)) return false;
  return true;
}

// smooth part assembled as a sum of per-term functions over sub-tuples
class GeneralSmooth final : public SmoothFn {
 public:
  struct Entry {
    SmoothPtr f;
    std::vector<int> vars;
  };

  GeneralSmooth(std::vector<Space> dom, std::vector<Entry> entries)
      : dom_(std::move(dom)), entries_(std::move(entries)) {}

  double value(const SignalTuple& x) const override {
    double s = 0.0;
    for (const Entry& e : entries_) s += e.f->value(gather(x, e.vars));
    return s;
  }
  SignalTuple grad(const SignalTuple& x) const override {
    return value_grad(x).second;
  }
  std::pair<double, SignalTuple> value_grad(
      const SignalTuple& x) const override {
    if (entries_.size() == 1 && covers_in_order(entries_[0].vars))
      return entries_[0].f->value_grad(x);
    double total = 0.0;
    SignalTuple g;
    g.reserve(dom_.size());
    for (const Space& s : dom_) g.push_back(s.zero());
    for (const Entry& e : entries_) {
      auto [v, gs] = e.f->value_grad(gather(x, e.vars));
      total += v;
      for (size_t k = 0; k < e.vars.size(); ++k)
        axpy_inplace(1.0, gs[k], g[e.vars[k]]);
    }
    return {total, g};
  }
  std::vector<Space> domain() const override { return dom_; }
  bool convex() const override {
    for (const Entry& e : entries_)
      if (!e.f->convex()) return false;
    return true;
  }
  std::optional<double> lipschitz() const override {
    double total = 0.0;
    for (const Entry& e : entries_) {
      auto l = e.f->lipschitz();
      if (!l) return std::nullopt;
      total += *l;  // sum of term curvatures is a valid upper bound
    }
    return total;
  }
  double strong_modulus() const override {
    if (entries_.size() == 1 && entries_[0].vars.size() == dom_.size())
      return entries_[0].f->strong_modulus();
    return 0.0;
  }

 private:
  bool covers_in_order(const std::vector<int>& v) const {
    if (v.size() != dom_.size()) return false;
    for (size_t k = 0; k < v.size(); ++k)
      if (v[k] != static_cast<int>(k)) return false;
    return true;
  }
  static SignalTuple gather(const SignalTuple& x, const std::vector<int>& v) {
    SignalTuple sub;
    sub.reserve(v.size());
    for (int j : v) sub.push_back(x[j]);
    return sub;
  }
  std::vector<Space> dom_;
  std::vector<Entry> entries_;
};

}  // namespace

ProxReport check_prox_computable(const Problem& p) {
  ProxReport rep;
  auto fail = [&](std::string msg) {
    rep.ok = false;
    rep.violations.push_back(std::move(msg));
  };

  // per variable: the nonsmooth terms touching it, with selection indices
  // when the mapping is a plain index selection
  std::map<int, std::vector<std::pair<size_t, const std::vector<int>*>>> byvar;

  for (size_t i = 0; i < p.terms.size(); ++i) {
    const Term& t = p.terms[i];
    if (!t.h_prox) continue;
    if (t.vars.size() != 1) {
      fail("term " + std::to_string(i) +
           ": nonsmooth term couples several variables");
      continue;
    }
    const std::vector<int>* sel = nullptr;
    if (t.op && !is_identity_op(*t.op)) {
      sel = select_indices(*t.op);
      if (!sel) {
        auto mu = t.op->tight_frame_mu();
        if (!mu || *mu <= 0) {
          fail("term " + std::to_string(i) +
               ": mapping lacks a tight-frame certificate");
          continue;
        }
      }
    }
    byvar[t.vars[0]].push_back({i, sel});
  }

  for (const auto& [var, terms] : byvar) {
    if (terms.size() <= 1) continue;
    bool mergeable = true;
    for (const auto& [i, sel] : terms)
      if (!sel) mergeable = false;
    if (mergeable)
      for (size_t a = 0; a + 1 < terms.size() && mergeable; ++a)
        for (size_t b = a + 1; b < terms.size() && mergeable; ++b)
          if (!disjoint(*terms[a].second, *terms[b].second)) mergeable = false;
    if (!mergeable)
      fail("variable " + std::to_string(var) + ": " +
           std::to_string(terms.size()) +
           " nonsmooth terms that are not disjoint index selections");
  }
  return rep;
}

SplitProblem split(const Problem& p) {
  p.validate();
  ProxReport rep = check_prox_computable(p);
  if (!rep.ok) throw SplittingError(std::move(rep));

  SplitProblem sp;
  std::vector<GeneralSmooth::Entry> entries;
  std::map<int, std::vector<size_t>> nonsmooth_byvar;
  for (size_t i = 0; i < p.terms.size(); ++i) {
    const Term& t = p.terms[i];
    if (t.h_smooth) {
      sp.i_f.push_back(static_cast<int>(i));
      entries.push_back({t.h_smooth, t.vars});
    } else {
      sp.i_g.push_back(static_cast<int>(i));
      nonsmooth_byvar[t.vars[0]].push_back(i);
    }
  }

  std::vector<ProxPtr> slots;
  for (size_t j = 0; j < p.variables.size(); ++j) {
    auto it = nonsmooth_byvar.find(static_cast<int>(j));
    if (it == nonsmooth_byvar.end()) {
      slots.push_back(zero_fn());
      continue;
    }
    const auto& idxs = it->second;
    if (idxs.size() == 1) {
      const Term& t = p.terms[idxs[0]];
      if (!t.op || is_identity_op(*t.op))
        slots.push_back(t.h_prox);
      else
        slots.push_back(precompose_tight_frame(t.h_prox, t.op));
    } else {
      std::vector<std::pair<std::vector<int>, ProxPtr>> parts;
      for (size_t i : idxs) {
        const Term& t = p.terms[i];
        parts.push_back({*select_indices(*t.op), t.h_prox});
      }
      slots.push_back(masked_separable(
          std::move(parts), static_cast<int>(p.variables[j].numel()),
          p.variables[j].field));
    }
  }

  sp.f = std::make_shared<GeneralSmooth>(p.variables, std::move(entries));
  sp.g = slot_prox(std::move(slots));
  return sp;
}

SignalTuple gradient_general(const SplitProblem& sp, const SignalTuple& x) {
  return sp.f->grad(x);
}

SolveResult solve(const SplitProblem& sp, const SignalTuple& x0,
                  const std::string& solver, const SolverConfig& cfg) {
  if (solver == "pg") return solve_pg(*sp.f, *sp.g, x0, cfg);
  if (solver == "fpg") return solve_fpg(*sp.f, *sp.g, x0, cfg);
  if (solver == "panoc") return solve_panoc(*sp.f, *sp.g, x0, cfg);
  throw std::invalid_argument("unknown solver: " + solver);
}

// ---- duality ----

namespace {

class ConjSmooth final : public SmoothFn {
 public:
  explicit ConjSmooth(SmoothPtr f) : f_(std::move(f)) {
    if (!f_->has_conjugate())
      throw std::invalid_argument("conjugate gradient not available");
  }
  double value(const SignalTuple& u) const override {
    return f_->conj_value(u);
  }
  SignalTuple grad(const SignalTuple& u) const override {
    return f_->conj_grad(u);
  }
  std::vector<Space> domain() const override { return f_->domain(); }
  bool convex() const override { return true; }
  std::optional<double> lipschitz() const override {
    double m = f_->strong_modulus();
    if (m > 0) return 1.0 / m;
    return std::nullopt;
  }

 private:
  SmoothPtr f_;
};

OpPtr neg_adjoint(const OpPtr& a) { return adjoint_op(a, -1.0); }

}  // namespace

DualProblem fenchel_dual(SmoothPtr f, OpPtr a, ProxPtr g) {
  if (f->domain().size() != 1 || f->domain()[0] != a->domain()[0])
    throw std::invalid_argument("fenchel_dual: f and a domain mismatch");
  if (!f->has_conjugate() || f->strong_modulus() <= 0)
    throw std::invalid_argument(
        "fenchel_dual: f is not strongly convex with a known conjugate; "
        "use regularize_then_dualize");
  DualProblem d;
  d.a = a;
  d.conj_f = std::make_shared<ConjSmooth>(std::move(f));
  d.dual_f = composed_smooth(d.conj_f, neg_adjoint(a));
  d.dual_g = convex_conjugate(std::move(g));
  return d;
}

Signal dual_to_primal(const DualProblem& d, const Signal& u) {
  Signal z = scaled(-1.0, adjoint1(*d.a, u));
  return d.conj_f->grad(tup(std::move(z)))[0];
}

SmoothPtr smooth_term(ProxPtr h, double beta, Space domain_space) {
  if (beta <= 0) throw std::invalid_argument("smooth_term: beta must be > 0");
  return moreau_envelope(std::move(h), beta, std::move(domain_space));
}

DualProblem regularize_then_dualize(ProxPtr f, OpPtr a, ProxPtr g,
                                    double beta) {
  if (beta <= 0)
    throw std::invalid_argument(
        "regularize_then_dualize: beta must be > 0 (no strong convexity "
        "is gained otherwise)");
  if (!f->convex())
    throw std::invalid_argument("regularize_then_dualize: f must be convex");
  Space xspace = a->domain()[0];
  DualProblem d;
  d.a = a;
  // conjugate of f + (beta/2)||.||^2 is the envelope of f's conjugate
  d.conj_f = moreau_envelope(convex_conjugate(std::move(f)), beta, xspace);
  d.dual_f = composed_smooth(d.conj_f, neg_adjoint(a));
  d.dual_g = convex_conjugate(std::move(g));
  return d;
}

Signal dual_to_primal_regularized(const DualProblem& d, const Signal& u) {
  return dual_to_primal(d, u);
}

}  // namespace proxkit
