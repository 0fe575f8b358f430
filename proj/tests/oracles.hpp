#pragma once

// Independent reference computations used by the test suites. These must
// stay naive and self-contained so they cross-check the library through a
// different code path.

#include <complex>
#include <random>
#include <vector>

#include "proxkit/funcs.hpp"
#include "proxkit/solvers.hpp"

namespace oracle {

using proxkit::Field;
using proxkit::Signal;
using proxkit::SignalTuple;

inline Signal random_signal(proxkit::Space s, std::mt19937_64& rng,
                            double std_dev = 1.0) {
  std::normal_distribution<double> g(0.0, std_dev);
  Signal out = s.zero();
  for (double& v : out.data()) v = g(rng);
  return out;
}

inline SignalTuple random_tuple(const std::vector<proxkit::Space>& spaces,
                                std::mt19937_64& rng, double std_dev = 1.0) {
  SignalTuple out;
  for (const auto& s : spaces) out.push_back(random_signal(s, rng, std_dev));
  return out;
}

// objective of the proximal subproblem: h(z) + ||z - x||^2 / (2 gamma)
inline double prox_objective(const proxkit::ProxFn& h, const Signal& z,
                             const Signal& x, double gamma) {
  Signal d = proxkit::sub(z, x);
  return h.value(z) + proxkit::inner(d, d) / (2.0 * gamma);
}

// smallest margin by which the prox output beats random perturbations of
// itself on the subproblem objective; negative means a perturbation won
inline double prox_perturbation_margin(const proxkit::ProxFn& h,
                                       const Signal& x, double gamma,
                                       int n_pert, std::mt19937_64& rng) {
  Signal z = h.prox(x, gamma);
  double base = prox_objective(h, z, x, gamma);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> mag(-4.0, 0.5);
  double margin = std::numeric_limits<double>::infinity();
  for (int p = 0; p < n_pert; ++p) {
    Signal cand = z;
    double scale = std::pow(10.0, mag(rng));
    for (double& v : cand.data()) v += scale * g(rng);
    double obj = prox_objective(h, cand, x, gamma);
    if (std::isfinite(obj)) margin = std::min(margin, obj - base);
  }
  // every perturbation may be infeasible for an indicator; that is a win
  if (!std::isfinite(margin)) return 0.0;
  return margin;
}

// central finite differences of a smooth function
inline SignalTuple finite_diff_grad(const proxkit::SmoothFn& f,
                                    const SignalTuple& x, double h = 1e-6) {
  SignalTuple g;
  for (const Signal& s : x) g.push_back(proxkit::space_of(s).zero());
  for (size_t slot = 0; slot < x.size(); ++slot) {
    for (int64_t i = 0; i < x[slot].rsize(); ++i) {
      SignalTuple xp = x, xm = x;
      xp[slot].raw()[i] += h;
      xm[slot].raw()[i] -= h;
      g[slot].raw()[i] = (f.value(xp) - f.value(xm)) / (2.0 * h);
    }
  }
  return g;
}

// relative deviation between two gradient tuples
inline double grad_rel_error(const SignalTuple& a, const SignalTuple& b) {
  double num = proxkit::norm2(proxkit::sub(a, b));
  double den = 1.0 + proxkit::norm2(b);
  return num / den;
}

// full discrete convolution by the definition, O(n m)
inline std::vector<double> naive_conv(const std::vector<double>& h,
                                      const std::vector<double>& x) {
  std::vector<double> y(h.size() + x.size() - 1, 0.0);
  for (size_t i = 0; i < h.size(); ++i)
    for (size_t j = 0; j < x.size(); ++j) y[i + j] += h[i] * x[j];
  return y;
}

// unitary discrete Fourier transform by the definition, O(n^2)
inline std::vector<std::complex<double>> direct_dft(
    const std::vector<std::complex<double>>& x, int sign) {
  size_t n = x.size();
  std::vector<std::complex<double>> y(n);
  double scale = 1.0 / std::sqrt(double(n));
  for (size_t k = 0; k < n; ++k) {
    std::complex<double> acc = 0.0;
    for (size_t t = 0; t < n; ++t)
      acc += x[t] * std::exp(std::complex<double>(
                        0.0, sign * 2.0 * M_PI * double(k * t) / double(n)));
    y[k] = acc * scale;
  }
  return y;
}

// orthonormal type-II cosine transform by the definition, O(n^2)
inline std::vector<double> direct_dct(const std::vector<double>& x) {
  size_t n = x.size();
  std::vector<double> y(n, 0.0);
  for (size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (size_t t = 0; t < n; ++t)
      acc += x[t] * std::cos(M_PI / double(n) * (double(t) + 0.5) * double(k));
    y[k] = acc * (k == 0 ? std::sqrt(1.0 / double(n))
                         : std::sqrt(2.0 / double(n)));
  }
  return y;
}

inline double adjoint_defect(const proxkit::Op& op, std::mt19937_64& rng) {
  proxkit::EvalCache cache;
  SignalTuple x = random_tuple(op.domain(), rng);
  Signal y = random_signal(op.codomain(), rng);
  Signal ax = op.forward(x, cache);
  SignalTuple aty = op.backward(y, cache);
  double lhs = proxkit::inner(ax, y);
  double rhs = proxkit::inner(x, aty);
  return std::abs(lhs - rhs) /
         (1.0 + proxkit::norm2(ax) * proxkit::norm2(y));
}

}  // namespace oracle
