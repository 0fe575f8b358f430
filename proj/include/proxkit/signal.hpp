#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace proxkit {

enum class Field { Real, Complex };

// Dense real or complex tensor. Complex data is stored interleaved
// (re, im, re, im, ...), so a complex signal of n elements behaves as a
// real vector of dimension 2n for inner products and norms. This makes
// gradients of real-valued functions of complex variables well defined
// without special-casing the field.
class Signal {
 public:
  Signal() : field_(Field::Real) {}

  Signal(std::vector<int> shape, Field field)
      : shape_(std::move(shape)), field_(field) {
    data_.assign(rsize(), 0.0);
  }

  Signal(std::vector<int> shape, Field field, std::vector<double> data)
      : data_(std::move(data)), shape_(std::move(shape)), field_(field) {
    if (data_.size() != static_cast<size_t>(rsize()))
      throw std::invalid_argument("Signal: data length does not match shape");
  }

  static Signal zeros(std::vector<int> shape, Field field = Field::Real) {
    return Signal(std::move(shape), field);
  }

  static Signal vec(std::vector<double> v) {
    int n = static_cast<int>(v.size());
    return Signal({n}, Field::Real, std::move(v));
  }

  static Signal cvec(const std::vector<std::complex<double>>& v) {
    Signal s({static_cast<int>(v.size())}, Field::Complex);
    for (size_t i = 0; i < v.size(); ++i) s.set_cplx(i, v[i]);
    return s;
  }

  const std::vector<int>& shape() const { return shape_; }
  Field field() const { return field_; }

  // number of elements (complex counts as one element)
  int64_t numel() const {
    int64_t n = 1;
    for (int d : shape_) n *= d;
    return n;
  }

  // number of stored doubles
  int64_t rsize() const {
    return numel() * (field_ == Field::Complex ? 2 : 1);
  }

  double* raw() { return data_.data(); }
  const double* raw() const { return data_.data(); }
  std::vector<double>& data() { return data_; }
  const std::vector<double>& data() const { return data_; }

  double& operator[](int64_t i) { return data_[i]; }
  double operator[](int64_t i) const { return data_[i]; }

  std::complex<double> cplx(int64_t i) const {
    return {data_[2 * i], data_[2 * i + 1]};
  }
  void set_cplx(int64_t i, std::complex<double> z) {
    data_[2 * i] = z.real();
    data_[2 * i + 1] = z.imag();
  }

  // modulus of the i-th element (|x_i| for both fields)
  double modulus(int64_t i) const {
    if (field_ == Field::Complex) return std::abs(cplx(i));
    return std::abs(data_[i]);
  }

  bool same_space(const Signal& o) const {
    return shape_ == o.shape_ && field_ == o.field_;
  }

 private:
  std::vector<double> data_;
  std::vector<int> shape_;
  Field field_;
};

using SignalTuple = std::vector<Signal>;

namespace detail {
inline void check_same_space(const Signal& a, const Signal& b,
                             const char* what) {
  if (!a.same_space(b))
    throw std::invalid_argument(std::string(what) +
                                ": shape or field mismatch");
}
}  // namespace detail

// Re<a,b>; complex spaces are treated as real spaces of doubled dimension.
inline double inner(const Signal& a, const Signal& b) {
  detail::check_same_space(a, b, "inner");
  double s = 0.0;
  const double* pa = a.raw();
  const double* pb = b.raw();
  for (int64_t i = 0; i < a.rsize(); ++i) s += pa[i] * pb[i];
  return s;
}

inline double norm2(const Signal& a) { return std::sqrt(inner(a, a)); }

inline double norm_inf(const Signal& a) {
  double m = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) m = std::max(m, a.modulus(i));
  return m;
}

inline double norm1(const Signal& a) {
  double s = 0.0;
  for (int64_t i = 0; i < a.numel(); ++i) s += a.modulus(i);
  return s;
}

// alpha*x + y
inline Signal axpy(double alpha, const Signal& x, const Signal& y) {
  detail::check_same_space(x, y, "axpy");
  Signal r = y;
  double* pr = r.raw();
  const double* px = x.raw();
  for (int64_t i = 0; i < x.rsize(); ++i) pr[i] += alpha * px[i];
  return r;
}

inline void axpy_inplace(double alpha, const Signal& x, Signal& y) {
  detail::check_same_space(x, y, "axpy");
  double* py = y.raw();
  const double* px = x.raw();
  for (int64_t i = 0; i < x.rsize(); ++i) py[i] += alpha * px[i];
}

inline Signal scaled(double alpha, const Signal& x) {
  Signal r = x;
  for (double& v : r.data()) v *= alpha;
  return r;
}

inline Signal sub(const Signal& a, const Signal& b) { return axpy(-1.0, b, a); }
inline Signal add(const Signal& a, const Signal& b) { return axpy(1.0, b, a); }

inline bool is_finite(const Signal& a) {
  for (double v : a.data())
    if (!std::isfinite(v)) return false;
  return true;
}

// ---- tuple helpers: componentwise lifts of the operations above ----

inline double inner(const SignalTuple& a, const SignalTuple& b) {
  if (a.size() != b.size())
    throw std::invalid_argument("inner: tuple size mismatch");
  double s = 0.0;
  for (size_t i = 0; i < a.size(); ++i) s += inner(a[i], b[i]);
  return s;
}

inline double norm2(const SignalTuple& a) { return std::sqrt(inner(a, a)); }

inline double norm_inf(const SignalTuple& a) {
  double m = 0.0;
  for (const Signal& s : a) m = std::max(m, norm_inf(s));
  return m;
}

inline SignalTuple axpy(double alpha, const SignalTuple& x,
                        const SignalTuple& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("axpy: tuple size mismatch");
  SignalTuple r;
  r.reserve(x.size());
  for (size_t i = 0; i < x.size(); ++i) r.push_back(axpy(alpha, x[i], y[i]));
  return r;
}

inline SignalTuple scaled(double alpha, const SignalTuple& x) {
  SignalTuple r;
  r.reserve(x.size());
  for (const Signal& s : x) r.push_back(scaled(alpha, s));
  return r;
}

inline SignalTuple sub(const SignalTuple& a, const SignalTuple& b) {
  return axpy(-1.0, b, a);
}
inline SignalTuple add(const SignalTuple& a, const SignalTuple& b) {
  return axpy(1.0, b, a);
}

inline bool is_finite(const SignalTuple& a) {
  for (const Signal& s : a)
    if (!is_finite(s)) return false;
  return true;
}

inline SignalTuple tup(Signal s) { return SignalTuple{std::move(s)}; }

}  // namespace proxkit
