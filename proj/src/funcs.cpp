#include "proxkit/funcs.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <limits>
#include <mutex>
#include <numeric>

namespace proxkit {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// feasibility slack for indicator membership tests; kept tiny so a barely
// infeasible point can never undercut the exact projection by more than the
// roundoff the prox itself commits
double slack(const Signal& x) { return 1e-12 * (1.0 + norm2(x)); }

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> as_mat(const Signal& s) {
  const auto& sh = s.shape();
  if (sh.size() != 2 || s.field() != Field::Real)
    throw std::invalid_argument("expected a real matrix-shaped signal");
  return Eigen::Map<const RowMat>(s.raw(), sh[0], sh[1]);
}

Eigen::Map<RowMat> as_mat(Signal& s) {
  const auto& sh = s.shape();
  return Eigen::Map<RowMat>(s.raw(), sh[0], sh[1]);
}

Eigen::MatrixXd to_eigen(const std::vector<std::vector<double>>& a) {
  Eigen::MatrixXd m(a.size(), a[0].size());
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) m(i, j) = a[i][j];
  return m;
}

// shrink the modulus of every element by t, preserving phase
Signal shrink_modulus(const Signal& x, double t) {
  Signal z = x;
  if (x.field() == Field::Complex) {
    for (int64_t i = 0; i < x.numel(); ++i) {
      double m = std::abs(x.cplx(i));
      if (m <= t)
        z.set_cplx(i, 0.0);
      else
        z.set_cplx(i, x.cplx(i) * ((m - t) / m));
    }
  } else {
    for (int64_t i = 0; i < x.numel(); ++i) {
      double v = x[i];
      z[i] = v > t ? v - t : (v < -t ? v + t : 0.0);
    }
  }
  return z;
}

class ZeroFn final : public ProxFn {
 public:
  double value(const Signal&) const override { return 0.0; }
  Signal prox(const Signal& x, double) const override { return x; }
  bool convex() const override { return true; }
  bool separable() const override { return true; }
  std::optional<double> conjugate_value(const Signal& u) const override {
    return norm2(u) <= slack(u) ? 0.0 : kInf;
  }
};

class L1Norm final : public ProxFn {
 public:
  explicit L1Norm(double lambda) : lambda_(lambda) {
    if (lambda < 0) throw std::invalid_argument("l1_norm: negative lambda");
  }
  double value(const Signal& x) const override { return lambda_ * norm1(x); }
  Signal prox(const Signal& x, double gamma) const override {
    return shrink_modulus(x, gamma * lambda_);
  }
  bool convex() const override { return true; }
  bool separable() const override { return true; }
  std::optional<double> conjugate_value(const Signal& u) const override {
    return norm_inf(u) <= lambda_ + slack(u) ? 0.0 : kInf;
  }

 private:
  double lambda_;
};

class L0PseudoNorm final : public ProxFn {
 public:
  explicit L0PseudoNorm(double lambda) : lambda_(lambda) {
    if (lambda < 0)
      throw std::invalid_argument("l0_pseudo_norm: negative lambda");
  }
  double value(const Signal& x) const override {
    int64_t nnz = 0;
    for (int64_t i = 0; i < x.numel(); ++i)
      if (x.modulus(i) != 0.0) ++nnz;
    return lambda_ * static_cast<double>(nnz);
  }
  Signal prox(const Signal& x, double gamma) const override {
    double thr = std::sqrt(2.0 * gamma * lambda_);
    Signal z = x;
    int w = x.field() == Field::Complex ? 2 : 1;
    for (int64_t i = 0; i < x.numel(); ++i)
      if (x.modulus(i) <= thr)  // ties resolve to zero
        for (int c = 0; c < w; ++c) z[i * w + c] = 0.0;
    return z;
  }
  bool convex() const override { return false; }
  bool separable() const override { return true; }

 private:
  double lambda_;
};

class L2Norm final : public ProxFn {
 public:
  explicit L2Norm(double lambda) : lambda_(lambda) {
    if (lambda < 0) throw std::invalid_argument("l2_norm: negative lambda");
  }
  double value(const Signal& x) const override { return lambda_ * norm2(x); }
  Signal prox(const Signal& x, double gamma) const override {
    double n = norm2(x);
    double t = gamma * lambda_;
    if (n <= t) return space_of(x).zero();
    return scaled(1.0 - t / n, x);
  }
  bool convex() const override { return true; }
  std::optional<double> conjugate_value(const Signal& u) const override {
    return norm2(u) <= lambda_ + slack(u) ? 0.0 : kInf;
  }

 private:
  double lambda_;
};

// thin SVD helper for the spectral functions
struct Svd {
  Eigen::MatrixXd u, v;
  Eigen::VectorXd s;
};

Svd thin_svd(const Signal& x) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      as_mat(x), Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.matrixV(), svd.singularValues()};
}

Signal from_svd(const Svd& d, const Eigen::VectorXd& sigma,
                const std::vector<int>& shape) {
  Signal out(shape, Field::Real);
  as_mat(out) = d.u * sigma.asDiagonal() * d.v.transpose();
  return out;
}

class NuclearNorm final : public ProxFn {
 public:
  explicit NuclearNorm(double lambda) : lambda_(lambda) {
    if (lambda < 0)
      throw std::invalid_argument("nuclear_norm: negative lambda");
  }
  double value(const Signal& x) const override {
    return lambda_ * thin_svd(x).s.sum();
  }
  Signal prox(const Signal& x, double gamma) const override {
    Svd d = thin_svd(x);
    Eigen::VectorXd sigma =
        (d.s.array() - gamma * lambda_).cwiseMax(0.0).matrix();
    return from_svd(d, sigma, x.shape());
  }
  bool convex() const override { return true; }

 private:
  double lambda_;
};

class MixedL21Norm final : public ProxFn {
 public:
  explicit MixedL21Norm(double lambda) : lambda_(lambda) {
    if (lambda < 0)
      throw std::invalid_argument("mixed_l21_norm: negative lambda");
  }
  double value(const Signal& x) const override {
    auto m = as_mat(x);
    double s = 0.0;
    for (int i = 0; i < m.rows(); ++i) s += m.row(i).norm();
    return lambda_ * s;
  }
  Signal prox(const Signal& x, double gamma) const override {
    Signal z = x;
    auto m = as_mat(z);
    double t = gamma * lambda_;
    for (int i = 0; i < m.rows(); ++i) {
      double n = m.row(i).norm();
      if (n <= t)
        m.row(i).setZero();
      else
        m.row(i) *= 1.0 - t / n;
    }
    return z;
  }
  bool convex() const override { return true; }
  std::optional<double> conjugate_value(const Signal& u) const override {
    auto m = as_mat(u);
    double tol = lambda_ + slack(u);
    for (int i = 0; i < m.rows(); ++i)
      if (m.row(i).norm() > tol) return kInf;
    return 0.0;
  }

 private:
  double lambda_;
};

class LeastSquaresQuadratic final : public ProxFn {
 public:
  LeastSquaresQuadratic(Eigen::MatrixXd a, Eigen::VectorXd b)
      : a_(std::move(a)), b_(std::move(b)) {
    ata_ = a_.transpose() * a_;
    atb_ = a_.transpose() * b_;
  }
  double value(const Signal& x) const override {
    Eigen::Map<const Eigen::VectorXd> v(x.raw(), x.rsize());
    return 0.5 * (a_ * v - b_).squaredNorm();
  }
  Signal prox(const Signal& x, double gamma) const override {
    Eigen::Map<const Eigen::VectorXd> v(x.raw(), x.rsize());
    Eigen::MatrixXd lhs = ata_;
    lhs.diagonal().array() += 1.0 / gamma;
    Eigen::VectorXd z = lhs.ldlt().solve(atb_ + v / gamma);
    Signal out = space_of(x).zero();
    Eigen::Map<Eigen::VectorXd>(out.raw(), out.rsize()) = z;
    return out;
  }
  bool convex() const override { return true; }

 private:
  Eigen::MatrixXd a_, ata_;
  Eigen::VectorXd b_, atb_;
};

class BallL0 final : public ProxFn {
 public:
  explicit BallL0(int m) : m_(m) {
    if (m < 0) throw std::invalid_argument("ball_l0: negative m");
  }
  double value(const Signal& x) const override {
    int64_t nnz = 0;
    for (int64_t i = 0; i < x.numel(); ++i)
      if (x.modulus(i) != 0.0) ++nnz;
    return nnz <= m_ ? 0.0 : kInf;
  }
  Signal prox(const Signal& x, double) const override {
    int64_t n = x.numel();
    std::vector<int64_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    // stable sort: equal moduli keep the lowest index first
    std::stable_sort(idx.begin(), idx.end(), [&](int64_t a, int64_t b) {
      return x.modulus(a) > x.modulus(b);
    });
    Signal z = space_of(x).zero();
    int w = x.field() == Field::Complex ? 2 : 1;
    for (int64_t k = 0; k < std::min<int64_t>(m_, n); ++k)
      for (int c = 0; c < w; ++c)
        z[idx[k] * w + c] = x[idx[k] * w + c];
    return z;
  }
  bool convex() const override { return false; }

 private:
  int m_;
};

class BallL2 final : public ProxFn {
 public:
  explicit BallL2(double r) : r_(r) {
    if (r < 0) throw std::invalid_argument("ball_l2: negative radius");
  }
  double value(const Signal& x) const override {
    return norm2(x) <= r_ + slack(x) ? 0.0 : kInf;
  }
  Signal prox(const Signal& x, double) const override {
    double n = norm2(x);
    if (n <= r_) return x;
    return scaled(r_ / n, x);
  }
  bool convex() const override { return true; }
  std::optional<double> conjugate_value(const Signal& u) const override {
    return r_ * norm2(u);  // support function of the ball
  }

 private:
  double r_;
};

class BoxInd final : public ProxFn {
 public:
  BoxInd(double lo, double hi) : lo_(lo), hi_(hi) {
    if (lo > hi) throw std::invalid_argument("box: lo > hi");
  }
  double value(const Signal& x) const override {
    double s = slack(x);
    for (double v : x.data())
      if (v < lo_ - s || v > hi_ + s) return kInf;
    return 0.0;
  }
  Signal prox(const Signal& x, double) const override {
    Signal z = x;
    for (double& v : z.data()) v = std::min(hi_, std::max(lo_, v));
    return z;
  }
  bool convex() const override { return true; }
  bool separable() const override { return true; }
  std::optional<double> conjugate_value(const Signal& u) const override {
    double s = 0.0;
    for (double v : u.data()) s += v >= 0 ? hi_ * v : lo_ * v;
    return s;
  }

 private:
  double lo_, hi_;
};

class HalfspaceGe final : public ProxFn {
 public:
  explicit HalfspaceGe(double c) : c_(c) {}
  double value(const Signal& x) const override {
    double s = slack(x);
    for (double v : x.data())
      if (v < c_ - s) return kInf;
    return 0.0;
  }
  Signal prox(const Signal& x, double) const override {
    Signal z = x;
    for (double& v : z.data()) v = std::max(c_, v);
    return z;
  }
  bool convex() const override { return true; }
  bool separable() const override { return true; }

 private:
  double c_;
};

class HalfspaceLe final : public ProxFn {
 public:
  explicit HalfspaceLe(double c) : c_(c) {}
  double value(const Signal& x) const override {
    double s = slack(x);
    for (double v : x.data())
      if (v > -c_ + s) return kInf;
    return 0.0;
  }
  Signal prox(const Signal& x, double) const override {
    Signal z = x;
    for (double& v : z.data()) v = std::min(-c_, v);
    return z;
  }
  bool convex() const override { return true; }
  bool separable() const override { return true; }

 private:
  double c_;
};

class RankBall final : public ProxFn {
 public:
  explicit RankBall(int m) : m_(m) {
    if (m < 0) throw std::invalid_argument("rank_ball: negative m");
  }
  double value(const Signal& x) const override {
    Svd d = thin_svd(x);
    double tol = 1e-9 * (1.0 + (d.s.size() ? d.s(0) : 0.0));
    int rank = 0;
    for (int i = 0; i < d.s.size(); ++i)
      if (d.s(i) > tol) ++rank;
    return rank <= m_ ? 0.0 : kInf;
  }
  Signal prox(const Signal& x, double) const override {
    Svd d = thin_svd(x);
    Eigen::VectorXd sigma = d.s;
    for (int i = m_; i < sigma.size(); ++i) sigma(i) = 0.0;
    return from_svd(d, sigma, x.shape());
  }
  bool convex() const override { return false; }

 private:
  int m_;
};

class AffineSet final : public ProxFn {
 public:
  AffineSet(Eigen::MatrixXd a, Eigen::VectorXd b)
      : a_(std::move(a)), b_(std::move(b)) {
    aat_ = (a_ * a_.transpose()).ldlt();
  }
  double value(const Signal& x) const override {
    Eigen::Map<const Eigen::VectorXd> v(x.raw(), x.rsize());
    double r = (a_ * v - b_).norm();
    return r <= slack(x) ? 0.0 : kInf;
  }
  Signal prox(const Signal& x, double) const override {
    Eigen::Map<const Eigen::VectorXd> v(x.raw(), x.rsize());
    Eigen::VectorXd z = v + a_.transpose() * aat_.solve(b_ - a_ * v);
    Signal out = space_of(x).zero();
    Eigen::Map<Eigen::VectorXd>(out.raw(), out.rsize()) = z;
    return out;
  }
  bool convex() const override { return true; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::LDLT<Eigen::MatrixXd> aat_;
};

}  // namespace

ProxPtr zero_fn() { return std::make_shared<ZeroFn>(); }
ProxPtr l1_norm(double lambda) { return std::make_shared<L1Norm>(lambda); }
ProxPtr l0_pseudo_norm(double lambda) {
  return std::make_shared<L0PseudoNorm>(lambda);
}
ProxPtr l2_norm(double lambda) { return std::make_shared<L2Norm>(lambda); }
ProxPtr nuclear_norm(double lambda) {
  return std::make_shared<NuclearNorm>(lambda);
}
ProxPtr mixed_l21_norm(double lambda) {
  return std::make_shared<MixedL21Norm>(lambda);
}
ProxPtr least_squares_quadratic(const std::vector<std::vector<double>>& a,
                                const std::vector<double>& b) {
  return std::make_shared<LeastSquaresQuadratic>(
      to_eigen(a), Eigen::Map<const Eigen::VectorXd>(b.data(), b.size()));
}
ProxPtr ball_l0(int m) { return std::make_shared<BallL0>(m); }
ProxPtr ball_l2(double r) { return std::make_shared<BallL2>(r); }
ProxPtr box(double lo, double hi) { return std::make_shared<BoxInd>(lo, hi); }
ProxPtr halfspace_ge(double c) { return std::make_shared<HalfspaceGe>(c); }
ProxPtr halfspace_le(double c) { return std::make_shared<HalfspaceLe>(c); }
ProxPtr rank_ball(int m) { return std::make_shared<RankBall>(m); }
ProxPtr affine_set(const std::vector<std::vector<double>>& a,
                   const std::vector<double>& b) {
  return std::make_shared<AffineSet>(
      to_eigen(a), Eigen::Map<const Eigen::VectorXd>(b.data(), b.size()));
}

// ---- calculus wrappers ----

namespace {

class SeparableSum final : public ProxFn {
 public:
  SeparableSum(std::vector<ProxPtr> fns, std::vector<Space> blocks)
      : fns_(std::move(fns)), blocks_(std::move(blocks)) {
    if (fns_.size() != blocks_.size())
      throw std::invalid_argument("separable_sum: fns/blocks size mismatch");
    cvx_ = true;
    for (const ProxPtr& f : fns_) cvx_ = cvx_ && f->convex();
  }
  double value(const Signal& x) const override {
    double s = 0.0;
    int64_t off = 0;
    for (size_t i = 0; i < fns_.size(); ++i) {
      s += fns_[i]->value(block(x, i, off));
      off += blocks_[i].zero().rsize();
    }
    return s;
  }
  Signal prox(const Signal& x, double gamma) const override {
    Signal z = x;
    int64_t off = 0;
    for (size_t i = 0; i < fns_.size(); ++i) {
      Signal zb = fns_[i]->prox(block(x, i, off), gamma);
      std::copy(zb.raw(), zb.raw() + zb.rsize(), z.raw() + off);
      off += zb.rsize();
    }
    return z;
  }
  bool convex() const override { return cvx_; }
  bool separable() const override { return true; }

 private:
  Signal block(const Signal& x, size_t i, int64_t off) const {
    Signal b = blocks_[i].zero();
    if (off + b.rsize() > x.rsize())
      throw std::invalid_argument("separable_sum: blocks exceed signal");
    std::copy(x.raw() + off, x.raw() + off + b.rsize(), b.raw());
    return b;
  }
  std::vector<ProxPtr> fns_;
  std::vector<Space> blocks_;
  bool cvx_;
};

class MaskedSeparable final : public ProxFn {
 public:
  MaskedSeparable(std::vector<std::pair<std::vector<int>, ProxPtr>> parts,
                  int n, Field field)
      : parts_(std::move(parts)), n_(n), field_(field) {
    std::vector<char> seen(n, 0);
    cvx_ = true;
    for (const auto& [idx, fn] : parts_) {
      for (int i : idx) {
        if (i < 0 || i >= n)
          throw std::invalid_argument("masked_separable: index out of range");
        if (seen[i])
          throw std::invalid_argument("masked_separable: overlapping indices");
        seen[i] = 1;
      }
      cvx_ = cvx_ && fn->convex();
    }
  }
  double value(const Signal& x) const override {
    double s = 0.0;
    for (const auto& [idx, fn] : parts_) s += fn->value(gather(x, idx));
    return s;
  }
  Signal prox(const Signal& x, double gamma) const override {
    Signal z = x;
    int w = field_ == Field::Complex ? 2 : 1;
    for (const auto& [idx, fn] : parts_) {
      Signal zb = fn->prox(gather(x, idx), gamma);
      for (size_t k = 0; k < idx.size(); ++k)
        for (int c = 0; c < w; ++c)
          z[static_cast<int64_t>(idx[k]) * w + c] =
              zb[static_cast<int64_t>(k) * w + c];
    }
    return z;
  }
  bool convex() const override { return cvx_; }
  bool separable() const override { return true; }

 private:
  Signal gather(const Signal& x, const std::vector<int>& idx) const {
    Signal b(std::vector<int>{static_cast<int>(idx.size())}, field_);
    int w = field_ == Field::Complex ? 2 : 1;
    for (size_t k = 0; k < idx.size(); ++k)
      for (int c = 0; c < w; ++c)
        b[static_cast<int64_t>(k) * w + c] =
            x[static_cast<int64_t>(idx[k]) * w + c];
    return b;
  }
  std::vector<std::pair<std::vector<int>, ProxPtr>> parts_;
  int n_;
  Field field_;
  bool cvx_;
};

class Translate final : public ProxFn {
 public:
  Translate(ProxPtr h, Signal b) : h_(std::move(h)), b_(std::move(b)) {}
  double value(const Signal& x) const override {
    return h_->value(add(x, b_));
  }
  Signal prox(const Signal& x, double gamma) const override {
    return sub(h_->prox(add(x, b_), gamma), b_);
  }
  bool convex() const override { return h_->convex(); }
  std::optional<double> conjugate_value(const Signal& u) const override {
    if (auto v = h_->conjugate_value(u)) return *v - inner(b_, u);
    return std::nullopt;
  }

 private:
  ProxPtr h_;
  Signal b_;
};

class AffineAddition final : public ProxFn {
 public:
  AffineAddition(ProxPtr h, Signal a) : h_(std::move(h)), a_(std::move(a)) {}
  double value(const Signal& x) const override {
    return h_->value(x) + inner(a_, x);
  }
  Signal prox(const Signal& x, double gamma) const override {
    return h_->prox(axpy(-gamma, a_, x), gamma);
  }
  bool convex() const override { return h_->convex(); }
  std::optional<double> conjugate_value(const Signal& u) const override {
    return h_->conjugate_value(sub(u, a_));
  }

 private:
  ProxPtr h_;
  Signal a_;
};

class Postcompose final : public ProxFn {
 public:
  Postcompose(ProxPtr h, double a, double b) : h_(std::move(h)), a_(a), b_(b) {
    if (a <= 0) throw std::invalid_argument("postcompose: need a > 0");
  }
  double value(const Signal& x) const override {
    return a_ * h_->value(x) + b_;
  }
  Signal prox(const Signal& x, double gamma) const override {
    return h_->prox(x, a_ * gamma);
  }
  bool convex() const override { return h_->convex(); }

 private:
  ProxPtr h_;
  double a_, b_;
};

class PrecomposeTightFrame final : public ProxFn {
 public:
  PrecomposeTightFrame(ProxPtr h, OpPtr a) : h_(std::move(h)), a_(std::move(a)) {
    if (!a_->linear() || a_->domain().size() != 1)
      throw std::invalid_argument(
          "precompose_tight_frame: need a single-input linear mapping");
    if (!a_->tight_frame_mu() || *a_->tight_frame_mu() <= 0)
      throw std::invalid_argument(
          "precompose_tight_frame: mapping lacks a tight-frame certificate");
    mu_ = *a_->tight_frame_mu();
  }
  double value(const Signal& x) const override {
    return h_->value(apply(*a_, x));
  }
  Signal prox(const Signal& x, double gamma) const override {
    Signal ax = apply(*a_, x);
    Signal p = h_->prox(ax, mu_ * gamma);
    return axpy(1.0 / mu_, adjoint1(*a_, sub(p, ax)), x);
  }
  bool convex() const override { return h_->convex(); }

 private:
  ProxPtr h_;
  OpPtr a_;
  double mu_;
};

class Regularize final : public ProxFn {
 public:
  Regularize(ProxPtr h, double rho, Signal b)
      : h_(std::move(h)), rho_(rho), b_(std::move(b)) {
    if (rho < 0) throw std::invalid_argument("regularize: negative rho");
  }
  double value(const Signal& x) const override {
    Signal d = sub(x, b_);
    return h_->value(x) + 0.5 * rho_ * inner(d, d);
  }
  Signal prox(const Signal& x, double gamma) const override {
    double gt = gamma / (1.0 + gamma * rho_);
    Signal arg = axpy(gt * rho_, b_, scaled(gt / gamma, x));
    return h_->prox(arg, gt);
  }
  bool convex() const override { return h_->convex(); }

 private:
  ProxPtr h_;
  double rho_;
  Signal b_;
};

class ConvexConjugate final : public ProxFn {
 public:
  explicit ConvexConjugate(ProxPtr h) : h_(std::move(h)) {
    if (!h_->convex())
      throw std::invalid_argument("convex_conjugate: h must be convex");
  }
  double value(const Signal& u) const override {
    if (auto v = h_->conjugate_value(u)) return *v;
    // sup_x <u,x> - h(x), approximated through a large-stepsize prox
    const double t = 1e8;
    Signal z = h_->prox(scaled(t, u), t);
    return inner(u, z) - h_->value(z);
  }
  Signal prox(const Signal& u, double gamma) const override {
    // Moreau decomposition
    Signal out = u;
    axpy_inplace(-gamma, h_->prox(scaled(1.0 / gamma, u), 1.0 / gamma), out);
    return out;
  }
  bool convex() const override { return true; }
  std::optional<double> conjugate_value(const Signal& x) const override {
    return h_->value(x);  // h closed convex: h** = h
  }

 private:
  ProxPtr h_;
};

}  // namespace

ProxPtr separable_sum(std::vector<ProxPtr> fns, std::vector<Space> blocks) {
  return std::make_shared<SeparableSum>(std::move(fns), std::move(blocks));
}
ProxPtr masked_separable(
    std::vector<std::pair<std::vector<int>, ProxPtr>> parts, int n,
    Field field) {
  return std::make_shared<MaskedSeparable>(std::move(parts), n, field);
}
ProxPtr translate(ProxPtr h, const Signal& b) {
  return std::make_shared<Translate>(std::move(h), b);
}
ProxPtr affine_addition(ProxPtr h, const Signal& a) {
  return std::make_shared<AffineAddition>(std::move(h), a);
}
ProxPtr postcompose(ProxPtr h, double a, double b) {
  return std::make_shared<Postcompose>(std::move(h), a, b);
}
ProxPtr precompose_tight_frame(ProxPtr h, OpPtr a) {
  return std::make_shared<PrecomposeTightFrame>(std::move(h), std::move(a));
}
ProxPtr regularize(ProxPtr h, double rho, const Signal& b) {
  return std::make_shared<Regularize>(std::move(h), rho, b);
}
ProxPtr convex_conjugate(ProxPtr h) {
  return std::make_shared<ConvexConjugate>(std::move(h));
}

// ---- smooth functions ----

namespace {

class LeastSquaresFn final : public SmoothFn {
 public:
  LeastSquaresFn(OpPtr op, Signal y) : op_(std::move(op)), y_(std::move(y)) {
    if (!op_->codomain().contains(y_))
      throw std::invalid_argument("least_squares: y does not match codomain");
  }
  double value(const SignalTuple& x) const override {
    Signal r = sub(apply(*op_, x), y_);
    return 0.5 * inner(r, r);
  }
  SignalTuple grad(const SignalTuple& x) const override {
    return value_grad(x).second;
  }
  std::pair<double, SignalTuple> value_grad(
      const SignalTuple& x) const override {
    EvalCache cache;
    Signal r = sub(op_->forward(x, cache), y_);
    double v = 0.5 * inner(r, r);
    return {v, op_->backward(r, cache)};
  }
  std::vector<Space> domain() const override { return op_->domain(); }
  bool convex() const override { return op_->linear(); }
  std::optional<double> lipschitz() const override {
    if (!op_->linear()) return std::nullopt;
    std::lock_guard<std::mutex> lock(mu_);
    if (!lip_) lip_ = op_norm_sq(*op_);
    return lip_;
  }
  double strong_modulus() const override {
    return is_identity_op(*op_) ? 1.0 : 0.0;
  }
  bool has_conjugate() const override { return is_identity_op(*op_); }
  double conj_value(const SignalTuple& u) const override {
    // conjugate of 1/2||x - y||^2 is 1/2||u||^2 + <u, y>
    return 0.5 * inner(u[0], u[0]) + inner(u[0], y_);
  }
  SignalTuple conj_grad(const SignalTuple& u) const override {
    return tup(add(u[0], y_));
  }
  OpPtr op() const { return op_; }
  const Signal& data() const { return y_; }

 private:
  OpPtr op_;
  Signal y_;
  mutable std::mutex mu_;
  mutable std::optional<double> lip_;
};

class CrossEntropyFn final : public SmoothFn {
 public:
  CrossEntropyFn(OpPtr dag, Signal labels)
      : dag_(std::move(dag)), labels_(std::move(labels)) {
    if (!dag_->codomain().contains(labels_))
      throw std::invalid_argument("cross_entropy: label shape mismatch");
    if (labels_.field() != Field::Real)
      throw std::invalid_argument("cross_entropy: labels must be real");
  }
  double value(const SignalTuple& x) const override {
    Signal y = apply(*dag_, x);
    return loss(y);
  }
  SignalTuple grad(const SignalTuple& x) const override {
    return value_grad(x).second;
  }
  std::pair<double, SignalTuple> value_grad(
      const SignalTuple& x) const override {
    EvalCache cache;
    Signal y = dag_->forward(x, cache);
    double v = loss(y);
    Signal gy = space_of(y).zero();
    for (int64_t i = 0; i < y.numel(); ++i) {
      double p = clamp(y[i]);
      gy[i] = -(labels_[i] / p - (1.0 - labels_[i]) / (1.0 - p));
    }
    return {v, dag_->backward(gy, cache)};
  }
  std::vector<Space> domain() const override { return dag_->domain(); }
  bool convex() const override { return false; }

 private:
  static double clamp(double p) {
    const double eps = 1e-12;
    return std::min(1.0 - eps, std::max(eps, p));
  }
  double loss(const Signal& y) const {
    double s = 0.0;
    for (int64_t i = 0; i < y.numel(); ++i) {
      double p = clamp(y[i]);
      s -= labels_[i] * std::log(p) + (1.0 - labels_[i]) * std::log(1.0 - p);
    }
    return s;
  }
  OpPtr dag_;
  Signal labels_;
};

class MoreauEnvelopeFn final : public SmoothFn {
 public:
  MoreauEnvelopeFn(ProxPtr h, double beta, Space sp)
      : h_(std::move(h)), beta_(beta), sp_(std::move(sp)) {
    if (beta <= 0) throw std::invalid_argument("moreau_envelope: beta <= 0");
  }
  double value(const SignalTuple& x) const override {
    Signal z = h_->prox(x[0], beta_);
    Signal d = sub(z, x[0]);
    return h_->value(z) + inner(d, d) / (2.0 * beta_);
  }
  SignalTuple grad(const SignalTuple& x) const override {
    Signal z = h_->prox(x[0], beta_);
    return tup(scaled(1.0 / beta_, sub(x[0], z)));
  }
  std::pair<double, SignalTuple> value_grad(
      const SignalTuple& x) const override {
    Signal z = h_->prox(x[0], beta_);
    Signal d = sub(z, x[0]);
    double v = h_->value(z) + inner(d, d) / (2.0 * beta_);
    return {v, tup(scaled(-1.0 / beta_, d))};
  }
  std::vector<Space> domain() const override { return {sp_}; }
  bool convex() const override { return h_->convex(); }
  std::optional<double> lipschitz() const override { return 1.0 / beta_; }

 private:
  ProxPtr h_;
  double beta_;
  Space sp_;
};

class ComposedSmoothFn final : public SmoothFn {
 public:
  ComposedSmoothFn(SmoothPtr f, OpPtr op) : f_(std::move(f)), op_(std::move(op)) {
    if (!op_->linear())
      throw std::invalid_argument("composed_smooth: op must be linear");
    auto fd = f_->domain();
    if (fd.size() != 1 || fd[0] != op_->codomain())
      throw std::invalid_argument("composed_smooth: space mismatch");
  }
  double value(const SignalTuple& x) const override {
    return f_->value(tup(apply(*op_, x)));
  }
  SignalTuple grad(const SignalTuple& x) const override {
    EvalCache cache;
    Signal v = op_->forward(x, cache);
    SignalTuple gf = f_->grad(tup(std::move(v)));
    return op_->backward(gf[0], cache);
  }
  std::pair<double, SignalTuple> value_grad(
      const SignalTuple& x) const override {
    EvalCache cache;
    Signal v = op_->forward(x, cache);
    auto [fv, gf] = f_->value_grad(tup(std::move(v)));
    return {fv, op_->backward(gf[0], cache)};
  }
  std::vector<Space> domain() const override { return op_->domain(); }
  bool convex() const override { return f_->convex(); }
  std::optional<double> lipschitz() const override {
    auto lf = f_->lipschitz();
    if (!lf) return std::nullopt;
    std::lock_guard<std::mutex> lock(mu_);
    if (!opn_) opn_ = op_norm_sq(*op_);
    return *lf * *opn_;
  }

 private:
  SmoothPtr f_;
  OpPtr op_;
  mutable std::mutex mu_;
  mutable std::optional<double> opn_;
};

class SlotProx final : public TupleProxFn {
 public:
  explicit SlotProx(std::vector<ProxPtr> fns) : fns_(std::move(fns)) {
    cvx_ = true;
    for (const ProxPtr& f : fns_) cvx_ = cvx_ && f->convex();
  }
  double value(const SignalTuple& x) const override {
    if (x.size() != fns_.size())
      throw std::invalid_argument("slot_prox: tuple size mismatch");
    double s = 0.0;
    for (size_t i = 0; i < fns_.size(); ++i) s += fns_[i]->value(x[i]);
    return s;
  }
  SignalTuple prox(const SignalTuple& x, double gamma) const override {
    if (x.size() != fns_.size())
      throw std::invalid_argument("slot_prox: tuple size mismatch");
    SignalTuple z;
    z.reserve(x.size());
    for (size_t i = 0; i < fns_.size(); ++i)
      z.push_back(fns_[i]->prox(x[i], gamma));
    return z;
  }
  bool convex() const override { return cvx_; }

 private:
  std::vector<ProxPtr> fns_;
  bool cvx_;
};

}  // namespace

SmoothPtr least_squares(OpPtr op, const Signal& y) {
  return std::make_shared<LeastSquaresFn>(std::move(op), y);
}
SmoothPtr cross_entropy(OpPtr dag, const Signal& labels) {
  return std::make_shared<CrossEntropyFn>(std::move(dag), labels);
}
SmoothPtr moreau_envelope(ProxPtr h, double beta, Space domain_space) {
  return std::make_shared<MoreauEnvelopeFn>(std::move(h), beta,
                                            std::move(domain_space));
}
SmoothPtr composed_smooth(SmoothPtr f, OpPtr op) {
  return std::make_shared<ComposedSmoothFn>(std::move(f), std::move(op));
}
TupleProxPtr slot_prox(std::vector<ProxPtr> fns) {
  return std::make_shared<SlotProx>(std::move(fns));
}

}  // namespace proxkit
