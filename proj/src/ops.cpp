#include "proxkit/ops.hpp"

#include <fftw3.h>

#include <Eigen/Dense>
#include <mutex>
#include <random>

namespace proxkit {

namespace {

using RowMat =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using RowMatC = Eigen::Matrix<std::complex<double>, Eigen::Dynamic,
                              Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMat> as_mat(const Signal& s) {
  const auto& sh = s.shape();
  int rows = sh[0];
  int cols = sh.size() > 1 ? sh[1] : 1;
  return Eigen::Map<const RowMat>(s.raw(), rows, cols);
}

Eigen::Map<RowMat> as_mat(Signal& s) {
  const auto& sh = s.shape();
  int rows = sh[0];
  int cols = sh.size() > 1 ? sh[1] : 1;
  return Eigen::Map<RowMat>(s.raw(), rows, cols);
}

// FFTW plan creation/destruction is not thread-safe
std::mutex& fftw_mutex() {
  static std::mutex m;
  return m;
}

void fft_inplace(std::vector<std::complex<double>>& buf, int sign) {
  fftw_plan plan;
  auto* p = reinterpret_cast<fftw_complex*>(buf.data());
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(buf.size()), p, p, sign,
                            FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
}

void r2r_inplace(std::vector<double>& buf, fftw_r2r_kind kind) {
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(buf.size()), buf.data(),
                            buf.data(), kind, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_mutex());
    fftw_destroy_plan(plan);
  }
}

}  // namespace

Signal apply(const Op& op, const Signal& x) {
  EvalCache cache;
  return op.forward(SignalTuple{x}, cache);
}

Signal apply(const Op& op, const SignalTuple& x) {
  EvalCache cache;
  return op.forward(x, cache);
}

SignalTuple adjoint(const Op& op, const Signal& y) {
  if (!op.linear())
    throw std::invalid_argument("adjoint: operator is not linear");
  EvalCache cache;
  return op.backward(y, cache);
}

Signal adjoint1(const Op& op, const Signal& y) {
  SignalTuple t = adjoint(op, y);
  if (t.size() != 1)
    throw std::invalid_argument("adjoint1: operator has tuple domain");
  return std::move(t[0]);
}

Signal dag_forward(const Op& op, const SignalTuple& x, EvalCache& cache) {
  return op.forward(x, cache);
}

SignalTuple dag_backward(const Op& op, const Signal& g, EvalCache& cache) {
  return op.backward(g, cache);
}

// ---- lambda-backed linear leaf ----

namespace {

class LambdaLinearOp final : public Op {
 public:
  LambdaLinearOp(Space dom, Space cod, std::function<Signal(const Signal&)> fwd,
                 std::function<Signal(const Signal&)> adj,
                 std::optional<double> mu = std::nullopt) {
    dom_ = {std::move(dom)};
    cod_ = std::move(cod);
    fwd_ = std::move(fwd);
    adj_ = std::move(adj);
    mu_ = mu;
  }

  bool linear() const override { return true; }

  Signal forward(const SignalTuple& x, EvalCache&) const override {
    check_domain(x);
    return fwd_(x[0]);
  }

  SignalTuple backward(const Signal& g, EvalCache&) const override {
    check_codomain(g);
    return SignalTuple{adj_(g)};
  }

 private:
  std::function<Signal(const Signal&)> fwd_, adj_;
};

class IdentityOp final : public Op {
 public:
  explicit IdentityOp(Space s) {
    dom_ = {s};
    cod_ = s;
    mu_ = 1.0;
  }
  bool linear() const override { return true; }
  Signal forward(const SignalTuple& x, EvalCache&) const override {
    check_domain(x);
    return x[0];
  }
  SignalTuple backward(const Signal& g, EvalCache&) const override {
    check_codomain(g);
    return SignalTuple{g};
  }
};

class ComposeOp final : public Op {
 public:
  ComposeOp(OpPtr a, OpPtr b) : a_(std::move(a)), b_(std::move(b)) {
    if (a_->domain().size() != 1 || a_->domain()[0] != b_->codomain())
      throw std::invalid_argument("compose: domain of a != codomain of b");
    dom_ = b_->domain();
    cod_ = a_->codomain();
    if (a_->linear() && b_->linear() && a_->tight_frame_mu() &&
        b_->tight_frame_mu())
      mu_ = *a_->tight_frame_mu() * *b_->tight_frame_mu();
  }
  bool linear() const override { return a_->linear() && b_->linear(); }
  Signal forward(const SignalTuple& x, EvalCache& cache) const override {
    Signal y = b_->forward(x, cache);
    return a_->forward(SignalTuple{std::move(y)}, cache);
  }
  SignalTuple backward(const Signal& g, EvalCache& cache) const override {
    SignalTuple ga = a_->backward(g, cache);
    return b_->backward(ga[0], cache);
  }

 private:
  OpPtr a_, b_;
};

class HcatOp final : public Op {
 public:
  explicit HcatOp(std::vector<OpPtr> ops) : ops_(std::move(ops)) {
    if (ops_.empty()) throw std::invalid_argument("hcat: empty operator list");
    cod_ = ops_[0]->codomain();
    bool all_mu = true;
    double mu_sum = 0.0;
    for (const OpPtr& op : ops_) {
      if (op->codomain() != cod_)
        throw std::invalid_argument("hcat: codomain mismatch");
      for (const Space& s : op->domain()) dom_.push_back(s);
      if (op->linear() && op->tight_frame_mu())
        mu_sum += *op->tight_frame_mu();
      else
        all_mu = false;
    }
    if (all_mu) mu_ = mu_sum;
  }
  bool linear() const override {
    for (const OpPtr& op : ops_)
      if (!op->linear()) return false;
    return true;
  }
  Signal forward(const SignalTuple& x, EvalCache& cache) const override {
    check_domain(x);
    Signal acc = cod_.zero();
    size_t off = 0;
    for (const OpPtr& op : ops_) {
      size_t k = op->domain().size();
      SignalTuple part(x.begin() + off, x.begin() + off + k);
      axpy_inplace(1.0, op->forward(part, cache), acc);
      off += k;
    }
    return acc;
  }
  SignalTuple backward(const Signal& g, EvalCache& cache) const override {
    check_codomain(g);
    // reverse order so per-node cache stacks unwind correctly
    std::vector<SignalTuple> parts(ops_.size());
    for (size_t i = ops_.size(); i-- > 0;) parts[i] = ops_[i]->backward(g, cache);
    SignalTuple out;
    for (SignalTuple& p : parts)
      for (Signal& s : p) out.push_back(std::move(s));
    return out;
  }

 private:
  std::vector<OpPtr> ops_;
};

// (A x1)(B x2) matrix product; nonlinear even for linear a, b. Restricted to
// real matrix codomains.
class OutputMulOp final : public Op {
 public:
  OutputMulOp(OpPtr a, OpPtr b) : a_(std::move(a)), b_(std::move(b)) {
    const Space& ca = a_->codomain();
    const Space& cb = b_->codomain();
    if (ca.field != Field::Real || cb.field != Field::Real)
      throw std::invalid_argument("output_mul: only real signals supported");
    if (ca.shape.size() != 2 || cb.shape.size() != 2 ||
        ca.shape[1] != cb.shape[0])
      throw std::invalid_argument("output_mul: inner dimension mismatch");
    for (const Space& s : a_->domain()) dom_.push_back(s);
    for (const Space& s : b_->domain()) dom_.push_back(s);
    cod_ = Space{{ca.shape[0], cb.shape[1]}, Field::Real};
  }
  bool linear() const override { return false; }
  Signal forward(const SignalTuple& x, EvalCache& cache) const override {
    check_domain(x);
    size_t ka = a_->domain().size();
    SignalTuple xa(x.begin(), x.begin() + ka);
    SignalTuple xb(x.begin() + ka, x.end());
    Signal va = a_->forward(xa, cache);
    Signal vb = b_->forward(xb, cache);
    Signal out = cod_.zero();
    as_mat(out) = as_mat(va) * as_mat(vb);
    cache.push(this, SignalTuple{va, vb});
    return out;
  }
  SignalTuple backward(const Signal& g, EvalCache& cache) const override {
    check_codomain(g);
    SignalTuple pt = cache.pop(this);
    const Signal& va = pt[0];
    const Signal& vb = pt[1];
    Signal ga = space_of(va).zero();
    Signal gb = space_of(vb).zero();
    as_mat(ga) = as_mat(g) * as_mat(vb).transpose();
    as_mat(gb) = as_mat(va).transpose() * as_mat(g);
    SignalTuple out_b = b_->backward(gb, cache);
    SignalTuple out_a = a_->backward(ga, cache);
    SignalTuple out;
    for (Signal& s : out_a) out.push_back(std::move(s));
    for (Signal& s : out_b) out.push_back(std::move(s));
    return out;
  }

 private:
  OpPtr a_, b_;
};

class SigmoidOp final : public Op {
 public:
  explicit SigmoidOp(Space s) {
    if (s.field != Field::Real)
      throw std::invalid_argument("sigmoid_op: real signals only");
    dom_ = {s};
    cod_ = s;
  }
  bool linear() const override { return false; }
  Signal forward(const SignalTuple& x, EvalCache& cache) const override {
    check_domain(x);
    Signal out = x[0];
    for (double& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
    cache.push(this, SignalTuple{out});
    return out;
  }
  SignalTuple backward(const Signal& g, EvalCache& cache) const override {
    check_codomain(g);
    SignalTuple pt = cache.pop(this);
    Signal out = g;
    const double* s = pt[0].raw();
    double* p = out.raw();
    for (int64_t i = 0; i < out.rsize(); ++i) p[i] *= s[i] * (1.0 - s[i]);
    return SignalTuple{std::move(out)};
  }
};

class SelectOp final : public Op {
 public:
  SelectOp(std::vector<int> indices, int n, Field field)
      : indices_(std::move(indices)) {
    for (int i : indices_)
      if (i < 0 || i >= n)
        throw std::invalid_argument("select_op: index out of range");
    dom_ = {Space{{n}, field}};
    cod_ = Space{{static_cast<int>(indices_.size())}, field};
    mu_ = 1.0;  // distinct indices: S S* = Id
  }
  bool linear() const override { return true; }
  Signal forward(const SignalTuple& x, EvalCache&) const override {
    check_domain(x);
    Signal out = cod_.zero();
    int w = x[0].field() == Field::Complex ? 2 : 1;
    for (size_t k = 0; k < indices_.size(); ++k)
      for (int c = 0; c < w; ++c)
        out[static_cast<int64_t>(k) * w + c] =
            x[0][static_cast<int64_t>(indices_[k]) * w + c];
    return out;
  }
  SignalTuple backward(const Signal& g, EvalCache&) const override {
    check_codomain(g);
    Signal out = dom_[0].zero();
    int w = g.field() == Field::Complex ? 2 : 1;
    for (size_t k = 0; k < indices_.size(); ++k)
      for (int c = 0; c < w; ++c)
        out[static_cast<int64_t>(indices_[k]) * w + c] =
            g[static_cast<int64_t>(k) * w + c];
    return SignalTuple{std::move(out)};
  }
  const std::vector<int>& indices() const { return indices_; }

 private:
  std::vector<int> indices_;
};

}  // namespace

const std::vector<int>* select_indices(const Op& op) {
  if (const auto* s = dynamic_cast<const SelectOp*>(&op)) return &s->indices();
  return nullptr;
}

// ---- calculus rule constructors ----

OpPtr compose(OpPtr a, OpPtr b) {
  return std::make_shared<ComposeOp>(std::move(a), std::move(b));
}

OpPtr hcat(std::vector<OpPtr> ops) {
  return std::make_shared<HcatOp>(std::move(ops));
}

OpPtr output_mul(OpPtr a, OpPtr b) {
  return std::make_shared<OutputMulOp>(std::move(a), std::move(b));
}

// ---- concrete constructors ----

OpPtr identity_op(Space s) { return std::make_shared<IdentityOp>(s); }

OpPtr scale_op(double alpha, Space s) {
  return std::make_shared<LambdaLinearOp>(
      s, s, [alpha](const Signal& x) { return scaled(alpha, x); },
      [alpha](const Signal& y) { return scaled(alpha, y); }, alpha * alpha);
}

OpPtr matrix_op(const std::vector<std::vector<double>>& m) {
  int rows = static_cast<int>(m.size());
  int cols = static_cast<int>(m[0].size());
  auto mat = std::make_shared<Eigen::MatrixXd>(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) (*mat)(i, j) = m[i][j];
  Space dom{{cols}, Field::Real};
  Space cod{{rows}, Field::Real};
  return std::make_shared<LambdaLinearOp>(
      dom, cod,
      [mat, cod](const Signal& x) {
        Signal out = cod.zero();
        Eigen::Map<Eigen::VectorXd>(out.raw(), out.rsize()) =
            *mat * Eigen::Map<const Eigen::VectorXd>(x.raw(), x.rsize());
        return out;
      },
      [mat, dom](const Signal& y) {
        Signal out = dom.zero();
        Eigen::Map<Eigen::VectorXd>(out.raw(), out.rsize()) =
            mat->transpose() *
            Eigen::Map<const Eigen::VectorXd>(y.raw(), y.rsize());
        return out;
      });
}

OpPtr matrix_op_cplx(const std::vector<std::vector<std::complex<double>>>& m) {
  int rows = static_cast<int>(m.size());
  int cols = static_cast<int>(m[0].size());
  auto mat = std::make_shared<Eigen::MatrixXcd>(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) (*mat)(i, j) = m[i][j];
  Space dom{{cols}, Field::Complex};
  Space cod{{rows}, Field::Complex};
  return std::make_shared<LambdaLinearOp>(
      dom, cod,
      [mat, cod, cols](const Signal& x) {
        Signal out = cod.zero();
        Eigen::Map<Eigen::VectorXcd>(
            reinterpret_cast<std::complex<double>*>(out.raw()), out.numel()) =
            *mat * Eigen::Map<const Eigen::VectorXcd>(
                       reinterpret_cast<const std::complex<double>*>(x.raw()),
                       cols);
        return out;
      },
      [mat, dom, rows](const Signal& y) {
        Signal out = dom.zero();
        Eigen::Map<Eigen::VectorXcd>(
            reinterpret_cast<std::complex<double>*>(out.raw()), out.numel()) =
            mat->adjoint() *
            Eigen::Map<const Eigen::VectorXcd>(
                reinterpret_cast<const std::complex<double>*>(y.raw()), rows);
        return out;
      });
}

OpPtr diag_op(const Signal& d, Field field) {
  if (d.field() != Field::Real)
    throw std::invalid_argument("diag_op: scaling vector must be real");
  Space s{d.shape(), field};
  Signal dc = d;
  auto scale = [dc, field](const Signal& x) {
    Signal out = x;
    int w = field == Field::Complex ? 2 : 1;
    for (int64_t i = 0; i < dc.numel(); ++i)
      for (int c = 0; c < w; ++c) out[i * w + c] *= dc[i];
    return out;
  };
  return std::make_shared<LambdaLinearOp>(s, s, scale, scale);
}

OpPtr conv_op(const std::vector<double>& h, int n) {
  int m = static_cast<int>(h.size());
  if (m == 0 || n <= 0) throw std::invalid_argument("conv_op: empty sizes");
  int len = n + m - 1;  // full convolution
  auto hf = std::make_shared<std::vector<std::complex<double>>>(len);
  for (int i = 0; i < m; ++i) (*hf)[i] = h[i];
  fft_inplace(*hf, FFTW_FORWARD);
  Space dom{{n}, Field::Real};
  Space cod{{len}, Field::Real};
  return std::make_shared<LambdaLinearOp>(
      dom, cod,
      [hf, len, n, cod](const Signal& x) {
        std::vector<std::complex<double>> buf(len);
        for (int i = 0; i < n; ++i) buf[i] = x[i];
        fft_inplace(buf, FFTW_FORWARD);
        for (int i = 0; i < len; ++i) buf[i] *= (*hf)[i];
        fft_inplace(buf, FFTW_BACKWARD);
        Signal out = cod.zero();
        for (int i = 0; i < len; ++i) out[i] = buf[i].real() / len;
        return out;
      },
      [hf, len, n, dom](const Signal& y) {
        // adjoint of convolution is cross-correlation
        std::vector<std::complex<double>> buf(len);
        for (int i = 0; i < len; ++i) buf[i] = y[i];
        fft_inplace(buf, FFTW_FORWARD);
        for (int i = 0; i < len; ++i) buf[i] *= std::conj((*hf)[i]);
        fft_inplace(buf, FFTW_BACKWARD);
        Signal out = dom.zero();
        for (int i = 0; i < n; ++i) out[i] = buf[i].real() / len;
        return out;
      });
}

namespace {

Signal unitary_fft(const Signal& x, int sign) {
  int n = static_cast<int>(x.numel());
  std::vector<std::complex<double>> buf(n);
  for (int i = 0; i < n; ++i) buf[i] = x.cplx(i);
  fft_inplace(buf, sign);
  double scale = 1.0 / std::sqrt(static_cast<double>(n));
  Signal out(x.shape(), Field::Complex);
  for (int i = 0; i < n; ++i) out.set_cplx(i, buf[i] * scale);
  return out;
}

Signal dct2_ortho(const Signal& x) {
  int n = static_cast<int>(x.numel());
  std::vector<double> buf(x.raw(), x.raw() + n);
  r2r_inplace(buf, FFTW_REDFT10);
  Signal out(x.shape(), Field::Real);
  double s0 = 1.0 / (2.0 * std::sqrt(static_cast<double>(n)));
  double sk = 1.0 / std::sqrt(2.0 * n);
  out[0] = buf[0] * s0;
  for (int i = 1; i < n; ++i) out[i] = buf[i] * sk;
  return out;
}

Signal dct3_ortho(const Signal& x) {
  int n = static_cast<int>(x.numel());
  std::vector<double> buf(x.raw(), x.raw() + n);
  buf[0] *= 1.0 / std::sqrt(static_cast<double>(n));
  double sk = 1.0 / std::sqrt(2.0 * n);
  for (int i = 1; i < n; ++i) buf[i] *= sk;
  r2r_inplace(buf, FFTW_REDFT01);
  Signal out(x.shape(), Field::Real);
  for (int i = 0; i < n; ++i) out[i] = buf[i];
  return out;
}

}  // namespace

OpPtr dft_op(int n) {
  Space s{{n}, Field::Complex};
  return std::make_shared<LambdaLinearOp>(
      s, s, [](const Signal& x) { return unitary_fft(x, FFTW_FORWARD); },
      [](const Signal& y) { return unitary_fft(y, FFTW_BACKWARD); }, 1.0);
}

OpPtr idft_op(int n) {
  Space s{{n}, Field::Complex};
  return std::make_shared<LambdaLinearOp>(
      s, s, [](const Signal& x) { return unitary_fft(x, FFTW_BACKWARD); },
      [](const Signal& y) { return unitary_fft(y, FFTW_FORWARD); }, 1.0);
}

OpPtr idft_real_op(int n) {
  Space dom{{n}, Field::Complex};
  Space cod{{n}, Field::Real};
  return std::make_shared<LambdaLinearOp>(
      dom, cod,
      [cod, n](const Signal& x) {
        Signal z = unitary_fft(x, FFTW_BACKWARD);
        Signal out = cod.zero();
        for (int i = 0; i < n; ++i) out[i] = z.cplx(i).real();
        return out;
      },
      [dom, n](const Signal& y) {
        Signal yc(dom.shape, Field::Complex);
        for (int i = 0; i < n; ++i) yc.set_cplx(i, y[i]);
        return unitary_fft(yc, FFTW_FORWARD);
      },
      1.0);
}

OpPtr dct_op(int n) {
  Space s{{n}, Field::Real};
  return std::make_shared<LambdaLinearOp>(
      s, s, [](const Signal& x) { return dct2_ortho(x); },
      [](const Signal& y) { return dct3_ortho(y); }, 1.0);
}

OpPtr idct_op(int n) {
  Space s{{n}, Field::Real};
  return std::make_shared<LambdaLinearOp>(
      s, s, [](const Signal& x) { return dct3_ortho(x); },
      [](const Signal& y) { return dct2_ortho(y); }, 1.0);
}

OpPtr select_op(std::vector<int> indices, int n, Field field) {
  return std::make_shared<SelectOp>(std::move(indices), n, field);
}

// Forward finite differences with replicated edges (zero difference on the
// last row/column), stacked as the two columns of an nm x 2 matrix. The
// adjoint is the matching negative divergence.
OpPtr variation_op(int n, int m) {
  Space dom{{n, m}, Field::Real};
  Space cod{{n * m, 2}, Field::Real};
  return std::make_shared<LambdaLinearOp>(
      dom, cod,
      [n, m, cod](const Signal& x) {
        Signal out = cod.zero();
        const double* xp = x.raw();
        double* op = out.raw();
        for (int i = 0; i + 1 < n; ++i) {
          int64_t row = static_cast<int64_t>(i) * m;
          for (int j = 0; j + 1 < m; ++j) {
            int64_t p = row + j;
            op[2 * p] = xp[p + m] - xp[p];
            op[2 * p + 1] = xp[p + 1] - xp[p];
          }
          int64_t p = row + m - 1;
          op[2 * p] = xp[p + m] - xp[p];
        }
        int64_t row = static_cast<int64_t>(n - 1) * m;
        for (int j = 0; j + 1 < m; ++j) {
          int64_t p = row + j;
          op[2 * p + 1] = xp[p + 1] - xp[p];
        }
        return out;
      },
      [n, m, dom](const Signal& g) {
        Signal out = dom.zero();
        const double* gp = g.raw();
        double* op = out.raw();
        for (int i = 0; i + 1 < n; ++i) {
          int64_t row = static_cast<int64_t>(i) * m;
          for (int j = 0; j + 1 < m; ++j) {
            int64_t p = row + j;
            double gv = gp[2 * p], gh = gp[2 * p + 1];
            op[p] -= gv + gh;
            op[p + m] += gv;
            op[p + 1] += gh;
          }
          int64_t p = row + m - 1;
          op[p] -= gp[2 * p];
          op[p + m] += gp[2 * p];
        }
        int64_t row = static_cast<int64_t>(n - 1) * m;
        for (int j = 0; j + 1 < m; ++j) {
          int64_t p = row + j;
          op[p] -= gp[2 * p + 1];
          op[p + 1] += gp[2 * p + 1];
        }
        return out;
      });
}

OpPtr sigmoid_op(Space s) { return std::make_shared<SigmoidOp>(s); }

OpPtr rmul_op(const std::vector<std::vector<double>>& d, int rows) {
  int dn = static_cast<int>(d.size());
  int dm = static_cast<int>(d[0].size());
  auto mat = std::make_shared<Eigen::MatrixXd>(dn, dm);
  for (int i = 0; i < dn; ++i)
    for (int j = 0; j < dm; ++j) (*mat)(i, j) = d[i][j];
  Space dom{{rows, dn}, Field::Real};
  Space cod{{rows, dm}, Field::Real};
  return std::make_shared<LambdaLinearOp>(
      dom, cod,
      [mat, cod](const Signal& x) {
        Signal out = cod.zero();
        as_mat(out) = as_mat(x) * *mat;
        return out;
      },
      [mat, dom](const Signal& g) {
        Signal out = dom.zero();
        as_mat(out) = as_mat(g) * mat->transpose();
        return out;
      });
}

OpPtr broadcast_cols_op(int h, int n_cols) {
  Space dom{{h}, Field::Real};
  Space cod{{h, n_cols}, Field::Real};
  return std::make_shared<LambdaLinearOp>(
      dom, cod,
      [cod, h, n_cols](const Signal& x) {
        Signal out = cod.zero();
        for (int i = 0; i < h; ++i)
          for (int j = 0; j < n_cols; ++j)
            out[static_cast<int64_t>(i) * n_cols + j] = x[i];
        return out;
      },
      [dom, h, n_cols](const Signal& g) {
        Signal out = dom.zero();
        for (int i = 0; i < h; ++i)
          for (int j = 0; j < n_cols; ++j)
            out[i] += g[static_cast<int64_t>(i) * n_cols + j];
        return out;
      });
}

double op_norm_sq(const Op& op, int iters, unsigned seed) {
  if (!op.linear())
    throw std::invalid_argument("op_norm_sq: operator must be linear");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  SignalTuple v;
  for (const Space& s : op.domain()) {
    Signal sig = s.zero();
    for (double& d : sig.data()) d = gauss(rng);
    v.push_back(std::move(sig));
  }
  double nv = norm2(v);
  if (nv == 0.0) return 0.0;
  v = scaled(1.0 / nv, v);
  double lambda = 0.0;
  EvalCache cache;
  for (int it = 0; it < iters; ++it) {
    Signal w = op.forward(v, cache);
    SignalTuple u = op.backward(w, cache);
    lambda = inner(v, u);
    double nu = norm2(u);
    if (nu == 0.0) return 0.0;
    v = scaled(1.0 / nu, u);
  }
  return lambda;
}

}  // namespace proxkit

namespace proxkit {
namespace {

class AdjointOp final : public Op {
 public:
  AdjointOp(OpPtr a, double alpha) : a_(std::move(a)), alpha_(alpha) {
    if (!a_->linear() || a_->domain().size() != 1)
      throw std::invalid_argument("adjoint_op: need a single-input linear op");
    dom_ = {a_->codomain()};
    cod_ = a_->domain()[0];
  }
  bool linear() const override { return true; }
  Signal forward(const SignalTuple& x, EvalCache&) const override {
    check_domain(x);
    Signal out = adjoint1(*a_, x[0]);
    if (alpha_ != 1.0)
      for (double& v : out.data()) v *= alpha_;
    return out;
  }
  SignalTuple backward(const Signal& g, EvalCache&) const override {
    check_codomain(g);
    Signal out = apply(*a_, g);
    if (alpha_ != 1.0)
      for (double& v : out.data()) v *= alpha_;
    return SignalTuple{std::move(out)};
  }

 private:
  OpPtr a_;
  double alpha_;
};

}  // namespace

OpPtr adjoint_op(OpPtr a, double alpha) {
  return std::make_shared<AdjointOp>(std::move(a), alpha);
}

bool is_identity_op(const Op& op) {
  return dynamic_cast<const IdentityOp*>(&op) != nullptr;
}

}  // namespace proxkit
