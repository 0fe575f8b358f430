#pragma once

#include <string>

#include "proxkit/model.hpp"

namespace proxkit::bench {

// All generators are fully determined by their size parameters and seed.

struct LassoBench {
  Problem problem;
  OpPtr a;
  Signal y;
  double lambda = 0.0;
};
LassoBench gen_lasso(int n, unsigned seed);

struct DeconvBench {
  Problem problem;
  Signal x_true, y;
  std::vector<double> fir;
  double lambda = 0.0;
};
DeconvBench gen_sparse_deconv(int fs, unsigned seed,
                              double lambda_scale = 1e-2,
                              double snr_db = 20.0);

struct LineSpectraBench {
  Problem a;  // convex relaxation
  Problem b;  // sparsity-constrained; warm start before solving
  OpPtr op;   // first-n-samples of the real inverse DFT
  Signal y;
  double lambda = 0.0;
  int n_sin = 0;
  double fidelity(const Signal& x) const;
};
LineSpectraBench gen_line_spectra(int n, int s, int n_sin, unsigned seed);

// fold conjugate-mirror bins into the lower half; represents the same real
// signal with half the support (use on the relaxed solution before stage b)
Signal fold_spectrum(const Signal& x);

struct TvBench {
  Problem dual_problem;
  DualProblem dual;
  OpPtr v;
  Signal y;
  double lambda = 0.0;
  double primal_objective(const Signal& x) const;
  Signal recover(const Signal& u) const;
};
TvBench gen_tv_denoise(int n, int m, unsigned seed, double lambda = 0.2);

struct RpcaBench {
  Problem problem;  // variables (L, S)
  Signal l_true, s_true, y;
  double lambda = 0.0;
};
RpcaBench gen_robust_pca(int n, int m, int l, unsigned seed,
                         double noise_std = 0.0);

struct DeclipBench {
  int n = 0;
  double clip_level = 0.0;
  double eps = 0.0;
  Signal y_true, y_clipped;
  std::vector<int> rel, up, dn;  // reliable / clipped-high / clipped-low

  Problem make_problem(int n_active, const SignalTuple& x0) const;
  SignalTuple initial_point() const;
  double coupling(const SignalTuple& x) const;  // ||idct(x) - y||
};
// clip_level <= 0 picks the level so that about a quarter of samples clip
DeclipBench gen_declip(int n, double clip_level, unsigned seed);

struct DeclipRun {
  SignalTuple x;
  std::vector<TraceRow> trace;  // iterations renumbered across the schedule
  int final_n_active = 0;
  int total_iters = 0;
  double coupling = 0.0;
  bool reached = false;
};
DeclipRun run_declip(const DeclipBench& b, const std::string& solver,
                     SolverConfig cfg);

struct DnnBench {
  Problem problem;  // variables (W3, W2, W1) in DAG order
  OpPtr dag;
  Signal features, labels;
};
DnnBench gen_dnn(int n_points, unsigned seed);

// ---- harness ----

struct BenchmarkSpec {
  std::string problem;  // lasso | sparse-deconv | line-spectra | tv-denoise |
                        // robust-pca | declip | dnn
  std::string solver = "panoc";
  double tol = 1e-5;
  int max_iters = 10000;
  unsigned seed = 0;
  std::string out = "trace.csv";
  bool compare = false;
  // size flags; 0 keeps the problem default
  int n = 0, m = 0, l = 0, s = 0, n_components = 0;
  double clip_level = 0.0;
};

// generates, solves, writes the CSV trace and a JSON status sidecar.
// exit code: 0 tolerance met, 2 iteration cap hit, 1 error.
int run(const BenchmarkSpec& spec);

void write_trace_csv(const std::string& path,
                     const std::vector<TraceRow>& rows,
                     const std::vector<double>* normalized_error = nullptr);

}  // namespace proxkit::bench
