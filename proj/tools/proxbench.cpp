#include "CLI11.hpp"
#include "proxkit/bench.hpp"

int main(int argc, char** argv) {
  CLI::App app{"proximal gradient benchmark harness"};
  proxkit::bench::BenchmarkSpec spec;

  app.add_option("--problem", spec.problem,
                 "lasso | sparse-deconv | line-spectra | tv-denoise | "
                 "robust-pca | declip | dnn")
      ->required();
  app.add_option("--solver", spec.solver, "pg | fpg | panoc")
      ->check(CLI::IsMember({"pg", "fpg", "panoc"}));
  app.add_option("--tol", spec.tol, "stopping tolerance on the residual");
  app.add_option("--max-iters", spec.max_iters, "iteration cap");
  app.add_option("--seed", spec.seed, "RNG seed for the generator");
  app.add_option("--out", spec.out, "trace CSV path (JSON sidecar alongside)");
  app.add_flag("--compare", spec.compare,
               "run pg, fpg and panoc on the same problem");
  app.add_option("--n", spec.n, "primary size parameter");
  app.add_option("--m", spec.m, "secondary size parameter");
  app.add_option("--l", spec.l, "tertiary size parameter (frame count)");
  app.add_option("--s", spec.s, "super-resolution factor (line-spectra)");
  app.add_option("--N", spec.n_components,
                 "component budget (line-spectra sinusoid count)");
  app.add_option("--clip-level", spec.clip_level,
                 "declip saturation level (<= 0 picks ~25% clipping)");

  CLI11_PARSE(app, argc, argv);
  return proxkit::bench::run(spec);
}
