// Benchmark of the Monte Carlo kernel: serial reference vs OpenMP shards.
// Also verifies that the two orchestrations agree bit for bit, which is the
// determinism contract the parallel kernel must keep.

#include <chrono>
#include <cstring>
#include <iostream>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "polent/entangle.hpp"
#include "polent/mc.hpp"

using namespace polent;

namespace {

double time_run(const Eigen::MatrixXd& factor, const Eigen::MatrixXd& map,
                const Eigen::VectorXd& weights, const mc::McConfig& cfg,
                mc::Exec exec, double& result) {
  const auto start = std::chrono::steady_clock::now();
  result = mc::empirical_combo_second_moment(factor, map, weights, cfg, exec);
  const auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP Monte Carlo kernel benchmark"};
  long long samples = 4'000'000;
  int repeats = 3;
  std::uint64_t seed = 42;
  app.add_option("--samples", samples, "samples per run");
  app.add_option("--repeats", repeats, "timed repetitions");
  app.add_option("--seed", seed, "RNG seed");
  CLI11_PARSE(app, argc, argv);

  // Representative workload: 4x4 splitter map, squeezed inputs, sum combo.
  const PolSqueezedSource a(0.38, 93.3, {0.0}, 1.0);
  const PolSqueezedSource b(0.40, 91.2, {0.0}, 1.0);
  const CovarianceModel input = input_covariance(a, b);
  const LinearMap map = entangling_bs_map(BeamSplitterSpec(0.52), 0.0);
  Eigen::VectorXd weights(4);
  weights << 1.0, 0.0, 1.0, 0.0;
  const Eigen::MatrixXd factor = mc::psd_factor(input);
  const mc::McConfig cfg{samples, seed};

#ifdef _OPENMP
  std::cout << "threads: " << omp_get_max_threads() << "\n";
#else
  std::cout << "threads: 1 (built without OpenMP)\n";
#endif
  std::cout << "samples per run: " << samples << "\n\n";
  std::cout << "run   serial [s]   openmp [s]   speedup\n";

  double serial_result = 0.0;
  double parallel_result = 0.0;
  double best_serial = 1e300;
  double best_parallel = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const double ts = time_run(factor, map.matrix(), weights, cfg,
                               mc::Exec::serial, serial_result);
    const double tp = time_run(factor, map.matrix(), weights, cfg,
                               mc::Exec::openmp, parallel_result);
    best_serial = std::min(best_serial, ts);
    best_parallel = std::min(best_parallel, tp);
    std::printf("%3d   %10.4f   %10.4f   %7.2fx\n", r, ts, tp, ts / tp);
  }
  std::printf("best  %10.4f   %10.4f   %7.2fx\n", best_serial, best_parallel,
              best_serial / best_parallel);

  if (std::memcmp(&serial_result, &parallel_result, sizeof(double)) != 0) {
    std::cerr << "MISMATCH: serial and OpenMP results differ\n";
    return 1;
  }
  std::cout << "\nserial and OpenMP results identical: "
            << serial_result << "\n";
  return 0;
}
