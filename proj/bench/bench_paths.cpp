// Benchmark of the Monte Carlo path engine: serial reference loop vs the
// OpenMP-parallel driver, same seeds, identical output required.

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "pssmp/lamperti_sim.hpp"

using namespace pssmp;
using clk = std::chrono::steady_clock;

namespace {

double run(const PredictionProblem& p, const std::vector<double>& grid,
           PathConfig cfg, bool parallel, SimulationReport* out) {
  cfg.parallel = parallel;
  const auto t0 = clk::now();
  *out = sweep_K(p, grid, cfg);
  return std::chrono::duration<double>(clk::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  long n_paths = 20000;
  double dt = 1e-3;
  if (argc > 1) n_paths = std::atol(argv[1]);
  if (argc > 2) dt = std::atof(argv[2]);

  const PredictionProblem p{LevyModel::brownian(1.0, 1.0), 1.0,
                            Direction::Max};
  const std::vector<double> grid = {0.35, 0.47, 0.60};
  PathConfig cfg;
  cfg.n_paths = n_paths;
  cfg.dt = dt;
  cfg.seed = 42;
  cfg.stop_margin = 5.0;

  SimulationReport serial, parallel;
  const double ts = run(p, grid, cfg, false, &serial);
  const double tp = run(p, grid, cfg, true, &parallel);

  std::printf("paths=%ld dt=%g\n", n_paths, dt);
  std::printf("serial    %8.3f s   %.0f paths/s\n", ts, n_paths / ts);
  std::printf("parallel  %8.3f s   %.0f paths/s   speedup %.2fx\n", tp,
              n_paths / tp, ts / tp);

  bool identical = true;
  for (size_t j = 0; j < grid.size(); ++j) {
    identical = identical &&
                std::memcmp(&serial.rows[j].mean, &parallel.rows[j].mean,
                            sizeof(double)) == 0 &&
                std::memcmp(&serial.rows[j].stderr_, &parallel.rows[j].stderr_,
                            sizeof(double)) == 0;
  }
  std::printf("serial/parallel results bitwise identical: %s\n",
              identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
