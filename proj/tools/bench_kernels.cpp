#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <random>

#include "dualprox/fem.hpp"
#include "dualprox/kernels.hpp"

using namespace dualprox;
using kernels::Exec;

namespace {

double time_best_of(int reps, const std::function<void()>& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  return best;
}

void report(const char* name, double serial_ms, double parallel_ms) {
  std::printf("%-22s %10.2f ms %10.2f ms %8.2fx\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel timings"};
  int n = 256;
  int reps = 5;
  app.add_option("--n", n, "cells per side")->check(CLI::PositiveNumber);
  app.add_option("--reps", reps, "repetitions (best is reported)");
  CLI11_PARSE(app, argc, argv);

  const Mesh mesh = build_mesh(n);
  const int nc = mesh.num_cells();
  std::printf("mesh n=%d (%d triangles)\n", n, nc);
  std::printf("%-22s %13s %13s %9s\n", "kernel", "serial", "openmp", "speedup");

  const ScaledProx sp(ProxFamily::box_l1(0.5, 1.0), 1.0);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-3.0, 3.0);

  Eigen::VectorXd q_cells(nc);
  for (int i = 0; i < nc; ++i) q_cells[i] = dist(rng);
  Eigen::VectorXd q_nodal(mesh.num_nodes());
  for (int i = 0; i < mesh.num_nodes(); ++i)
    q_nodal[i] = 3.0 * std::sin(5.0 * mesh.nodes(i, 0)) *
                 std::cos(4.0 * mesh.nodes(i, 1));

  Eigen::VectorXd out;
  report("prox_cells",
         time_best_of(reps, [&] { kernels::prox_cells(sp, q_cells, out, Exec::Serial); }),
         time_best_of(reps, [&] { kernels::prox_cells(sp, q_cells, out, Exec::Parallel); }));
  report("env_sum_cells",
         time_best_of(reps, [&] { kernels::env_sum_cells(sp, q_cells, Exec::Serial); }),
         time_best_of(reps, [&] { kernels::env_sum_cells(sp, q_cells, Exec::Parallel); }));

  {
    std::vector<int> interior(mesh.num_nodes(), -1);
    int ni = 0;
    for (int i = 0; i < mesh.num_nodes(); ++i)
      if (!mesh.boundary[i]) interior[i] = ni++;
    kernels::SparseMat K, M, B;
    report("assemble_matrices",
           time_best_of(reps, [&] {
             kernels::assemble_matrices(mesh, interior, ni, K, M, B, Exec::Serial);
           }),
           time_best_of(reps, [&] {
             kernels::assemble_matrices(mesh, interior, ni, K, M, B, Exec::Parallel);
           }));
  }

  Eigen::VectorXd load;
  report("clipped_prox_load",
         time_best_of(reps, [&] {
           kernels::clipped_prox_load(mesh, sp, q_nodal, load, Exec::Serial);
         }),
         time_best_of(reps, [&] {
           kernels::clipped_prox_load(mesh, sp, q_nodal, load, Exec::Parallel);
         }));
  report("clipped_active_mass",
         time_best_of(reps, [&] {
           kernels::clipped_active_mass(mesh, sp, q_nodal, Exec::Serial);
         }),
         time_best_of(reps, [&] {
           kernels::clipped_active_mass(mesh, sp, q_nodal, Exec::Parallel);
         }));
  report("clipped_env_integral",
         time_best_of(reps, [&] {
           kernels::clipped_env_integral(mesh, sp, q_nodal, Exec::Serial);
         }),
         time_best_of(reps, [&] {
           kernels::clipped_env_integral(mesh, sp, q_nodal, Exec::Parallel);
         }));
  return 0;
}
