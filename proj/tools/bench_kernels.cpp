// Compares the OpenMP kernels against the serial reference implementations:
// same math, timed side by side. Sizes default to a 1024x1024 grid.

#include <chrono>
#include <cstdio>
#include <random>

#include "hhc/parallel.hpp"
#include "hhc/reference.hpp"

using namespace hhc;

namespace {

double time_of(int reps, const std::function<void()>& fn) {
  fn();  // warm up
  const auto t0 = std::chrono::steady_clock::now();
  for (int i = 0; i < reps; ++i) fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s %12.6f ms %12.6f ms %8.2fx\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel);
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();
  const int n = argc > 1 ? std::atoi(argv[1]) : 1024;
  const int reps = argc > 2 ? std::atoi(argv[2]) : 5;

  const StaggeredGrid g = build_grid({1.0, 1.0, n, n});
  const Coefficients coef = make_coefficients(
      g, [](double, double) { return 1.0; },
      [](double x1, double) { return 1.0 + 0.5 * x1; }, 1.0);

  std::mt19937 rng(7);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  ScalarField u(g);
  for (double& v : u.values()) v = dist(rng);
  ScalarField w(g);
  for (double& v : w.values()) v = dist(rng);

  std::printf("grid %dx%d, %d threads, %d reps\n", n, n, thread_count(), reps);
  std::printf("%-28s %15s %15s %9s\n", "kernel", "serial", "openmp", "speedup");

  report("grad (dir 1)", time_of(reps, [&] { ref::apply_grad(1, u); }),
         time_of(reps, [&] { apply_grad(1, u); }));
  report("grad_adjoint (dir 2)",
         time_of(reps,
                 [&] {
                   FluxField q = ref::apply_grad(2, u);
                   ref::apply_grad_adjoint(q);
                 }),
         time_of(reps, [&] {
           FluxField q = apply_grad(2, u);
           apply_grad_adjoint(q);
         }));
  report("diffusion", time_of(reps, [&] { ref::apply_diffusion(u, coef); }),
         time_of(reps, [&] { apply_diffusion(u, coef); }));
  report("inner product", time_of(reps, [&] { ref::inner_h(u, w); }),
         time_of(reps, [&] { inner_h(u, w); }));

  LineSystem sys{1, 1.0, nullptr, 1e-4, nullptr};
  report("line solve (dir 1)", time_of(reps, [&] { ref::solve_lines(sys, u); }),
         time_of(reps, [&] { solve_lines(sys, u); }));
  LineSystem sys2{2, 1.0, nullptr, 1e-4, nullptr};
  report("line solve (dir 2)", time_of(reps, [&] { ref::solve_lines(sys2, u); }),
         time_of(reps, [&] { solve_lines(sys2, u); }));
  report("factored solve",
         time_of(reps,
                 [&] {
                   ScalarField x = ref::solve_lines(sys2, u);
                   x = ref::solve_lines(sys, x);
                   ref::solve_lines(sys2, x);
                 }),
         time_of(reps, [&] { solve_q_factored(u, 0.5, 0.02); }));
  return 0;
}
