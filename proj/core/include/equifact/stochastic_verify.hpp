#pragma once

#include "equifact/minimax_solver.hpp"

#include <cstdint>

namespace equifact {

/// Rademacher sampling setup: exact enumeration of all 2^n sign patterns up
/// to exact_max signs, seeded Monte Carlo beyond.
struct RademacherConfig {
  int exact_max = 20;
  std::uint64_t seed = 0;
  int samples = 100000;
};

struct KhintchineResult {
  double probability = 0.0;
  double std_error = 0.0;  // 0 in exact mode
  bool exact = true;
  bool pass = false;  // probability >= 1/12 (minus 3 sigma in MC mode)
};

/// P((sum_j eps_j x_j)^2 >= (1/2) sum_j x_j^2) >= 1/12.
KhintchineResult khintchine_check(const Vector& x, const RademacherConfig& cfg);

struct PaleyZygmundResult {
  double lhs = 0.0;  // P(Y > theta E[Y])
  double rhs = 0.0;  // (1-theta)^2 E[Y]^2 / E[Y^2]
  bool pass = false;
};

/// Exact two-sided evaluation of the Paley-Zygmund inequality on a finite
/// distribution given by (values, probabilities).
PaleyZygmundResult paley_zygmund_check(const Vector& values, const Vector& probs, double theta);

struct HullTailReport {
  double worst_margin = 0.0;  // min over samples and lambdas of C(lambda) - tail
  int violations = 0;
  int tuples = 0;
};

/// Samples tuples (xi_1..xi_k) with sum ||xi_j||^2 = 1 and checks the tail
/// mass of (sum |T xi_j|^2)^{1/2} against the extended profile C(lambda).
HullTailReport hull_tail_check(const SaddleProblem& p, const RademacherConfig& cfg,
                               const Vector& lambdas);

struct GaussianDemo {
  double estimate = 0.0;
  double target = 0.0;
  double std_error = 0.0;
  bool pass = false;
};

/// Monte Carlo characteristic function of the Gaussian with per-coordinate
/// variance 1/2 against the closed form e^{-||xi||^2/4}.
GaussianDemo gaussian_pdf_demo(const Vector& xi, int samples, std::uint64_t seed);

}  // namespace equifact
