#pragma once

#include "equifact/minimax_solver.hpp"

#include <string>
#include <vector>

namespace equifact {

/// One eps level of the factorization: the minimizer phi0, its level set
/// S(eps) = {phi0 >= 1/2}, and the integral constant over S(eps).
struct LevelResult {
  double eps = 0.0;
  L0Vector phi0;
  std::vector<Index> s_set;
  double complement_mass = 0.0;
  double c_eps_tight = 0.0;   // lambda_max(T^T diag(m .* 1_S) T), used for the weights
  double c_eps_paper = 0.0;   // 2 K(eps/2)^2 ||pi||^2, reported for comparison
  double k_coeff = 0.0;
  double f_star = 0.0;
  double duality_gap = 0.0;
  double invariance_residual = 0.0;
  int iterations = 0;
};

/// One pass/fail claim of the pipeline. `certified` distinguishes exact
/// eigenvalue/mass computations from sampled or word-truncated evidence.
struct Certificate {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
  bool certified = true;
};

struct FactorizationResult {
  std::vector<LevelResult> levels;
  L0Vector weight;
  double bound_certificate = 0.0;     // lambda_max(T^T diag(m .* weight) T)
  double invariance_residual = 0.0;   // of the weight under every beta(s)
  double equivariance_residual = 0.0; // of the factored map sqrt(weight).*T
  std::vector<Certificate> certificates;
  std::vector<std::string> flags;
  bool all_pass = false;
};

/// S(eps) = {i : phi0_i >= 1/2}.
std::vector<Index> level_set(const L0Vector& phi0);

/// Hull tail bound C(lambda) = min(1, max(1/lambda, 24 C'(sqrt(lambda/96)))),
/// extending a single-vector profile to convex combinations.
double c_lambda_extend(const BoundednessProfile& profile, double lambda);

struct CEps {
  double tight = 0.0;
  double paper_bound = 0.0;
};

/// C_eps over a level set: the tight eigenvalue certificate together with the
/// 2 K(eps/2)^2 ||pi||^2 reference bound from the profile.
CEps certify_c_eps(const SaddleProblem& p, const std::vector<Index>& s_set,
                   const BoundednessProfile& profile);

/// Fills k_j = 2^{-j} / (C_{1/j} (1 - 2^{-J})) so that sum k_j C_{1/j} = 1
/// exactly, and returns the weight sum_j k_j 1_{S(1/j)}. Levels whose tight
/// constant vanishes are floored at 1e-12 and flagged.
L0Vector assemble_weight(std::vector<LevelResult>& levels, int J, Index n_atoms,
                         std::vector<std::string>* flags);

struct FactorizeOptions {
  int levels = 8;
  double tol = 1e-8;
  int max_iter = 50000;
  /// When set, per-level solver traces are written to
  /// "<trace_prefix>.l<j>.csv".
  std::string trace_prefix;
};

/// Full pipeline: solve the saddle problem at eps_j = 1/j for j = 1..J, build
/// the level sets and constants, assemble the weight, and certify the mass
/// bounds, the factorization inequality, invariance, and equivariance of the
/// factored map. Certificate failures are flagged in the result, never
/// silently dropped.
FactorizationResult factorize(const FiniteProbSpace& space, const GroupSystem& group,
                              const EquivariantMap& T, const FactorizeOptions& opts = {});

}  // namespace equifact
