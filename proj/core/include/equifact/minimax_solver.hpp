#pragma once

#include "equifact/group_model.hpp"

#include <iosfwd>

namespace equifact {

/// Feasible set B = {0 <= phi <= 1, sum_i m_i phi_i >= 1 - eps/2}. For
/// eps >= 2 the mass constraint is vacuous and B is the whole box.
struct BSet {
  double eps = 1.0;

  double mass_target() const { return eps >= 2.0 ? 0.0 : 1.0 - eps / 2.0; }
  bool contains(const L0Vector& phi, const FiniteProbSpace& space, double tol = 0.0) const;
};

/// Data of the convex minimax min_{phi in B} sup_{psi in A'} int psi phi dm,
/// where A' is the hull of {sum |T xi_j|^2 : sum ||xi_j||_gram^2 <= 1}. The
/// gram matrix defaults to the group-averaged form, which is invariant for
/// finite groups and norm-equivalent to the ambient inner product.
class SaddleProblem {
 public:
  SaddleProblem(FiniteProbSpace space, GroupSystem group, EquivariantMap T, double eps);
  SaddleProblem(FiniteProbSpace space, GroupSystem group, EquivariantMap T, double eps,
                Matrix gram);

  const FiniteProbSpace& space() const { return space_; }
  const GroupSystem& group() const { return group_; }
  const EquivariantMap& T() const { return T_; }
  double eps() const { return eps_; }
  const Matrix& gram() const { return gram_; }
  BSet feasible_set() const { return {eps_}; }

  /// T composed with gram^{-1/2}: rows give |T xi| for unit-gram xi.
  const Matrix& whitened() const { return whitened_; }
  const Matrix& gram_inv_sqrt() const { return gram_inv_sqrt_; }

 private:
  void finish_setup();

  FiniteProbSpace space_;
  GroupSystem group_;
  EquivariantMap T_;
  double eps_;
  Matrix gram_;
  Matrix gram_inv_sqrt_;
  Matrix whitened_;
};

struct EvalF {
  double value = 0.0;
  Vector witness;  // xi with ||xi||_gram = 1 attaining the sup
  L0Vector psi;    // |T xi|^2 per atom, the active element of A'
};

/// F(phi) = lambda_max(gram^{-1/2} T^T diag(m .* phi) T gram^{-1/2}), the sup
/// of int psi phi dm over A', together with the maximizing witness.
EvalF eval_F(const L0Vector& phi, const SaddleProblem& p);

struct InnerMin {
  double value = 0.0;
  L0Vector argmin;
};

/// Exact greedy solution of min_{phi in B} int psi phi dm: fill the smallest
/// psi atoms up to the mass target, fractionally on the boundary atom.
InnerMin inner_min(const L0Vector& psi, const BSet& b, const FiniteProbSpace& space);

/// m-weighted least-squares projection onto B: box clip plus bisection on the
/// multiplier of the mass constraint. Idempotent; the returned point meets the
/// mass constraint from above.
L0Vector project_B(const L0Vector& phi, const BSet& b, const FiniteProbSpace& space);

struct SaddleSolution {
  L0Vector phi0;
  double f_star = 0.0;
  double lower_bound = 0.0;
  double duality_gap = 0.0;
  double invariance_residual = 0.0;
  int iterations = 0;
  bool converged = false;
};

struct SolveOptions {
  double tol = 1e-8;
  int max_iter = 50000;
  /// When set, receives CSV rows "iteration,F,lower_bound,gap".
  std::ostream* trace = nullptr;
};

/// Projected subgradient descent on F over B with Polyak-style steps against
/// the running lower bound, followed by a min-norm stage over the near-optimal
/// slab {F <= f_star + 10 tol} and exact symmetrization over the group orbits.
/// Lower bounds come from inner_min at visited witnesses and at convex
/// combinations of them (A' is convex, so combinations are again witnesses).
SaddleSolution solve_saddle(const SaddleProblem& p, const SolveOptions& opts = {});
SaddleSolution solve_saddle(const SaddleProblem& p, double tol, int max_iter);

struct BruteForceResult {
  double f_star = 0.0;
  L0Vector phi;
};

/// Exhaustive grid search of F over B; oracle for small instances
/// (n <= 4 atoms, grid <= 51).
BruteForceResult brute_force_saddle(const SaddleProblem& p, int grid);

}  // namespace equifact
