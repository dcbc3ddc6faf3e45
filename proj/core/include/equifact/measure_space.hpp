#pragma once

#include <Eigen/Dense>

#include <vector>

namespace equifact {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Finite probability space: atoms with strictly positive masses summing to one.
/// Stands in for (X,m); every L0 object in this library is a vector of per-atom
/// values against one of these spaces.
class FiniteProbSpace {
 public:
  explicit FiniteProbSpace(Vector weights);

  Index size() const { return weights_.size(); }
  const Vector& weights() const { return weights_; }
  double weight(Index i) const { return weights_[i]; }

  /// Total mass of a set of atom indices.
  double mass(const std::vector<Index>& atoms) const;

  static FiniteProbSpace uniform(Index n);

 private:
  Vector weights_;
};

/// Element of L0(X,m): one real value per atom. Operations taking an L0Vector
/// together with a space reject length mismatches.
using L0Vector = Vector;

void require_same_size(const L0Vector& phi, const FiniteProbSpace& space);

/// Sampled dominating profile lambda -> C'(lambda): thresholds ascending,
/// masses non-increasing in [0,1].
struct BoundednessProfile {
  Vector thresholds;
  Vector masses;

  /// Conservative evaluation at an arbitrary lambda: the stored mass at the
  /// largest threshold <= lambda. Below the grid the trivial bound 1 is
  /// returned; above the top threshold the last stored mass is kept.
  double evaluate(double lambda) const;

  double max_threshold() const { return thresholds[thresholds.size() - 1]; }
};

/// Non-increasing rearrangement phi*(t) = inf{lambda > 0 : m(|phi| > lambda) <= t}.
/// Exact: ties in |phi| are merged before masses are accumulated.
double rearrangement(const L0Vector& phi, const FiniteProbSpace& space, double t);

/// m({x : |phi(x)| > lambda}), exact sum of atom masses.
double tail_measure(const L0Vector& phi, const FiniteProbSpace& space, double lambda);

/// Dominating profile C'(lambda) = m({i : ||row_i(T)|| >= lambda}). Per-row
/// Cauchy-Schwarz makes this a valid certificate: m({|T xi| >= lambda ||xi||})
/// <= C'(lambda) for every xi.
BoundednessProfile boundedness_profile(const Matrix& T, const FiniteProbSpace& space,
                                       const Vector& lambdas);

/// Default grid: 64 logarithmically spaced points from 1e-3*maxrow to 2*maxrow
/// (maxrow treated as 1 when T = 0).
Vector default_lambda_grid(const Matrix& T);

struct KOfT {
  double value = 0.0;
  bool extrapolated = false;
};

/// K(t) = inf{lambda in thresholds : C'(lambda) < t}. When no grid point
/// qualifies, returns twice the top threshold with the extrapolated flag set.
KOfT k_of_t(const BoundednessProfile& profile, double t);

}  // namespace equifact
