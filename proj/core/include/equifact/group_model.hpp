#pragma once

#include "equifact/measure_space.hpp"

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace equifact {

/// Permutation of atom indices, stored as i -> sigma(i).
using Permutation = std::vector<Index>;

bool is_permutation(const Permutation& sigma, Index n);
Permutation compose(const Permutation& first, const Permutation& second);  // second after first
Permutation invert(const Permutation& sigma);

/// Applies the operator P_sigma: (P_sigma v)_{sigma(i)} = v_i, the atom-space
/// realization of phi -> phi(sigma^{-1} . ).
L0Vector permute(const Permutation& sigma, const L0Vector& v);

/// One generator of a finitely generated group: a single-letter name, its
/// matrix under the representation and its permutation on the atoms. The
/// formal inverse is written with the flipped case of the letter.
struct WordGenerator {
  std::string name;
  Matrix rep;
  Permutation action;
};

/// Rewriting rule lhs -> rhs on words over generator letters. Free
/// cancellation (a letter followed by its case-flipped inverse) is always
/// applied in addition to these rules.
using Relation = std::pair<std::string, std::string>;

/// Finite group, or a word-ball truncation of a finitely generated group,
/// carrying a representation pi on R^d and a weight-preserving permutation
/// action beta on the atoms of a FiniteProbSpace.
///
/// Construction validates the homomorphism laws on all stored products
/// (residual <= 1e-10 for pi, exactly for beta), exact weight preservation,
/// and pi(e) = I, beta(e) = id. For word balls the multiplication table is
/// partial: products whose reduced word leaves the ball are not stored.
/// Truncated systems report sup-type quantities as empirical lower bounds.
class GroupSystem {
 public:
  /// Full finite group from explicit tables. mul[i][j] is the index of the
  /// product of elements i and j.
  GroupSystem(std::vector<std::string> ids, std::vector<std::vector<int>> mul,
              std::vector<Matrix> reps, std::vector<Permutation> actions,
              const FiniteProbSpace& space,
              std::optional<Matrix> complex_structure = std::nullopt);

  /// Ball of radius `radius` in the word metric over the given generators and
  /// their formal inverses, with words reduced by free cancellation plus the
  /// supplied rewriting rules.
  static GroupSystem word_ball(const std::vector<WordGenerator>& generators, int radius,
                               const std::vector<Relation>& relations,
                               const FiniteProbSpace& space,
                               std::optional<Matrix> complex_structure = std::nullopt);

  int size() const { return static_cast<int>(ids_.size()); }
  Index dim() const { return reps_.empty() ? 0 : reps_[0].rows(); }
  Index atom_count() const { return n_atoms_; }

  const std::string& id(int s) const { return ids_[static_cast<size_t>(s)]; }
  int index_of(const std::string& id) const;  // -1 when unknown
  int identity() const { return identity_; }

  /// Index of the product, or -1 when it falls outside the stored set.
  int multiply(int s, int t) const;
  /// Index of the inverse, or -1 when it falls outside the stored set.
  int inverse(int s) const;

  const Matrix& rep(int s) const { return reps_[static_cast<size_t>(s)]; }
  const Permutation& action(int s) const { return actions_[static_cast<size_t>(s)]; }

  bool truncated() const { return truncated_; }
  /// Word length of element s; 0 for finite groups built from tables.
  int word_length(int s) const { return lengths_[static_cast<size_t>(s)]; }

  const std::optional<Matrix>& complex_structure() const { return complex_structure_; }

  /// Orbits of the atom set under the stored action.
  std::vector<std::vector<Index>> atom_orbits() const;

 private:
  GroupSystem() = default;
  void validate(const FiniteProbSpace& space);

  std::vector<std::string> ids_;
  std::vector<std::vector<int>> mul_;
  std::vector<int> inv_;
  std::vector<Matrix> reps_;
  std::vector<Permutation> actions_;
  std::vector<int> lengths_;
  int identity_ = -1;
  Index n_atoms_ = 0;
  bool truncated_ = false;
  std::optional<Matrix> complex_structure_;
};

/// Element (xi, s) of the semidirect product H x| Gamma.
struct SemidirectElement {
  Vector xi;
  int s = 0;
};

SemidirectElement sd_identity(const GroupSystem& g);

/// (eta, t)(xi, s) = (eta + pi(t) xi, ts).
SemidirectElement sd_mul(const SemidirectElement& a, const SemidirectElement& b,
                         const GroupSystem& g);

/// (xi, s)^{-1} = (-pi(s^{-1}) xi, s^{-1}).
SemidirectElement sd_inv(const SemidirectElement& a, const GroupSystem& g);

/// max over stored elements of the spectral norm ||pi(s)||. For word balls
/// this is a lower bound on ||pi|| and is flagged as such by callers.
double uniform_bound(const GroupSystem& g);

struct SinCheckEntry {
  double epsilon = 0.0;
  double invariant_radius = 0.0;
  double worst_norm = 0.0;  // max ||pi(s) xi|| over samples, all < epsilon on pass
  bool pass = false;
};

struct SinReport {
  std::vector<SinCheckEntry> entries;
  double bound = 0.0;  // C - 1, the uniform bound used
  bool certified = false;           // full finite group: the bound is exact
  bool growth_detected = false;     // word ball whose bound still grows at the boundary
  std::vector<double> bound_by_length;  // truncated systems: max ||pi(w)|| per word length
};

/// Verifies pi(s) B_{eps/C}(0) inside B_eps(0) with C = 1 + uniform_bound(g)
/// on sampled vectors, reporting the invariant radius eps/C per epsilon.
/// The boundedness condition (SIN.2) is automatic for a discrete group acting
/// on H and is not checked (take W = {e} in the semidirect factor).
SinReport sin_check(const GroupSystem& g, const std::vector<double>& epsilons,
                    int samples_per_eps = 64, std::uint64_t seed = 0);

/// f(xi) = exp(-||V xi||^2). Throws when V is singular.
double pdf_gaussian(const Matrix& V, const Vector& xi);

/// Extension of a pi-invariant positive definite f on H to the semidirect
/// product: f(xi) on the fiber over the identity, 0 elsewhere.
double pdf_extend(const std::function<double(const Vector&)>& f, const SemidirectElement& a,
                  const GroupSystem& g);

/// G_avg = (1/|G|) sum_s pi(s)^T pi(s); symmetric positive definite and fixed
/// by the representation when the group is finite. Solver-facing surrogate
/// for the sup norm ||xi||_pi.
Matrix averaged_gram(const GroupSystem& g);

/// ||xi||_pi = max_s ||pi(s) xi||, the exact sup norm over stored elements.
double sup_norm_oracle(const GroupSystem& g, const Vector& xi);

/// The matrix of an operator T: H -> L0(X,m), rows indexed by atoms.
struct EquivariantMap {
  Matrix matrix;

  Index atoms() const { return matrix.rows(); }
  Index dim() const { return matrix.cols(); }
};

/// max over stored s of the max-abs entry of T pi(s) - P_{beta(s)} T.
double covariance_residual(const EquivariantMap& T, const GroupSystem& g);

/// Group-averages T0 into an exactly equivariant map (finite groups only):
/// T = (1/|G|) sum_s P_{beta(s)}^{-1} T0 pi(s).
EquivariantMap project_equivariant(const Matrix& T0, const GroupSystem& g);

/// Standard complex structure on R^{2dc} with the (Re; Im) layout.
Matrix standard_complex_structure(Index d_real);

/// max-abs entry of M J - J M.
double complex_structure_residual(const Matrix& M, const Matrix& J);

/// Complex dc x dc matrix of a real 2dc x 2dc matrix commuting with the
/// standard complex structure (block form [[A, -B], [B, A]] -> A + iB).
Eigen::MatrixXcd complex_from_real(const Matrix& M);

/// Real 2dc-vector (Re; Im) as a complex dc-vector.
Eigen::VectorXcd complex_vector(const Vector& v);

}  // namespace equifact
