#pragma once

#include "equifact/group_model.hpp"

namespace equifact {

/// Identity permutation on n atoms.
Permutation identity_permutation(Index n);

/// Cyclic shift i -> (i + shift) mod n.
Permutation cyclic_shift(Index n, Index shift);

/// The one-element group acting trivially.
GroupSystem trivial_group(const FiniteProbSpace& space, Index dim);

/// Z/k with rep(g^j) = gen_rep^j and action(g^j) = gen_action^j. The
/// generator data must satisfy gen_rep^k = I and gen_action^k = id.
GroupSystem cyclic_group(int k, const Matrix& gen_rep, const Permutation& gen_action,
                         const FiniteProbSpace& space,
                         std::optional<Matrix> complex_structure = std::nullopt);

/// S_3 in its natural action on 3 atoms, with rep(sigma) = A P_sigma A^{-1}.
GroupSystem symmetric3_group(const Matrix& conjugator, const FiniteProbSpace& space);

/// Dihedral group of order 2k from rotation/reflection matrices satisfying
/// R^k = I, S^2 = I, S R S = R^{-1}, acting on 2k atoms by left translation.
GroupSystem dihedral_group(int k, const Matrix& rotation, const Matrix& reflection,
                           const FiniteProbSpace& space);

}  // namespace equifact
