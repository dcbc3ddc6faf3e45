#include "equifact/builders.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace equifact {

namespace {

/// Left-regular action: sigma_s(x) = index of s * element_x.
std::vector<Permutation> left_regular_actions(const std::vector<std::vector<int>>& mul) {
  const size_t n = mul.size();
  std::vector<Permutation> actions(n, Permutation(n));
  for (size_t s = 0; s < n; ++s) {
    for (size_t x = 0; x < n; ++x) {
      actions[s][x] = mul[s][x];
    }
  }
  return actions;
}

}  // namespace

Permutation identity_permutation(Index n) {
  Permutation out(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] = i;
  }
  return out;
}

Permutation cyclic_shift(Index n, Index shift) {
  Permutation out(static_cast<size_t>(n));
  for (Index i = 0; i < n; ++i) {
    out[static_cast<size_t>(i)] = (i + shift) % n;
  }
  return out;
}

GroupSystem trivial_group(const FiniteProbSpace& space, Index dim) {
  return GroupSystem({"e"}, {{0}}, {Matrix::Identity(dim, dim)},
                     {identity_permutation(space.size())}, space);
}

GroupSystem cyclic_group(int k, const Matrix& gen_rep, const Permutation& gen_action,
                         const FiniteProbSpace& space,
                         std::optional<Matrix> complex_structure) {
  if (k < 1) {
    throw std::invalid_argument("cyclic_group: k must be positive");
  }
  std::vector<std::string> ids;
  std::vector<std::vector<int>> mul(static_cast<size_t>(k), std::vector<int>(static_cast<size_t>(k)));
  std::vector<Matrix> reps;
  std::vector<Permutation> actions;

  Matrix rep = Matrix::Identity(gen_rep.rows(), gen_rep.cols());
  Permutation action = identity_permutation(space.size());
  for (int j = 0; j < k; ++j) {
    ids.push_back(j == 0 ? "e" : "g" + std::to_string(j));
    reps.push_back(rep);
    actions.push_back(action);
    rep = rep * gen_rep;
    action = compose(gen_action, action);
    for (int i = 0; i < k; ++i) {
      mul[static_cast<size_t>(j)][static_cast<size_t>(i)] = (j + i) % k;
    }
  }
  return GroupSystem(std::move(ids), std::move(mul), std::move(reps), std::move(actions), space,
                     std::move(complex_structure));
}

GroupSystem symmetric3_group(const Matrix& conjugator, const FiniteProbSpace& space) {
  if (space.size() != 3 || conjugator.rows() != 3 || conjugator.cols() != 3) {
    throw std::invalid_argument("symmetric3_group: needs 3 atoms and a 3x3 conjugator");
  }
  const std::array<std::array<Index, 3>, 6> perms = {{{0, 1, 2},
                                                      {1, 0, 2},
                                                      {0, 2, 1},
                                                      {2, 1, 0},
                                                      {1, 2, 0},
                                                      {2, 0, 1}}};
  std::vector<Permutation> sigma;
  for (const auto& p : perms) {
    sigma.push_back(Permutation(p.begin(), p.end()));
  }

  const auto index_of = [&](const Permutation& p) {
    for (size_t i = 0; i < sigma.size(); ++i) {
      if (sigma[i] == p) {
        return static_cast<int>(i);
      }
    }
    throw std::logic_error("symmetric3_group: composition left the table");
  };

  std::vector<std::vector<int>> mul(6, std::vector<int>(6));
  for (size_t s = 0; s < 6; ++s) {
    for (size_t t = 0; t < 6; ++t) {
      mul[s][t] = index_of(compose(sigma[t], sigma[s]));  // sigma_s o sigma_t
    }
  }

  const Matrix inv = conjugator.inverse();
  std::vector<std::string> ids = {"e", "s01", "s12", "s02", "c120", "c201"};
  std::vector<Matrix> reps;
  std::vector<Permutation> actions;
  for (const auto& p : sigma) {
    Matrix perm_matrix = Matrix::Zero(3, 3);
    for (Index i = 0; i < 3; ++i) {
      perm_matrix(p[static_cast<size_t>(i)], i) = 1.0;
    }
    reps.push_back(conjugator * perm_matrix * inv);
    actions.push_back(p);
  }
  return GroupSystem(std::move(ids), std::move(mul), std::move(reps), std::move(actions), space);
}

GroupSystem dihedral_group(int k, const Matrix& rotation, const Matrix& reflection,
                           const FiniteProbSpace& space) {
  const int n = 2 * k;
  if (space.size() != n) {
    throw std::invalid_argument("dihedral_group: needs 2k atoms for the regular action");
  }
  // Element (i, e) = r^i s^e, index i + k*e.
  const auto idx = [&](int i, int e) { return ((i % k) + k) % k + k * e; };
  std::vector<std::vector<int>> mul(static_cast<size_t>(n), std::vector<int>(static_cast<size_t>(n)));
  for (int i = 0; i < k; ++i) {
    for (int e = 0; e < 2; ++e) {
      for (int j = 0; j < k; ++j) {
        for (int f = 0; f < 2; ++f) {
          // (r^i s^e)(r^j s^f) = r^{i + (-1)^e j} s^{e+f}.
          const int exponent = e == 0 ? i + j : i - j;
          mul[static_cast<size_t>(idx(i, e))][static_cast<size_t>(idx(j, f))] =
              idx(exponent, (e + f) % 2);
        }
      }
    }
  }

  std::vector<std::string> ids;
  std::vector<Matrix> reps;
  for (int e = 0; e < 2; ++e) {
    for (int i = 0; i < k; ++i) {
      ids.push_back((e == 0 ? "r" : "rs") + std::to_string(i));
    }
  }
  // Order ids to match idx(): r^0..r^{k-1}, r^0 s..r^{k-1} s.
  for (int e = 0; e < 2; ++e) {
    for (int i = 0; i < k; ++i) {
      Matrix rep = Matrix::Identity(rotation.rows(), rotation.cols());
      for (int p = 0; p < i; ++p) {
        rep = rep * rotation;
      }
      if (e == 1) {
        rep = rep * reflection;
      }
      reps.push_back(rep);
    }
  }
  std::vector<Permutation> actions = left_regular_actions(mul);
  return GroupSystem(std::move(ids), std::move(mul), std::move(reps), std::move(actions), space);
}

}  // namespace equifact
