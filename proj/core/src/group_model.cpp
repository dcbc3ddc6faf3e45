#include "equifact/group_model.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace equifact {

namespace {

constexpr double kHomTol = 1e-10;

double max_abs(const Matrix& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

double spectral_norm(const Matrix& m) {
  return Eigen::JacobiSVD<Matrix>(m).singularValues()[0];
}

}  // namespace

bool is_permutation(const Permutation& sigma, Index n) {
  if (static_cast<Index>(sigma.size()) != n) {
    return false;
  }
  std::vector<bool> seen(static_cast<size_t>(n), false);
  for (Index image : sigma) {
    if (image < 0 || image >= n || seen[static_cast<size_t>(image)]) {
      return false;
    }
    seen[static_cast<size_t>(image)] = true;
  }
  return true;
}

Permutation compose(const Permutation& first, const Permutation& second) {
  Permutation out(first.size());
  for (size_t i = 0; i < first.size(); ++i) {
    out[i] = second[static_cast<size_t>(first[i])];
  }
  return out;
}

Permutation invert(const Permutation& sigma) {
  Permutation out(sigma.size());
  for (size_t i = 0; i < sigma.size(); ++i) {
    out[static_cast<size_t>(sigma[i])] = static_cast<Index>(i);
  }
  return out;
}

L0Vector permute(const Permutation& sigma, const L0Vector& v) {
  if (static_cast<Index>(sigma.size()) != v.size()) {
    throw std::invalid_argument("permute: length mismatch");
  }
  L0Vector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    out[sigma[static_cast<size_t>(i)]] = v[i];
  }
  return out;
}

GroupSystem::GroupSystem(std::vector<std::string> ids, std::vector<std::vector<int>> mul,
                         std::vector<Matrix> reps, std::vector<Permutation> actions,
                         const FiniteProbSpace& space, std::optional<Matrix> complex_structure) {
  ids_ = std::move(ids);
  mul_ = std::move(mul);
  reps_ = std::move(reps);
  actions_ = std::move(actions);
  complex_structure_ = std::move(complex_structure);
  truncated_ = false;
  n_atoms_ = space.size();

  const size_t n = ids_.size();
  if (n == 0) {
    throw std::invalid_argument("GroupSystem: no elements");
  }
  if (mul_.size() != n || reps_.size() != n || actions_.size() != n) {
    throw std::invalid_argument("GroupSystem: table sizes do not match the element list");
  }
  for (const auto& row : mul_) {
    if (row.size() != n) {
      throw std::invalid_argument("GroupSystem: multiplication table is not square");
    }
    for (int entry : row) {
      if (entry < 0 || entry >= static_cast<int>(n)) {
        throw std::invalid_argument("GroupSystem: multiplication table entry out of range");
      }
    }
  }

  // Identity: the unique e with e*x = x*e = x for all x.
  identity_ = -1;
  for (size_t e = 0; e < n; ++e) {
    bool ok = true;
    for (size_t x = 0; x < n; ++x) {
      if (mul_[e][x] != static_cast<int>(x) || mul_[x][e] != static_cast<int>(x)) {
        ok = false;
        break;
      }
    }
    if (ok) {
      identity_ = static_cast<int>(e);
      break;
    }
  }
  if (identity_ < 0) {
    throw std::invalid_argument("GroupSystem: multiplication table has no identity element");
  }

  inv_.assign(n, -1);
  for (size_t s = 0; s < n; ++s) {
    for (size_t t = 0; t < n; ++t) {
      if (mul_[s][t] == identity_ && mul_[t][s] == identity_) {
        inv_[s] = static_cast<int>(t);
        break;
      }
    }
    if (inv_[s] < 0) {
      throw std::invalid_argument("GroupSystem: element '" + ids_[s] + "' has no inverse");
    }
  }
  lengths_.assign(n, 0);

  validate(space);
}

void GroupSystem::validate(const FiniteProbSpace& space) {
  const size_t n = ids_.size();
  const Index d = reps_[0].rows();

  for (size_t s = 0; s < n; ++s) {
    if (reps_[s].rows() != d || reps_[s].cols() != d) {
      throw std::invalid_argument("GroupSystem: rep of '" + ids_[s] + "' is not " +
                                  std::to_string(d) + "x" + std::to_string(d));
    }
    if (!is_permutation(actions_[s], n_atoms_)) {
      throw std::invalid_argument("GroupSystem: action of '" + ids_[s] +
                                  "' is not a permutation of the atoms");
    }
    for (Index i = 0; i < n_atoms_; ++i) {
      const Index j = actions_[s][static_cast<size_t>(i)];
      if (space.weight(j) != space.weight(i)) {
        throw std::invalid_argument("GroupSystem: action of '" + ids_[s] +
                                    "' does not preserve the weight of atom " + std::to_string(i));
      }
    }
  }

  const double id_residual = max_abs(reps_[static_cast<size_t>(identity_)] - Matrix::Identity(d, d));
  if (id_residual > kHomTol) {
    throw std::invalid_argument("GroupSystem: pi(e) differs from the identity by " +
                                std::to_string(id_residual));
  }
  for (Index i = 0; i < n_atoms_; ++i) {
    if (actions_[static_cast<size_t>(identity_)][static_cast<size_t>(i)] != i) {
      throw std::invalid_argument("GroupSystem: beta(e) is not the identity permutation");
    }
  }

  for (size_t s = 0; s < n; ++s) {
    for (size_t t = 0; t < n; ++t) {
      const int st = mul_[s][t];
      if (st < 0) {
        continue;  // product outside a word ball
      }
      const double residual =
          max_abs(reps_[static_cast<size_t>(st)] - reps_[s] * reps_[t]);
      if (residual > kHomTol) {
        throw std::invalid_argument("GroupSystem: rep homomorphism fails on '" + ids_[s] +
                                    "' * '" + ids_[t] + "' with residual " +
                                    std::to_string(residual));
      }
      const Permutation composed = compose(actions_[t], actions_[s]);  // beta(s) after beta(t)
      if (actions_[static_cast<size_t>(st)] != composed) {
        throw std::invalid_argument("GroupSystem: action homomorphism fails on '" + ids_[s] +
                                    "' * '" + ids_[t] + "'");
      }
    }
  }

  if (complex_structure_) {
    const Matrix& J = *complex_structure_;
    if (J.rows() != d || J.cols() != d) {
      throw std::invalid_argument("GroupSystem: complex structure has wrong dimension");
    }
    if (max_abs(J * J + Matrix::Identity(d, d)) > kHomTol) {
      throw std::invalid_argument("GroupSystem: complex structure does not square to -I");
    }
    for (size_t s = 0; s < n; ++s) {
      const double residual = complex_structure_residual(reps_[s], J);
      if (residual > kHomTol) {
        throw std::invalid_argument("GroupSystem: rep of '" + ids_[s] +
                                    "' does not commute with the complex structure (residual " +
                                    std::to_string(residual) + ")");
      }
    }
  }
}

int GroupSystem::index_of(const std::string& id) const {
  for (size_t s = 0; s < ids_.size(); ++s) {
    if (ids_[s] == id) {
      return static_cast<int>(s);
    }
  }
  return -1;
}

int GroupSystem::multiply(int s, int t) const {
  if (s < 0 || s >= size() || t < 0 || t >= size()) {
    throw std::out_of_range("GroupSystem::multiply: unknown element id");
  }
  return mul_[static_cast<size_t>(s)][static_cast<size_t>(t)];
}

int GroupSystem::inverse(int s) const {
  if (s < 0 || s >= size()) {
    throw std::out_of_range("GroupSystem::inverse: unknown element id");
  }
  return inv_[static_cast<size_t>(s)];
}

std::vector<std::vector<Index>> GroupSystem::atom_orbits() const {
  std::vector<int> orbit_of(static_cast<size_t>(n_atoms_), -1);
  std::vector<std::vector<Index>> orbits;
  for (Index i = 0; i < n_atoms_; ++i) {
    if (orbit_of[static_cast<size_t>(i)] >= 0) {
      continue;
    }
    const int id = static_cast<int>(orbits.size());
    std::vector<Index> orbit;
    std::vector<Index> stack = {i};
    orbit_of[static_cast<size_t>(i)] = id;
    while (!stack.empty()) {
      const Index x = stack.back();
      stack.pop_back();
      orbit.push_back(x);
      for (int s = 0; s < size(); ++s) {
        const Index y = actions_[static_cast<size_t>(s)][static_cast<size_t>(x)];
        if (orbit_of[static_cast<size_t>(y)] < 0) {
          orbit_of[static_cast<size_t>(y)] = id;
          stack.push_back(y);
        }
      }
    }
    std::sort(orbit.begin(), orbit.end());
    orbits.push_back(std::move(orbit));
  }
  return orbits;
}

SemidirectElement sd_identity(const GroupSystem& g) {
  return {Vector::Zero(g.dim()), g.identity()};
}

SemidirectElement sd_mul(const SemidirectElement& a, const SemidirectElement& b,
                         const GroupSystem& g) {
  const int product = g.multiply(a.s, b.s);
  if (product < 0) {
    throw std::domain_error("sd_mul: product '" + g.id(a.s) + "' * '" + g.id(b.s) +
                            "' falls outside the stored word ball");
  }
  if (a.xi.size() != g.dim() || b.xi.size() != g.dim()) {
    throw std::invalid_argument("sd_mul: vector part has wrong dimension");
  }
  return {a.xi + g.rep(a.s) * b.xi, product};
}

SemidirectElement sd_inv(const SemidirectElement& a, const GroupSystem& g) {
  const int inv = g.inverse(a.s);
  if (inv < 0) {
    throw std::domain_error("sd_inv: inverse of '" + g.id(a.s) +
                            "' falls outside the stored word ball");
  }
  return {-(g.rep(inv) * a.xi), inv};
}

double uniform_bound(const GroupSystem& g) {
  double bound = 0.0;
  for (int s = 0; s < g.size(); ++s) {
    bound = std::max(bound, spectral_norm(g.rep(s)));
  }
  return bound;
}

SinReport sin_check(const GroupSystem& g, const std::vector<double>& epsilons,
                    int samples_per_eps, std::uint64_t seed) {
  SinReport report;
  report.bound = uniform_bound(g);
  report.certified = !g.truncated();
  const double c = 1.0 + report.bound;

  if (g.truncated()) {
    int max_len = 0;
    for (int s = 0; s < g.size(); ++s) {
      max_len = std::max(max_len, g.word_length(s));
    }
    report.bound_by_length.assign(static_cast<size_t>(max_len) + 1, 0.0);
    for (int s = 0; s < g.size(); ++s) {
      double norm = spectral_norm(g.rep(s));
      auto& slot = report.bound_by_length[static_cast<size_t>(g.word_length(s))];
      slot = std::max(slot, norm);
    }
    for (size_t k = 0; k + 1 < report.bound_by_length.size(); ++k) {
      report.bound_by_length[k + 1] = std::max(report.bound_by_length[k + 1],
                                               report.bound_by_length[k]);
    }
    if (max_len >= 1) {
      const double inner = report.bound_by_length[static_cast<size_t>(max_len) - 1];
      const double outer = std::max(inner, report.bound_by_length[static_cast<size_t>(max_len)]);
      report.growth_detected = outer > inner * (1.0 + 1e-9);
    }
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const Index d = g.dim();

  for (double eps : epsilons) {
    if (!(eps > 0.0)) {
      throw std::invalid_argument("sin_check: epsilons must be positive");
    }
    SinCheckEntry entry;
    entry.epsilon = eps;
    entry.invariant_radius = eps / c;
    entry.worst_norm = 0.0;
    for (int k = 0; k < samples_per_eps; ++k) {
      Vector xi(d);
      for (Index i = 0; i < d; ++i) {
        xi[i] = gauss(rng);
      }
      const double norm = xi.norm();
      if (norm == 0.0) {
        continue;
      }
      xi *= entry.invariant_radius * unif(rng) / norm;  // ||xi|| < eps/C
      for (int s = 0; s < g.size(); ++s) {
        entry.worst_norm = std::max(entry.worst_norm, (g.rep(s) * xi).norm());
      }
    }
    entry.pass = entry.worst_norm < eps;
    report.entries.push_back(entry);
  }
  return report;
}

double pdf_gaussian(const Matrix& V, const Vector& xi) {
  if (V.rows() != V.cols() || V.cols() != xi.size()) {
    throw std::invalid_argument("pdf_gaussian: dimension mismatch");
  }
  Eigen::FullPivLU<Matrix> lu(V);
  if (!lu.isInvertible()) {
    throw std::invalid_argument("pdf_gaussian: V is singular");
  }
  return std::exp(-(V * xi).squaredNorm());
}

double pdf_extend(const std::function<double(const Vector&)>& f, const SemidirectElement& a,
                  const GroupSystem& g) {
  if (a.s < 0 || a.s >= g.size()) {
    throw std::out_of_range("pdf_extend: unknown element id");
  }
  return a.s == g.identity() ? f(a.xi) : 0.0;
}

Matrix averaged_gram(const GroupSystem& g) {
  const Index d = g.dim();
  Matrix sum = Matrix::Zero(d, d);
  for (int s = 0; s < g.size(); ++s) {
    sum += g.rep(s).transpose() * g.rep(s);
  }
  return sum / static_cast<double>(g.size());
}

double sup_norm_oracle(const GroupSystem& g, const Vector& xi) {
  double best = 0.0;
  for (int s = 0; s < g.size(); ++s) {
    best = std::max(best, (g.rep(s) * xi).norm());
  }
  return best;
}

double covariance_residual(const EquivariantMap& T, const GroupSystem& g) {
  if (T.atoms() != g.atom_count() || T.dim() != g.dim()) {
    throw std::invalid_argument("covariance_residual: T is " + std::to_string(T.atoms()) + "x" +
                                std::to_string(T.dim()) + " but the group acts on " +
                                std::to_string(g.atom_count()) + " atoms in dimension " +
                                std::to_string(g.dim()));
  }
  double worst = 0.0;
  for (int s = 0; s < g.size(); ++s) {
    const Matrix lhs = T.matrix * g.rep(s);
    const Permutation& sigma = g.action(s);
    for (Index i = 0; i < T.atoms(); ++i) {
      // Row sigma(i) of P_{beta(s)} T is row i of T.
      const double residual =
          (lhs.row(sigma[static_cast<size_t>(i)]) - T.matrix.row(i)).cwiseAbs().maxCoeff();
      worst = std::max(worst, residual);
    }
  }
  return worst;
}

EquivariantMap project_equivariant(const Matrix& T0, const GroupSystem& g) {
  if (g.truncated()) {
    throw std::invalid_argument("project_equivariant: word balls cannot be averaged over");
  }
  Matrix sum = Matrix::Zero(T0.rows(), T0.cols());
  for (int s = 0; s < g.size(); ++s) {
    const Matrix image = T0 * g.rep(s);
    // P_{beta(s)}^{-1} (T0 pi(s)): row i picks up row sigma(i) of the image.
    for (Index i = 0; i < T0.rows(); ++i) {
      sum.row(i) += image.row(g.action(s)[static_cast<size_t>(i)]);
    }
  }
  return {sum / static_cast<double>(g.size())};
}

Matrix standard_complex_structure(Index d_real) {
  if (d_real % 2 != 0) {
    throw std::invalid_argument("standard_complex_structure: dimension must be even");
  }
  const Index dc = d_real / 2;
  Matrix J = Matrix::Zero(d_real, d_real);
  J.topRightCorner(dc, dc) = -Matrix::Identity(dc, dc);
  J.bottomLeftCorner(dc, dc) = Matrix::Identity(dc, dc);
  return J;
}

double complex_structure_residual(const Matrix& M, const Matrix& J) {
  return max_abs(M * J - J * M);
}

Eigen::MatrixXcd complex_from_real(const Matrix& M) {
  if (M.rows() != M.cols() || M.rows() % 2 != 0) {
    throw std::invalid_argument("complex_from_real: matrix must be square of even dimension");
  }
  const Index dc = M.rows() / 2;
  const Matrix J = standard_complex_structure(M.rows());
  if (complex_structure_residual(M, J) > 1e-8) {
    throw std::invalid_argument("complex_from_real: matrix does not commute with J");
  }
  Eigen::MatrixXcd out(dc, dc);
  out.real() = M.topLeftCorner(dc, dc);
  out.imag() = M.bottomLeftCorner(dc, dc);
  return out;
}

Eigen::VectorXcd complex_vector(const Vector& v) {
  if (v.size() % 2 != 0) {
    throw std::invalid_argument("complex_vector: vector must have even dimension");
  }
  const Index dc = v.size() / 2;
  Eigen::VectorXcd out(dc);
  out.real() = v.head(dc);
  out.imag() = v.tail(dc);
  return out;
}

}  // namespace equifact
