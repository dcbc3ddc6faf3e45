#include "equifact/minimax_solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace equifact {

namespace {

double weighted_dot(const Vector& a, const Vector& b, const FiniteProbSpace& space) {
  double total = 0.0;
  for (Index i = 0; i < a.size(); ++i) {
    total += space.weight(i) * a[i] * b[i];
  }
  return total;
}

/// Sequential mass sum; project_B and BSet::contains must agree bit for bit.
double weighted_mass(const Vector& phi, const FiniteProbSpace& space) {
  double total = 0.0;
  for (Index i = 0; i < phi.size(); ++i) {
    total += space.weight(i) * phi[i];
  }
  return total;
}

/// Euclidean projection onto the probability simplex (Duchi et al.).
void project_simplex(Vector& w) {
  const Index k = w.size();
  std::vector<double> u(w.data(), w.data() + k);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double cumulative = 0.0;
  double tau = 0.0;
  int rho = 0;
  for (Index j = 0; j < k; ++j) {
    cumulative += u[static_cast<size_t>(j)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<size_t>(j)] - candidate > 0.0) {
      tau = candidate;
      rho = static_cast<int>(j + 1);
    }
  }
  if (rho == 0) {
    w.setConstant(1.0 / static_cast<double>(k));
    return;
  }
  for (Index i = 0; i < k; ++i) {
    w[i] = std::max(0.0, w[i] - tau);
  }
}

struct EvalDetail {
  double value = 0.0;
  Vector witness;       // top eigenvector pulled back, unit gram norm
  L0Vector psi;         // |T witness|^2
  L0Vector subgradient; // tie-averaged psi, a valid subgradient of F
};

EvalDetail eval_detail(const L0Vector& phi, const SaddleProblem& p, double tie_window = 0.0) {
  require_same_size(phi, p.space());
  if (!phi.allFinite()) {
    throw std::invalid_argument("eval_F: phi has non-finite entries");
  }
  const Matrix& W = p.whitened();
  const Index d = W.cols();
  const Vector scale = (p.space().weights().array() * phi.array()).matrix();
  const Matrix M = W.transpose() * scale.asDiagonal() * W;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
  const Vector& values = eig.eigenvalues();
  const double top = values[d - 1];

  EvalDetail out;
  out.value = top;
  const Vector u = eig.eigenvectors().col(d - 1);
  out.witness = p.gram_inv_sqrt() * u;
  out.psi = (W * u).array().square().matrix();

  // Ties at the top: average the psi of an orthonormal eigenbasis of the top
  // cluster, a valid (eps-)subgradient of lambda_max. Widening the cluster to
  // the caller's optimality window stops the zigzag at kinks.
  const double tie_tol = std::max({1e-12, 1e-9 * std::abs(top), tie_window});
  out.subgradient = L0Vector::Zero(phi.size());
  int tied = 0;
  for (Index r = d - 1; r >= 0 && top - values[r] <= tie_tol; --r) {
    out.subgradient += (W * eig.eigenvectors().col(r)).array().square().matrix();
    ++tied;
  }
  out.subgradient /= static_cast<double>(tied);
  return out;
}

/// Dual side of the saddle: ascend inner_min(psi(S)) over density matrices
/// S (symmetric PSD, trace 1) in the whitened coordinates. psi(S) runs over
/// the whole hull A' as S runs over density matrices, so every evaluation
/// certifies a lower bound. Supergradient steps use Polyak lengths against a
/// primal upper bound; the projection onto the spectrahedron is an
/// eigenvalue simplex projection.
class DualAscent {
 public:
  DualAscent(const SaddleProblem& p, const BSet& b) : p_(p), b_(b) {}

  double lower_bound() const { return lower_bound_; }

  void note_witness(const L0Vector& psi) {
    lower_bound_ = std::max(lower_bound_, inner_min(psi, b_, p_.space()).value);
  }

  void ascend(const L0Vector& phi_incumbent, double target, int iterations) {
    const Matrix& W = p_.whitened();
    const Index d = W.cols();
    if (S_.size() == 0) {
      // Start from the top eigenvector of M at the incumbent.
      const Vector scale = (p_.space().weights().array() * phi_incumbent.array()).matrix();
      Eigen::SelfAdjointEigenSolver<Matrix> eig(W.transpose() * scale.asDiagonal() * W);
      const Vector u = eig.eigenvectors().col(d - 1);
      S_ = u * u.transpose();
    }
    Matrix best_S = S_;
    for (int it = 0; it < iterations; ++it) {
      const L0Vector psi = ((W * S_).cwiseProduct(W)).rowwise().sum().cwiseMax(0.0);
      const InnerMin im = inner_min(psi, b_, p_.space());
      if (im.value > lower_bound_) {
        lower_bound_ = im.value;
        best_S = S_;
      }
      if (target - im.value <= 0.0) {
        break;
      }
      const Vector scale = (p_.space().weights().array() * im.argmin.array()).matrix();
      const Matrix grad = W.transpose() * scale.asDiagonal() * W;
      const double norm2 = grad.squaredNorm();
      if (norm2 <= 1e-300) {
        break;
      }
      S_ += ((target - im.value) / norm2) * grad;
      project_spectrahedron(S_);
    }
    S_ = best_S;
  }

 private:
  static void project_spectrahedron(Matrix& S) {
    Eigen::SelfAdjointEigenSolver<Matrix> eig(S);
    Vector values = eig.eigenvalues();
    project_simplex(values);
    S = eig.eigenvectors() * values.asDiagonal() * eig.eigenvectors().transpose();
  }

  const SaddleProblem& p_;
  BSet b_;
  Matrix S_;
  double lower_bound_ = 0.0;
};

L0Vector orbit_average(const L0Vector& phi, const GroupSystem& g) {
  L0Vector out(phi.size());
  for (const auto& orbit : g.atom_orbits()) {
    double sum = 0.0;
    for (Index i : orbit) {
      sum += phi[i];
    }
    const double mean = sum / static_cast<double>(orbit.size());
    for (Index i : orbit) {
      out[i] = mean;
    }
  }
  return out;
}

}  // namespace

bool BSet::contains(const L0Vector& phi, const FiniteProbSpace& space, double tol) const {
  require_same_size(phi, space);
  for (Index i = 0; i < phi.size(); ++i) {
    if (phi[i] < -tol || phi[i] > 1.0 + tol) {
      return false;
    }
  }
  return weighted_mass(phi, space) >= mass_target() - tol;
}

SaddleProblem::SaddleProblem(FiniteProbSpace space, GroupSystem group, EquivariantMap T,
                             double eps)
    : SaddleProblem(std::move(space), std::move(group), std::move(T), eps, Matrix()) {}

SaddleProblem::SaddleProblem(FiniteProbSpace space, GroupSystem group, EquivariantMap T,
                             double eps, Matrix gram)
    : space_(std::move(space)),
      group_(std::move(group)),
      T_(std::move(T)),
      eps_(eps),
      gram_(std::move(gram)) {
  if (!(eps_ > 0.0)) {
    throw std::invalid_argument("SaddleProblem: eps must be positive");
  }
  if (T_.atoms() != space_.size() || T_.dim() != group_.dim()) {
    throw std::invalid_argument("SaddleProblem: T dimensions do not match the space and group");
  }
  if (gram_.size() == 0) {
    gram_ = averaged_gram(group_);
  }
  finish_setup();
}

void SaddleProblem::finish_setup() {
  const Index d = gram_.rows();
  if (gram_.cols() != d || d != T_.dim()) {
    throw std::invalid_argument("SaddleProblem: gram has the wrong dimension");
  }
  if ((gram_ - gram_.transpose()).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("SaddleProblem: gram is not symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram_);
  if (eig.eigenvalues()[0] <= 0.0) {
    throw std::invalid_argument("SaddleProblem: gram is not positive definite");
  }
  gram_inv_sqrt_ = eig.eigenvectors() *
                   eig.eigenvalues().array().rsqrt().matrix().asDiagonal() *
                   eig.eigenvectors().transpose();
  whitened_ = T_.matrix * gram_inv_sqrt_;
}

EvalF eval_F(const L0Vector& phi, const SaddleProblem& p) {
  EvalDetail detail = eval_detail(phi, p);
  return {detail.value, std::move(detail.witness), std::move(detail.psi)};
}

InnerMin inner_min(const L0Vector& psi, const BSet& b, const FiniteProbSpace& space) {
  require_same_size(psi, space);
  for (Index i = 0; i < psi.size(); ++i) {
    if (psi[i] < 0.0 || !std::isfinite(psi[i])) {
      throw std::invalid_argument("inner_min: psi must be nonnegative and finite");
    }
  }
  InnerMin out;
  out.argmin = L0Vector::Zero(psi.size());
  double remaining = b.mass_target();
  if (remaining <= 0.0) {
    return out;  // vacuous constraint: phi = 0 is optimal
  }

  std::vector<Index> order(static_cast<size_t>(psi.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::sort(order.begin(), order.end(), [&](Index a, Index c) {
    return psi[a] != psi[c] ? psi[a] < psi[c] : a < c;
  });

  for (Index i : order) {
    const double m = space.weight(i);
    if (m >= remaining) {
      out.argmin[i] = remaining / m;
      out.value += psi[i] * remaining;
      remaining = 0.0;
      break;
    }
    out.argmin[i] = 1.0;
    out.value += psi[i] * m;
    remaining -= m;
  }
  return out;
}

L0Vector project_B(const L0Vector& phi, const BSet& b, const FiniteProbSpace& space) {
  require_same_size(phi, space);
  if (b.eps < 0.0) {
    throw std::invalid_argument("project_B: eps must be nonnegative");
  }
  const double target = b.mass_target();
  L0Vector clipped = phi.cwiseMax(0.0).cwiseMin(1.0);
  if (weighted_mass(clipped, space) >= target) {
    return clipped;
  }

  // Shift by the multiplier of the half-space constraint until the mass
  // constraint is met; mass(nu) is continuous and nondecreasing.
  const auto shifted = [&](double nu) -> L0Vector {
    return (phi.array() + nu).cwiseMax(0.0).cwiseMin(1.0).matrix();
  };
  // Same summation order as weighted_mass(shifted(nu), space), allocation free.
  const auto mass_at = [&](double nu) {
    double total = 0.0;
    for (Index i = 0; i < phi.size(); ++i) {
      total += space.weight(i) * std::min(std::max(phi[i] + nu, 0.0), 1.0);
    }
    return total;
  };
  double lo = 0.0;
  double hi = 1.0 - phi.minCoeff();
  for (int it = 0; it < 120; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mass_at(mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return shifted(hi);
}

SaddleSolution solve_saddle(const SaddleProblem& p, double tol, int max_iter) {
  SolveOptions opts;
  opts.tol = tol;
  opts.max_iter = max_iter;
  return solve_saddle(p, opts);
}

SaddleSolution solve_saddle(const SaddleProblem& p, const SolveOptions& opts) {
  if (!(opts.tol > 0.0)) {
    throw std::invalid_argument("solve_saddle: tol must be positive");
  }
  const FiniteProbSpace& space = p.space();
  const BSet b = p.feasible_set();
  const Index n = space.size();

  DualAscent dual(p, b);
  L0Vector phi = project_B(L0Vector::Ones(n), b, space);
  L0Vector phi_best = phi;
  double f_best = std::numeric_limits<double>::infinity();
  int iterations = 0;

  if (opts.trace != nullptr) {
    *opts.trace << "iteration,F,lower_bound,gap\n";
  }

  // Rounds of a primal subgradient phase followed by a dual ascent from the
  // incumbent. The primal target level F_best - delta falls back on the
  // certified lower bound once the dual has caught up; delta halves whenever
  // a round makes no primal progress, which keeps the steps shrinking on the
  // sharp (piecewise-linear-like) objectives arising here.
  const int round_len = std::min(400, opts.max_iter);
  double delta = std::numeric_limits<double>::infinity();
  bool flat = false;
  int stagnant_rounds = 0;
  while (iterations < opts.max_iter && !flat) {
    const double f_entry = f_best;
    const double lb_entry = dual.lower_bound();
    const int budget = std::min(round_len, opts.max_iter - iterations);
    for (int k = 0; k < budget; ++k) {
      ++iterations;
      const EvalDetail ev = eval_detail(phi, p, std::isfinite(delta) ? 0.5 * delta : 0.0);
      if (ev.value < f_best) {
        f_best = ev.value;
        phi_best = phi;
      }
      dual.note_witness(ev.psi);

      const double gap = f_best - dual.lower_bound();
      if (opts.trace != nullptr) {
        *opts.trace << iterations << ',' << ev.value << ',' << dual.lower_bound() << ',' << gap
                    << '\n';
      }
      if (gap <= opts.tol) {
        break;
      }
      const double norm2 = weighted_dot(ev.subgradient, ev.subgradient, space);
      if (norm2 <= 1e-300) {
        flat = true;  // F vanishes identically around phi
        break;
      }
      if (!std::isfinite(delta)) {
        delta = std::max(gap, opts.tol);
      }
      const double target = std::max(dual.lower_bound(), f_best - delta);
      double step = (ev.value - target) / norm2;
      if (step <= 0.0) {
        step = delta / norm2;
      }
      phi = project_B(phi - step * ev.subgradient, b, space);
    }
    if (f_best - dual.lower_bound() <= opts.tol) {
      break;
    }

    // Midpoint level for the dual too: a reachable target converges, an
    // unreachable one still ratchets the bound by a constant factor.
    dual.ascend(phi_best,
                dual.lower_bound() + 0.7 * (f_best - dual.lower_bound()), 500);

    // The optimum is group invariant, so snapping the incumbent onto the
    // invariant slice never hurts and often ends a zigzag.
    {
      const L0Vector sym = project_B(orbit_average(phi_best, p.group()), b, space);
      const double f_sym = eval_detail(sym, p).value;
      if (f_sym < f_best) {
        f_best = f_sym;
        phi_best = sym;
      }
    }

    if (f_best >= f_entry - 1e-12 - 0.1 * delta) {
      delta = std::max(0.5 * delta, 0.25 * opts.tol);
    }
    // Re-arm the level to the certified gap; the dual ascent keeps improving
    // the bound, so this keeps Polyak steps matched to the true distance.
    delta = std::max(delta, 0.5 * (f_best - dual.lower_bound()));
    phi = phi_best;

    // A round must close a fixed fraction of the outstanding gap, else the
    // deterministic iteration is cycling or creeping; return the best
    // iterate with the honest gap instead of burning the budget.
    const double need =
        0.05 * std::max(f_best - dual.lower_bound(), opts.tol);
    if (f_best >= f_entry - need && dual.lower_bound() <= lb_entry + need) {
      if (++stagnant_rounds >= 3) {
        break;
      }
    } else {
      stagnant_rounds = 0;
    }
  }

  // Min-norm stage: minimize the L2(m) norm over B intersected with the slab
  // {F <= f_best + 10 tol}, by switching projected (sub)gradient steps.
  const double slab = f_best + 10.0 * opts.tol;
  const double slab_inner = f_best + 5.0 * opts.tol;
  L0Vector phi_mn = phi_best;
  double best_norm = weighted_dot(phi_mn, phi_mn, space);
  L0Vector current = phi_best;
  const int mn_iters = std::min(opts.max_iter, 1500);
  for (int k = 0; k < mn_iters; ++k) {
    const EvalDetail ev = eval_detail(current, p);
    if (ev.value <= slab) {
      const double norm = weighted_dot(current, current, space);
      if (norm < best_norm) {
        best_norm = norm;
        phi_mn = current;
      }
    }
    if (ev.value > slab_inner) {
      const double norm2 = weighted_dot(ev.subgradient, ev.subgradient, space);
      if (norm2 <= 1e-300) {
        break;
      }
      const double step = (ev.value - slab_inner) / norm2;
      current = project_B(current - step * ev.subgradient, b, space);
    } else {
      current = project_B(0.5 * current, b, space);
    }
  }

  // Exact symmetrization over the atom orbits. B and F are invariant, so this
  // stays feasible and cannot increase either objective.
  L0Vector phi0 = project_B(orbit_average(phi_mn, p.group()), b, space);
  if (eval_detail(phi0, p).value > slab + 1e-12) {
    phi0 = project_B(orbit_average(phi_best, p.group()), b, space);
  }

  double invariance_residual = 0.0;
  for (int s = 0; s < p.group().size(); ++s) {
    invariance_residual =
        std::max(invariance_residual,
                 (permute(p.group().action(s), phi0) - phi0).cwiseAbs().maxCoeff());
  }

  SaddleSolution sol;
  sol.phi0 = std::move(phi0);
  sol.f_star = f_best;
  sol.lower_bound = dual.lower_bound();
  sol.duality_gap = std::max(0.0, f_best - dual.lower_bound());
  sol.invariance_residual = invariance_residual;
  sol.iterations = iterations;
  sol.converged = sol.duality_gap <= opts.tol;
  return sol;
}

BruteForceResult brute_force_saddle(const SaddleProblem& p, int grid) {
  const Index n = p.space().size();
  if (n > 4) {
    throw std::invalid_argument("brute_force_saddle: instance too large (n > 4)");
  }
  if (grid < 2 || grid > 51) {
    throw std::invalid_argument("brute_force_saddle: grid must lie in [2, 51]");
  }
  const BSet b = p.feasible_set();
  const double target = b.mass_target();

  BruteForceResult best;
  best.f_star = std::numeric_limits<double>::infinity();
  std::vector<int> ticks(static_cast<size_t>(n), 0);
  L0Vector phi(n);
  while (true) {
    for (Index i = 0; i < n; ++i) {
      phi[i] = static_cast<double>(ticks[static_cast<size_t>(i)]) / (grid - 1);
    }
    if (weighted_mass(phi, p.space()) >= target - 1e-12) {
      const double value = eval_F(phi, p).value;
      if (value < best.f_star) {
        best.f_star = value;
        best.phi = phi;
      }
    }
    Index pos = 0;
    while (pos < n && ++ticks[static_cast<size_t>(pos)] == grid) {
      ticks[static_cast<size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == n) {
      break;
    }
  }
  return best;
}

}  // namespace equifact
