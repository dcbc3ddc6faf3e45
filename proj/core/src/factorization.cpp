#include "equifact/factorization.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>
#include <string>

namespace equifact {

namespace {

double lambda_max_weighted(const Matrix& T, const Vector& weights, const L0Vector& phi) {
  const Vector scale = (weights.array() * phi.array()).matrix();
  const Matrix Q = T.transpose() * scale.asDiagonal() * T;
  Eigen::SelfAdjointEigenSolver<Matrix> eig(Q);
  return eig.eigenvalues()[Q.rows() - 1];
}

}  // namespace

std::vector<Index> level_set(const L0Vector& phi0) {
  std::vector<Index> s_set;
  for (Index i = 0; i < phi0.size(); ++i) {
    if (phi0[i] < 0.0 || phi0[i] > 1.0) {
      throw std::invalid_argument("level_set: phi0 must take values in [0,1]");
    }
    if (phi0[i] >= 0.5) {
      s_set.push_back(i);
    }
  }
  return s_set;
}

double c_lambda_extend(const BoundednessProfile& profile, double lambda) {
  if (!(lambda > 0.0)) {
    throw std::invalid_argument("c_lambda_extend: lambda must be positive");
  }
  const double hull = 24.0 * profile.evaluate(std::sqrt(lambda / 96.0));
  return std::min(1.0, std::max(1.0 / lambda, hull));
}

CEps certify_c_eps(const SaddleProblem& p, const std::vector<Index>& s_set,
                   const BoundednessProfile& profile) {
  L0Vector indicator = L0Vector::Zero(p.space().size());
  for (Index i : s_set) {
    if (i < 0 || i >= indicator.size()) {
      throw std::out_of_range("certify_c_eps: atom index out of range");
    }
    indicator[i] = 1.0;
  }
  CEps out;
  out.tight = lambda_max_weighted(p.T().matrix, p.space().weights(), indicator);
  const double k = k_of_t(profile, p.eps() / 2.0).value;
  const double pi_norm = uniform_bound(p.group());
  out.paper_bound = 2.0 * k * k * pi_norm * pi_norm;
  return out;
}

L0Vector assemble_weight(std::vector<LevelResult>& levels, int J, Index n_atoms,
                         std::vector<std::string>* flags) {
  if (J < 1 || J > static_cast<int>(levels.size())) {
    throw std::invalid_argument("assemble_weight: need at least one solved level");
  }
  const double norm = 1.0 - std::ldexp(1.0, -J);  // 1 - 2^{-J}
  L0Vector weight = L0Vector::Zero(n_atoms);
  for (int j = 1; j <= J; ++j) {
    LevelResult& level = levels[static_cast<size_t>(j - 1)];
    double c = level.c_eps_tight;
    if (c < 1e-12) {
      c = 1e-12;
      if (flags != nullptr) {
        flags->push_back("level " + std::to_string(j) +
                         ": tight constant vanished, floored at 1e-12");
      }
    }
    level.k_coeff = std::ldexp(1.0, -j) / (c * norm);
    for (Index i : level.s_set) {
      weight[i] += level.k_coeff;
    }
  }
  return weight;
}

FactorizationResult factorize(const FiniteProbSpace& space, const GroupSystem& group,
                              const EquivariantMap& T, const FactorizeOptions& opts) {
  const double covariance = covariance_residual(T, group);
  if (covariance > 1e-10) {
    throw std::invalid_argument("factorize: T violates the covariance constraint (residual " +
                                std::to_string(covariance) + ")");
  }
  if (opts.levels < 1) {
    throw std::invalid_argument("factorize: need at least one level");
  }

  FactorizationResult result;
  const BoundednessProfile profile = boundedness_profile(T.matrix, space, default_lambda_grid(T.matrix));

  for (int j = 1; j <= opts.levels; ++j) {
    const double eps = 1.0 / static_cast<double>(j);
    SaddleProblem p(space, group, T, eps);
    SolveOptions solve_opts;
    solve_opts.tol = opts.tol;
    solve_opts.max_iter = opts.max_iter;
    std::ofstream trace;
    if (!opts.trace_prefix.empty()) {
      trace.open(opts.trace_prefix + ".l" + std::to_string(j) + ".csv");
      solve_opts.trace = &trace;
    }
    const SaddleSolution sol = solve_saddle(p, solve_opts);

    LevelResult level;
    level.eps = eps;
    level.phi0 = sol.phi0;
    level.s_set = level_set(sol.phi0);
    level.complement_mass = 1.0 - space.mass(level.s_set);
    const CEps c = certify_c_eps(p, level.s_set, profile);
    level.c_eps_tight = c.tight;
    level.c_eps_paper = c.paper_bound;
    level.f_star = sol.f_star;
    level.duality_gap = sol.duality_gap;
    level.invariance_residual = sol.invariance_residual;
    level.iterations = sol.iterations;
    result.levels.push_back(std::move(level));
  }

  result.weight = assemble_weight(result.levels, opts.levels, space.size(), &result.flags);

  // Certificates. Mass bounds and invariance are exact computations; the
  // final factorization inequality is an eigenvalue certificate.
  for (const LevelResult& level : result.levels) {
    result.certificates.push_back({"mass m(X\\S(" + std::to_string(level.eps) + "))",
                                   level.complement_mass, level.eps,
                                   level.complement_mass <= level.eps, true});
    result.certificates.push_back({"phi0 invariance at eps=" + std::to_string(level.eps),
                                   level.invariance_residual, 1e-8,
                                   level.invariance_residual <= 1e-8, !group.truncated()});
  }

  result.bound_certificate = lambda_max_weighted(T.matrix, space.weights(), result.weight);
  result.certificates.push_back({"factorization bound lambda_max", result.bound_certificate,
                                 1.0 + opts.tol, result.bound_certificate <= 1.0 + opts.tol,
                                 true});

  result.invariance_residual = 0.0;
  for (int s = 0; s < group.size(); ++s) {
    result.invariance_residual =
        std::max(result.invariance_residual,
                 (permute(group.action(s), result.weight) - result.weight).cwiseAbs().maxCoeff());
  }
  result.certificates.push_back({"weight invariance", result.invariance_residual, 1e-8,
                                 result.invariance_residual <= 1e-8, !group.truncated()});

  // Equivariance of the factored map xi -> sqrt(weight) .* (T xi): as a matrix
  // identity, D T pi(s) = P_{beta(s)} D T with D = diag(sqrt(weight)).
  const Vector sqrt_weight = result.weight.cwiseSqrt();
  const Matrix DT = sqrt_weight.asDiagonal() * T.matrix;
  EquivariantMap factored{DT};
  result.equivariance_residual = covariance_residual(factored, group);
  result.certificates.push_back({"factored map equivariance", result.equivariance_residual, 1e-8,
                                 result.equivariance_residual <= 1e-8, true});

  // Operator norm of the factored map into L2(X,m).
  const double op_norm_sq = result.bound_certificate;
  result.certificates.push_back({"factored map norm^2", op_norm_sq, 1.0 + opts.tol,
                                 op_norm_sq <= 1.0 + opts.tol, true});

  int zero_atoms = 0;
  for (Index i = 0; i < result.weight.size(); ++i) {
    if (result.weight[i] == 0.0) {
      ++zero_atoms;
    }
  }
  if (zero_atoms > 0) {
    result.flags.push_back(std::to_string(zero_atoms) +
                           " atom(s) outside every level set carry weight 0");
  }

  result.all_pass = std::all_of(result.certificates.begin(), result.certificates.end(),
                                [](const Certificate& c) { return c.pass; });
  return result;
}

}  // namespace equifact
