#include "equifact/measure_space.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace equifact {

FiniteProbSpace::FiniteProbSpace(Vector weights) : weights_(std::move(weights)) {
  if (weights_.size() == 0) {
    throw std::invalid_argument("FiniteProbSpace: need at least one atom");
  }
  for (Index i = 0; i < weights_.size(); ++i) {
    if (!(weights_[i] > 0.0) || !std::isfinite(weights_[i])) {
      throw std::invalid_argument("FiniteProbSpace: weight " + std::to_string(i) +
                                  " is not strictly positive");
    }
  }
  const double total = weights_.sum();
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("FiniteProbSpace: weights sum to " + std::to_string(total) +
                                ", expected 1 within 1e-12");
  }
}

double FiniteProbSpace::mass(const std::vector<Index>& atoms) const {
  double total = 0.0;
  for (Index i : atoms) {
    if (i < 0 || i >= weights_.size()) {
      throw std::out_of_range("FiniteProbSpace::mass: atom index out of range");
    }
    total += weights_[i];
  }
  return total;
}

FiniteProbSpace FiniteProbSpace::uniform(Index n) {
  return FiniteProbSpace(Vector::Constant(n, 1.0 / static_cast<double>(n)));
}

void require_same_size(const L0Vector& phi, const FiniteProbSpace& space) {
  if (phi.size() != space.size()) {
    throw std::invalid_argument("L0 vector has " + std::to_string(phi.size()) +
                                " entries but the space has " + std::to_string(space.size()) +
                                " atoms");
  }
}

double BoundednessProfile::evaluate(double lambda) const {
  if (thresholds.size() == 0) {
    return 1.0;
  }
  if (lambda < thresholds[0]) {
    return 1.0;
  }
  // Largest stored threshold <= lambda; masses are non-increasing so this
  // dominates the true C'(lambda).
  Index lo = 0;
  Index hi = thresholds.size() - 1;
  while (lo < hi) {
    const Index mid = (lo + hi + 1) / 2;
    if (thresholds[mid] <= lambda) {
      lo = mid;
    } else {
      hi = mid - 1;
    }
  }
  return masses[lo];
}

double rearrangement(const L0Vector& phi, const FiniteProbSpace& space, double t) {
  require_same_size(phi, space);
  if (!(t >= 0.0) || t > 1.0) {
    throw std::invalid_argument("rearrangement: t must lie in [0,1]");
  }

  // Distinct |values| in descending order with merged masses.
  std::vector<std::pair<double, double>> atoms(static_cast<size_t>(phi.size()));
  for (Index i = 0; i < phi.size(); ++i) {
    atoms[static_cast<size_t>(i)] = {std::abs(phi[i]), space.weight(i)};
  }
  std::sort(atoms.begin(), atoms.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  double cumulative = 0.0;
  size_t k = 0;
  while (k < atoms.size()) {
    const double value = atoms[k].first;
    if (value == 0.0) {
      break;
    }
    double merged = 0.0;
    while (k < atoms.size() && atoms[k].first == value) {
      merged += atoms[k].second;
      ++k;
    }
    cumulative += merged;
    if (cumulative > t) {
      return value;
    }
  }
  return 0.0;
}

double tail_measure(const L0Vector& phi, const FiniteProbSpace& space, double lambda) {
  require_same_size(phi, space);
  if (!(lambda >= 0.0)) {
    throw std::invalid_argument("tail_measure: lambda must be >= 0");
  }
  double total = 0.0;
  for (Index i = 0; i < phi.size(); ++i) {
    if (std::abs(phi[i]) > lambda) {
      total += space.weight(i);
    }
  }
  return total;
}

BoundednessProfile boundedness_profile(const Matrix& T, const FiniteProbSpace& space,
                                       const Vector& lambdas) {
  if (T.rows() != space.size()) {
    throw std::invalid_argument("boundedness_profile: T has " + std::to_string(T.rows()) +
                                " rows but the space has " + std::to_string(space.size()) +
                                " atoms");
  }
  for (Index k = 0; k + 1 < lambdas.size(); ++k) {
    if (!(lambdas[k] > 0.0) || lambdas[k] > lambdas[k + 1]) {
      throw std::invalid_argument("boundedness_profile: lambdas must be positive and ascending");
    }
  }

  const Vector row_norms = T.rowwise().norm();
  BoundednessProfile profile;
  profile.thresholds = lambdas;
  profile.masses = Vector::Zero(lambdas.size());
  for (Index k = 0; k < lambdas.size(); ++k) {
    double mass = 0.0;
    for (Index i = 0; i < row_norms.size(); ++i) {
      if (row_norms[i] >= lambdas[k]) {
        mass += space.weight(i);
      }
    }
    profile.masses[k] = mass;
  }
  return profile;
}

Vector default_lambda_grid(const Matrix& T) {
  double maxrow = T.size() == 0 ? 0.0 : T.rowwise().norm().maxCoeff();
  if (maxrow <= 0.0) {
    maxrow = 1.0;
  }
  constexpr Index kPoints = 64;
  Vector grid(kPoints);
  const double lo = std::log(1e-3 * maxrow);
  const double hi = std::log(2.0 * maxrow);
  for (Index k = 0; k < kPoints; ++k) {
    grid[k] = std::exp(lo + (hi - lo) * static_cast<double>(k) / (kPoints - 1));
  }
  return grid;
}

KOfT k_of_t(const BoundednessProfile& profile, double t) {
  if (!(t > 0.0)) {
    throw std::invalid_argument("k_of_t: t must be positive");
  }
  for (Index k = 0; k < profile.thresholds.size(); ++k) {
    if (profile.masses[k] < t) {
      return {profile.thresholds[k], false};
    }
  }
  return {2.0 * profile.max_threshold(), true};
}

}  // namespace equifact
