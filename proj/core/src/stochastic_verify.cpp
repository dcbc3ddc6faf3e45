#include "equifact/stochastic_verify.hpp"

#include "equifact/factorization.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace equifact {

KhintchineResult khintchine_check(const Vector& x, const RademacherConfig& cfg) {
  const Index n = x.size();
  if (n == 0 || x.squaredNorm() == 0.0) {
    throw std::invalid_argument("khintchine_check: x must be nonzero");
  }
  const double threshold = 0.5 * x.squaredNorm();

  KhintchineResult out;
  if (n <= cfg.exact_max) {
    if (n > 62) {
      throw std::invalid_argument("khintchine_check: exact enumeration limited to n <= 62");
    }
    const std::uint64_t total = std::uint64_t{1} << n;
    std::uint64_t hits = 0;
    for (std::uint64_t mask = 0; mask < total; ++mask) {
      double sum = 0.0;
      for (Index j = 0; j < n; ++j) {
        sum += (mask >> j) & 1 ? x[j] : -x[j];
      }
      if (sum * sum >= threshold) {
        ++hits;
      }
    }
    out.probability = static_cast<double>(hits) / static_cast<double>(total);
    out.exact = true;
    out.std_error = 0.0;
    out.pass = out.probability >= 1.0 / 12.0;
  } else {
    std::mt19937_64 rng(cfg.seed);
    std::bernoulli_distribution coin(0.5);
    int hits = 0;
    for (int k = 0; k < cfg.samples; ++k) {
      double sum = 0.0;
      for (Index j = 0; j < n; ++j) {
        sum += coin(rng) ? x[j] : -x[j];
      }
      if (sum * sum >= threshold) {
        ++hits;
      }
    }
    out.probability = static_cast<double>(hits) / cfg.samples;
    out.exact = false;
    out.std_error = std::sqrt(out.probability * (1.0 - out.probability) / cfg.samples);
    out.pass = out.probability >= 1.0 / 12.0 - 3.0 * out.std_error;
  }
  return out;
}

PaleyZygmundResult paley_zygmund_check(const Vector& values, const Vector& probs, double theta) {
  if (values.size() != probs.size() || values.size() == 0) {
    throw std::invalid_argument("paley_zygmund_check: values and probs must match");
  }
  if (theta < 0.0 || theta > 1.0) {
    throw std::invalid_argument("paley_zygmund_check: theta must lie in [0,1]");
  }
  double total = 0.0;
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] < 0.0 || probs[i] < 0.0) {
      throw std::invalid_argument("paley_zygmund_check: distribution must be nonnegative");
    }
    total += probs[i];
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("paley_zygmund_check: probabilities must sum to 1");
  }

  const double mean = values.dot(probs);
  const double second = values.array().square().matrix().dot(probs);
  if (second <= 0.0) {
    throw std::invalid_argument("paley_zygmund_check: E[Y^2] must be positive");
  }

  PaleyZygmundResult out;
  for (Index i = 0; i < values.size(); ++i) {
    if (values[i] > theta * mean) {
      out.lhs += probs[i];
    }
  }
  out.rhs = (1.0 - theta) * (1.0 - theta) * mean * mean / second;
  out.pass = out.lhs >= out.rhs - 1e-12;
  return out;
}

HullTailReport hull_tail_check(const SaddleProblem& p, const RademacherConfig& cfg,
                               const Vector& lambdas) {
  const BoundednessProfile profile =
      boundedness_profile(p.T().matrix, p.space(), default_lambda_grid(p.T().matrix));
  const Index n = p.space().size();
  const Index d = p.T().dim();

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_int_distribution<int> tuple_size(1, 5);

  HullTailReport report;
  report.tuples = cfg.samples;
  report.worst_margin = 1.0;
  for (int t = 0; t < cfg.samples; ++t) {
    const int k = tuple_size(rng);
    Matrix xi(d, k);
    for (int j = 0; j < k; ++j) {
      for (Index i = 0; i < d; ++i) {
        xi(i, j) = gauss(rng);
      }
    }
    const double norm = xi.norm();  // Frobenius: sqrt(sum ||xi_j||^2)
    if (norm == 0.0) {
      continue;
    }
    xi /= norm;

    const Matrix images = p.T().matrix * xi;  // n x k
    const Vector magnitude = images.rowwise().norm();
    for (Index l = 0; l < lambdas.size(); ++l) {
      const double lambda = lambdas[l];
      double tail = 0.0;
      for (Index i = 0; i < n; ++i) {
        if (magnitude[i] >= lambda) {
          tail += p.space().weight(i);
        }
      }
      const double bound = c_lambda_extend(profile, lambda);
      const double margin = bound - tail;
      report.worst_margin = std::min(report.worst_margin, margin);
      if (margin < 0.0) {
        ++report.violations;
      }
    }
  }
  return report;
}

GaussianDemo gaussian_pdf_demo(const Vector& xi, int samples, std::uint64_t seed) {
  if (samples < 1000) {
    throw std::invalid_argument("gaussian_pdf_demo: need at least 1000 samples");
  }
  std::mt19937_64 rng(seed);
  // Per-coordinate variance 1/2 matches the characteristic function
  // e^{-||xi||^2/4}; the standard convention would give e^{-||xi||^2/2}.
  std::normal_distribution<double> gauss(0.0, 1.0 / std::sqrt(2.0));

  GaussianDemo out;
  out.target = std::exp(-xi.squaredNorm() / 4.0);
  double sum = 0.0;
  double sum_sq = 0.0;
  for (int k = 0; k < samples; ++k) {
    double dot = 0.0;
    for (Index i = 0; i < xi.size(); ++i) {
      dot += gauss(rng) * xi[i];
    }
    const double value = std::cos(dot);
    sum += value;
    sum_sq += value * value;
  }
  out.estimate = sum / samples;
  const double variance = std::max(0.0, sum_sq / samples - out.estimate * out.estimate);
  out.std_error = std::sqrt(variance / samples);
  out.pass = std::abs(out.estimate - out.target) <= 3.0 * out.std_error;
  return out;
}

}  // namespace equifact
