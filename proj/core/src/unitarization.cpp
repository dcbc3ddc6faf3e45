#include "equifact/unitarization.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace equifact {

namespace {

constexpr double kEigenFloor = 1e-14;

std::string format_vector(const Vector& v) {
  std::ostringstream out;
  out << "[";
  for (Index i = 0; i < v.size(); ++i) {
    out << (i > 0 ? ", " : "") << v[i];
  }
  out << "]";
  return out.str();
}

}  // namespace

Matrix invariant_form(const L0Vector& weight, const FiniteProbSpace& space,
                      const EquivariantMap& T) {
  require_same_size(weight, space);
  if (T.atoms() != space.size()) {
    throw std::invalid_argument("invariant_form: T row count does not match the space");
  }
  const Vector scale = (space.weights().array() * weight.array()).matrix();
  const Matrix gram = T.matrix.transpose() * scale.asDiagonal() * T.matrix;

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const double lambda_min = eig.eigenvalues()[0];
  const double lambda_max = eig.eigenvalues()[gram.rows() - 1];
  if (lambda_min <= 1e-12 * std::max(1.0, lambda_max)) {
    throw std::runtime_error(
        "invariant_form: gram is singular; sqrt(weight).*T annihilates the kernel vector " +
        format_vector(eig.eigenvectors().col(0)));
  }
  return gram;
}

MatrixC complexify(const Matrix& gram_real, const Matrix& J) {
  const Index d = gram_real.rows();
  if (gram_real.cols() != d || J.rows() != d || J.cols() != d) {
    throw std::invalid_argument("complexify: dimension mismatch");
  }
  if ((J * J + Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("complexify: J is not a complex structure (J^2 != -I)");
  }
  if ((J - standard_complex_structure(d)).cwiseAbs().maxCoeff() > 1e-12) {
    throw std::invalid_argument("complexify: only the standard complex structure is supported");
  }
  const Index dc = d / 2;

  const auto B = [&](const Vector& u, const Vector& v) { return u.dot(gram_real * v); };
  const auto real_basis = [&](Index k) {
    Vector e = Vector::Zero(d);
    e[k] = 1.0;
    return e;
  };

  MatrixC gram(dc, dc);
  for (Index k = 0; k < dc; ++k) {
    const Vector ek = real_basis(k);
    const Vector jek = J * ek;
    for (Index l = 0; l < dc; ++l) {
      const Vector el = real_basis(l);
      const Vector jel = J * el;
      const std::complex<double> value(0.25 * (B(ek, el) + B(jek, jel)),
                                       0.25 * (B(ek, jel) - B(jek, el)));
      // <e_k, e_l> = e_l^H G e_k places the value at (l, k).
      gram(l, k) = value;
    }
  }
  return gram;
}

Matrix principal_sqrt(const Matrix& gram) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  const Vector roots = eig.eigenvalues().cwiseMax(kEigenFloor).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().transpose();
}

MatrixC principal_sqrt(const MatrixC& gram) {
  Eigen::SelfAdjointEigenSolver<MatrixC> eig(gram);
  const Vector roots = eig.eigenvalues().cwiseMax(kEigenFloor).cwiseSqrt();
  return eig.eigenvectors() * roots.asDiagonal() * eig.eigenvectors().adjoint();
}

UnitarizerResult unitarize(const Matrix& gram, const GroupSystem& g) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.eigenvalues()[0] <= 0.0) {
    throw std::invalid_argument("unitarize: gram is not positive definite");
  }
  UnitarizerResult out;
  out.V = principal_sqrt(gram);
  const Matrix v_inv = out.V.inverse();
  for (int s = 0; s < g.size(); ++s) {
    const Matrix u = out.V * g.rep(s) * v_inv;
    const double residual =
        (u.transpose() * u - Matrix::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    out.worst_residual = std::max(out.worst_residual, residual);
  }
  return out;
}

UnitarizerResultC unitarize_complex(const MatrixC& gram, const GroupSystem& g) {
  Eigen::SelfAdjointEigenSolver<MatrixC> eig(gram);
  if (eig.eigenvalues()[0] <= 0.0) {
    throw std::invalid_argument("unitarize_complex: gram is not positive definite");
  }
  UnitarizerResultC out;
  out.V = principal_sqrt(gram);
  const MatrixC v_inv = out.V.inverse();
  for (int s = 0; s < g.size(); ++s) {
    const MatrixC u = out.V * complex_from_real(g.rep(s)) * v_inv;
    const double residual =
        (u.adjoint() * u - MatrixC::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
    out.worst_residual = std::max(out.worst_residual, residual);
  }
  return out;
}

std::vector<double> unitarity_residuals(const MatrixC& V, const GroupSystem& g) {
  const MatrixC v_inv = V.inverse();
  const bool complex_h = g.complex_structure().has_value();
  std::vector<double> out;
  out.reserve(static_cast<size_t>(g.size()));
  for (int s = 0; s < g.size(); ++s) {
    const MatrixC pi =
        complex_h ? complex_from_real(g.rep(s)) : g.rep(s).cast<std::complex<double>>();
    const MatrixC u = V * pi * v_inv;
    out.push_back((u.adjoint() * u - MatrixC::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff());
  }
  return out;
}

Matrix dixmier_average_oracle(const GroupSystem& g) {
  if (g.truncated()) {
    throw std::invalid_argument(
        "dixmier_average_oracle: refusing a word-truncated group; partial sums are not an "
        "invariant average");
  }
  return averaged_gram(g);
}

DixmierReport check_dixmier(const Matrix& gram, const GroupSystem& g) {
  DixmierReport report;
  for (int s = 0; s < g.size(); ++s) {
    const Matrix& pi = g.rep(s);
    report.invariance_residual = std::max(
        report.invariance_residual, (pi.transpose() * gram * pi - gram).cwiseAbs().maxCoeff());
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  report.lambda_min = eig.eigenvalues()[0];
  report.lambda_max = eig.eigenvalues()[gram.rows() - 1];
  report.condition_number =
      report.lambda_min > 0.0 ? report.lambda_max / report.lambda_min
                              : std::numeric_limits<double>::infinity();
  return report;
}

DixmierReport check_dixmier_complex(const MatrixC& gram, const GroupSystem& g) {
  DixmierReport report;
  for (int s = 0; s < g.size(); ++s) {
    const MatrixC pi = complex_from_real(g.rep(s));
    report.invariance_residual = std::max(
        report.invariance_residual, (pi.adjoint() * gram * pi - gram).cwiseAbs().maxCoeff());
  }
  Eigen::SelfAdjointEigenSolver<MatrixC> eig(gram);
  report.lambda_min = eig.eigenvalues()[0];
  report.lambda_max = eig.eigenvalues()[gram.rows() - 1];
  report.condition_number =
      report.lambda_min > 0.0 ? report.lambda_max / report.lambda_min
                              : std::numeric_limits<double>::infinity();
  return report;
}

InnerProductForm make_inner_product_form(const FactorizationResult& fr,
                                         const FiniteProbSpace& space, const GroupSystem& g,
                                         const EquivariantMap& T) {
  InnerProductForm form;
  form.gram_real = invariant_form(fr.weight, space, T);

  if (g.complex_structure()) {
    form.gram_complex = complexify(form.gram_real, *g.complex_structure());
    const auto result = unitarize_complex(form.gram_complex, g);
    form.unitarizer = result.V;
    form.unitarity_residual = result.worst_residual;
    const DixmierReport report = check_dixmier_complex(form.gram_complex, g);
    form.condition_number = report.condition_number;
    form.invariance_residual = report.invariance_residual;
  } else {
    const auto result = unitarize(form.gram_real, g);
    form.unitarizer = result.V.cast<std::complex<double>>();
    form.unitarity_residual = result.worst_residual;
    const DixmierReport report = check_dixmier(form.gram_real, g);
    form.condition_number = report.condition_number;
    form.invariance_residual = report.invariance_residual;
  }
  return form;
}

}  // namespace equifact
