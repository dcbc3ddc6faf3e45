#pragma once

#include "equifact/factorization.hpp"

#include <complex>

namespace equifact {

using MatrixC = Eigen::MatrixXcd;
using VectorC = Eigen::VectorXcd;

/// Gram of the invariant bilinear form <xi,eta>' = int weight [T xi][T eta] dm,
/// i.e. G = T^T diag(m .* weight) T. Throws when G is singular, naming the
/// kernel vector (T fails to be injective on the weighted support).
Matrix invariant_form(const L0Vector& weight, const FiniteProbSpace& space,
                      const EquivariantMap& T);

/// Hermitian form <xi,eta> = (1/4){B(xi,eta) + B(Jxi,Jeta) + i B(xi,Jeta)
/// - i B(Jxi,eta)} on C^{d/2}, realized with the standard complex structure.
/// Linear in the first argument; <xi,eta> = eta^H G xi.
MatrixC complexify(const Matrix& gram_real, const Matrix& J);

/// Principal square root by symmetric/Hermitian eigendecomposition, with
/// eigenvalues floored at 1e-14.
Matrix principal_sqrt(const Matrix& gram);
MatrixC principal_sqrt(const MatrixC& gram);

struct UnitarizerResult {
  Matrix V;
  double worst_residual = 0.0;  // max_s ||U(s)^T U(s) - I||, U(s) = V pi(s) V^{-1}
};

struct UnitarizerResultC {
  MatrixC V;
  double worst_residual = 0.0;
};

/// V = gram^{1/2}; conjugating the representation by V yields unitaries
/// whenever the gram is pi-invariant (Dixmier's criterion).
UnitarizerResult unitarize(const Matrix& gram, const GroupSystem& g);

/// ||U(s)^H U(s) - I|| for every stored element, U(s) = V pi(s) V^{-1}.
std::vector<double> unitarity_residuals(const MatrixC& V, const GroupSystem& g);

/// Complex variant: the representation matrices are read through the standard
/// complex structure, which every rep of a complex system commutes with.
UnitarizerResultC unitarize_complex(const MatrixC& gram, const GroupSystem& g);

/// Classical averaging construction for finite groups:
/// <xi,eta> = (1/|G|) sum_s <pi(s)xi, pi(s)eta>. Refuses word balls, whose
/// partial sums average nothing meaningful.
Matrix dixmier_average_oracle(const GroupSystem& g);

struct DixmierReport {
  double invariance_residual = 0.0;  // max_s ||pi(s)^H G pi(s) - G||
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  double condition_number = 0.0;
};

/// Invariance residual and topology-equivalence constants of a candidate
/// gram. Reports, never throws: a non-invariant gram simply shows a nonzero
/// residual.
DixmierReport check_dixmier(const Matrix& gram, const GroupSystem& g);
DixmierReport check_dixmier_complex(const MatrixC& gram, const GroupSystem& g);

/// Everything the unitarization route produces for one instance: the real
/// invariant gram, its complexification when the system carries a complex
/// structure, the unitarizer and its conditioning.
struct InnerProductForm {
  Matrix gram_real;
  MatrixC gram_complex;   // empty for real instances
  MatrixC unitarizer;     // real entries for real instances
  double condition_number = 0.0;
  double invariance_residual = 0.0;
  double unitarity_residual = 0.0;
};

InnerProductForm make_inner_product_form(const FactorizationResult& fr,
                                         const FiniteProbSpace& space, const GroupSystem& g,
                                         const EquivariantMap& T);

}  // namespace equifact
