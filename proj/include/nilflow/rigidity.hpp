#pragma once

#include <vector>

#include "nilflow/vector_fields.hpp"

namespace nilflow {

/// Transversal family coordinates: mu1 moves X2 by mu1 X1, lambda = (a, b)
/// offsets the generators.
struct FamilyCoordinates {
  double mu1 = 0.0;
  std::vector<double> lambda;
};

/// Averages of Omega read as family coordinates:
///   a_i  = avg Y_i of Omega(X1)
///   mu1  = avg Y_1 of Omega(X2) / alpha_1
///   b_j  = avg Z_j of Omega(X2) - mu avg Z_j of Omega(X1)
/// The mu term removes constant coboundaries [X, h], whose Z parts on X2 are
/// mu times those on X1. Throws DegenerateAlpha when alpha_1 = 0.
FamilyCoordinates project_P(const TwoStepAlgebra& algebra, const ActionParams& params, double mu,
                            const VfCochain& omega);

/// rho_{mu + mu1, lambda} - rho_{mu, 0}: X1 -> a.Y, X2 -> mu1 alpha.Y + b.Z.
VfCochain section_s(const TwoStepAlgebra& algebra, const ActionParams& params, double mu,
                    const FamilyCoordinates& coords);

/// omega minus the error parts of its splitting.
Cochain1 delta_op(const ActionParams& params, const Cochain1& omega, const Witnesses& witnesses,
                  const SolverOptions& options = {});

/// Componentwise version: Y components are split first, then the Z components
/// after removing the bracket terms of the Y part of H.
VfCochain delta_op(const TwoStepAlgebra& algebra, const ActionParams& params, const VfCochain& omega,
                   const Witnesses& witnesses, const SolverOptions& options = {});

/// Keeps toral modes with |k|_2 <= cutoff and rep modes with
/// n^2 + |n|(2j + 1) <= cutoff^2. The zero mode always survives.
NilFunction smoothing_truncate(const NilFunction& F, double cutoff);
VfCochain smoothing_truncate(const VfCochain& omega, double cutoff);

/// Bracket of vector fields with toral coefficients:
///   [V, W] = sum_i (V w_i - W v_i) E_i + sum_{l, m, j} v_l w_m c(l, m, j) Z_j
/// where Y_l acts on toral functions as d/dx_l and Z as zero.
/// Throws InvalidArgument if a coefficient has rep components.
VectorField vf_bracket(const TwoStepAlgebra& algebra, const VectorField& V, const VectorField& W);

/// sum_n ad_H^n V / n!, summed until a term drops below rel_tol of the sum.
/// Coefficients of H and of each term below rel_tol |V|_1 are dropped so that
/// rounding dust does not widen the supports, and terms are truncated at
/// 3 K_H + K_V, which keeps every term up to ad_H^3 V whole. Throws
/// NoConvergence after max_terms.
VectorField exp_ad(const TwoStepAlgebra& algebra, const VectorField& H, const VectorField& V,
                   double rel_tol = 1e-16, int max_terms = 200);

/// Constant vector fields X1, X2 of the action as coefficient fields.
VfCochain action_fields(const TwoStepAlgebra& algebra, const ActionParams& params);

bool is_toral(const VectorField& field);
bool is_toral(const VfCochain& omega);

struct NewtonOptions {
  /// Largest admissible input norm.
  double threshold = 0.1;
  /// Sobolev order of the reported norms.
  double r = 0.0;
  /// Smoothing cutoff applied before the linear solve; negative disables it.
  double cutoff = -1.0;
  SolverOptions solver;
};

struct NewtonResult {
  FamilyCoordinates coords;
  VectorField H;
  /// exp(ad_H)(rho_mu + Omega) - rho_{mu + mu1, lambda}
  VfCochain residual;
  double input_norm = 0.0;
  double residual_norm = 0.0;
  /// False when Omega or H has rep components. The residual is then the
  /// linear defect Omega - [X, H] - s(coords), without the bracket terms.
  bool exact = true;
};

/// One linearized step around rho_mu: coords = P(Delta Omega), H solves
/// [X, H] = Delta Omega - s(coords), then the perturbation is conjugated by
/// exp(H) and compared with the adjusted family member.
NewtonResult newton_step(const TwoStepAlgebra& algebra, const ActionParams& params, double mu,
                         const VfCochain& omega, const Witnesses& witnesses,
                         const NewtonOptions& options = {});

}  // namespace nilflow
