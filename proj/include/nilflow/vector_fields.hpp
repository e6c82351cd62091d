#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nilflow/algebra.hpp"
#include "nilflow/cohomology.hpp"

namespace nilflow {

/// Vector field sum_i c[i] E_i over the basis E = (Y_1..Y_q, Z_1..Z_p) with
/// function coefficients.
using VectorField = std::vector<NilFunction>;

/// Vector-field valued 1-cochain: the values on X1 and X2.
struct VfCochain {
  VectorField x1;
  VectorField x2;

  static VfCochain zero(int dim);
  static VfCochain from_constant(const ConstantCocycle& omega);
  int dim() const noexcept { return static_cast<int>(x1.size()); }

  VfCochain& operator+=(const VfCochain& other);
  VfCochain& operator-=(const VfCochain& other);
  VfCochain& operator*=(Complex s);
  friend VfCochain operator+(VfCochain a, const VfCochain& b) { return a += b; }
  friend VfCochain operator-(VfCochain a, const VfCochain& b) { return a -= b; }
  friend VfCochain operator*(Complex s, VfCochain a) { return a *= s; }
};

double max_abs(const VfCochain& omega);
double vf_norm(const VfCochain& omega, double r);
double vf_norm(const VectorField& field, double r);

/// Real parts of the component averages; q is the number of Y components.
ConstantCocycle vf_average(const VfCochain& omega, int q);

/// Z_j coefficient of [X, sum_i h_i Y_i] = sum_{l, i} x_l h_i c(l, i, j)
/// for a constant element X with Y coefficients x.
NilFunction central_bracket(const TwoStepAlgebra& algebra, std::span<const double> x,
                            const VectorField& H, int j);

/// Scalar cochain of one basis component.
Cochain1 component(const VfCochain& omega, int i);

/// [X, H] = sum_i X(h_i) E_i + sum h_i [X, E_i] for X = X1, X2.
VfCochain vf_delta0(const TwoStepAlgebra& algebra, const ActionParams& params, const VectorField& H);

/// [X2, omega(X1)] - [X1, omega(X2)], componentwise.
VectorField vf_delta1(const TwoStepAlgebra& algebra, const ActionParams& params,
                      const VfCochain& omega);

/// Lines `x1 <i> <record>` and `x2 <i> <record>` where <record> is a
/// NilFunction line (`toral ...` or `rep ...`) for basis component i.
std::string serialize(const VfCochain& omega);
/// Throws ParseError with the line number of the offending record.
VfCochain parse_vf_cochain(std::string_view text, int dim);

struct VfSolveResult {
  VectorField H;
  /// Constant cocycle class left over: sum coords_k representative_k.
  ConstantCocycle residual;
  std::vector<double> coords;
  /// Part of the constant average outside kernel + image; zero for cocycles.
  ConstantCocycle remainder;
};

/// Triangular reduction: Y components first, then Z components with the
/// bracket terms of the solved Y part moved to the source. Averages are split
/// against the constant cohomology.
VfSolveResult vf_coboundary_solve(const TwoStepAlgebra& algebra, const ActionParams& params,
                                  const VfCochain& omega, const Witnesses& witnesses,
                                  const SolverOptions& options = {});

}  // namespace nilflow
