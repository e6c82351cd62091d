#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nilflow {

using Rational = boost::multiprecision::cpp_rational;

/// 2-step nilpotent Lie algebra with basis Y_1..Y_q, Z_1..Z_p where
/// [Y_l, Y_i] = sum_j c(l, i, j) Z_j and every bracket with a Z vanishes.
/// Indices are 0-based in the API and 1-based in the text format.
class TwoStepAlgebra {
 public:
  TwoStepAlgebra(int q, int p);

  /// q = 2, p = 1, [Y_1, Y_2] = Z_1.
  static TwoStepAlgebra heisenberg();

  /// Text format: header `q=<int> p=<int>`, then `c <l> <i> <j> <num>/<den>`
  /// lines. Omitted entries are zero; the antisymmetric partner is filled in.
  static TwoStepAlgebra parse(std::string_view text);
  static TwoStepAlgebra load(const std::string& path);
  std::string serialize() const;

  int q() const noexcept { return q_; }
  int p() const noexcept { return p_; }
  int dim() const noexcept { return q_ + p_; }

  /// Sets c(l, i, j) = value and c(i, l, j) = -value.
  void set_bracket(int l, int i, int j, const Rational& value);
  const Rational& constant(int l, int i, int j) const;

 private:
  std::size_t index(int l, int i, int j) const;

  int q_;
  int p_;
  std::vector<Rational> c_;
};

template <class Scalar>
Scalar from_rational(const Rational& r);

/// Lie bracket of two elements given in the (Y, Z) basis.
template <class Scalar>
std::vector<Scalar> bracket(const TwoStepAlgebra& algebra, std::span<const Scalar> u,
                            std::span<const Scalar> v);

/// Coefficients of the constant-coefficient R^2 action:
///   X_1 = sum_i (alpha_i + a_i) Y_i
///   X_2 = mu * sum_i alpha_i Y_i + sum_j (beta_j + b_j) Z_j
/// The offsets (a, b) are the family parameters; empty offsets mean zero.
template <class Scalar>
struct BasicActionParams {
  std::vector<Scalar> alpha;
  std::vector<Scalar> beta;
  Scalar mu{0};
  std::vector<Scalar> a;
  std::vector<Scalar> b;

  int q() const noexcept { return static_cast<int>(alpha.size()); }
  int p() const noexcept { return static_cast<int>(beta.size()); }

  std::vector<Scalar> x1() const;
  std::vector<Scalar> x2() const;
};

using ActionParams = BasicActionParams<double>;
using ExactActionParams = BasicActionParams<Rational>;

/// Precomposition with the coordinate change X_1 -> X_1, X_2 -> X_2 + mu1 X_1
/// of the unperturbed generator; composes additively in mu1.
template <class Scalar>
BasicActionParams<Scalar> apply_coordinate_change(BasicActionParams<Scalar> params,
                                                  const Scalar& mu1);

/// Constant 1-cochain: omega(X_k) = sum a^k_i Y_i + sum b^k_j Z_j.
template <class Scalar>
struct BasicConstantCocycle {
  std::vector<Scalar> a1;
  std::vector<Scalar> b1;
  std::vector<Scalar> a2;
  std::vector<Scalar> b2;

  static BasicConstantCocycle zero(int q, int p);
  /// Flattened as (a1, b1, a2, b2).
  std::vector<Scalar> flatten() const;
  static BasicConstantCocycle unflatten(std::span<const Scalar> v, int q, int p);
  std::vector<Scalar> on_x1() const;
  std::vector<Scalar> on_x2() const;
};

using ConstantCocycle = BasicConstantCocycle<double>;
using ExactConstantCocycle = BasicConstantCocycle<Rational>;

/// (omega(X_1), omega(X_2)) = ([X_1, H], [X_2, H]).
template <class Scalar>
BasicConstantCocycle<Scalar> const_delta0(const TwoStepAlgebra& algebra,
                                          const BasicActionParams<Scalar>& params,
                                          std::span<const Scalar> h);

/// [X_2, omega(X_1)] = [X_1, omega(X_2)], exactly for rationals, within tol
/// (absolute, per Z component) for doubles.
template <class Scalar>
bool const_cocycle_check(const TwoStepAlgebra& algebra, const BasicActionParams<Scalar>& params,
                         const BasicConstantCocycle<Scalar>& omega, double tol = 0.0);

template <class Scalar>
struct ConstantCohomology {
  int dimension = 0;
  int kernel_dim = 0;  // dim Ker(const delta^1)
  int image_rank = 0;  // dim Im(const delta^0)
  std::vector<BasicConstantCocycle<Scalar>> representatives;
};

/// H^1 with coefficients in the algebra by explicit ranks of the constant
/// coboundary maps. Representatives prefer the canonical family
/// X_1 -> Y_i, X_2 -> sum alpha_i Y_i, X_2 -> Z_j when it lies in the kernel.
/// Throws DegenerateAlpha when some alpha_i is zero.
template <class Scalar>
ConstantCohomology<Scalar> const_cohomology_basis(const TwoStepAlgebra& algebra,
                                                  const BasicActionParams<Scalar>& params);

/// Pivot threshold for floating-point row reduction.
inline constexpr double kRankTolerance = 1e-10;

/// Split of a constant cochain against the cohomology representatives:
/// omega = sum coords_k rep_k + const_delta0(h) + remainder, remainder = 0
/// iff omega is a constant cocycle.
struct ConstantDecomposition {
  std::vector<double> coords;
  std::vector<double> h;
  ConstantCocycle projection;  // sum coords_k rep_k
  ConstantCocycle remainder;
};

ConstantDecomposition decompose_constant_cochain(const TwoStepAlgebra& algebra,
                                                 const ActionParams& params,
                                                 const ConstantCohomology<double>& cohomology,
                                                 const ConstantCocycle& omega);

}  // namespace nilflow
