#pragma once

#include <Eigen/Dense>

#include <compare>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nilflow/algebra.hpp"
#include "nilflow/torus.hpp"

namespace nilflow {

/// One irreducible summand pi_n of L^2 on the Heisenberg nilmanifold; copy
/// indexes the |n| equivalent summands.
struct RepKey {
  int n = 1;
  int copy = 0;
  auto operator<=>(const RepKey&) const = default;
};

using HermiteVector = std::vector<Complex>;

/// Band-limited function on the Heisenberg nilmanifold: a toral part on T^2
/// plus Hermite coefficient vectors in the Schroedinger model of each pi_n.
/// Conventions: dpi_n(Y1) = d/dx, dpi_n(Y2) = 2 pi i n x, dpi_n(Z) = 2 pi i n.
class NilFunction {
 public:
  NilFunction() : toral(2, 0) {}
  explicit NilFunction(int K) : toral(2, K) {}

  static NilFunction constant(Complex c);

  TorusFunction toral;
  std::map<RepKey, HermiteVector> reps;

  Complex average() const { return toral.average(); }
  int max_n() const;
  /// Longest Hermite vector.
  int max_length() const;
  /// Throws InvalidArgument on n = 0 or copy outside [0, |n|).
  void validate() const;

  HermiteVector& rep(int n, int copy = 0) { return reps[RepKey{n, copy}]; }

  NilFunction& operator+=(const NilFunction& other);
  NilFunction& operator-=(const NilFunction& other);
  NilFunction& operator*=(Complex s);
  friend NilFunction operator+(NilFunction a, const NilFunction& b) { return a += b; }
  friend NilFunction operator-(NilFunction a, const NilFunction& b) { return a -= b; }
  friend NilFunction operator*(Complex s, NilFunction a) { return a *= s; }
};

/// Largest coefficient modulus of a - b.
double max_abs_difference(const NilFunction& a, const NilFunction& b);
/// Largest coefficient modulus.
double max_abs(const NilFunction& f);

/// Ordered pair (value on X1, value on X2).
struct Cochain1 {
  NilFunction f;
  NilFunction g;
};

enum class Generator { Y1, Y2, Z };

Generator parse_generator(std::string_view name);

/// Output has length v.size() + 1 for Y1 and Y2 (ladder headroom).
HermiteVector dpi_apply(Generator gen, int n, const HermiteVector& v);

/// Action of sum_i c_i Y_i + c_Z Z in pi_n, coefficients in (Y1, Y2, Z) order.
HermiteVector apply_element(std::span<const double> coeffs, int n, const HermiteVector& v);

/// Dense (M + 1) x M matrix of the same action on the first M Hermite functions.
Eigen::MatrixXcd element_matrix(std::span<const double> coeffs, int n, int M);

/// Action of an element on a NilFunction: on the toral part only the Y
/// coefficients act (as a directional derivative); on rep parts as above.
NilFunction apply_element(std::span<const double> coeffs, const NilFunction& F);

/// Heisenberg only (q = 2, p = 1).
NilFunction apply_X1(const ActionParams& params, const NilFunction& F);
NilFunction apply_X2(const ActionParams& params, const NilFunction& F);

/// 1 + n^2 + |n| (2j + 1)
double rep_weight(int n, int j);

/// Toral weight (1 + |k|^2)^(r/2), rep weight rep_weight^(r/2).
double nil_sobolev_norm(const NilFunction& F, double r);

/// Norm of a single summand.
double rep_sobolev_norm(int n, const HermiteVector& v, double r);

/// |n| for the Heisenberg group; n = 0 rejected.
double pi_norm(int n);

/// Copy of F keeping only rep summands with |n| <= N.
NilFunction restrict_reps(const NilFunction& F, int N);

struct CgDecayReport {
  double s = 0.0;
  double k = 0.0;
  int N_coarse = 0;
  int N_fine = 0;
  double ratio_coarse = 0.0;
  double ratio_fine = 0.0;
  /// Every corpus member is purely toral; ratios are vacuous.
  bool toral_only = false;
  bool plateau = false;
  /// sum over 0 < |n| <= N of |n|^{-k}
  double partial_sum_coarse = 0.0;
  double partial_sum_fine = 0.0;
};

/// max over corpus and summands of |F_pi|_s |pi|^k / |F|_{s+k}, evaluated
/// with the summands |n| <= N (coarse) and |n| <= 2N (fine).
CgDecayReport cg_decay_report(const std::vector<NilFunction>& corpus, double s, double k, int N);

/// Line format: `toral k1 k2 re im` and `rep n m j re im`; `#` comments.
std::string serialize(const NilFunction& F);

/// Zero bounds are unchecked.
struct SupportBounds {
  int K = 0;
  int N = 0;
  int M = 0;
};

NilFunction parse_nil_function(std::string_view text, SupportBounds bounds = {});

}  // namespace nilflow
