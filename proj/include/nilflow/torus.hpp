#pragma once

#include <functional>
#include <span>
#include <vector>

#include "nilflow/errors.hpp"

namespace nilflow {

/// Trigonometric polynomial on T^n,  f(x) = sum_k c_k exp(2 pi i k.x),
/// stored densely over the cube |k|_inf <= K.
class TorusFunction {
 public:
  TorusFunction() = default;
  TorusFunction(int dim, int K);

  static TorusFunction constant(int dim, Complex value);
  static TorusFunction mode(std::span<const int> k, Complex value);

  int dim() const noexcept { return dim_; }
  int truncation() const noexcept { return K_; }
  std::size_t size() const noexcept { return c_.size(); }

  /// Zero outside the stored cube.
  Complex coeff(std::span<const int> k) const;
  void set(std::span<const int> k, Complex value);
  bool contains(std::span<const int> k) const;

  std::size_t index_of(std::span<const int> k) const;
  std::vector<int> frequency(std::size_t index) const;

  std::span<Complex> data() noexcept { return c_; }
  std::span<const Complex> data() const noexcept { return c_; }

  /// Visits every stored mode in index order.
  void for_each_mode(const std::function<void(const std::vector<int>&, Complex&)>& fn);
  void for_each_mode(const std::function<void(const std::vector<int>&, const Complex&)>& fn) const;

  /// Copy with truncation K (zero padded or cut).
  TorusFunction resized(int K) const;
  /// Largest |k|_inf carrying a nonzero coefficient (0 for constants).
  int support_radius() const;

  Complex average() const;
  bool is_real(double tol) const;
  Complex evaluate(std::span<const double> x) const;

  TorusFunction& operator+=(const TorusFunction& other);
  TorusFunction& operator-=(const TorusFunction& other);
  TorusFunction& operator*=(Complex s);

  friend TorusFunction operator+(TorusFunction a, const TorusFunction& b) { return a += b; }
  friend TorusFunction operator-(TorusFunction a, const TorusFunction& b) { return a -= b; }
  friend TorusFunction operator*(Complex s, TorusFunction a) { return a *= s; }

 private:
  int dim_ = 0;
  int K_ = 0;
  std::vector<Complex> c_;
};

using TorusVectorField = std::vector<TorusFunction>;

/// Coefficient-wise multiplication by 2 pi i (k . alpha).
TorusFunction directional_derivative(std::span<const double> alpha, const TorusFunction& f);

/// Partial derivative along coordinate axis.
TorusFunction partial_derivative(const TorusFunction& f, int axis);

/// True when |k . alpha| is zero up to rounding of the dot product.
bool is_resonant(std::span<const double> alpha, std::span<const int> k);

/// Solves alpha . grad h = f - f(0) with h(0) = 0.
/// Throws NonzeroAverage when |f(0)| > tol_avg and Resonance when a nonzero
/// coefficient sits on a frequency with k . alpha = 0.
TorusFunction solve_small_divisor(std::span<const double> alpha, const TorusFunction& f,
                                  double tol_avg);

/// (sum_k |c_k|^2 (1 + |k|^2)^r)^(1/2)
double sobolev_norm(const TorusFunction& f, double r);
double sobolev_norm(const TorusVectorField& field, double r);

/// Exact product (convolution of coefficients); truncation K_f + K_g.
TorusFunction multiply(const TorusFunction& f, const TorusFunction& g);

struct TameRatioReport {
  double ratio_coarse = 0.0;  // at truncation K/2
  double ratio_fine = 0.0;    // at the corpus truncation K
  int K_coarse = 0;
  int K_fine = 0;
  double r = 0.0;
  double sigma = 0.0;
  bool plateau = false;       // relative change < 10%
};

/// max over corpus of |h|_r / |f|_{r+sigma} with h the small-divisor solution.
TameRatioReport tame_ratio_report(std::span<const double> alpha,
                                  const std::vector<TorusFunction>& corpus, double r,
                                  double sigma);

/// Grid values of (I + Du)^{-1} X(x + u(x)) on the N^n grid x = j / N,
/// row-major with the first coordinate most significant.
/// Throws NonInvertible unless sup|u| < 1/2 and sup|Du|_inf < 1/2.
std::vector<std::vector<Complex>> pullback_on_grid(const TorusVectorField& u,
                                                   const TorusVectorField& X, int N);

/// Pseudo-spectral pullback of X under id + u: sampled on a grid of 4K points
/// per dimension and re-expanded with truncation 2K, K the largest stored
/// truncation among the inputs.
TorusVectorField pullback_field(const TorusVectorField& u, const TorusVectorField& X);

/// Time average (1/T) int_0^T f(x0 + t alpha) dt in closed form.
Complex birkhoff_average(std::span<const double> alpha, const TorusFunction& f,
                         std::span<const double> x0, double T);

/// max |f| over an N^n grid.
double sup_norm_on_grid(const TorusFunction& f, int N);

}  // namespace nilflow
