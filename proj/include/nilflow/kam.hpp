#pragma once

#include <string>
#include <vector>

#include "nilflow/diophantine.hpp"
#include "nilflow/torus.hpp"

namespace nilflow {

/// Newton scheme for conjugating omega + lambda_bar + beta to omega on T^n.
struct KamState {
  std::vector<double> omega;
  TorusVectorField perturbation;   // beta, fixed
  TorusVectorField residual;       // pullback of the full field minus omega
  std::vector<double> lambda_bar;  // accumulated parameter correction
  TorusVectorField displacement;   // u, with h = id + u
  std::vector<double> residual_r0;
  std::vector<double> residual_r2;
  int K = 0;                       // truncation kept after each step
};

KamState kam_initial_state(std::vector<double> omega, TorusVectorField beta, int K);

/// One Newton step: lambda_bar absorbs the residual average, the zero-average
/// part is removed by solving omega . grad v = e, the coordinate change is
/// composed and the residual recomputed from the original field.
KamState kam_step(const KamState& state);

enum class KamStatus { Converged, NoConvergence };

const char* to_string(KamStatus status);

struct KamOptions {
  int K = 64;
  int max_iter = 12;
  double floor = 1e-12;
  /// Exponent for the Diophantine witness of omega; negative means dim(omega).
  double witness_gamma = -1.0;
  int witness_K = 100;
  /// Points per dimension for the final pointwise check (at least 2K + 1).
  int verify_grid = 256;
};

struct KamOutcome {
  KamState state;
  KamStatus status = KamStatus::NoConvergence;
  std::string reason;
  DiophantineWitness witness;
  /// sup over the verification grid of |pullback - omega|.
  double conjugacy_error = 0.0;
  int verify_grid = 0;
  bool verified = false;
  /// Slope of log r_{i+1} against log r_i over the pairs above kam_noise_floor.
  double quadratic_slope = 0.0;
  int slope_pairs = 0;
};

KamOutcome kam_iterate(const std::vector<double>& omega, const TorusVectorField& beta,
                       const KamOptions& options);

/// Rounding level of the residual, 10 eps |omega|_1. The residual stalls
/// around half of this once the scheme has converged.
double kam_noise_floor(const std::vector<double>& omega);

/// sup over an N^n grid of |(I + Du)^{-1}(omega + lambda_bar + beta)(x + u) - omega|.
double conjugacy_error(const KamState& state, int N);

/// Least-squares slope of log r_{i+1} versus log r_i using pairs with both
/// values above noise_floor; NaN with fewer than two pairs.
/// Returns pair count through `pairs`.
double loglog_slope(const std::vector<double>& history, double noise_floor, int* pairs = nullptr);

/// beta = eps * (sin 2 pi (x_1 + x_2), 0, ..., 0) on T^n, n >= 2.
TorusVectorField sine_perturbation(int n, double eps);

}  // namespace nilflow
