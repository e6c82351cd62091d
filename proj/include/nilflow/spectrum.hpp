#pragma once

#include <string>
#include <vector>

#include "nilflow/cohomology.hpp"

namespace nilflow {

/// Spectrum of the leafwise Laplacian compressed to the first M Hermite
/// functions of pi_n, P L P = -(R1^* R1 + R2^* R2).
struct RepSpectrum {
  int n = 0;
  int M = 0;
  /// All eigenvalues, each <= 0, ordered by increasing modulus.
  std::vector<double> eigenvalues;
  /// The first `trusted` entries (lowest third) are away from the truncation edge.
  int trusted = 0;
};

RepSpectrum rep_spectrum(const ActionParams& params, int n, int M);

struct GhRepRow {
  int n = 0;             // |n|, minimum taken over both signs
  double min_M = 0.0;    // smallest trusted modulus at M
  double min_2M = 0.0;   // same at 2M
  bool near_kernel = false;
};

struct GhReport {
  int N = 0;
  int M = 0;
  int K = 0;
  /// min over 0 < |k|_inf <= K of the toral modulus (2 pi)^2 (1 + mu^2) (k . alpha)^2.
  double toral_min = 0.0;
  std::vector<int> toral_argmin;
  /// (2 pi C)^2 (1 + mu^2) |k*|^{-2 gamma} from the alpha witness.
  double toral_lower_bound = 0.0;
  bool toral_resonance = false;
  std::vector<GhRepRow> reps;
  /// min_2M ~ fit_c |n|^fit_exponent
  double fit_c = 0.0;
  double fit_exponent = 0.0;
  /// min_2M non-decreasing in |n| within 5%.
  bool monotone = false;
  bool degenerate_beta = false;
  bool certified = false;
  std::string reason;
};

/// A rep row is near-kernel when its minimum drops by more than 10% from M to
/// 2M (the mode is sliding to zero under refinement) or falls below 1e-8 of
/// the largest trusted modulus.
GhReport gh_certificate(const ActionParams& params, int N, int M, int K, const Witnesses& witnesses);

/// Basis modes on which X1 and X2 both vanish within tol: toral frequencies
/// |k|_inf <= K plus, for 0 < |n| <= N, singular values of [R1; R2] below tol,
/// counted with multiplicity |n|.
int joint_kernel_dim(const ActionParams& params, int N, int M, int K, double tol);

}  // namespace nilflow
