#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nilflow/rigidity.hpp"

namespace nilflow {

using Rng = std::mt19937_64;

/// Support of generated functions: toral |k|_inf <= K, reps 0 < |n| <= N
/// with all |n| copies, Hermite length M.
struct Truncation {
  int K = 16;
  int N = 10;
  int M = 32;
};

inline constexpr Truncation kCoarse{16, 10, 32};
inline constexpr Truncation kFine{32, 20, 64};

/// Gaussian coefficients scaled by exp(-decay |k|_2).
TorusFunction random_torus_function(Rng& rng, int dim, int K, double decay, bool zero_average,
                                    bool real = false);

/// Toral part as above; rep coefficient (n, j) scaled by
/// exp(-decay sqrt(n^2 + |n|(2j + 1))).
NilFunction random_nil_function(Rng& rng, const Truncation& t, double decay, bool zero_average);

Cochain1 random_cochain(Rng& rng, const Truncation& t, double decay);

/// Copy of F cut down to a smaller truncation.
NilFunction restrict_to(const NilFunction& F, const Truncation& t);
Cochain1 restrict_to(const Cochain1& omega, const Truncation& t);

/// Generator of a commuting perturbation: a real zero-average toral vector
/// field H0 of band K plus family coordinates with a parallel to alpha, scaled
/// so that the first-order perturbation s(coords) + [X, H0] has unit norm.
struct RigiditySample {
  VectorField H0;
  FamilyCoordinates coords;
};

RigiditySample random_rigidity_sample(Rng& rng, const TwoStepAlgebra& algebra,
                                      const ActionParams& params, double mu, int K = 3,
                                      double decay = 1.0);

/// exp(ad_{-eps H0}) rho_{mu + eps mu1, eps lambda} - rho_mu. Its components
/// commute, so the cocycle defect is quadratic in eps.
VfCochain rigidity_perturbation(const TwoStepAlgebra& algebra, const ActionParams& params, double mu,
                                const RigiditySample& sample, double eps);

}  // namespace nilflow
