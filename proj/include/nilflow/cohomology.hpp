#pragma once

#include "nilflow/algebra.hpp"
#include "nilflow/diophantine.hpp"
#include "nilflow/nilrep.hpp"

namespace nilflow {

/// Small-divisor certificates for the two generators: alpha is the Y part of
/// X1 (toral equation), beta the Z part of X2 - mu X1 (rep equations).
struct Witnesses {
  DiophantineWitness alpha;
  DiophantineWitness beta;
  /// Derivative loss used in measured tame ratios: alpha.gamma + 1.
  double sigma = 0.0;
};

Witnesses fit_witnesses(const ActionParams& params, int K = 100, double gamma = 1.0);

struct SolverOptions {
  /// Cocycle and average tolerance, relative to |omega|_0.
  double tol = 1e-9;
  /// Sobolev order of the measured tame ratios.
  double r = 1.0;
};

/// (X1 h, X2 h)
Cochain1 delta0(const ActionParams& params, const NilFunction& h);

/// X2 f - X1 g
NilFunction delta1(const ActionParams& params, const Cochain1& omega);

/// sqrt(|f|_r^2 + |g|_r^2)
double cochain_norm(const Cochain1& omega, double r);

struct Delta0StarResult {
  NilFunction h;
  /// |h|_r / max(|f|, |g|)_{r + sigma}
  double tame_ratio = 0.0;
};

/// Inverse of delta0 on cocycles with zero average: the toral part solves
/// X1 h = f by small divisors, each rep part is g_pi / (2 pi i n beta).
/// Throws NonzeroAverageError carrying (f_triv, g_triv), or NotACocycle.
Delta0StarResult delta0_star(const ActionParams& params, const Cochain1& omega,
                             const Witnesses& witnesses, const SolverOptions& options = {});

/// omega = delta0(H) + (f_err, g_err) + (f_triv, g_triv).
struct SplittingResult {
  NilFunction H;
  NilFunction f_err;
  NilFunction g_err;
  Complex f_triv;
  Complex g_triv;
  /// |H|_r / max(|f|, |g|)_{r + sigma}
  double ratio_H = 0.0;
  /// max(|f_err|, |g_err|)_r / |phi|_{r + sigma}, zero when phi = 0.
  double ratio_err = 0.0;
};

/// Splitting built per representation: on the torus the g part that X1
/// cannot reach is kept as g_err; in pi_n the X2 equation is solved exactly
/// and the defect phi_pi / (2 pi i n beta) is kept as f_err.
SplittingResult delta1_star_split(const ActionParams& params, const Cochain1& omega,
                                  const Witnesses& witnesses, const SolverOptions& options = {});

/// X1^2 F + X2^2 F
NilFunction leafwise_laplacian_apply(const ActionParams& params, const NilFunction& F);

struct LaplacianSolveResult {
  NilFunction h;
  /// max over summands of |L h - s| / |s| after padding.
  double relative_residual = 0.0;
  /// Largest Hermite length used.
  int padding = 0;
};

struct LaplacianOptions {
  double tol = 1e-9;            // average tolerance, relative to |s|_0
  double target = 1e-13;        // per-summand relative residual
  int initial_padding = 64;
  int max_padding = 1 << 18;
};

/// Solves L h = s per summand. Rep summands use the compressed operator
/// -(R1^* R1 + R2^* R2), R_i the rectangular Hermite matrix of X_i, padded
/// until the residual of the full operator meets the target.
LaplacianSolveResult laplacian_solve(const ActionParams& params, const NilFunction& s,
                                     const LaplacianOptions& options = {});

/// Alternative splitting: f_err = X2 h, g_err = -X1 h with L h = phi, and
/// H from delta0_star of the remaining cocycle.
SplittingResult laplacian_split(const ActionParams& params, const Cochain1& omega,
                                const Witnesses& witnesses, const SolverOptions& options = {},
                                const LaplacianOptions& laplacian = {});

/// Residual of the reconstruction omega - delta0(H) - errors - constants,
/// as max coefficient modulus over f and g.
double reconstruction_error(const ActionParams& params, const Cochain1& omega,
                            const SplittingResult& split);

}  // namespace nilflow
