#include "nilflow/cohomology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace nilflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

/// X1 = alpha . Y and X2 = mu X1 + beta Z (Heisenberg).
struct Frame {
  std::vector<double> alpha;
  double mu = 0.0;
  double beta = 0.0;
};

Frame frame_of(const ActionParams& params) {
  if (params.q() != 2 || params.p() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "representation model is Heisenberg only (q = 2, p = 1)");
  }
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  Frame fr;
  fr.alpha = {x1[0], x1[1]};
  fr.mu = params.mu;
  fr.beta = x2[2] - params.mu * x1[2];
  const double scale = std::abs(x2[0]) + std::abs(x2[1]) + std::abs(x1[0]) + std::abs(x1[1]);
  for (int i = 0; i < 2; ++i) {
    if (std::abs(x2[i] - params.mu * x1[i]) > 1e-14 * scale) {
      throw Error(ErrorCode::InvalidArgument, "X2 - mu X1 must be central (offsets a need mu = 0)");
    }
  }
  return fr;
}

Complex central(int n, double beta) { return kI * (kTwoPi * n * beta); }

void require_beta(const Frame& fr) {
  if (fr.beta == 0.0) throw Error(ErrorCode::Resonance, "beta = 0 leaves rep equations unsolvable");
}

double max_norm(const Cochain1& omega, double r) {
  return std::max(nil_sobolev_norm(omega.f, r), nil_sobolev_norm(omega.g, r));
}

/// Entries (row, value) of column j of the rectangular Hermite matrix of an
/// element in pi_n.
struct Column {
  Complex up;    // row j + 1
  Complex mid;   // row j
  Complex down;  // row j - 1
};

Column column(std::span<const double> c, int n, int j) {
  const Complex cx = kI * (kTwoPi * n * c[1]);
  const Complex cz = kI * (kTwoPi * n * c[2]);
  const double up = std::sqrt((j + 1.0) / 2.0);
  const double down = std::sqrt(j / 2.0);
  return {(cx - c[0]) * up, cz, (cx + c[0]) * down};
}

/// Solves (R1^* R1 + R2^* R2) x = b, a Hermitian pentadiagonal system, by
/// banded Cholesky.
HermiteVector banded_solve(std::span<const double> c1, std::span<const double> c2, int n,
                           const HermiteVector& b) {
  const int M = static_cast<int>(b.size());
  std::vector<double> b0(M, 0.0);
  std::vector<Complex> b1(M, 0.0), b2(M, 0.0);  // B(j+1, j), B(j+2, j)
  for (const auto* c : {&c1, &c2}) {
    std::vector<Column> col(M);
    for (int j = 0; j < M; ++j) col[j] = column(*c, n, j);
    for (int j = 0; j < M; ++j) {
      b0[j] += std::norm(col[j].up) + std::norm(col[j].mid) + (j > 0 ? std::norm(col[j].down) : 0.0);
      if (j + 1 < M) {
        // column j rows {j-1, j, j+1}; column j+1 rows {j, j+1, j+2}
        b1[j] += std::conj(col[j + 1].mid) * col[j].up + std::conj(col[j + 1].down) * col[j].mid;
      }
      if (j + 2 < M) b2[j] += std::conj(col[j + 2].down) * col[j].up;
    }
  }
  std::vector<double> l0(M);
  std::vector<Complex> l1(M, 0.0), l2(M, 0.0);
  for (int j = 0; j < M; ++j) {
    double d = b0[j];
    if (j >= 1) d -= std::norm(l1[j - 1]);
    if (j >= 2) d -= std::norm(l2[j - 2]);
    if (!(d > 0.0)) throw Error(ErrorCode::NonInvertible, "compressed Laplacian is not definite");
    l0[j] = std::sqrt(d);
    if (j + 1 < M) l1[j] = (b1[j] - (j >= 1 ? l2[j - 1] * std::conj(l1[j - 1]) : 0.0)) / l0[j];
    if (j + 2 < M) l2[j] = b2[j] / l0[j];
  }
  HermiteVector y(M);
  for (int j = 0; j < M; ++j) {
    Complex v = b[j];
    if (j >= 1) v -= l1[j - 1] * y[j - 1];
    if (j >= 2) v -= l2[j - 2] * y[j - 2];
    y[j] = v / l0[j];
  }
  HermiteVector x(M);
  for (int j = M - 1; j >= 0; --j) {
    Complex v = y[j];
    if (j + 1 < M) v -= std::conj(l1[j]) * x[j + 1];
    if (j + 2 < M) v -= std::conj(l2[j]) * x[j + 2];
    x[j] = v / l0[j];
  }
  return x;
}

double l2(const HermiteVector& v) {
  double s = 0.0;
  for (const auto& c : v) s += std::norm(c);
  return std::sqrt(s);
}

}  // namespace

Witnesses fit_witnesses(const ActionParams& params, int K, double gamma) {
  const Frame fr = frame_of(params);
  Witnesses w;
  w.alpha = fit_witness(fr.alpha, gamma, K);
  const double beta[1] = {fr.beta};
  w.beta = fit_witness(beta, 0.0, 1);
  w.sigma = gamma + 1.0;
  return w;
}

Cochain1 delta0(const ActionParams& params, const NilFunction& h) {
  return {apply_X1(params, h), apply_X2(params, h)};
}

NilFunction delta1(const ActionParams& params, const Cochain1& omega) {
  return apply_X2(params, omega.f) - apply_X1(params, omega.g);
}

double cochain_norm(const Cochain1& omega, double r) {
  return std::hypot(nil_sobolev_norm(omega.f, r), nil_sobolev_norm(omega.g, r));
}

Delta0StarResult delta0_star(const ActionParams& params, const Cochain1& omega,
                             const Witnesses& witnesses, const SolverOptions& options) {
  const Frame fr = frame_of(params);
  const double scale = cochain_norm(omega, 0.0);
  Delta0StarResult out;
  if (scale == 0.0) return out;
  if (nil_sobolev_norm(delta1(params, omega), 0.0) > options.tol * scale) {
    throw Error(ErrorCode::NotACocycle, "X2 f - X1 g does not vanish");
  }
  const Complex f_triv = omega.f.average();
  const Complex g_triv = omega.g.average();
  if (std::abs(f_triv) > options.tol * scale || std::abs(g_triv) > options.tol * scale) {
    throw NonzeroAverageError(f_triv, g_triv);
  }
  const NilFunction g_base = omega.g - Complex(fr.mu) * omega.f;
  TorusFunction g0 = g_base.toral;
  g0 -= TorusFunction::constant(2, g0.average());
  if (sobolev_norm(g0, 0.0) > options.tol * scale) {
    throw Error(ErrorCode::NotACocycle, "toral part of the X2 component must vanish");
  }

  TorusFunction f0 = omega.f.toral;
  f0 -= TorusFunction::constant(2, f_triv);
  out.h.toral = solve_small_divisor(fr.alpha, f0, std::numeric_limits<double>::infinity());
  if (!g_base.reps.empty()) require_beta(fr);
  for (const auto& [key, v] : g_base.reps) {
    HermiteVector h = v;
    const Complex d = central(key.n, fr.beta);
    for (auto& c : h) c /= d;
    out.h.reps.emplace(key, std::move(h));
  }
  const double denom = max_norm(omega, options.r + witnesses.sigma);
  out.tame_ratio = denom > 0.0 ? nil_sobolev_norm(out.h, options.r) / denom : 0.0;
  return out;
}

SplittingResult delta1_star_split(const ActionParams& params, const Cochain1& omega,
                                  const Witnesses& witnesses, const SolverOptions& options) {
  const Frame fr = frame_of(params);
  SplittingResult out;
  const NilFunction phi = delta1(params, omega);
  out.f_triv = omega.f.average();
  out.g_triv = omega.g.average();
  const NilFunction g_base = omega.g - Complex(fr.mu) * omega.f;
  const Complex g_triv_base = g_base.average();

  TorusFunction f0 = omega.f.toral;
  f0 -= TorusFunction::constant(2, out.f_triv);
  out.H.toral = solve_small_divisor(fr.alpha, f0, std::numeric_limits<double>::infinity());
  NilFunction g_err_base;
  g_err_base.toral = g_base.toral;
  g_err_base.toral -= TorusFunction::constant(2, g_triv_base);

  if (!g_base.reps.empty() || !phi.reps.empty()) require_beta(fr);
  for (const auto& [key, v] : g_base.reps) {
    HermiteVector h = v;
    const Complex d = central(key.n, fr.beta);
    for (auto& c : h) c /= d;
    out.H.reps.emplace(key, std::move(h));
  }
  for (const auto& [key, v] : phi.reps) {
    HermiteVector e = v;
    const Complex d = central(key.n, fr.beta);
    for (auto& c : e) c /= d;
    out.f_err.reps.emplace(key, std::move(e));
  }
  out.g_err = g_err_base + Complex(fr.mu) * out.f_err;

  const double denom_H = max_norm(omega, options.r + witnesses.sigma);
  out.ratio_H = denom_H > 0.0 ? nil_sobolev_norm(out.H, options.r) / denom_H : 0.0;
  const double denom_err = nil_sobolev_norm(phi, options.r + witnesses.sigma);
  out.ratio_err = denom_err > 0.0
                      ? std::max(nil_sobolev_norm(out.f_err, options.r),
                                 nil_sobolev_norm(out.g_err, options.r)) /
                            denom_err
                      : 0.0;
  return out;
}

NilFunction leafwise_laplacian_apply(const ActionParams& params, const NilFunction& F) {
  return apply_X1(params, apply_X1(params, F)) + apply_X2(params, apply_X2(params, F));
}

LaplacianSolveResult laplacian_solve(const ActionParams& params, const NilFunction& s,
                                     const LaplacianOptions& options) {
  frame_of(params);
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  const double y1[2] = {x1[0], x1[1]};
  const double y2[2] = {x2[0], x2[1]};
  LaplacianSolveResult out;
  const double scale = nil_sobolev_norm(s, 0.0);
  if (scale == 0.0) return out;
  if (std::abs(s.average()) > options.tol * scale) throw NonzeroAverageError(s.average(), 0.0);

  out.h.toral = s.toral;
  out.h.toral.for_each_mode([&](const std::vector<int>& k, Complex& c) {
    if (k[0] == 0 && k[1] == 0) {
      c = 0.0;
      return;
    }
    if (c == Complex(0.0, 0.0)) return;
    const double w1 = kTwoPi * (k[0] * y1[0] + k[1] * y1[1]);
    const double w2 = kTwoPi * (k[0] * y2[0] + k[1] * y2[1]);
    const bool dead = is_resonant(y1, k) && (w2 == 0.0 || is_resonant(y2, k));
    if (dead) throw Error(ErrorCode::Resonance, "Laplacian vanishes on a toral frequency");
    c /= -(w1 * w1 + w2 * w2);
  });

  for (const auto& [key, v] : s.reps) {
    const double norm_s = l2(v);
    if (norm_s == 0.0) continue;
    int M = std::max(options.initial_padding, 2 * static_cast<int>(v.size()));
    while (true) {
      HermiteVector rhs(M, 0.0);
      for (std::size_t j = 0; j < v.size(); ++j) rhs[j] = -v[j];
      HermiteVector h = banded_solve(x1, x2, key.n, rhs);
      auto Lh = apply_element(x1, key.n, apply_element(x1, key.n, h));
      const auto L2 = apply_element(x2, key.n, apply_element(x2, key.n, h));
      for (std::size_t j = 0; j < Lh.size(); ++j) {
        Lh[j] += L2[j];
        if (j < v.size()) Lh[j] -= v[j];
      }
      const double rel = l2(Lh) / norm_s;
      if (rel <= options.target) {
        out.relative_residual = std::max(out.relative_residual, rel);
        out.padding = std::max(out.padding, M);
        out.h.reps.emplace(key, std::move(h));
        break;
      }
      if (2 * M > options.max_padding) {
        throw Error(ErrorCode::NoConvergence, "Hermite padding cap reached before the residual target");
      }
      M *= 2;
    }
  }
  return out;
}

SplittingResult laplacian_split(const ActionParams& params, const Cochain1& omega,
                                const Witnesses& witnesses, const SolverOptions& options,
                                const LaplacianOptions& laplacian) {
  SplittingResult out;
  const NilFunction phi = delta1(params, omega);
  out.f_triv = omega.f.average();
  out.g_triv = omega.g.average();
  const auto sol = laplacian_solve(params, phi, laplacian);
  out.f_err = apply_X2(params, sol.h);
  out.g_err = Complex(-1.0) * apply_X1(params, sol.h);
  Cochain1 rest{omega.f - out.f_err - NilFunction::constant(out.f_triv),
                omega.g - out.g_err - NilFunction::constant(out.g_triv)};
  out.H = delta0_star(params, rest, witnesses, options).h;

  const double denom_H = max_norm(omega, options.r + witnesses.sigma);
  out.ratio_H = denom_H > 0.0 ? nil_sobolev_norm(out.H, options.r) / denom_H : 0.0;
  const double denom_err = nil_sobolev_norm(phi, options.r + witnesses.sigma);
  out.ratio_err = denom_err > 0.0
                      ? std::max(nil_sobolev_norm(out.f_err, options.r),
                                 nil_sobolev_norm(out.g_err, options.r)) /
                            denom_err
                      : 0.0;
  return out;
}

double reconstruction_error(const ActionParams& params, const Cochain1& omega,
                            const SplittingResult& split) {
  const auto dH = delta0(params, split.H);
  const auto rf = omega.f - dH.f - split.f_err - NilFunction::constant(split.f_triv);
  const auto rg = omega.g - dH.g - split.g_err - NilFunction::constant(split.g_triv);
  return std::max(max_abs(rf), max_abs(rg));
}

}  // namespace nilflow
