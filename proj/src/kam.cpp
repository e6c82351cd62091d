#include "nilflow/kam.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nilflow/fourier_grid.hpp"

namespace nilflow {

const char* to_string(KamStatus status) {
  return status == KamStatus::Converged ? "converged" : "no-convergence";
}

namespace {

TorusVectorField full_field(const KamState& s) {
  const int n = static_cast<int>(s.omega.size());
  TorusVectorField F;
  F.reserve(n);
  for (int i = 0; i < n; ++i) {
    F.push_back(s.perturbation[i] + TorusFunction::constant(n, s.omega[i] + s.lambda_bar[i]));
  }
  return F;
}

void record(KamState& s) {
  s.residual_r0.push_back(sobolev_norm(s.residual, 0.0));
  s.residual_r2.push_back(sobolev_norm(s.residual, 2.0));
}

}  // namespace

KamState kam_initial_state(std::vector<double> omega, TorusVectorField beta, int K) {
  const int n = static_cast<int>(omega.size());
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "omega must be nonempty");
  if (static_cast<int>(beta.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "perturbation needs one component per dimension");
  }
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  KamState s;
  s.K = K;
  s.omega = std::move(omega);
  s.lambda_bar.assign(n, 0.0);
  for (auto& b : beta) {
    if (b.dim() != n) throw Error(ErrorCode::DimensionMismatch, "perturbation component dimension");
    s.residual.push_back(b.resized(K));
    s.displacement.emplace_back(n, K);
  }
  s.perturbation = std::move(beta);
  record(s);
  return s;
}

KamState kam_step(const KamState& state) {
  KamState s = state;
  const int n = static_cast<int>(s.omega.size());
  if (sobolev_norm(s.residual, 0.0) == 0.0) {
    record(s);
    return s;
  }

  // A parameter shift dl reaches the pulled-back field as (I + Du)^{-1} dl, so
  // dl solves avg((I + Du)^{-1}) dl = -avg(e) and v absorbs the rest.
  const int Nd = 4 * s.K + 2;
  Eigen::MatrixXd mean(n, n);
  Eigen::VectorXd avg(n);
  for (int j = 0; j < n; ++j) {
    TorusVectorField unit;
    for (int i = 0; i < n; ++i) unit.push_back(TorusFunction::constant(n, i == j ? 1.0 : 0.0));
    const auto col = pullback_on_grid(s.displacement, unit, Nd);
    for (int i = 0; i < n; ++i) {
      Complex m(0.0, 0.0);
      for (const auto& x : col[i]) m += x;
      mean(i, j) = m.real() / static_cast<double>(col[i].size());
    }
    avg(j) = s.residual[j].average().real();
  }
  const Eigen::VectorXd dl = -mean.partialPivLu().solve(avg);
  TorusVectorField shift;
  for (int i = 0; i < n; ++i) {
    s.lambda_bar[i] += dl(i);
    shift.push_back(TorusFunction::constant(n, dl(i)));
  }
  const auto moved = pullback_on_grid(s.displacement, shift, Nd);

  TorusVectorField v;
  for (int i = 0; i < n; ++i) {
    TorusFunction e = s.residual[i] + analyze(moved[i], n, Nd, s.K);
    e -= TorusFunction::constant(n, e.average());
    v.push_back(solve_small_divisor(s.omega, e, 0.0));
  }

  // u <- u + v + Du . v, the displacement of (id + u) o (id + v), cut back to K.
  const int K = s.K;
  const int N = 4 * K + 2;
  std::vector<std::vector<Complex>> vg(n);
  for (int j = 0; j < n; ++j) vg[j] = synthesize(v[j].resized(K), N);
  TorusVectorField composed;
  for (int i = 0; i < n; ++i) {
    const auto ui = s.displacement[i].resized(K);
    auto w = synthesize(ui, N);
    for (std::size_t p = 0; p < w.size(); ++p) w[p] += vg[i][p];
    for (int j = 0; j < n; ++j) {
      const auto d = synthesize(partial_derivative(ui, j), N);
      for (std::size_t p = 0; p < w.size(); ++p) w[p] += d[p] * vg[j][p];
    }
    composed.push_back(analyze(w, n, N, K));
  }
  s.displacement = std::move(composed);

  auto F = full_field(s);
  for (auto& f : F) f = f.resized(K);
  auto W = pullback_field(s.displacement, F);
  for (int i = 0; i < n; ++i) {
    W[i] = W[i].resized(s.K);
    W[i] -= TorusFunction::constant(n, s.omega[i]);
  }
  s.residual = std::move(W);
  record(s);
  return s;
}

double kam_noise_floor(const std::vector<double>& omega) {
  double l1 = 0.0;
  for (double w : omega) l1 += std::abs(w);
  return 10.0 * std::numeric_limits<double>::epsilon() * l1;
}

double conjugacy_error(const KamState& state, int N) {
  const auto values = pullback_on_grid(state.displacement, full_field(state), N);
  double err = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (const auto& x : values[i]) err = std::max(err, std::abs(x - state.omega[i]));
  }
  return err;
}

double loglog_slope(const std::vector<double>& history, double noise_floor, int* pairs) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i + 1 < history.size(); ++i) {
    if (!(history[i] > noise_floor && history[i + 1] > noise_floor)) continue;
    const double x = std::log(history[i]);
    const double y = std::log(history[i + 1]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (pairs) *pairs = m;
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  const double denom = m * sxx - sx * sx;
  return denom == 0.0 ? 0.0 : (m * sxy - sx * sy) / denom;
}

KamOutcome kam_iterate(const std::vector<double>& omega, const TorusVectorField& beta,
                       const KamOptions& options) {
  if (options.max_iter < 0) throw Error(ErrorCode::InvalidArgument, "max_iter must be nonnegative");
  if (!(options.floor > 0.0)) throw Error(ErrorCode::InvalidArgument, "floor must be positive");
  KamOutcome out;
  const double gamma =
      options.witness_gamma < 0.0 ? static_cast<double>(omega.size()) : options.witness_gamma;
  out.witness = fit_witness(omega, gamma, options.witness_K);
  if (!out.witness.valid()) throw Error(ErrorCode::Resonance, "omega has no valid Diophantine witness");

  out.state = kam_initial_state(omega, beta, options.K);
  auto last = [&] { return out.state.residual_r0.back(); };
  bool failed = false;
  for (int it = 0; it < options.max_iter && last() >= options.floor; ++it) {
    const double before = last();
    try {
      out.state = kam_step(out.state);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::NonInvertible) throw;
      out.reason = std::string("coordinate change not invertible: ") + e.what();
      failed = true;
      break;
    }
    if (!std::isfinite(last()) || last() > before) {
      out.reason = "residual did not decrease";
      failed = true;
      break;
    }
  }
  int pairs = 0;
  out.quadratic_slope = loglog_slope(out.state.residual_r0, kam_noise_floor(omega), &pairs);
  out.slope_pairs = pairs;
  if (!failed && last() >= options.floor) {
    out.reason = "max_iter reached above the floor";
    failed = true;
  }
  if (failed) {
    out.status = KamStatus::NoConvergence;
    return out;
  }

  out.verify_grid = std::max(options.verify_grid, 2 * out.state.K + 2);
  out.conjugacy_error = conjugacy_error(out.state, out.verify_grid);
  out.verified = out.conjugacy_error <= 10.0 * options.floor;
  if (out.verified) {
    out.status = KamStatus::Converged;
  } else {
    out.status = KamStatus::NoConvergence;
    out.reason = "pointwise conjugacy check failed";
  }
  return out;
}

TorusVectorField sine_perturbation(int n, double eps) {
  if (n < 2) throw Error(ErrorCode::InvalidArgument, "need at least two dimensions");
  TorusVectorField beta;
  std::vector<int> k(n, 0);
  k[0] = 1;
  k[1] = 1;
  TorusFunction b0(n, 1);
  b0.set(k, Complex(0.0, -0.5 * eps));
  k[0] = -1;
  k[1] = -1;
  b0.set(k, Complex(0.0, 0.5 * eps));
  beta.push_back(b0);
  for (int i = 1; i < n; ++i) beta.emplace_back(n, 0);
  return beta;
}

}  // namespace nilflow
