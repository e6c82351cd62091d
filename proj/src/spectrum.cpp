#include "nilflow/spectrum.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "nilflow/parallel.hpp"

namespace nilflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Eigen::MatrixXcd compressed_gram(const ActionParams& params, int n, int M) {
  const auto R1 = element_matrix(params.x1(), n, M);
  const auto R2 = element_matrix(params.x2(), n, M);
  return R1.adjoint() * R1 + R2.adjoint() * R2;
}

Eigen::VectorXd gram_eigenvalues(const ActionParams& params, int n, int M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(compressed_gram(params, n, M),
                                                          Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::EigenFailure, "eigensolver failed");
  return solver.eigenvalues();  // ascending, >= 0 up to rounding
}

double min_trusted(const ActionParams& params, int n, int M) {
  const auto s = rep_spectrum(params, n, M);
  return std::abs(s.eigenvalues.front());
}

}  // namespace

RepSpectrum rep_spectrum(const ActionParams& params, int n, int M) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "n = 0 is the toral part");
  if (M < 16) throw Error(ErrorCode::InvalidArgument, "M must be at least 16");
  if (params.q() != 2 || params.p() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "representation model is Heisenberg only (q = 2, p = 1)");
  }
  const auto ev = gram_eigenvalues(params, n, M);
  RepSpectrum out;
  out.n = n;
  out.M = M;
  out.eigenvalues.resize(M);
  for (int i = 0; i < M; ++i) out.eigenvalues[i] = -std::max(ev(i), 0.0);
  out.trusted = M / 3;
  return out;
}

GhReport gh_certificate(const ActionParams& params, int N, int M, int K, const Witnesses& witnesses) {
  if (N < 1 || K < 1) throw Error(ErrorCode::InvalidArgument, "N and K must be at least 1");
  GhReport rep;
  rep.N = N;
  rep.M = M;
  rep.K = K;
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  const double y1[2] = {x1[0], x1[1]};
  const double factor = 1.0 + params.mu * params.mu;

  const auto sd = min_small_divisor(y1, K);
  rep.toral_min = std::pow(kTwoPi * sd.value, 2) * factor;
  rep.toral_argmin = sd.k;
  if (witnesses.alpha.valid()) {
    double k2 = 0.0;
    for (int x : sd.k) k2 += static_cast<double>(x) * x;
    rep.toral_lower_bound = std::pow(kTwoPi * witnesses.alpha.C, 2) * factor *
                            std::pow(k2, -witnesses.alpha.gamma);
  }
  const double toral_scale = std::pow(kTwoPi, 2) * factor * (y1[0] * y1[0] + y1[1] * y1[1]);
  rep.toral_resonance = sd.value == 0.0 || rep.toral_min <= 1e-8 * toral_scale;

  rep.degenerate_beta = x2[2] - params.mu * x1[2] == 0.0;

  rep.reps.resize(N);
  parallel_for(static_cast<std::size_t>(N), [&](std::size_t i) {
    const int n = static_cast<int>(i) + 1;
    GhRepRow row;
    row.n = n;
    row.min_M = std::min(min_trusted(params, n, M), min_trusted(params, -n, M));
    const auto fine_plus = rep_spectrum(params, n, 2 * M);
    const auto fine_minus = rep_spectrum(params, -n, 2 * M);
    row.min_2M = std::min(std::abs(fine_plus.eigenvalues.front()), std::abs(fine_minus.eigenvalues.front()));
    const double top = std::abs(fine_plus.eigenvalues[fine_plus.trusted - 1]);
    row.near_kernel = row.min_2M < 0.9 * row.min_M || row.min_2M <= 1e-8 * top;
    rep.reps[i] = row;
  });

  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (const auto& row : rep.reps) {
    if (!(row.min_2M > 0.0)) continue;
    const double x = std::log(static_cast<double>(row.n));
    const double y = std::log(row.min_2M);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++m;
  }
  if (m >= 2) {
    rep.fit_exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    rep.fit_c = std::exp((sy - rep.fit_exponent * sx) / m);
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.reps.size(); ++i) {
    if (rep.reps[i].min_2M < 0.95 * rep.reps[i - 1].min_2M) rep.monotone = false;
  }

  const bool rep_kernel =
      std::any_of(rep.reps.begin(), rep.reps.end(), [](const GhRepRow& r) { return r.near_kernel; });
  rep.certified = !rep.toral_resonance && !rep_kernel;
  if (rep.toral_resonance) {
    rep.reason = "toral resonance";
  } else if (rep_kernel) {
    rep.reason = rep.degenerate_beta ? "near-kernel rep mode (beta = 0)" : "near-kernel rep mode";
  } else {
    rep.reason = "no near-zero mode except the constant";
  }
  return rep;
}

int joint_kernel_dim(const ActionParams& params, int N, int M, int K, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  int count = 0;
  for (int k1 = -K; k1 <= K; ++k1) {
    for (int k2 = -K; k2 <= K; ++k2) {
      const double w1 = kTwoPi * (k1 * x1[0] + k2 * x1[1]);
      const double w2 = kTwoPi * (k1 * x2[0] + k2 * x2[1]);
      if (std::abs(w1) <= tol && std::abs(w2) <= tol) ++count;
    }
  }
  std::vector<int> per(2 * N, 0);
  parallel_for(per.size(), [&](std::size_t i) {
    const int n = (i % 2 == 0 ? 1 : -1) * (static_cast<int>(i / 2) + 1);
    const auto ev = gram_eigenvalues(params, n, M);
    int c = 0;
    for (int j = 0; j < ev.size(); ++j)
      if (std::sqrt(std::max(ev(j), 0.0)) <= tol) ++c;
    per[i] = c * std::abs(n);
  });
  for (int c : per) count += c;
  return count;
}

}  // namespace nilflow
