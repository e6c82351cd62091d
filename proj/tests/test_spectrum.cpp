#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nilflow/spectrum.hpp"

using namespace nilflow;

namespace {

const double kPhi = std::numbers::phi;
const double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

ActionParams params(double a2, double beta, double mu = 0.0) { return {{1.0, a2}, {beta}, mu, {}, {}}; }

// Oracle: X1 restricted to the first M Hermite functions as a real
// tridiagonal-plus-imaginary matrix, squared by hand.
std::vector<double> oracle_spectrum(double a1, double a2, double beta, int n, int M) {
  Eigen::MatrixXcd R = Eigen::MatrixXcd::Zero(M + 1, M);
  for (int j = 0; j < M; ++j) {
    const double up = std::sqrt((j + 1) / 2.0), down = std::sqrt(j / 2.0);
    R(j + 1, j) = kI * (kTwoPi * n * a2) * up - a1 * up;
    if (j > 0) R(j - 1, j) = kI * (kTwoPi * n * a2) * down + a1 * down;
  }
  const Eigen::MatrixXcd G =
      R.adjoint() * R + std::pow(kTwoPi * n * beta, 2) * Eigen::MatrixXcd::Identity(M, M);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(G);
  std::vector<double> out;
  for (int i = 0; i < M; ++i) out.push_back(-es.eigenvalues()(i));
  return out;
}

}  // namespace

TEST_CASE("rep spectrum matches the dense oracle and is nonpositive") {
  for (int n : {1, -2, 3}) {
    const auto s = rep_spectrum(params(kPhi, 1.0), n, 32);
    const auto o = oracle_spectrum(1.0, kPhi, 1.0, n, 32);
    REQUIRE(s.eigenvalues.size() == 32);
    CHECK(s.trusted == 10);
    for (int i = 0; i < 32; ++i) {
      CHECK(s.eigenvalues[i] <= 0.0);
      CHECK(s.eigenvalues[i] == doctest::Approx(o[i]).epsilon(1e-10));
    }
    for (int i = 1; i < 32; ++i) CHECK(std::abs(s.eigenvalues[i]) >= std::abs(s.eigenvalues[i - 1]));
  }
  CHECK_THROWS_AS(rep_spectrum(params(kPhi, 1.0), 0, 32), Error);
  CHECK_THROWS_AS(rep_spectrum(params(kPhi, 1.0), 1, 8), Error);
}

TEST_CASE("changing beta shifts every eigenvalue by the central scalar") {
  const int n = 2;
  const auto a = rep_spectrum(params(kPhi, 1.0), n, 48);
  const auto b = rep_spectrum(params(kPhi, 1.6), n, 48);
  const double shift = -std::pow(kTwoPi * n, 2) * (1.6 * 1.6 - 1.0);
  for (int i = 0; i < 48; ++i) CHECK(b.eigenvalues[i] - a.eigenvalues[i] == doctest::Approx(shift).epsilon(1e-9));
}

TEST_CASE("n and -n have the same spectrum") {
  for (int n : {1, 4}) {
    const auto a = rep_spectrum(params(kPhi, 1.0), n, 40);
    const auto b = rep_spectrum(params(kPhi, 1.0), -n, 40);
    for (int i = 0; i < 40; ++i) CHECK(a.eigenvalues[i] == doctest::Approx(b.eigenvalues[i]).epsilon(1e-10));
  }
}

TEST_CASE("X1^2 part of the trusted bottom shrinks under refinement") {
  // dpi(X1) is a chirped d/dx with continuous spectrum, so the compressed
  // bottom above the central scalar decays roughly like 1/M.
  const int n = 1;
  const double central = std::pow(kTwoPi * n, 2);
  double prev = 0.0;
  for (int M : {32, 64, 128, 256}) {
    const auto s = rep_spectrum(params(kPhi, 1.0), n, M);
    const double excess = std::abs(s.eigenvalues.front()) - central;
    CHECK(excess > 0.0);
    if (prev > 0.0) {
      CHECK(excess < 0.7 * prev);
      CHECK(excess > 0.3 * prev);
    }
    prev = excess;
    for (int i = 0; i < s.trusted; ++i) CHECK(s.eigenvalues[i] <= -central * (1.0 - 1e-12));
  }
}

TEST_CASE("GH certificate for the golden action") {
  const auto P = params(kPhi, 1.0);
  const auto rep = gh_certificate(P, 20, 64, 100, fit_witnesses(P));
  CHECK(rep.certified);
  CHECK_FALSE(rep.toral_resonance);
  CHECK(rep.monotone);
  CHECK(rep.fit_exponent >= 0.9);
  CHECK(rep.reps.size() == 20);
  for (const auto& row : rep.reps) CHECK_FALSE(row.near_kernel);
  CHECK(rep.toral_min >= rep.toral_lower_bound * (1.0 - 1e-12));
}

TEST_CASE("GH certificate detects the toral resonance") {
  const auto P = params(0.5, 1.0);
  const auto rep = gh_certificate(P, 4, 32, 10, fit_witnesses(P));
  CHECK(rep.toral_resonance);
  CHECK(rep.toral_argmin == std::vector<int>{1, -2});
  CHECK_FALSE(rep.certified);
}

TEST_CASE("GH certificate with beta = 0 is degenerate") {
  ActionParams P{{1.0, kPhi}, {0.0}, 0.0, {}, {}};
  Witnesses w;
  w.alpha = fit_witness(P.alpha, 1.0, 100);
  const auto rep = gh_certificate(P, 4, 32, 100, w);
  CHECK(rep.degenerate_beta);
  CHECK_FALSE(rep.certified);
}

TEST_CASE("joint kernel dimension") {
  CHECK(joint_kernel_dim(params(kPhi, 1.0), 20, 64, 20, 1e-6) == 1);
  // alpha = (1, 0): toral modes (0, j) are killed by both generators
  CHECK(joint_kernel_dim(params(0.0, 1.0), 4, 32, 5, 1e-6) == 11);
  CHECK_THROWS_AS(joint_kernel_dim(params(kPhi, 1.0), 2, 32, 2, 0.0), Error);
}
