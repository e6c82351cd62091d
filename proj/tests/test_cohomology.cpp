#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nilflow/cohomology.hpp"
#include "nilflow/corpus.hpp"

using namespace nilflow;

namespace {

const double kPhi = std::numbers::phi;
const double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

ActionParams golden(double mu = 0.0, double beta = 1.0) { return {{1.0, kPhi}, {beta}, mu, {}, {}}; }

NilFunction rep_mode(int n, int j, Complex c) {
  NilFunction F;
  auto& v = F.rep(n, 0);
  v.assign(j + 1, 0.0);
  v[j] = c;
  return F;
}

Eigen::VectorXcd as_vector(const HermiteVector& v, int size) {
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(size);
  for (std::size_t j = 0; j < v.size() && static_cast<int>(j) < size; ++j) out(j) = v[j];
  return out;
}

// Dense generator matrix of sum c_i Y_i + c_Z Z on the first M Hermite
// functions, built from the ladder relations x = (a + a^*)/sqrt2 and
// d/dx = (a - a^*)/sqrt2.
Eigen::MatrixXcd ladder_matrix(double y1, double y2, double z, int n, int M) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M + 1, M);
  const Complex cx = kI * (kTwoPi * n * y2);
  for (int j = 0; j < M; ++j) {
    const double up = std::sqrt((j + 1) / 2.0), down = std::sqrt(j / 2.0);
    A(j + 1, j) += cx * up - y1 * up;
    if (j > 0) A(j - 1, j) += cx * down + y1 * down;
    A(j, j) += kI * (kTwoPi * n * z);
  }
  return A;
}

double rel_error(const NilFunction& a, const NilFunction& b) { return max_abs_difference(a, b) / max_abs(b); }

}  // namespace

TEST_CASE("witness frame") {
  const auto w = fit_witnesses(golden(0.5, 2.0));
  CHECK(w.alpha.valid());
  CHECK(w.beta.C == doctest::Approx(2.0));
  CHECK(w.sigma == doctest::Approx(w.alpha.gamma + 1.0));
  ActionParams offsets{{1.0, kPhi}, {1.0}, 0.5, {0.1, 0.0}, {}};
  CHECK_THROWS_AS(fit_witnesses(offsets), Error);
}

TEST_CASE("delta0 examples") {
  const auto P = golden();
  const auto c = delta0(P, NilFunction::constant(3.0));
  CHECK(max_abs(c.f) == 0.0);
  CHECK(max_abs(c.g) == 0.0);
  NilFunction h;
  h.toral = TorusFunction::mode(std::vector<int>{1, 2}, 0.5);
  const auto t = delta0(P, h);
  CHECK(std::abs(t.f.toral.coeff(std::vector<int>{1, 2}) - kI * kTwoPi * (1.0 + 2.0 * kPhi) * 0.5) < 1e-13);
  CHECK(max_abs(t.g) == 0.0);
  const auto r = delta0(golden(0.0, 1.5), rep_mode(-2, 3, 1.0));
  CHECK(std::abs(r.g.reps.at({-2, 0})[3] - kI * kTwoPi * (-2.0) * 1.5) < 1e-13);
}

TEST_CASE("delta1 o delta0 = 0 on interior modes") {
  Rng rng(4);
  for (double mu : {-1.0, 0.0, 0.5}) {
    const auto P = golden(mu);
    for (int s = 0; s < 5; ++s) {
      const auto h = random_nil_function(rng, Truncation{8, 5, 12}, 0.3, false);
      const auto phi = delta1(P, delta0(P, h));
      // the two ladder rows past the input length see truncation
      double worst = 0.0;
      NilFunction t;
      t.toral = phi.toral;
      worst = max_abs(t);
      for (const auto& [key, v] : phi.reps)
        for (int j = 0; j < 12; ++j) worst = std::max(worst, std::abs(v[j]));
      CHECK(worst <= 1e-12 * max_abs(delta0(P, h).f));
    }
  }
}

TEST_CASE("delta1 examples and matrix-assembly oracle") {
  const auto P = golden();
  NilFunction g;
  g.toral = TorusFunction::mode(std::vector<int>{2, 1}, 1.0);
  const auto phi = delta1(P, Cochain1{NilFunction(), g});
  CHECK(rel_error(phi, (-1.0) * apply_X1(P, g)) < 1e-15);

  Rng rng(8);
  for (double mu : {0.0, 0.7}) {
    const auto Q = golden(mu, 1.3);
    const auto w = random_cochain(rng, Truncation{4, 3, 8}, 0.3);
    const auto out = delta1(Q, w);
    const auto x1 = Q.x1(), x2 = Q.x2();
    for (const auto& [key, v] : out.reps) {
      const int M = 8;
      const Eigen::VectorXcd fv = as_vector(w.f.reps.at(key), M), gv = as_vector(w.g.reps.at(key), M);
      const Eigen::VectorXcd want = ladder_matrix(x2[0], x2[1], x2[2], key.n, M) * fv -
                                    ladder_matrix(x1[0], x1[1], x1[2], key.n, M) * gv;
      CHECK((as_vector(v, M + 1) - want).cwiseAbs().maxCoeff() < 1e-12 * (1.0 + want.cwiseAbs().maxCoeff()));
    }
    // toral: X2 acts as mu X1
    auto want = directional_derivative(std::vector<double>{mu * 1.0, mu * kPhi}, w.f.toral);
    want -= directional_derivative(std::vector<double>{1.0, kPhi}, w.g.toral);
    NilFunction d;
    d.toral = out.toral - want;
    CHECK(max_abs(d) < 1e-12);
  }
}

TEST_CASE("delta0_star examples") {
  const auto P = golden();
  const auto w = fit_witnesses(P);
  const auto z = delta0_star(P, Cochain1{}, w);
  CHECK(max_abs(z.h) == 0.0);
  try {
    delta0_star(P, Cochain1{NilFunction::constant(1.5), NilFunction::constant(-0.5)}, w);
    FAIL("expected NonzeroAverage");
  } catch (const NonzeroAverageError& e) {
    CHECK(e.code() == ErrorCode::NonzeroAverage);
    CHECK(e.f_triv() == Complex(1.5));
    CHECK(e.g_triv() == Complex(-0.5));
  }
  Rng rng(2);
  const auto bad = random_cochain(rng, Truncation{4, 3, 8}, 0.3);
  try {
    delta0_star(P, bad, w);
    FAIL("expected NotACocycle");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotACocycle);
  }
}

TEST_CASE("delta0_star o delta0 = id minus constants") {
  Rng rng(10);
  for (double mu : {-1.0, -0.5, 0.0, 0.5, 1.0}) {
    const auto P = golden(mu);
    const auto w = fit_witnesses(P);
    for (int s = 0; s < 4; ++s) {
      const auto h0 = random_nil_function(rng, Truncation{16, 6, 24}, 0.4, false);
      const auto res = delta0_star(P, delta0(P, h0), w);
      auto h0c = h0;
      h0c.toral.set(std::vector<int>{0, 0}, 0.0);
      CHECK(rel_error(res.h, h0c) <= 1e-10);
      CHECK(res.tame_ratio > 0.0);
    }
  }
}

TEST_CASE("splitting of a cocycle has no error part") {
  Rng rng(3);
  const auto P = golden(0.5);
  const auto w = fit_witnesses(P);
  const auto h0 = random_nil_function(rng, Truncation{10, 5, 16}, 0.4, true);
  auto omega = delta0(P, h0);
  omega.f.toral += TorusFunction::constant(2, 0.25);
  omega.g.toral += TorusFunction::constant(2, -0.75);
  // constants are cocycles too
  const auto split = delta1_star_split(P, omega, w);
  CHECK(max_abs(split.f_err) <= 1e-12 * max_abs(omega.f));
  CHECK(max_abs(split.g_err) <= 1e-12 * max_abs(omega.f));
  CHECK(split.f_triv == Complex(0.25));
  CHECK(split.g_triv == Complex(-0.75));
  CHECK(rel_error(split.H, h0) <= 1e-10);
  CHECK(reconstruction_error(P, omega, split) <= 1e-12 * max_abs(omega.f));
}

TEST_CASE("single rep mode in f is pure error") {
  const auto P = golden(0.0, 1.7);
  const auto w = fit_witnesses(P);
  const Cochain1 omega{rep_mode(3, 2, Complex(1.0, 2.0)), NilFunction()};
  const auto split = delta1_star_split(P, omega, w);
  CHECK(max_abs(split.H) == 0.0);
  // phi = X2 f = 2 pi i n beta f, divided back by the same scalar
  CHECK(rel_error(split.f_err, omega.f) < 1e-15);
  CHECK(reconstruction_error(P, omega, split) < 1e-15);
}

TEST_CASE("random splittings: reconstruction, defining property, stable error constant") {
  Rng rng(1);
  for (double mu : {0.0, -0.5}) {
    const auto P = golden(mu);
    const auto w = fit_witnesses(P);
    double coarse = 0.0, fine = 0.0;
    for (int s = 0; s < 10; ++s) {
      const auto omega = random_cochain(rng, kFine, 0.5);
      const auto small = restrict_to(omega, kCoarse);
      const auto split = delta1_star_split(P, omega, w);
      const double scale = std::max(max_abs(omega.f), max_abs(omega.g));
      CHECK(reconstruction_error(P, omega, split) <= 1e-10 * scale);
      const auto phi = delta1(P, omega);
      CHECK(max_abs_difference(delta1(P, Cochain1{split.f_err, split.g_err}), phi) <= 1e-10 * max_abs(phi));
      fine = std::max(fine, split.ratio_err);
      coarse = std::max(coarse, delta1_star_split(P, small, w).ratio_err);
    }
    CHECK(std::abs(fine - coarse) < 0.1 * fine);
  }
}

TEST_CASE("leafwise Laplacian examples") {
  const auto P = golden();
  CHECK(max_abs(leafwise_laplacian_apply(P, NilFunction::constant(2.0))) == 0.0);
  NilFunction t;
  t.toral = TorusFunction::mode(std::vector<int>{1, -1}, 1.0);
  const double ka = 1.0 - kPhi;
  for (double mu : {0.0, 0.5}) {
    const auto L = leafwise_laplacian_apply(golden(mu), t);
    CHECK(std::abs(L.toral.coeff(std::vector<int>{1, -1}) + std::pow(kTwoPi * ka, 2) * (1.0 + mu * mu)) < 1e-11);
  }
  // rep mode: A^2 - (2 pi n beta)^2 with A the X1 matrix
  const int M = 10, n = 2;
  const double beta = 1.3;
  const auto Q = golden(0.0, beta);
  NilFunction F;
  F.rep(n, 0) = HermiteVector(M, 0.0);
  for (int j = 0; j < M; ++j) F.rep(n, 0)[j] = Complex(1.0 / (j + 1), 0.1 * j);
  const auto LF = leafwise_laplacian_apply(Q, F);
  const Eigen::MatrixXcd A1 = ladder_matrix(1.0, kPhi, 0.0, n, M + 1).topRows(M + 2);
  const Eigen::MatrixXcd A0 = ladder_matrix(1.0, kPhi, 0.0, n, M);
  const Eigen::VectorXcd want =
      A1 * (A0 * as_vector(F.reps.at({n, 0}), M)) - std::pow(kTwoPi * n * beta, 2) * as_vector(F.reps.at({n, 0}), M + 2);
  CHECK((as_vector(LF.reps.at({n, 0}), M + 2) - want).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("laplacian_solve examples") {
  const auto P = golden();
  const auto z = laplacian_solve(P, NilFunction());
  CHECK(max_abs(z.h) == 0.0);
  NilFunction s;
  s.toral = TorusFunction::mode(std::vector<int>{2, 3}, 1.0);
  const auto r = laplacian_solve(P, s);
  const double ka = 2.0 + 3.0 * kPhi;
  CHECK(std::abs(r.h.toral.coeff(std::vector<int>{2, 3}) + 1.0 / std::pow(kTwoPi * ka, 2)) < 1e-15);
  CHECK_THROWS_AS(laplacian_solve(P, NilFunction::constant(1.0)), Error);
  Rng rng(7);
  auto rs = random_nil_function(rng, Truncation{4, 3, 8}, 0.3, true);
  const auto sol = laplacian_solve(P, rs);
  CHECK(sol.relative_residual <= 1e-13);
}

TEST_CASE("direct and Laplacian splittings agree up to a cocycle") {
  Rng rng(5);
  const auto P = golden();
  const auto w = fit_witnesses(P);
  for (int s = 0; s < 5; ++s) {
    const auto omega = random_cochain(rng, Truncation{8, 4, 16}, 0.5);
    const auto a = delta1_star_split(P, omega, w);
    const auto b = laplacian_split(P, omega, w);
    const double scale = std::max(max_abs(omega.f), max_abs(omega.g));
    CHECK(reconstruction_error(P, omega, a) <= 1e-9 * scale);
    CHECK(reconstruction_error(P, omega, b) <= 1e-9 * scale);
    const Cochain1 diff{a.f_err - b.f_err, a.g_err - b.g_err};
    CHECK(max_abs(delta1(P, diff)) <= 1e-9 * scale);
    CHECK(a.f_triv == b.f_triv);
    CHECK(a.g_triv == b.g_triv);
  }
}
