#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nilflow/corpus.hpp"
#include "nilflow/nilrep.hpp"

using namespace nilflow;

namespace {

const double kPhi = std::numbers::phi;
const double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

// Normalized Hermite functions by the three-term recurrence, evaluated
// independently of the ladder formulas used by the library.
std::vector<double> hermite_functions(int count, double x) {
  std::vector<double> h(count);
  h[0] = std::pow(std::numbers::pi, -0.25) * std::exp(-x * x / 2);
  if (count > 1) h[1] = std::sqrt(2.0) * x * h[0];
  for (int j = 2; j < count; ++j) {
    h[j] = std::sqrt(2.0 / j) * x * h[j - 1] - std::sqrt((j - 1.0) / j) * h[j - 2];
  }
  return h;
}

Complex synth(const HermiteVector& v, double x) {
  const auto h = hermite_functions(static_cast<int>(v.size()), x);
  Complex s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) s += v[j] * h[j];
  return s;
}

// <h_k, f> by the trapezoid rule on [-L, L]; f decays like a Gaussian.
template <class F>
std::vector<Complex> project(F&& f, int count) {
  const double L = 14.0;
  const int n = 8000;
  const double dx = 2 * L / n;
  std::vector<Complex> out(count, 0.0);
  for (int i = 0; i <= n; ++i) {
    const double x = -L + i * dx;
    const double w = (i == 0 || i == n) ? 0.5 : 1.0;
    const Complex fx = f(x);
    const auto h = hermite_functions(count, x);
    for (int k = 0; k < count; ++k) out[k] += w * dx * h[k] * fx;
  }
  return out;
}

ActionParams golden(double mu = 0.0) { return {{1.0, kPhi}, {1.0}, mu, {}, {}}; }

NilFunction rep_mode(int n, int j, Complex c) {
  NilFunction F;
  auto& v = F.rep(n, 0);
  v.assign(j + 1, 0.0);
  v[j] = c;
  return F;
}

}  // namespace

TEST_CASE("Z acts as the scalar 2 pi i n") {
  const HermiteVector v{1.0, Complex(0.5, -1.0), 2.0};
  for (int n : {1, -3}) {
    const auto w = dpi_apply(Generator::Z, n, v);
    REQUIRE(w.size() == v.size());
    for (std::size_t j = 0; j < v.size(); ++j) CHECK(std::abs(w[j] - kI * (kTwoPi * n) * v[j]) < 1e-14);
  }
  CHECK(parse_generator("Y2") == Generator::Y2);
  CHECK_THROWS_AS(parse_generator("W"), Error);
}

TEST_CASE("x h0 and d/dx h0 against the quadrature oracle") {
  const HermiteVector h0{1.0};
  // dpi(Y2) = 2 pi i n x; divide out the scalar to get x
  const auto xh = dpi_apply(Generator::Y2, 1, h0);
  const auto xq = project([](double x) { return Complex(x * hermite_functions(1, x)[0]); }, 3);
  CHECK(std::abs(xh[1] / (kI * kTwoPi) - 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(xq[1] - 1.0 / std::sqrt(2.0)) < 1e-10);
  CHECK(std::abs(xq[0]) < 1e-10);
  const auto dh = dpi_apply(Generator::Y1, 1, h0);
  const auto dq = project([](double x) { return Complex(-x * hermite_functions(1, x)[0]); }, 3);
  CHECK(std::abs(dh[1] + 1.0 / std::sqrt(2.0)) < 1e-14);
  CHECK(std::abs(dq[1] - dh[1]) < 1e-10);
}

TEST_CASE("generic element action matches the quadrature oracle") {
  Rng rng(3);
  std::normal_distribution<double> g;
  HermiteVector v(8);
  for (auto& c : v) c = Complex(g(rng), g(rng));
  const double coeffs[3] = {0.7, -1.3, 0.4};
  const int n = 2;
  const auto w = apply_element(coeffs, n, v);
  const double h = 1e-4;
  const auto oracle = project(
      [&](double x) {
        const Complex d = (synth(v, x + h) - synth(v, x - h)) / (2 * h);
        return coeffs[0] * d + kI * (kTwoPi * n * coeffs[1]) * x * synth(v, x) +
               kI * (kTwoPi * n * coeffs[2]) * synth(v, x);
      },
      static_cast<int>(w.size()));
  for (std::size_t k = 0; k < w.size(); ++k) CHECK(std::abs(w[k] - oracle[k]) < 1e-6);
}

TEST_CASE("generators are skew-adjoint away from the truncation edge") {
  const int M = 24;
  for (int n : {1, -2, 5}) {
    for (int gen = 0; gen < 2; ++gen) {
      double coeffs[3] = {0, 0, 0};
      coeffs[gen] = 1.0;
      const Eigen::MatrixXcd G = element_matrix(coeffs, n, M);
      const Eigen::MatrixXcd S = G.topRows(M - 2).leftCols(M - 2);
      CHECK((S + S.adjoint()).cwiseAbs().maxCoeff() < 1e-12);
    }
  }
}

TEST_CASE("Heisenberg relation [dpi(Y1), dpi(Y2)] = 2 pi i n") {
  const int M = 20;
  for (int n : {1, -1, 3}) {
    const double y1[3] = {1, 0, 0}, y2[3] = {0, 1, 0};
    const Eigen::MatrixXcd A = element_matrix(y1, n, M + 1).topRows(M + 1);
    const Eigen::MatrixXcd B = element_matrix(y2, n, M + 1).topRows(M + 1);
    const Eigen::MatrixXcd C = (A * B - B * A).topLeftCorner(M - 1, M - 1);
    const Eigen::MatrixXcd want = kI * (kTwoPi * n) * Eigen::MatrixXcd::Identity(M - 1, M - 1);
    CHECK((C - want).cwiseAbs().maxCoeff() < 1e-12 * kTwoPi * M * std::abs(n));
  }
}

TEST_CASE("X1 and X2 examples and commutativity") {
  for (double mu : {0.0, 0.5}) {
    const auto P = golden(mu);
    const auto c = NilFunction::constant(2.0);
    CHECK(max_abs(apply_X1(P, c)) == 0.0);
    CHECK(max_abs(apply_X2(P, c)) == 0.0);
  }
  const auto P = golden();
  const auto F = rep_mode(1, 0, 1.0);
  const auto X2F = apply_X2(P, F);
  CHECK(std::abs(X2F.reps.at({1, 0})[0] - kI * kTwoPi * P.beta[0]) < 1e-14);

  Rng rng(6);
  const auto G = random_nil_function(rng, Truncation{6, 4, 10}, 0.3, false);
  for (double mu : {0.0, -1.0}) {
    const auto Q = golden(mu);
    const auto a = apply_X1(Q, apply_X2(Q, G));
    const auto b = apply_X2(Q, apply_X1(Q, G));
    // interior modes: drop the two ladder rows added past the input length
    NilFunction toral_diff;
    toral_diff.toral = a.toral - b.toral;
    double worst = max_abs(toral_diff);
    for (const auto& [key, v] : a.reps) {
      const auto& w = b.reps.at(key);
      for (int j = 0; j < 10; ++j) worst = std::max(worst, std::abs(v[j] - w[j]));
    }
    CHECK(worst <= 1e-12 * max_abs(a));
  }
  CHECK_THROWS_AS(apply_X1(ActionParams{{1.0, 2.0, 3.0}, {1.0}, 0.0, {}, {}}, G), Error);
}

TEST_CASE("toral part sees X1 as a directional derivative and X2 as mu X1") {
  NilFunction F;
  F.toral = TorusFunction::mode(std::vector<int>{2, -1}, 1.0);
  const auto P = golden(0.5);
  const Complex d = kI * kTwoPi * (2.0 - kPhi);
  CHECK(std::abs(apply_X1(P, F).toral.coeff(std::vector<int>{2, -1}) - d) < 1e-13);
  CHECK(std::abs(apply_X2(P, F).toral.coeff(std::vector<int>{2, -1}) - 0.5 * d) < 1e-13);
}

TEST_CASE("Sobolev norms") {
  const auto one = NilFunction::constant(1.0);
  for (double r : {0.0, 2.0}) CHECK(nil_sobolev_norm(one, r) == doctest::Approx(1.0));
  const auto F = rep_mode(-3, 4, Complex(0.0, 2.0));
  CHECK(rep_weight(-3, 4) == 1.0 + 9.0 + 3.0 * 9.0);
  for (double r : {0.5, 1.0, 3.0}) CHECK(nil_sobolev_norm(F, r) == doctest::Approx(2.0 * std::pow(37.0, r / 2)));
  Rng rng(1);
  const auto G = random_nil_function(rng, kCoarse, 0.4, false);
  double prev = 0.0;
  for (double r = 0.0; r <= 4.0; r += 0.5) {
    const double s = nil_sobolev_norm(G, r);
    CHECK(s >= prev);
    prev = s;
  }
}

TEST_CASE("pi_norm and the hyperplane minimization oracle") {
  CHECK(pi_norm(1) == 1.0);
  CHECK(pi_norm(-5) == 5.0);
  CHECK_THROWS_AS(pi_norm(0), Error);
  for (int n : {1, -2, 7}) {
    double best = 1e300;
    for (int i = -50; i <= 50; ++i)
      for (int j = -50; j <= 50; ++j) {
        const double y1 = 0.1 * i, y2 = 0.1 * j;
        best = std::min(best, std::sqrt(y1 * y1 + y2 * y2 + double(n) * n));
      }
    CHECK(pi_norm(n) == doctest::Approx(best));
  }
}

TEST_CASE("CG decay: single modes, toral corpus, random plateau") {
  std::vector<NilFunction> single;
  for (int n : {1, -2, 4, 9})
    for (int j : {0, 3, 11}) single.push_back(rep_mode(n, j, 1.0));
  const auto rep = cg_decay_report(single, 0.0, 2.0, 10);
  double oracle = 0.0;
  for (int n : {1, 2, 4, 9})
    for (int j : {0, 3, 11}) oracle = std::max(oracle, double(n) * n / rep_weight(n, j));
  CHECK(rep.ratio_coarse == doctest::Approx(oracle));
  CHECK(rep.ratio_coarse <= 1.0);

  NilFunction toral;
  toral.toral = TorusFunction::mode(std::vector<int>{1, 1}, 1.0);
  const auto t = cg_decay_report({toral}, 0.0, 2.0, 10);
  CHECK(t.toral_only);
  CHECK_FALSE(t.plateau);
  CHECK(t.ratio_fine == 0.0);
  CHECK_THROWS_AS(cg_decay_report({}, 0.0, 2.0, 10), Error);

  Rng rng(1);
  std::vector<NilFunction> corpus;
  for (int i = 0; i < 30; ++i) corpus.push_back(random_nil_function(rng, Truncation{8, 40, 32}, 0.5, false));
  const auto r = cg_decay_report(corpus, 0.0, 2.0, 20);
  CHECK(r.plateau);
  CHECK(r.partial_sum_fine > r.partial_sum_coarse);
  CHECK(r.partial_sum_fine < 2.0 * std::numbers::pi * std::numbers::pi / 6.0);
}

TEST_CASE("restrict_reps and validate") {
  Rng rng(2);
  const auto F = random_nil_function(rng, Truncation{2, 6, 4}, 0.5, false);
  const auto G = restrict_reps(F, 3);
  CHECK(G.max_n() == 3);
  CHECK(F.max_n() == 6);
  CHECK(G.reps.size() == 2 * (1 + 2 + 3));
  F.validate();
  NilFunction bad;
  bad.rep(2, 2) = {1.0};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("NilFunction text format") {
  Rng rng(5);
  const auto F = random_nil_function(rng, Truncation{3, 3, 5}, 0.3, false);
  const auto G = parse_nil_function(serialize(F));
  CHECK(max_abs_difference(F, G) == 0.0);
  const auto H = parse_nil_function("# header\ntoral 1 -1 0.5 0\nrep 2 1 3 1 -1\n");
  CHECK(H.toral.coeff(std::vector<int>{1, -1}) == Complex(0.5, 0.0));
  CHECK(H.reps.at({2, 1})[3] == Complex(1.0, -1.0));
  auto line_of = [](const char* text, SupportBounds b = {}) {
    try {
      parse_nil_function(text, b);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("toral 0 0 1 0\nrep 0 0 0 1 0\n") == 2);
  CHECK(line_of("rep 2 2 0 1 0\n") == 1);
  CHECK(line_of("\n\ntoral 5 0 1 0\n", SupportBounds{4, 0, 0}) == 3);
  CHECK(line_of("rep 1 0 9 1 0\n", SupportBounds{0, 0, 8}) == 1);
  CHECK(line_of("toral 1 x 1 0\n") == 1);
  CHECK(line_of("wave 1 0\n") == 1);
}
