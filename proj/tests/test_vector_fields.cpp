#include <Eigen/Dense>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "nilflow/corpus.hpp"
#include "nilflow/vector_fields.hpp"

using namespace nilflow;

namespace {

const double kPhi = std::numbers::phi;

ActionParams golden(double mu = 0.0) { return {{1.0, kPhi}, {1.0}, mu, {}, {}}; }

VectorField random_field(Rng& rng, const Truncation& t, bool zero_average) {
  VectorField H;
  for (int i = 0; i < 3; ++i) H.push_back(random_nil_function(rng, t, 0.4, zero_average));
  return H;
}

double max_abs(const VectorField& V) {
  double m = 0.0;
  for (const auto& f : V) m = std::max(m, nilflow::max_abs(f));
  return m;
}

double max_diff(const VectorField& a, const VectorField& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, max_abs_difference(a[i], b[i]));
  return m;
}

}  // namespace

TEST_CASE("central bracket is the Z coefficient of [X, H]") {
  const auto A = TwoStepAlgebra::heisenberg();
  Rng rng(1);
  const auto H = random_field(rng, Truncation{3, 2, 4}, false);
  const std::vector<double> x{0.3, -1.1, 2.0};
  const auto z = central_bracket(A, x, H, 0);
  // [x1 Y1 + x2 Y2, h1 Y1 + h2 Y2] = (x1 h2 - x2 h1) Z
  const auto want = Complex(0.3) * H[1] - Complex(-1.1) * H[0];
  CHECK(max_abs_difference(z, want) < 1e-15);
}

TEST_CASE("vf_delta0 examples") {
  const auto A = TwoStepAlgebra::heisenberg();
  const auto P = golden();
  // constant H = Y2: [X1, Y2] = alpha_1 Z, [X2, Y2] = 0
  VectorField H{NilFunction(), NilFunction::constant(1.0), NilFunction()};
  const auto d = vf_delta0(A, P, H);
  CHECK(std::abs(d.x1[2].average() - 1.0) < 1e-15);
  CHECK(nilflow::max_abs(d.x1[0]) == 0.0);
  CHECK(max_abs(d.x2) == 0.0);
  const auto avg = vf_average(d, 2);
  CHECK(avg.b1[0] == doctest::Approx(1.0));
  const auto c = const_delta0<double>(A, P, std::vector<double>{0, 1, 0});
  CHECK(avg.flatten() == c.flatten());
}

TEST_CASE("vf_delta1 o vf_delta0 = 0 on interior modes") {
  const auto A = TwoStepAlgebra::heisenberg();
  Rng rng(3);
  for (double mu : {0.0, 0.5, -1.0}) {
    const auto P = golden(mu);
    const auto H = random_field(rng, Truncation{6, 3, 10}, false);
    const auto d1 = vf_delta1(A, P, vf_delta0(A, P, H));
    double worst = 0.0;
    for (const auto& f : d1) {
      NilFunction t;
      t.toral = f.toral;
      worst = std::max(worst, nilflow::max_abs(t));
      for (const auto& [key, v] : f.reps)
        for (int j = 0; j < 10; ++j) worst = std::max(worst, std::abs(v[j]));
    }
    CHECK(worst <= 1e-12 * max_abs(vf_delta0(A, P, H).x1));
  }
}

TEST_CASE("coboundary solve recovers the generator") {
  const auto A = TwoStepAlgebra::heisenberg();
  Rng rng(11);
  for (double mu : {-1.0, 0.0, 0.5}) {
    const auto P = golden(mu);
    const auto w = fit_witnesses(P);
    const auto H0 = random_field(rng, Truncation{8, 4, 12}, true);
    const auto res = vf_coboundary_solve(A, P, vf_delta0(A, P, H0), w);
    CHECK(max_diff(res.H, H0) <= 1e-9 * max_abs(H0));
    for (double x : res.residual.flatten()) CHECK(std::abs(x) < 1e-12);
    for (double x : res.remainder.flatten()) CHECK(std::abs(x) < 1e-12);
  }
}

TEST_CASE("constant cocycles are fixed points") {
  const auto A = TwoStepAlgebra::heisenberg();
  const auto P = golden(0.5);
  const auto w = fit_witnesses(P);
  const auto coh = const_cohomology_basis<double>(A, P);
  for (const auto& rep : coh.representatives) {
    const auto res = vf_coboundary_solve(A, P, VfCochain::from_constant(rep), w);
    CHECK(max_abs(res.H) < 1e-15);
    const auto got = res.residual.flatten(), want = rep.flatten();
    for (std::size_t i = 0; i < want.size(); ++i) CHECK(got[i] == doctest::Approx(want[i]).epsilon(1e-12));
  }
}

TEST_CASE("mixed cochain: residual is the class of the constant part") {
  const auto A = TwoStepAlgebra::heisenberg();
  const auto P = golden();
  const auto w = fit_witnesses(P);
  const auto coh = const_cohomology_basis<double>(A, P);
  Rng rng(21);
  const auto H0 = random_field(rng, Truncation{6, 3, 8}, true);
  // constant cocycle: 2 Y1 on X1, alpha on X2, Z coefficient 0.4 on X1
  ConstantCocycle c = ConstantCocycle::zero(2, 1);
  c.a1 = {2.0, -0.5};
  c.b1 = {0.4};
  c.a2 = {0.3, 0.3 * kPhi};
  c.b2 = {-1.2};
  REQUIRE(const_cocycle_check(A, P, c, 1e-12));
  const auto omega = vf_delta0(A, P, H0) + VfCochain::from_constant(c);
  const auto res = vf_coboundary_solve(A, P, omega, w);
  // Oracle: least squares of c against [representatives | image of const delta0]
  Eigen::MatrixXd B(6, 4 + 3);
  for (int k = 0; k < 4; ++k) {
    const auto r = coh.representatives[k].flatten();
    for (int i = 0; i < 6; ++i) B(i, k) = r[i];
  }
  for (int e = 0; e < 3; ++e) {
    std::vector<double> h(3, 0.0);
    h[e] = 1.0;
    const auto d = const_delta0<double>(A, P, h).flatten();
    for (int i = 0; i < 6; ++i) B(i, 4 + e) = d[i];
  }
  const auto cf = c.flatten();
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(cf.data(), 6);
  const Eigen::VectorXd t = B.completeOrthogonalDecomposition().solve(rhs);
  Eigen::VectorXd proj = B.leftCols(4) * t.head(4);
  const auto got = res.residual.flatten();
  for (int i = 0; i < 6; ++i) CHECK(got[i] == doctest::Approx(proj(i)).epsilon(1e-10));
  // the coboundary part still comes back
  const auto back = vf_delta0(A, P, res.H) + VfCochain::from_constant(res.residual);
  CHECK(max_diff(back.x1, omega.x1) <= 1e-9 * max_abs(omega.x1));
  CHECK(max_diff(back.x2, omega.x2) <= 1e-9 * max_abs(omega.x1));
}

TEST_CASE("VfCochain text format") {
  Rng rng(2);
  VfCochain omega{random_field(rng, Truncation{2, 2, 3}, false), random_field(rng, Truncation{2, 2, 3}, false)};
  const auto back = parse_vf_cochain(serialize(omega), 3);
  CHECK(max_diff(back.x1, omega.x1) == 0.0);
  CHECK(max_diff(back.x2, omega.x2) == 0.0);
  auto line_of = [](const char* text) {
    try {
      parse_vf_cochain(text, 3);
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("x1 0 toral 0 0 1 0\nx3 0 toral 0 0 1 0\n") == 2);
  CHECK(line_of("x1 0 toral 0 0 1 0\n# c\nx2 5 toral 0 0 1 0\n") == 3);
  CHECK(line_of("x1 0 toral 0 0 1 0\n\nx2 1 rep 0 0 0 1 0\n") == 3);
  CHECK(line_of("x2 2 toral 1 0 1 0\nx1 1 rep 2 0 x 1 0\n") == 2);
  CHECK(line_of("x1 0 toral 1 1 1 0\n") == -1);
}

TEST_CASE("cochain arithmetic and norms") {
  const auto A = TwoStepAlgebra::heisenberg();
  Rng rng(4);
  VfCochain a{random_field(rng, Truncation{2, 2, 3}, false), random_field(rng, Truncation{2, 2, 3}, false)};
  const auto z = a - a;
  CHECK(nilflow::max_abs(z) == 0.0);
  CHECK(vf_norm(Complex(2.0) * a, 1.0) == doctest::Approx(2.0 * vf_norm(a, 1.0)));
  CHECK(vf_norm(VfCochain::zero(3), 0.0) == 0.0);
  CHECK(component(a, 1).f.toral.coeff(std::vector<int>{0, 0}) == a.x1[1].toral.coeff(std::vector<int>{0, 0}));
  CHECK_THROWS_AS(vf_delta0(A, golden(), VectorField(2)), Error);
}
