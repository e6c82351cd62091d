#include "nilflow/corpus.hpp"

#include <cmath>

namespace nilflow {

namespace {

Complex gaussian(Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double re = normal(rng);
  const double im = normal(rng);
  return {re, im};
}

double norm2(const std::vector<int>& k) {
  double s = 0.0;
  for (int x : k) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

ActionParams at_mu(ActionParams params, double mu) {
  params.mu = mu;
  params.a.clear();
  params.b.clear();
  return params;
}

}  // namespace

TorusFunction random_torus_function(Rng& rng, int dim, int K, double decay, bool zero_average,
                                    bool real) {
  TorusFunction f(dim, K);
  const std::size_t n = f.size();
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = f.frequency(i);
    const Complex c = gaussian(rng) * std::exp(-decay * norm2(k));
    f.data()[i] = c;
  }
  if (real) {
    // Index of -k is the mirror position in the cube.
    for (std::size_t i = 0; i < n / 2; ++i) f.data()[n - 1 - i] = std::conj(f.data()[i]);
    f.data()[n / 2] = f.data()[n / 2].real();
  }
  if (zero_average) f.data()[n / 2] = 0.0;
  return f;
}

NilFunction random_nil_function(Rng& rng, const Truncation& t, double decay, bool zero_average) {
  NilFunction F;
  F.toral = random_torus_function(rng, 2, t.K, decay, zero_average);
  for (int m = 1; m <= t.N; ++m) {
    for (int n : {m, -m}) {
      for (int copy = 0; copy < m; ++copy) {
        HermiteVector v(t.M);
        for (int j = 0; j < t.M; ++j) {
          const double e = static_cast<double>(n) * n + m * (2.0 * j + 1.0);
          v[j] = gaussian(rng) * std::exp(-decay * std::sqrt(e));
        }
        F.reps.emplace(RepKey{n, copy}, std::move(v));
      }
    }
  }
  return F;
}

Cochain1 random_cochain(Rng& rng, const Truncation& t, double decay) {
  Cochain1 omega;
  omega.f = random_nil_function(rng, t, decay, false);
  omega.g = random_nil_function(rng, t, decay, false);
  return omega;
}

NilFunction restrict_to(const NilFunction& F, const Truncation& t) {
  NilFunction out;
  out.toral = F.toral.resized(std::min(t.K, F.toral.truncation()));
  for (const auto& [key, v] : F.reps) {
    if (std::abs(key.n) > t.N) continue;
    const auto len = std::min<std::size_t>(v.size(), static_cast<std::size_t>(t.M));
    out.reps.emplace(key, HermiteVector(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(len)));
  }
  return out;
}

Cochain1 restrict_to(const Cochain1& omega, const Truncation& t) {
  return {restrict_to(omega.f, t), restrict_to(omega.g, t)};
}

RigiditySample random_rigidity_sample(Rng& rng, const TwoStepAlgebra& algebra,
                                      const ActionParams& params, double mu, int K, double decay) {
  const int q = algebra.q();
  const int p = algebra.p();
  std::normal_distribution<double> normal(0.0, 1.0);
  RigiditySample s;
  s.H0.resize(algebra.dim());
  for (auto& h : s.H0) h.toral = random_torus_function(rng, q, K, decay, true, true);
  s.coords.mu1 = normal(rng);
  const double t = normal(rng);
  s.coords.lambda.resize(q + p);
  for (int i = 0; i < q; ++i) s.coords.lambda[i] = t * params.alpha[i];
  for (int j = 0; j < p; ++j) s.coords.lambda[q + j] = normal(rng);

  const ActionParams base = at_mu(params, mu);
  const VfCochain linear = section_s(algebra, base, mu, s.coords) + vf_delta0(algebra, base, s.H0);
  const double scale = vf_norm(linear, 0.0);
  for (auto& h : s.H0) h *= 1.0 / scale;
  s.coords.mu1 /= scale;
  for (auto& x : s.coords.lambda) x /= scale;
  return s;
}

VfCochain rigidity_perturbation(const TwoStepAlgebra& algebra, const ActionParams& params, double mu,
                                const RigiditySample& sample, double eps) {
  const int q = algebra.q();
  const int p = algebra.p();
  const ActionParams base = at_mu(params, mu);
  ActionParams moved = base;
  moved.mu = mu + eps * sample.coords.mu1;
  moved.a.resize(q);
  moved.b.resize(p);
  for (int i = 0; i < q; ++i) moved.a[i] = eps * sample.coords.lambda[i];
  for (int j = 0; j < p; ++j) moved.b[j] = eps * sample.coords.lambda[q + j];

  VectorField generator = sample.H0;
  for (auto& h : generator) h *= -eps;
  const VfCochain target = action_fields(algebra, moved);
  VfCochain out;
  out.x1 = exp_ad(algebra, generator, target.x1);
  out.x2 = exp_ad(algebra, generator, target.x2);
  out -= action_fields(algebra, base);
  return out;
}

}  // namespace nilflow
