#include "nilflow/rigidity.hpp"

#include <algorithm>
#include <cmath>

namespace nilflow {

namespace {

void require_dim(const TwoStepAlgebra& algebra, const VfCochain& omega) {
  if (omega.x1.size() != static_cast<std::size_t>(algebra.dim()) ||
      omega.x2.size() != static_cast<std::size_t>(algebra.dim())) {
    throw Error(ErrorCode::DimensionMismatch, "cochain needs one coefficient per basis element");
  }
}

void require_toral_model(const TwoStepAlgebra& algebra) {
  if (algebra.q() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "toral coefficients live on T^2 (q = 2)");
  }
}

double l1(const VectorField& field) {
  double s = 0.0;
  for (const auto& f : field)
    for (const auto& c : f.toral.data()) s += std::abs(c);
  return s;
}

/// Drops coefficients at or below floor and shrinks each truncation to the
/// remaining support, so repeated products do not carry rounding dust.
void prune(VectorField& field, double floor) {
  for (auto& f : field) {
    for (auto& c : f.toral.data())
      if (std::abs(c) <= floor) c = 0.0;
    f.toral = f.toral.resized(f.toral.support_radius());
  }
}

ActionParams with_mu(ActionParams params, double mu) {
  params.mu = mu;
  return params;
}

}  // namespace

FamilyCoordinates project_P(const TwoStepAlgebra& algebra, const ActionParams& params, double mu,
                            const VfCochain& omega) {
  require_dim(algebra, omega);
  const int q = algebra.q();
  const int p = algebra.p();
  if (params.alpha.empty() || params.alpha[0] == 0.0) {
    throw Error(ErrorCode::DegenerateAlpha, "alpha_1 = 0: mu1 is not readable from averages");
  }
  FamilyCoordinates c;
  c.lambda.resize(q + p);
  for (int i = 0; i < q; ++i) c.lambda[i] = omega.x1[i].average().real();
  c.mu1 = omega.x2[0].average().real() / params.alpha[0];
  for (int j = 0; j < p; ++j) {
    c.lambda[q + j] = omega.x2[q + j].average().real() - mu * omega.x1[q + j].average().real();
  }
  return c;
}

VfCochain section_s(const TwoStepAlgebra& algebra, const ActionParams& params, double /*mu*/,
                    const FamilyCoordinates& coords) {
  const int q = algebra.q();
  const int p = algebra.p();
  if (static_cast<int>(coords.lambda.size()) != q + p || params.q() != q) {
    throw Error(ErrorCode::DimensionMismatch, "lambda needs q + p entries");
  }
  VfCochain out = VfCochain::zero(q + p);
  for (int i = 0; i < q; ++i) {
    out.x1[i] = NilFunction::constant(coords.lambda[i]);
    out.x2[i] = NilFunction::constant(coords.mu1 * params.alpha[i]);
  }
  for (int j = 0; j < p; ++j) out.x2[q + j] = NilFunction::constant(coords.lambda[q + j]);
  return out;
}

Cochain1 delta_op(const ActionParams& params, const Cochain1& omega, const Witnesses& witnesses,
                  const SolverOptions& options) {
  const auto split = delta1_star_split(params, omega, witnesses, options);
  return {omega.f - split.f_err, omega.g - split.g_err};
}

VfCochain delta_op(const TwoStepAlgebra& algebra, const ActionParams& params, const VfCochain& omega,
                   const Witnesses& witnesses, const SolverOptions& options) {
  require_dim(algebra, omega);
  const int q = algebra.q();
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  VfCochain out = omega;
  VectorField H(algebra.dim());
  auto remove_errors = [&](int i, const Cochain1& source) {
    const auto split = delta1_star_split(params, source, witnesses, options);
    H[i] = split.H;
    out.x1[i] -= split.f_err;
    out.x2[i] -= split.g_err;
  };
  for (int i = 0; i < q; ++i) remove_errors(i, component(omega, i));
  for (int j = 0; j < algebra.p(); ++j) {
    Cochain1 source = component(omega, q + j);
    source.f -= central_bracket(algebra, x1, H, j);
    source.g -= central_bracket(algebra, x2, H, j);
    remove_errors(q + j, source);
  }
  // Constant parts: the scalar splits keep them whole, but the bracket terms
  // make only the constant cocycles closed, so drop the rest.
  const auto coh = const_cohomology_basis<double>(algebra, params);
  const auto dec = decompose_constant_cochain(algebra, params, coh, vf_average(out, q));
  out -= VfCochain::from_constant(dec.remainder);
  return out;
}

NilFunction smoothing_truncate(const NilFunction& F, double cutoff) {
  if (!(cutoff >= 0.0)) throw Error(ErrorCode::InvalidArgument, "cutoff must be non-negative");
  NilFunction out;
  const int K = std::min(F.toral.truncation(), static_cast<int>(std::floor(cutoff)));
  out.toral = F.toral.resized(K);
  out.toral.for_each_mode([&](const std::vector<int>& k, Complex& c) {
    double k2 = 0.0;
    for (int x : k) k2 += static_cast<double>(x) * x;
    if (k2 > cutoff * cutoff) c = 0.0;
  });
  for (const auto& [key, v] : F.reps) {
    std::size_t keep = 0;
    while (keep < v.size() && rep_weight(key.n, static_cast<int>(keep)) - 1.0 <= cutoff * cutoff) ++keep;
    if (keep > 0) out.reps[key] = HermiteVector(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(keep));
  }
  return out;
}

VfCochain smoothing_truncate(const VfCochain& omega, double cutoff) {
  VfCochain out;
  for (const auto& f : omega.x1) out.x1.push_back(smoothing_truncate(f, cutoff));
  for (const auto& f : omega.x2) out.x2.push_back(smoothing_truncate(f, cutoff));
  return out;
}

bool is_toral(const VectorField& field) {
  for (const auto& f : field)
    if (!f.reps.empty()) return false;
  return true;
}

bool is_toral(const VfCochain& omega) { return is_toral(omega.x1) && is_toral(omega.x2); }

VectorField vf_bracket(const TwoStepAlgebra& algebra, const VectorField& V, const VectorField& W) {
  require_toral_model(algebra);
  const int q = algebra.q();
  const int dim = algebra.dim();
  if (static_cast<int>(V.size()) != dim || static_cast<int>(W.size()) != dim) {
    throw Error(ErrorCode::DimensionMismatch, "vector field needs one coefficient per basis element");
  }
  if (!is_toral(V) || !is_toral(W)) {
    throw Error(ErrorCode::InvalidArgument, "bracket needs toral coefficients");
  }
  // derivative of u along the field a, using only the Y components of a
  auto along = [&](const VectorField& a, const TorusFunction& u) {
    TorusFunction s(2, 0);
    for (int l = 0; l < q; ++l) s += multiply(a[l].toral, partial_derivative(u, l));
    return s;
  };
  VectorField out(dim);
  for (int i = 0; i < dim; ++i) {
    out[i].toral = along(V, W[i].toral) - along(W, V[i].toral);
  }
  for (int j = 0; j < algebra.p(); ++j) {
    for (int l = 0; l < q; ++l) {
      for (int m = 0; m < q; ++m) {
        const double c = from_rational<double>(algebra.constant(l, m, j));
        if (c == 0.0) continue;
        out[q + j].toral += Complex(c) * multiply(V[l].toral, W[m].toral);
      }
    }
  }
  return out;
}

VectorField exp_ad(const TwoStepAlgebra& algebra, const VectorField& H, const VectorField& V,
                   double rel_tol, int max_terms) {
  VectorField sum = V;
  VectorField term = V;
  VectorField gen = H;
  const double floor = rel_tol * std::max(l1(V), 1.0);
  prune(gen, floor);
  int KH = 0;
  int KV = 0;
  for (const auto& f : gen) KH = std::max(KH, f.toral.truncation());
  for (const auto& f : V) KV = std::max(KV, f.toral.support_radius());
  const int cap = 3 * KH + KV;
  for (int n = 1; n <= max_terms; ++n) {
    term = vf_bracket(algebra, gen, term);
    for (auto& f : term) f *= 1.0 / n;
    prune(term, floor);
    for (auto& f : term)
      if (f.toral.truncation() > cap) f.toral = f.toral.resized(cap);
    for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += term[i];
    if (l1(term) <= rel_tol * l1(sum)) return sum;
  }
  throw Error(ErrorCode::NoConvergence, "exp(ad_H) series did not converge");
}

VfCochain action_fields(const TwoStepAlgebra& algebra, const ActionParams& params) {
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  if (static_cast<int>(x1.size()) != algebra.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "params do not match the algebra");
  }
  VfCochain out = VfCochain::zero(algebra.dim());
  for (int i = 0; i < algebra.dim(); ++i) {
    out.x1[i] = NilFunction::constant(x1[i]);
    out.x2[i] = NilFunction::constant(x2[i]);
  }
  return out;
}

NewtonResult newton_step(const TwoStepAlgebra& algebra, const ActionParams& params, double mu,
                         const VfCochain& omega, const Witnesses& witnesses,
                         const NewtonOptions& options) {
  require_dim(algebra, omega);
  const ActionParams base = with_mu(params, mu);
  NewtonResult out;
  out.input_norm = vf_norm(omega, options.r);
  if (out.input_norm > options.threshold) {
    throw Error(ErrorCode::ThresholdExceeded, "perturbation norm above the admissible threshold");
  }
  const VfCochain work = options.cutoff >= 0.0 ? smoothing_truncate(omega, options.cutoff) : omega;
  const VfCochain reduced = delta_op(algebra, base, work, witnesses, options.solver);
  out.coords = project_P(algebra, base, mu, reduced);
  const VfCochain s = section_s(algebra, base, mu, out.coords);
  out.H = vf_coboundary_solve(algebra, base, reduced - s, witnesses, options.solver).H;

  out.exact = is_toral(omega) && is_toral(out.H) && algebra.q() == 2;
  if (out.exact) {
    const VfCochain X = action_fields(algebra, base);
    const VfCochain moved = X + omega;
    out.residual.x1 = exp_ad(algebra, out.H, moved.x1);
    out.residual.x2 = exp_ad(algebra, out.H, moved.x2);
    out.residual -= X + s;
  } else {
    out.residual = omega - vf_delta0(algebra, base, out.H) - s;
  }
  out.residual_norm = vf_norm(out.residual, options.r);
  return out;
}

}  // namespace nilflow
