#include "nilflow/vector_fields.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nilflow {

namespace {

void require_dim(const TwoStepAlgebra& algebra, std::size_t size) {
  if (static_cast<int>(size) != algebra.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "vector field needs one coefficient per basis element");
  }
}

VectorField scaled_sum(const VectorField& a, const VectorField& b, Complex s) {
  VectorField out = a;
  if (b.size() > out.size()) out.resize(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) out[i] += s * b[i];
  return out;
}

}  // namespace

NilFunction central_bracket(const TwoStepAlgebra& algebra, std::span<const double> x,
                            const VectorField& H, int j) {
  NilFunction out;
  for (int l = 0; l < algebra.q(); ++l) {
    if (x[l] == 0.0) continue;
    for (int i = 0; i < algebra.q(); ++i) {
      const double c = from_rational<double>(algebra.constant(l, i, j));
      if (c == 0.0) continue;
      out += Complex(x[l] * c) * H[i];
    }
  }
  return out;
}

VfCochain VfCochain::zero(int dim) {
  VfCochain out;
  out.x1.assign(dim, NilFunction());
  out.x2.assign(dim, NilFunction());
  return out;
}

VfCochain VfCochain::from_constant(const ConstantCocycle& omega) {
  const auto v1 = omega.on_x1();
  const auto v2 = omega.on_x2();
  VfCochain out = zero(static_cast<int>(v1.size()));
  for (std::size_t i = 0; i < v1.size(); ++i) {
    out.x1[i] = NilFunction::constant(v1[i]);
    out.x2[i] = NilFunction::constant(v2[i]);
  }
  return out;
}

VfCochain& VfCochain::operator+=(const VfCochain& other) {
  x1 = scaled_sum(x1, other.x1, 1.0);
  x2 = scaled_sum(x2, other.x2, 1.0);
  return *this;
}

VfCochain& VfCochain::operator-=(const VfCochain& other) {
  x1 = scaled_sum(x1, other.x1, -1.0);
  x2 = scaled_sum(x2, other.x2, -1.0);
  return *this;
}

VfCochain& VfCochain::operator*=(Complex s) {
  for (auto& f : x1) f *= s;
  for (auto& f : x2) f *= s;
  return *this;
}

double max_abs(const VfCochain& omega) {
  double m = 0.0;
  for (const auto& f : omega.x1) m = std::max(m, max_abs(f));
  for (const auto& f : omega.x2) m = std::max(m, max_abs(f));
  return m;
}

double vf_norm(const VectorField& field, double r) {
  double s = 0.0;
  for (const auto& f : field) s += std::pow(nil_sobolev_norm(f, r), 2);
  return std::sqrt(s);
}

double vf_norm(const VfCochain& omega, double r) {
  return std::hypot(vf_norm(omega.x1, r), vf_norm(omega.x2, r));
}

ConstantCocycle vf_average(const VfCochain& omega, int q) {
  const int n = omega.dim();
  std::vector<double> flat;
  flat.reserve(2 * n);
  for (const auto& f : omega.x1) flat.push_back(f.average().real());
  for (const auto& f : omega.x2) flat.push_back(f.average().real());
  // flatten order is (a1, b1, a2, b2), which is x1 then x2 component order.
  return ConstantCocycle::unflatten(flat, q, n - q);
}

std::string serialize(const VfCochain& omega) {
  std::ostringstream os;
  auto emit = [&](const char* side, const VectorField& field) {
    for (std::size_t i = 0; i < field.size(); ++i) {
      std::istringstream lines(serialize(field[i]));
      std::string line;
      while (std::getline(lines, line)) {
        if (line.empty() || line[0] == '#') continue;
        os << side << ' ' << i << ' ' << line << '\n';
      }
    }
  };
  emit("x1", omega.x1);
  emit("x2", omega.x2);
  return os.str();
}

VfCochain parse_vf_cochain(std::string_view text, int dim) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "dimension must be positive");
  // One text per component with every line position kept, so the nested
  // parser reports the line numbers of the whole file.
  std::vector<std::string> parts(2 * dim);
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    for (auto& p : parts) p += '\n';
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string side;
    if (!(ls >> side)) continue;
    int i = -1;
    if ((side != "x1" && side != "x2") || !(ls >> i)) {
      throw ParseError(ErrorCode::ParseError, lineno, "expected `x1 <i> ...` or `x2 <i> ...`");
    }
    if (i < 0 || i >= dim) throw ParseError(ErrorCode::ParseError, lineno, "component index out of range");
    std::string rest;
    std::getline(ls, rest);
    auto& target = parts[(side == "x1" ? 0 : dim) + i];
    target.pop_back();
    target += rest + '\n';
  }
  VfCochain out;
  for (int i = 0; i < dim; ++i) out.x1.push_back(parse_nil_function(parts[i]));
  for (int i = 0; i < dim; ++i) out.x2.push_back(parse_nil_function(parts[dim + i]));
  return out;
}

Cochain1 component(const VfCochain& omega, int i) { return {omega.x1.at(i), omega.x2.at(i)}; }

VfCochain vf_delta0(const TwoStepAlgebra& algebra, const ActionParams& params, const VectorField& H) {
  require_dim(algebra, H.size());
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  VfCochain out;
  for (const auto& h : H) {
    out.x1.push_back(apply_X1(params, h));
    out.x2.push_back(apply_X2(params, h));
  }
  for (int j = 0; j < algebra.p(); ++j) {
    out.x1[algebra.q() + j] += central_bracket(algebra, x1, H, j);
    out.x2[algebra.q() + j] += central_bracket(algebra, x2, H, j);
  }
  return out;
}

VectorField vf_delta1(const TwoStepAlgebra& algebra, const ActionParams& params,
                      const VfCochain& omega) {
  require_dim(algebra, omega.x1.size());
  require_dim(algebra, omega.x2.size());
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  VectorField out;
  for (int i = 0; i < algebra.dim(); ++i) {
    out.push_back(apply_X2(params, omega.x1[i]) - apply_X1(params, omega.x2[i]));
  }
  for (int j = 0; j < algebra.p(); ++j) {
    out[algebra.q() + j] += central_bracket(algebra, x2, omega.x1, j);
    out[algebra.q() + j] -= central_bracket(algebra, x1, omega.x2, j);
  }
  return out;
}

VfSolveResult vf_coboundary_solve(const TwoStepAlgebra& algebra, const ActionParams& params,
                                  const VfCochain& omega, const Witnesses& witnesses,
                                  const SolverOptions& options) {
  require_dim(algebra, omega.x1.size());
  require_dim(algebra, omega.x2.size());
  const int q = algebra.q();
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  VfSolveResult out;
  out.H.assign(algebra.dim(), NilFunction());

  auto solve_component = [&](Cochain1 c) {
    c.f -= NilFunction::constant(c.f.average());
    c.g -= NilFunction::constant(c.g.average());
    return delta0_star(params, c, witnesses, options).h;
  };
  for (int i = 0; i < q; ++i) out.H[i] = solve_component(component(omega, i));
  for (int j = 0; j < algebra.p(); ++j) {
    Cochain1 source = component(omega, q + j);
    source.f -= central_bracket(algebra, x1, out.H, j);
    source.g -= central_bracket(algebra, x2, out.H, j);
    out.H[q + j] = solve_component(source);
  }

  const auto cohomology = const_cohomology_basis<double>(algebra, params);
  const auto split = decompose_constant_cochain(algebra, params, cohomology, vf_average(omega, q));
  for (int i = 0; i < algebra.dim(); ++i) out.H[i] += NilFunction::constant(split.h[i]);
  out.residual = split.projection;
  out.coords = split.coords;
  out.remainder = split.remainder;
  return out;
}

}  // namespace nilflow
