#include "nilflow/nilrep.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <sstream>

namespace nilflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

void add_into(HermiteVector& a, const HermiteVector& b, Complex scale) {
  if (b.size() > a.size()) a.resize(b.size(), Complex(0.0, 0.0));
  for (std::size_t j = 0; j < b.size(); ++j) a[j] += scale * b[j];
}

void require_heisenberg(const ActionParams& params) {
  if (params.q() != 2 || params.p() != 1) {
    throw Error(ErrorCode::DimensionMismatch, "representation model is Heisenberg only (q = 2, p = 1)");
  }
}

}  // namespace

NilFunction NilFunction::constant(Complex c) {
  NilFunction f;
  f.toral = TorusFunction::constant(2, c);
  return f;
}

int NilFunction::max_n() const {
  int m = 0;
  for (const auto& [key, v] : reps) m = std::max(m, std::abs(key.n));
  return m;
}

int NilFunction::max_length() const {
  std::size_t m = 0;
  for (const auto& [key, v] : reps) m = std::max(m, v.size());
  return static_cast<int>(m);
}

void NilFunction::validate() const {
  if (toral.dim() != 2) throw Error(ErrorCode::DimensionMismatch, "toral part must live on T^2");
  for (const auto& [key, v] : reps) {
    if (key.n == 0) throw Error(ErrorCode::InvalidArgument, "rep summand with n = 0");
    if (key.copy < 0 || key.copy >= std::abs(key.n)) {
      throw Error(ErrorCode::InvalidArgument, "copy index outside the multiplicity of pi_n");
    }
  }
}

NilFunction& NilFunction::operator+=(const NilFunction& other) {
  toral += other.toral;
  for (const auto& [key, v] : other.reps) add_into(reps[key], v, 1.0);
  return *this;
}

NilFunction& NilFunction::operator-=(const NilFunction& other) {
  toral -= other.toral;
  for (const auto& [key, v] : other.reps) add_into(reps[key], v, -1.0);
  return *this;
}

NilFunction& NilFunction::operator*=(Complex s) {
  toral *= s;
  for (auto& [key, v] : reps)
    for (auto& c : v) c *= s;
  return *this;
}

double max_abs(const NilFunction& f) {
  double m = 0.0;
  for (const auto& c : f.toral.data()) m = std::max(m, std::abs(c));
  for (const auto& [key, v] : f.reps)
    for (const auto& c : v) m = std::max(m, std::abs(c));
  return m;
}

double max_abs_difference(const NilFunction& a, const NilFunction& b) { return max_abs(a - b); }

Generator parse_generator(std::string_view name) {
  if (name == "Y1") return Generator::Y1;
  if (name == "Y2") return Generator::Y2;
  if (name == "Z") return Generator::Z;
  throw Error(ErrorCode::InvalidArgument, "unknown generator '" + std::string(name) + "'");
}

HermiteVector dpi_apply(Generator gen, int n, const HermiteVector& v) {
  const double coeffs[3] = {gen == Generator::Y1 ? 1.0 : 0.0, gen == Generator::Y2 ? 1.0 : 0.0,
                            gen == Generator::Z ? 1.0 : 0.0};
  auto out = apply_element(coeffs, n, v);
  if (gen == Generator::Z) out.resize(v.size());
  return out;
}

HermiteVector apply_element(std::span<const double> coeffs, int n, const HermiteVector& v) {
  if (coeffs.size() != 3) throw Error(ErrorCode::DimensionMismatch, "element needs (Y1, Y2, Z) coefficients");
  const std::size_t L = v.size();
  HermiteVector out(L + 1, Complex(0.0, 0.0));
  const Complex cx = kI * (kTwoPi * n * coeffs[1]);  // multiplies x
  const double cd = coeffs[0];                        // multiplies d/dx
  const Complex cz = kI * (kTwoPi * n * coeffs[2]);
  for (std::size_t j = 0; j < L; ++j) {
    const Complex c = v[j];
    if (c == Complex(0.0, 0.0)) continue;
    const double up = std::sqrt((static_cast<double>(j) + 1.0) / 2.0);
    const double down = std::sqrt(static_cast<double>(j) / 2.0);
    // x h_j = up h_{j+1} + down h_{j-1};  d/dx h_j = down h_{j-1} - up h_{j+1}
    out[j + 1] += c * (cx * up - cd * up);
    if (j > 0) out[j - 1] += c * (cx * down + cd * down);
    out[j] += c * cz;
  }
  return out;
}

Eigen::MatrixXcd element_matrix(std::span<const double> coeffs, int n, int M) {
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(M + 1, M);
  HermiteVector e(M, Complex(0.0, 0.0));
  for (int j = 0; j < M; ++j) {
    e[j] = 1.0;
    const auto col = apply_element(coeffs, n, e);
    for (int i = 0; i <= M; ++i) A(i, j) = col[i];
    e[j] = 0.0;
  }
  return A;
}

NilFunction apply_element(std::span<const double> coeffs, const NilFunction& F) {
  if (coeffs.size() != 3) throw Error(ErrorCode::DimensionMismatch, "element needs (Y1, Y2, Z) coefficients");
  NilFunction out;
  const double y[2] = {coeffs[0], coeffs[1]};
  out.toral = directional_derivative(y, F.toral);
  for (const auto& [key, v] : F.reps) out.reps[key] = apply_element(coeffs, key.n, v);
  return out;
}

NilFunction apply_X1(const ActionParams& params, const NilFunction& F) {
  require_heisenberg(params);
  return apply_element(params.x1(), F);
}

NilFunction apply_X2(const ActionParams& params, const NilFunction& F) {
  require_heisenberg(params);
  return apply_element(params.x2(), F);
}

double rep_weight(int n, int j) {
  const double an = std::abs(static_cast<double>(n));
  return 1.0 + an * an + an * (2.0 * j + 1.0);
}

double rep_sobolev_norm(int n, const HermiteVector& v, double r) {
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (v[j] == Complex(0.0, 0.0)) continue;
    s += std::norm(v[j]) * std::pow(rep_weight(n, static_cast<int>(j)), r);
  }
  return std::sqrt(s);
}

double nil_sobolev_norm(const NilFunction& F, double r) {
  double s = std::pow(sobolev_norm(F.toral, r), 2);
  for (const auto& [key, v] : F.reps) s += std::pow(rep_sobolev_norm(key.n, v, r), 2);
  return std::sqrt(s);
}

double pi_norm(int n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "n = 0 is a toral frequency");
  return std::abs(static_cast<double>(n));
}

NilFunction restrict_reps(const NilFunction& F, int N) {
  NilFunction out;
  out.toral = F.toral;
  for (const auto& [key, v] : F.reps)
    if (std::abs(key.n) <= N) out.reps.emplace(key, v);
  return out;
}

CgDecayReport cg_decay_report(const std::vector<NilFunction>& corpus, double s, double k, int N) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus is empty");
  if (N < 1) throw Error(ErrorCode::InvalidArgument, "N must be at least 1");
  CgDecayReport rep;
  rep.s = s;
  rep.k = k;
  rep.N_coarse = N;
  rep.N_fine = 2 * N;
  rep.toral_only = std::all_of(corpus.begin(), corpus.end(),
                               [](const NilFunction& F) { return F.reps.empty(); });
  auto measure = [&](int bound) {
    double best = 0.0;
    for (const auto& F : corpus) {
      const auto G = restrict_reps(F, bound);
      const double denom = nil_sobolev_norm(G, s + k);
      if (denom == 0.0) continue;
      for (const auto& [key, v] : G.reps) {
        best = std::max(best, rep_sobolev_norm(key.n, v, s) * std::pow(pi_norm(key.n), k) / denom);
      }
    }
    return best;
  };
  rep.ratio_coarse = measure(N);
  rep.ratio_fine = measure(2 * N);
  rep.plateau = !rep.toral_only && std::abs(rep.ratio_fine - rep.ratio_coarse) < 0.1 * rep.ratio_fine;
  for (int n = 1; n <= 2 * N; ++n) {
    const double term = 2.0 * std::pow(static_cast<double>(n), -k);
    if (n <= N) rep.partial_sum_coarse += term;
    rep.partial_sum_fine += term;
  }
  return rep;
}

std::string serialize(const NilFunction& F) {
  std::ostringstream os;
  os << std::setprecision(17);
  F.toral.for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c == Complex(0.0, 0.0)) return;
    os << "toral " << k[0] << ' ' << k[1] << ' ' << c.real() << ' ' << c.imag() << '\n';
  });
  for (const auto& [key, v] : F.reps) {
    for (std::size_t j = 0; j < v.size(); ++j) {
      if (v[j] == Complex(0.0, 0.0)) continue;
      os << "rep " << key.n << ' ' << key.copy << ' ' << j << ' ' << v[j].real() << ' '
         << v[j].imag() << '\n';
    }
  }
  return os.str();
}

NilFunction parse_nil_function(std::string_view text, SupportBounds bounds) {
  struct Toral {
    int k1, k2;
    Complex c;
  };
  std::vector<Toral> toral;
  NilFunction F;
  int K = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag)) continue;
    double re = 0.0;
    double im = 0.0;
    if (tag == "toral") {
      int k1 = 0, k2 = 0;
      if (!(ls >> k1 >> k2 >> re >> im)) throw ParseError(ErrorCode::TypeError, lineno, "expected `toral k1 k2 re im`");
      if (bounds.K > 0 && (std::abs(k1) > bounds.K || std::abs(k2) > bounds.K)) {
        throw ParseError(ErrorCode::ParseError, lineno, "toral frequency beyond K");
      }
      K = std::max({K, std::abs(k1), std::abs(k2)});
      toral.push_back({k1, k2, Complex(re, im)});
    } else if (tag == "rep") {
      int n = 0, m = 0, j = 0;
      if (!(ls >> n >> m >> j >> re >> im)) throw ParseError(ErrorCode::TypeError, lineno, "expected `rep n m j re im`");
      if (n == 0) throw ParseError(ErrorCode::ParseError, lineno, "rep summand with n = 0");
      if (m < 0 || m >= std::abs(n)) throw ParseError(ErrorCode::ParseError, lineno, "copy index outside [0, |n|)");
      if (j < 0) throw ParseError(ErrorCode::ParseError, lineno, "negative Hermite index");
      if (bounds.N > 0 && std::abs(n) > bounds.N) throw ParseError(ErrorCode::ParseError, lineno, "|n| beyond N");
      if (bounds.M > 0 && j >= bounds.M) throw ParseError(ErrorCode::ParseError, lineno, "Hermite index beyond M");
      auto& v = F.rep(n, m);
      if (static_cast<int>(v.size()) <= j) v.resize(j + 1, Complex(0.0, 0.0));
      v[j] += Complex(re, im);
    } else {
      throw ParseError(ErrorCode::ParseError, lineno, "unknown record '" + tag + "'");
    }
    std::string extra;
    if (ls >> extra) throw ParseError(ErrorCode::ParseError, lineno, "trailing text");
  }
  F.toral = TorusFunction(2, K);
  for (const auto& t : toral) {
    const int k[2] = {t.k1, t.k2};
    F.toral.data()[F.toral.index_of(k)] += t.c;
  }
  return F;
}

}  // namespace nilflow
