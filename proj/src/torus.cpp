#include "nilflow/torus.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "nilflow/fourier_grid.hpp"
#include "nilflow/parallel.hpp"

namespace nilflow {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
const Complex kI(0.0, 1.0);

std::size_t cube_size(int dim, int K) {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(2 * K + 1);
  return total;
}

void require_same_dim(const TorusFunction& a, const TorusFunction& b) {
  if (a.dim() != b.dim()) throw Error(ErrorCode::DimensionMismatch, "torus dimensions differ");
}

double dot(std::span<const double> alpha, const std::vector<int>& k) {
  double s = 0.0;
  for (std::size_t i = 0; i < k.size(); ++i) s += alpha[i] * k[i];
  return s;
}

void require_alpha(std::span<const double> alpha, const TorusFunction& f) {
  if (static_cast<int>(alpha.size()) != f.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "frequency vector length differs from torus dimension");
  }
}

}  // namespace

TorusFunction::TorusFunction(int dim, int K) : dim_(dim), K_(K) {
  if (dim < 1) throw Error(ErrorCode::InvalidArgument, "torus dimension must be positive");
  if (K < 0) throw Error(ErrorCode::InvalidArgument, "truncation must be nonnegative");
  c_.assign(cube_size(dim, K), Complex(0.0, 0.0));
}

TorusFunction TorusFunction::constant(int dim, Complex value) {
  TorusFunction f(dim, 0);
  f.c_[0] = value;
  return f;
}

TorusFunction TorusFunction::mode(std::span<const int> k, Complex value) {
  int K = 0;
  for (int x : k) K = std::max(K, std::abs(x));
  TorusFunction f(static_cast<int>(k.size()), K);
  f.set(k, value);
  return f;
}

bool TorusFunction::contains(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) return false;
  return std::all_of(k.begin(), k.end(), [&](int x) { return std::abs(x) <= K_; });
}

std::size_t TorusFunction::index_of(std::span<const int> k) const {
  if (!contains(k)) throw Error(ErrorCode::InvalidArgument, "frequency outside the stored cube");
  std::size_t idx = 0;
  for (int x : k) idx = idx * (2 * K_ + 1) + static_cast<std::size_t>(x + K_);
  return idx;
}

std::vector<int> TorusFunction::frequency(std::size_t index) const {
  std::vector<int> k(dim_);
  for (int d = dim_ - 1; d >= 0; --d) {
    k[d] = static_cast<int>(index % (2 * K_ + 1)) - K_;
    index /= (2 * K_ + 1);
  }
  return k;
}

Complex TorusFunction::coeff(std::span<const int> k) const {
  if (!contains(k)) {
    if (static_cast<int>(k.size()) != dim_) throw Error(ErrorCode::DimensionMismatch, "frequency length");
    return {0.0, 0.0};
  }
  return c_[index_of(k)];
}

void TorusFunction::set(std::span<const int> k, Complex value) { c_[index_of(k)] = value; }

void TorusFunction::for_each_mode(const std::function<void(const std::vector<int>&, Complex&)>& fn) {
  std::vector<int> k(dim_, -K_);
  for (auto& c : c_) {
    fn(k, c);
    for (int d = dim_ - 1; d >= 0; --d) {
      if (++k[d] <= K_) break;
      k[d] = -K_;
    }
  }
}

void TorusFunction::for_each_mode(
    const std::function<void(const std::vector<int>&, const Complex&)>& fn) const {
  std::vector<int> k(dim_, -K_);
  for (const auto& c : c_) {
    fn(k, c);
    for (int d = dim_ - 1; d >= 0; --d) {
      if (++k[d] <= K_) break;
      k[d] = -K_;
    }
  }
}

TorusFunction TorusFunction::resized(int K) const {
  TorusFunction out(dim_, K);
  for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c != Complex(0.0, 0.0) && out.contains(k)) out.set(k, c);
  });
  return out;
}

int TorusFunction::support_radius() const {
  int r = 0;
  for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c == Complex(0.0, 0.0)) return;
    for (int x : k) r = std::max(r, std::abs(x));
  });
  return r;
}

Complex TorusFunction::average() const {
  if (c_.empty()) return {0.0, 0.0};
  return c_[c_.size() / 2];
}

bool TorusFunction::is_real(double tol) const {
  std::vector<int> minus(dim_);
  bool real = true;
  for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    for (int d = 0; d < dim_; ++d) minus[d] = -k[d];
    if (std::abs(c - std::conj(coeff(minus))) > tol) real = false;
  });
  return real;
}

Complex TorusFunction::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw Error(ErrorCode::DimensionMismatch, "point dimension");
  Complex sum(0.0, 0.0);
  for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c == Complex(0.0, 0.0)) return;
    sum += c * std::exp(kI * (kTwoPi * dot(x, k)));
  });
  return sum;
}

TorusFunction& TorusFunction::operator+=(const TorusFunction& other) {
  require_same_dim(*this, other);
  if (other.K_ > K_) *this = resized(other.K_);
  other.for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c != Complex(0.0, 0.0)) c_[index_of(k)] += c;
  });
  return *this;
}

TorusFunction& TorusFunction::operator-=(const TorusFunction& other) {
  require_same_dim(*this, other);
  if (other.K_ > K_) *this = resized(other.K_);
  other.for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c != Complex(0.0, 0.0)) c_[index_of(k)] -= c;
  });
  return *this;
}

TorusFunction& TorusFunction::operator*=(Complex s) {
  for (auto& c : c_) c *= s;
  return *this;
}

TorusFunction directional_derivative(std::span<const double> alpha, const TorusFunction& f) {
  require_alpha(alpha, f);
  TorusFunction out = f;
  out.for_each_mode([&](const std::vector<int>& k, Complex& c) { c *= kI * (kTwoPi * dot(alpha, k)); });
  return out;
}

TorusFunction partial_derivative(const TorusFunction& f, int axis) {
  if (axis < 0 || axis >= f.dim()) throw Error(ErrorCode::InvalidArgument, "axis out of range");
  TorusFunction out = f;
  out.for_each_mode([&](const std::vector<int>& k, Complex& c) { c *= kI * (kTwoPi * k[axis]); });
  return out;
}

bool is_resonant(std::span<const double> alpha, std::span<const int> k) {
  double value = 0.0;
  double magnitude = 0.0;
  bool zero = true;
  for (std::size_t i = 0; i < k.size(); ++i) {
    value += alpha[i] * k[i];
    magnitude += std::abs(alpha[i] * k[i]);
    zero = zero && k[i] == 0;
  }
  if (zero) return false;
  return std::abs(value) <=
         4.0 * std::numeric_limits<double>::epsilon() * static_cast<double>(k.size()) * magnitude;
}

TorusFunction solve_small_divisor(std::span<const double> alpha, const TorusFunction& f,
                                  double tol_avg) {
  require_alpha(alpha, f);
  const Complex avg = f.average();
  if (std::abs(avg) > tol_avg) throw NonzeroAverageError(avg, Complex(0.0, 0.0));
  TorusFunction h = f;
  h.for_each_mode([&](const std::vector<int>& k, Complex& c) {
    if (std::all_of(k.begin(), k.end(), [](int x) { return x == 0; })) {
      c = 0.0;
      return;
    }
    if (c == Complex(0.0, 0.0)) return;
    if (is_resonant(alpha, k)) {
      throw Error(ErrorCode::Resonance, "resonant frequency in the support");
    }
    c /= kI * (kTwoPi * dot(alpha, k));
  });
  return h;
}

double sobolev_norm(const TorusFunction& f, double r) {
  double s = 0.0;
  f.for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c == Complex(0.0, 0.0)) return;
    double k2 = 0.0;
    for (int x : k) k2 += static_cast<double>(x) * x;
    s += std::norm(c) * std::pow(1.0 + k2, r);
  });
  return std::sqrt(s);
}

double sobolev_norm(const TorusVectorField& field, double r) {
  double s = 0.0;
  for (const auto& f : field) s += std::pow(sobolev_norm(f, r), 2);
  return std::sqrt(s);
}

TorusFunction multiply(const TorusFunction& f, const TorusFunction& g) {
  require_same_dim(f, g);
  const int Kf = f.support_radius();
  const int Kg = g.support_radius();
  const int K = Kf + Kg;
  TorusFunction out(f.dim(), K);
  // Positions in the output cube; the flat index is affine in k, so
  // index(kf + kg) = index(kf) + index(kg) - index(0).
  const std::vector<int> zero(f.dim(), 0);
  const auto origin = static_cast<std::ptrdiff_t>(out.index_of(zero));
  auto nonzeros = [&](const TorusFunction& u) {
    std::vector<std::pair<std::ptrdiff_t, Complex>> nz;
    u.for_each_mode([&](const std::vector<int>& k, const Complex& c) {
      if (c != Complex(0.0, 0.0)) nz.emplace_back(static_cast<std::ptrdiff_t>(out.index_of(k)), c);
    });
    return nz;
  };
  const auto fs = nonzeros(f);
  const auto gs = nonzeros(g);
  const int N = 2 * K + 2;
  const double grid = std::pow(static_cast<double>(N), f.dim());
  const double pairs = static_cast<double>(fs.size()) * static_cast<double>(gs.size());
  if (pairs < 4.0e6 && pairs < 2.0 * grid * std::log2(grid + 1.0)) {
    auto data = out.data();
    for (const auto& [i, cf] : fs)
      for (const auto& [j, cg] : gs) data[i + j - origin] += cf * cg;
    return out;
  }
  // Dense case: the grid resolves every product frequency, so no aliasing.
  auto a = synthesize(f.resized(Kf), N);
  const auto b = synthesize(g.resized(Kg), N);
  for (std::size_t i = 0; i < a.size(); ++i) a[i] *= b[i];
  return analyze(a, f.dim(), N, K);
}

TameRatioReport tame_ratio_report(std::span<const double> alpha,
                                  const std::vector<TorusFunction>& corpus, double r,
                                  double sigma) {
  if (corpus.empty()) throw Error(ErrorCode::EmptyCorpus, "corpus is empty");
  TameRatioReport rep;
  rep.r = r;
  rep.sigma = sigma;
  for (const auto& f : corpus) rep.K_fine = std::max(rep.K_fine, f.truncation());
  rep.K_coarse = rep.K_fine / 2;
  auto ratio = [&](const TorusFunction& f) {
    const double denom = sobolev_norm(f, r + sigma);
    if (denom == 0.0) return 0.0;
    return sobolev_norm(solve_small_divisor(alpha, f, 0.0), r) / denom;
  };
  for (const auto& f : corpus) {
    rep.ratio_fine = std::max(rep.ratio_fine, ratio(f));
    rep.ratio_coarse = std::max(rep.ratio_coarse, ratio(f.resized(rep.K_coarse)));
  }
  rep.plateau = std::abs(rep.ratio_fine - rep.ratio_coarse) < 0.1 * rep.ratio_fine;
  return rep;
}

std::vector<std::vector<Complex>> pullback_on_grid(const TorusVectorField& u,
                                                   const TorusVectorField& X, int N) {
  const int n = static_cast<int>(u.size());
  if (n < 1 || static_cast<int>(X.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "displacement and field need the same component count");
  }
  for (int i = 0; i < n; ++i) {
    if (u[i].dim() != n || X[i].dim() != n) {
      throw Error(ErrorCode::DimensionMismatch, "component dimension differs from component count");
    }
  }

  std::vector<std::vector<Complex>> uv(n);
  std::vector<std::vector<Complex>> du(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    const auto ui = u[i].resized(u[i].support_radius());
    uv[i] = synthesize(ui, N);
    for (int j = 0; j < n; ++j) du[i * n + j] = synthesize(partial_derivative(ui, j), N);
  }
  const std::size_t points = uv[0].size();

  double sup_u = 0.0;
  double sup_du = 0.0;
  for (std::size_t p = 0; p < points; ++p) {
    for (int i = 0; i < n; ++i) {
      sup_u = std::max(sup_u, std::abs(uv[i][p]));
      double row = 0.0;
      for (int j = 0; j < n; ++j) row += std::abs(du[i * n + j][p]);
      sup_du = std::max(sup_du, row);
    }
  }
  if (sup_u >= 0.5 || sup_du >= 0.5) {
    throw Error(ErrorCode::NonInvertible, "displacement or its Jacobian is not below 1/2");
  }

  struct Mode {
    std::vector<int> k;
    Complex c;
  };
  std::vector<std::vector<Mode>> modes(n);
  int KX = 0;
  for (int i = 0; i < n; ++i) {
    X[i].for_each_mode([&](const std::vector<int>& k, const Complex& c) {
      if (c == Complex(0.0, 0.0)) return;
      modes[i].push_back({k, c});
      for (int x : k) KX = std::max(KX, std::abs(x));
    });
  }

  std::vector<std::vector<Complex>> out(n, std::vector<Complex>(points));
  const std::size_t blocks = std::max<std::size_t>(1, std::min<std::size_t>(points, 64));
  const std::size_t block = (points + blocks - 1) / blocks;
  parallel_for(blocks, [&](std::size_t b) {
    std::vector<double> x(n);
    std::vector<Complex> table(static_cast<std::size_t>(n * (2 * KX + 1)));
    std::vector<Complex> rhs(n);
    Eigen::MatrixXcd J(n, n);
    Eigen::VectorXcd v(n);
    const std::size_t end = std::min(points, (b + 1) * block);
    for (std::size_t p = b * block; p < end; ++p) {
      grid_point(p, n, N, x);
      for (int d = 0; d < n; ++d) {
        const double y = x[d] + uv[d][p].real();
        const Complex step = std::exp(kI * (kTwoPi * y));
        Complex* row = &table[static_cast<std::size_t>(d * (2 * KX + 1))];
        row[KX] = 1.0;
        for (int m = 1; m <= KX; ++m) {
          row[KX + m] = row[KX + m - 1] * step;
          row[KX - m] = std::conj(row[KX + m]);
        }
      }
      for (int i = 0; i < n; ++i) {
        Complex s(0.0, 0.0);
        for (const auto& mode : modes[i]) {
          Complex e = mode.c;
          for (int d = 0; d < n; ++d) e *= table[static_cast<std::size_t>(d * (2 * KX + 1) + KX + mode.k[d])];
          s += e;
        }
        rhs[i] = s;
      }
      if (n == 1) {
        out[0][p] = rhs[0] / (1.0 + du[0][p]);
      } else if (n == 2) {
        const Complex a = 1.0 + du[0][p], bb = du[1][p], c = du[2][p], d = 1.0 + du[3][p];
        const Complex det = a * d - bb * c;
        out[0][p] = (d * rhs[0] - bb * rhs[1]) / det;
        out[1][p] = (a * rhs[1] - c * rhs[0]) / det;
      } else {
        for (int i = 0; i < n; ++i) {
          v(i) = rhs[i];
          for (int j = 0; j < n; ++j) J(i, j) = (i == j ? 1.0 : 0.0) + du[i * n + j][p];
        }
        const Eigen::VectorXcd w = J.partialPivLu().solve(v);
        for (int i = 0; i < n; ++i) out[i][p] = w(i);
      }
    }
  });
  return out;
}

TorusVectorField pullback_field(const TorusVectorField& u, const TorusVectorField& X) {
  int K = 1;
  for (const auto& f : u) K = std::max(K, f.truncation());
  for (const auto& f : X) K = std::max(K, f.truncation());
  const int N = 4 * K + 2;
  const auto values = pullback_on_grid(u, X, N);
  TorusVectorField out;
  out.reserve(values.size());
  for (const auto& v : values) out.push_back(analyze(v, static_cast<int>(u.size()), N, 2 * K));
  return out;
}

Complex birkhoff_average(std::span<const double> alpha, const TorusFunction& f,
                         std::span<const double> x0, double T) {
  require_alpha(alpha, f);
  if (static_cast<int>(x0.size()) != f.dim()) throw Error(ErrorCode::DimensionMismatch, "base point");
  if (!(T > 0.0)) throw Error(ErrorCode::InvalidArgument, "averaging time must be positive");
  Complex sum(0.0, 0.0);
  f.for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c == Complex(0.0, 0.0)) return;
    const Complex phase = c * std::exp(kI * (kTwoPi * dot(x0, k)));
    const double w = dot(alpha, k);
    if (w == 0.0 || is_resonant(alpha, k)) {
      sum += phase;
      return;
    }
    const double theta = kTwoPi * w * T;
    // (e^{i theta} - 1) / (i theta), written to stay accurate for small theta.
    const Complex factor = std::abs(theta) < 1e-4
                               ? Complex(1.0 - theta * theta / 6.0, theta / 2.0)
                               : (std::exp(kI * theta) - 1.0) / (kI * theta);
    sum += phase * factor;
  });
  return sum;
}

double sup_norm_on_grid(const TorusFunction& f, int N) {
  const auto values = synthesize(f, N);
  double m = 0.0;
  for (const auto& v : values) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace nilflow
