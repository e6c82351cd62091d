#include "nilflow/algebra.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "nilflow/errors.hpp"

namespace nilflow {

TwoStepAlgebra::TwoStepAlgebra(int q, int p)
    : q_(q), p_(p), c_(static_cast<std::size_t>(std::max(q, 0) * std::max(q, 0) * std::max(p, 0))) {
  if (q < 1 || p < 0) throw Error(ErrorCode::InvalidArgument, "algebra needs q >= 1 and p >= 0");
}

TwoStepAlgebra TwoStepAlgebra::heisenberg() {
  TwoStepAlgebra algebra(2, 1);
  algebra.set_bracket(0, 1, 0, Rational(1));
  return algebra;
}

std::size_t TwoStepAlgebra::index(int l, int i, int j) const {
  if (l < 0 || l >= q_ || i < 0 || i >= q_ || j < 0 || j >= p_) {
    throw Error(ErrorCode::DimensionMismatch, "structure-constant index out of range");
  }
  return (static_cast<std::size_t>(l) * q_ + i) * p_ + j;
}

void TwoStepAlgebra::set_bracket(int l, int i, int j, const Rational& value) {
  if (l == i) {
    if (value != 0) throw Error(ErrorCode::InvalidArgument, "[Y_l, Y_l] must vanish");
    return;
  }
  c_[index(l, i, j)] = value;
  c_[index(i, l, j)] = -value;
}

const Rational& TwoStepAlgebra::constant(int l, int i, int j) const { return c_[index(l, i, j)]; }

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

Rational parse_rational(const std::string& token, int line) {
  try {
    const auto slash = token.find('/');
    if (slash == std::string::npos) return Rational(boost::multiprecision::cpp_int(token));
    const boost::multiprecision::cpp_int num(token.substr(0, slash));
    const boost::multiprecision::cpp_int den(token.substr(slash + 1));
    if (den == 0) throw ParseError(ErrorCode::ParseError, line, "zero denominator");
    return Rational(num, den);
  } catch (const ParseError&) {
    throw;
  } catch (const std::exception&) {
    throw ParseError(ErrorCode::TypeError, line, "not a rational: '" + token + "'");
  }
}

}  // namespace

TwoStepAlgebra TwoStepAlgebra::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  int q = -1;
  int p = -1;
  struct Entry {
    int l, i, j;
    Rational value;
    int line;
  };
  std::vector<Entry> entries;

  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (q < 0) {
      if (std::sscanf(line.c_str(), "q=%d p=%d", &q, &p) != 2 || q < 1 || p < 0) {
        throw ParseError(ErrorCode::ParseError, line_no, "expected header 'q=<int> p=<int>'");
      }
      continue;
    }
    std::istringstream fields(line);
    std::string tag, value;
    int l = 0, i = 0, j = 0;
    if (!(fields >> tag >> l >> i >> j >> value) || tag != "c") {
      throw ParseError(ErrorCode::ParseError, line_no, "expected 'c <l> <i> <j> <num>/<den>'");
    }
    if (l < 1 || l > q || i < 1 || i > q || j < 1 || j > p) {
      throw ParseError(ErrorCode::ParseError, line_no, "structure-constant index out of range");
    }
    entries.push_back({l - 1, i - 1, j - 1, parse_rational(value, line_no), line_no});
  }
  if (q < 0) throw ParseError(ErrorCode::MissingKey, 0, "missing 'q=<int> p=<int>' header");

  TwoStepAlgebra algebra(q, p);
  std::vector<bool> given(static_cast<std::size_t>(q * q * p), false);
  for (const auto& e : entries) {
    if (e.l == e.i) {
      if (e.value != 0) throw ParseError(ErrorCode::ParseError, e.line, "[Y_l, Y_l] must vanish");
      continue;
    }
    const std::size_t mirror = algebra.index(e.i, e.l, e.j);
    if (given[mirror] && algebra.c_[mirror] != -e.value) {
      throw ParseError(ErrorCode::ParseError, e.line, "entry contradicts antisymmetry");
    }
    algebra.set_bracket(e.l, e.i, e.j, e.value);
    given[algebra.index(e.l, e.i, e.j)] = true;
  }
  return algebra;
}

TwoStepAlgebra TwoStepAlgebra::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open algebra file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string TwoStepAlgebra::serialize() const {
  std::ostringstream os;
  os << "q=" << q_ << " p=" << p_ << "\n";
  for (int l = 0; l < q_; ++l)
    for (int i = l + 1; i < q_; ++i)
      for (int j = 0; j < p_; ++j) {
        const Rational& v = constant(l, i, j);
        if (v == 0) continue;
        os << "c " << l + 1 << ' ' << i + 1 << ' ' << j + 1 << ' ' << numerator(v) << '/'
           << denominator(v) << "\n";
      }
  return os.str();
}

template <>
double from_rational<double>(const Rational& r) {
  return r.convert_to<double>();
}

template <>
Rational from_rational<Rational>(const Rational& r) {
  return r;
}

template <class Scalar>
std::vector<Scalar> bracket(const TwoStepAlgebra& algebra, std::span<const Scalar> u,
                            std::span<const Scalar> v) {
  const int q = algebra.q();
  const int p = algebra.p();
  if (static_cast<int>(u.size()) != algebra.dim() || static_cast<int>(v.size()) != algebra.dim()) {
    throw Error(ErrorCode::DimensionMismatch, "bracket operands must have length q + p");
  }
  std::vector<Scalar> out(static_cast<std::size_t>(algebra.dim()), Scalar(0));
  for (int l = 0; l < q; ++l) {
    if (u[l] == Scalar(0)) continue;
    for (int i = 0; i < q; ++i) {
      if (i == l || v[i] == Scalar(0)) continue;
      const Scalar uv = u[l] * v[i];
      for (int j = 0; j < p; ++j) {
        const Rational& c = algebra.constant(l, i, j);
        if (c != 0) out[q + j] += uv * from_rational<Scalar>(c);
      }
    }
  }
  return out;
}

template std::vector<double> bracket<double>(const TwoStepAlgebra&, std::span<const double>,
                                             std::span<const double>);
template std::vector<Rational> bracket<Rational>(const TwoStepAlgebra&, std::span<const Rational>,
                                                 std::span<const Rational>);

namespace {
template <class Scalar>
Scalar offset_at(const std::vector<Scalar>& offsets, std::size_t i) {
  return i < offsets.size() ? offsets[i] : Scalar(0);
}
}  // namespace

template <class Scalar>
std::vector<Scalar> BasicActionParams<Scalar>::x1() const {
  std::vector<Scalar> x(alpha.size() + beta.size(), Scalar(0));
  for (std::size_t i = 0; i < alpha.size(); ++i) x[i] = alpha[i] + offset_at(a, i);
  return x;
}

template <class Scalar>
std::vector<Scalar> BasicActionParams<Scalar>::x2() const {
  std::vector<Scalar> x(alpha.size() + beta.size(), Scalar(0));
  for (std::size_t i = 0; i < alpha.size(); ++i) x[i] = mu * alpha[i];
  for (std::size_t j = 0; j < beta.size(); ++j) x[alpha.size() + j] = beta[j] + offset_at(b, j);
  return x;
}

template struct BasicActionParams<double>;
template struct BasicActionParams<Rational>;

template <class Scalar>
BasicActionParams<Scalar> apply_coordinate_change(BasicActionParams<Scalar> params,
                                                  const Scalar& mu1) {
  params.mu += mu1;
  return params;
}

template ActionParams apply_coordinate_change(ActionParams, const double&);
template ExactActionParams apply_coordinate_change(ExactActionParams, const Rational&);

template <class Scalar>
BasicConstantCocycle<Scalar> BasicConstantCocycle<Scalar>::zero(int q, int p) {
  return {std::vector<Scalar>(q, Scalar(0)), std::vector<Scalar>(p, Scalar(0)),
          std::vector<Scalar>(q, Scalar(0)), std::vector<Scalar>(p, Scalar(0))};
}

template <class Scalar>
std::vector<Scalar> BasicConstantCocycle<Scalar>::flatten() const {
  std::vector<Scalar> v;
  v.reserve(2 * (a1.size() + b1.size()));
  for (const auto* part : {&a1, &b1, &a2, &b2}) v.insert(v.end(), part->begin(), part->end());
  return v;
}

template <class Scalar>
BasicConstantCocycle<Scalar> BasicConstantCocycle<Scalar>::unflatten(std::span<const Scalar> v,
                                                                     int q, int p) {
  if (static_cast<int>(v.size()) != 2 * (q + p)) {
    throw Error(ErrorCode::DimensionMismatch, "constant cochain must have 2(q+p) entries");
  }
  auto it = v.begin();
  auto take = [&it](int count) {
    std::vector<Scalar> part(it, it + count);
    it += count;
    return part;
  };
  BasicConstantCocycle out;
  out.a1 = take(q);
  out.b1 = take(p);
  out.a2 = take(q);
  out.b2 = take(p);
  return out;
}

template <class Scalar>
std::vector<Scalar> BasicConstantCocycle<Scalar>::on_x1() const {
  std::vector<Scalar> v(a1);
  v.insert(v.end(), b1.begin(), b1.end());
  return v;
}

template <class Scalar>
std::vector<Scalar> BasicConstantCocycle<Scalar>::on_x2() const {
  std::vector<Scalar> v(a2);
  v.insert(v.end(), b2.begin(), b2.end());
  return v;
}

template struct BasicConstantCocycle<double>;
template struct BasicConstantCocycle<Rational>;

namespace {

template <class Scalar>
void check_params(const TwoStepAlgebra& algebra, const BasicActionParams<Scalar>& params) {
  if (params.q() != algebra.q() || params.p() != algebra.p()) {
    throw Error(ErrorCode::DimensionMismatch, "action parameters do not match the algebra");
  }
}

/// delta^1 at the constant level: [X_1, omega(X_2)] - [X_2, omega(X_1)].
template <class Scalar>
std::vector<Scalar> const_delta1(const TwoStepAlgebra& algebra,
                                 const BasicActionParams<Scalar>& params,
                                 const BasicConstantCocycle<Scalar>& omega) {
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  const auto w1 = omega.on_x1();
  const auto w2 = omega.on_x2();
  auto lhs = bracket<Scalar>(algebra, x1, w2);
  const auto rhs = bracket<Scalar>(algebra, x2, w1);
  for (std::size_t k = 0; k < lhs.size(); ++k) lhs[k] -= rhs[k];
  return lhs;
}

template <class Scalar>
using Matrix = std::vector<std::vector<Scalar>>;

double magnitude(double x) { return std::abs(x); }
double magnitude(const Rational& x) { return std::abs(x.convert_to<double>()); }

bool negligible(double x, double scale) { return std::abs(x) <= kRankTolerance * scale; }
bool negligible(const Rational& x, double) { return x == 0; }

template <class Scalar>
struct Reduced {
  Matrix<Scalar> rows;
  std::vector<int> pivots;
};

template <class Scalar>
Reduced<Scalar> row_reduce(Matrix<Scalar> m, int cols) {
  double scale = 1.0;
  for (const auto& row : m)
    for (const auto& x : row) scale = std::max(scale, magnitude(x));

  Reduced<Scalar> out;
  std::size_t r = 0;
  for (int c = 0; c < cols && r < m.size(); ++c) {
    std::size_t best = r;
    for (std::size_t k = r + 1; k < m.size(); ++k)
      if (magnitude(m[k][c]) > magnitude(m[best][c])) best = k;
    if (negligible(m[best][c], scale)) continue;
    std::swap(m[r], m[best]);
    const Scalar pivot = m[r][c];
    for (auto& x : m[r]) x /= pivot;
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (k == r || m[k][c] == Scalar(0)) continue;
      const Scalar factor = m[k][c];
      for (int j = 0; j < cols; ++j) m[k][j] -= factor * m[r][j];
    }
    out.pivots.push_back(c);
    ++r;
  }
  m.resize(r);
  out.rows = std::move(m);
  return out;
}

template <class Scalar>
int rank_of(const Matrix<Scalar>& m, int cols) {
  if (m.empty()) return 0;
  return static_cast<int>(row_reduce(m, cols).pivots.size());
}

template <class Scalar>
Matrix<Scalar> kernel_basis(const Matrix<Scalar>& m, int cols) {
  const auto reduced = row_reduce(m, cols);
  std::vector<int> pivot_row(cols, -1);
  for (std::size_t r = 0; r < reduced.pivots.size(); ++r) pivot_row[reduced.pivots[r]] = static_cast<int>(r);
  Matrix<Scalar> basis;
  for (int free = 0; free < cols; ++free) {
    if (pivot_row[free] >= 0) continue;
    std::vector<Scalar> v(cols, Scalar(0));
    v[free] = Scalar(1);
    for (std::size_t r = 0; r < reduced.pivots.size(); ++r) v[reduced.pivots[r]] = -reduced.rows[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

template <class Scalar>
bool in_kernel(const TwoStepAlgebra& algebra, const BasicActionParams<Scalar>& params,
               const std::vector<Scalar>& flat) {
  const auto omega =
      BasicConstantCocycle<Scalar>::unflatten(flat, algebra.q(), algebra.p());
  double scale = 1.0;
  for (const auto& x : flat) scale = std::max(scale, magnitude(x));
  for (const auto& x : params.x1()) scale = std::max(scale, magnitude(x));
  for (const auto& x : params.x2()) scale = std::max(scale, magnitude(x));
  for (const auto& x : const_delta1(algebra, params, omega))
    if (!negligible(x, scale * scale)) return false;
  return true;
}

}  // namespace

template <class Scalar>
BasicConstantCocycle<Scalar> const_delta0(const TwoStepAlgebra& algebra,
                                          const BasicActionParams<Scalar>& params,
                                          std::span<const Scalar> h) {
  check_params(algebra, params);
  const auto x1 = params.x1();
  const auto x2 = params.x2();
  const auto w1 = bracket<Scalar>(algebra, x1, h);
  const auto w2 = bracket<Scalar>(algebra, x2, h);
  const int q = algebra.q();
  BasicConstantCocycle<Scalar> out;
  out.a1.assign(w1.begin(), w1.begin() + q);
  out.b1.assign(w1.begin() + q, w1.end());
  out.a2.assign(w2.begin(), w2.begin() + q);
  out.b2.assign(w2.begin() + q, w2.end());
  return out;
}

template <class Scalar>
bool const_cocycle_check(const TwoStepAlgebra& algebra, const BasicActionParams<Scalar>& params,
                         const BasicConstantCocycle<Scalar>& omega, double tol) {
  check_params(algebra, params);
  for (const auto& x : const_delta1(algebra, params, omega)) {
    if constexpr (std::is_same_v<Scalar, double>) {
      if (std::abs(x) > tol) return false;
    } else {
      if (x != 0) return false;
    }
  }
  return true;
}

template <class Scalar>
ConstantCohomology<Scalar> const_cohomology_basis(const TwoStepAlgebra& algebra,
                                                  const BasicActionParams<Scalar>& params) {
  check_params(algebra, params);
  for (const auto& a : params.alpha) {
    if (a == Scalar(0)) {
      throw Error(ErrorCode::DegenerateAlpha,
                  "alpha has a zero component; cohomology basis extraction needs generic alpha");
    }
  }
  const int q = algebra.q();
  const int p = algebra.p();
  const int n = q + p;

  // Columns of delta^0: images of the basis vectors of the algebra.
  Matrix<Scalar> image_rows;
  for (int k = 0; k < n; ++k) {
    std::vector<Scalar> e(n, Scalar(0));
    e[k] = Scalar(1);
    image_rows.push_back(const_delta0<Scalar>(algebra, params, e).flatten());
  }
  // Rows of delta^1 as a (q+p) x 2(q+p) matrix.
  Matrix<Scalar> d1(n, std::vector<Scalar>(2 * n, Scalar(0)));
  for (int k = 0; k < 2 * n; ++k) {
    std::vector<Scalar> e(2 * n, Scalar(0));
    e[k] = Scalar(1);
    const auto col = const_delta1(algebra, params,
                                  BasicConstantCocycle<Scalar>::unflatten(e, q, p));
    for (int r = 0; r < n; ++r) d1[r][k] = col[r];
  }

  ConstantCohomology<Scalar> out;
  out.image_rank = rank_of(image_rows, 2 * n);
  const auto kernel = kernel_basis(d1, 2 * n);
  out.kernel_dim = static_cast<int>(kernel.size());
  out.dimension = out.kernel_dim - out.image_rank;

  Matrix<Scalar> candidates;
  for (int i = 0; i < q; ++i) {
    auto w = BasicConstantCocycle<Scalar>::zero(q, p);
    w.a1[i] = Scalar(1);
    candidates.push_back(w.flatten());
  }
  {
    auto w = BasicConstantCocycle<Scalar>::zero(q, p);
    w.a2 = params.alpha;
    candidates.push_back(w.flatten());
  }
  for (int j = 0; j < p; ++j) {
    auto w = BasicConstantCocycle<Scalar>::zero(q, p);
    w.b2[j] = Scalar(1);
    candidates.push_back(w.flatten());
  }
  candidates.insert(candidates.end(), kernel.begin(), kernel.end());

  Matrix<Scalar> span = image_rows;
  int span_rank = out.image_rank;
  for (const auto& c : candidates) {
    if (static_cast<int>(out.representatives.size()) == out.dimension) break;
    if (!in_kernel(algebra, params, c)) continue;
    span.push_back(c);
    const int r = rank_of(span, 2 * n);
    if (r > span_rank) {
      span_rank = r;
      out.representatives.push_back(BasicConstantCocycle<Scalar>::unflatten(c, q, p));
    } else {
      span.pop_back();
    }
  }
  return out;
}

template ConstantCocycle const_delta0(const TwoStepAlgebra&, const ActionParams&,
                                      std::span<const double>);
template ExactConstantCocycle const_delta0(const TwoStepAlgebra&, const ExactActionParams&,
                                           std::span<const Rational>);
template bool const_cocycle_check(const TwoStepAlgebra&, const ActionParams&,
                                  const ConstantCocycle&, double);
template bool const_cocycle_check(const TwoStepAlgebra&, const ExactActionParams&,
                                  const ExactConstantCocycle&, double);
template ConstantCohomology<double> const_cohomology_basis(const TwoStepAlgebra&,
                                                           const ActionParams&);
template ConstantCohomology<Rational> const_cohomology_basis(const TwoStepAlgebra&,
                                                             const ExactActionParams&);

ConstantDecomposition decompose_constant_cochain(const TwoStepAlgebra& algebra,
                                                 const ActionParams& params,
                                                 const ConstantCohomology<double>& cohomology,
                                                 const ConstantCocycle& omega) {
  check_params(algebra, params);
  const int q = algebra.q();
  const int p = algebra.p();
  const int n = q + p;
  const int d = static_cast<int>(cohomology.representatives.size());

  Eigen::MatrixXd system(2 * n, d + n);
  for (int k = 0; k < d; ++k) {
    const auto v = cohomology.representatives[k].flatten();
    for (int r = 0; r < 2 * n; ++r) system(r, k) = v[r];
  }
  for (int k = 0; k < n; ++k) {
    std::vector<double> e(n, 0.0);
    e[k] = 1.0;
    const auto v = const_delta0<double>(algebra, params, e).flatten();
    for (int r = 0; r < 2 * n; ++r) system(r, d + k) = v[r];
  }
  const auto target = omega.flatten();
  const Eigen::VectorXd rhs = Eigen::Map<const Eigen::VectorXd>(target.data(), 2 * n);
  const Eigen::VectorXd x = system.completeOrthogonalDecomposition().solve(rhs);

  ConstantDecomposition out;
  out.coords.assign(x.data(), x.data() + d);
  out.h.assign(x.data() + d, x.data() + d + n);
  const Eigen::VectorXd projected = system.leftCols(d) * x.head(d);
  const Eigen::VectorXd remainder = rhs - system * x;
  out.projection = ConstantCocycle::unflatten(
      std::span<const double>(projected.data(), projected.size()), q, p);
  out.remainder = ConstantCocycle::unflatten(
      std::span<const double>(remainder.data(), remainder.size()), q, p);
  return out;
}

}  // namespace nilflow
