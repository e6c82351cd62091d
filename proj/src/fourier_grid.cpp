#include "nilflow/fourier_grid.hpp"

#include <fftw3.h>

#include <mutex>

namespace nilflow {

namespace {

std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t grid_size(int dim, int N) {
  std::size_t total = 1;
  for (int d = 0; d < dim; ++d) total *= static_cast<std::size_t>(N);
  return total;
}

/// In-place multi-dimensional DFT; sign is FFTW_FORWARD or FFTW_BACKWARD.
void transform(std::vector<Complex>& a, int dim, int N, int sign) {
  std::vector<int> dims(dim, N);
  auto* ptr = reinterpret_cast<fftw_complex*>(a.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(dim, dims.data(), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

std::size_t wrapped_index(const std::vector<int>& k, int N) {
  std::size_t idx = 0;
  for (int kd : k) idx = idx * N + static_cast<std::size_t>(((kd % N) + N) % N);
  return idx;
}

}  // namespace

std::vector<Complex> synthesize(const TorusFunction& f, int N) {
  if (N < 2 * f.truncation() + 1) {
    throw Error(ErrorCode::InvalidArgument, "grid too coarse for the truncation");
  }
  std::vector<Complex> a(grid_size(f.dim(), N), Complex(0.0, 0.0));
  f.for_each_mode([&](const std::vector<int>& k, const Complex& c) {
    if (c != Complex(0.0, 0.0)) a[wrapped_index(k, N)] = c;
  });
  transform(a, f.dim(), N, FFTW_BACKWARD);
  return a;
}

TorusFunction analyze(std::span<const Complex> values, int dim, int N, int K) {
  if (2 * K + 1 > N) throw Error(ErrorCode::InvalidArgument, "truncation too large for the grid");
  if (values.size() != grid_size(dim, N)) {
    throw Error(ErrorCode::DimensionMismatch, "grid value count does not match N^dim");
  }
  std::vector<Complex> a(values.begin(), values.end());
  transform(a, dim, N, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(a.size());
  TorusFunction f(dim, K);
  f.for_each_mode([&](const std::vector<int>& k, Complex& c) { c = a[wrapped_index(k, N)] * scale; });
  return f;
}

void grid_point(std::size_t index, int dim, int N, std::span<double> x) {
  for (int d = dim - 1; d >= 0; --d) {
    x[d] = static_cast<double>(index % N) / N;
    index /= N;
  }
}

}  // namespace nilflow
