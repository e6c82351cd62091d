#include "nilflow/diophantine.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include "nilflow/errors.hpp"
#include "nilflow/parallel.hpp"

namespace nilflow {

const char* to_string(WitnessKind kind) {
  return kind == WitnessKind::LinearForm ? "linear-form" : "simultaneous";
}

namespace {

constexpr double kSnap = 4.0 * std::numeric_limits<double>::epsilon();

struct Candidate {
  double objective = std::numeric_limits<double>::infinity();
  double divisor = 0.0;
  std::vector<int> k;
};

/// Minimises objective(k) over the half space of nonzero k (first nonzero
/// entry positive), |k|_inf <= K, in lexicographic order.
Candidate enumerate(int n, int K,
                    const std::function<void(const std::vector<int>&, double&, double&)>& eval) {
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "frequency vector must be nonempty");
  if (K < 1) throw Error(ErrorCode::InvalidArgument, "K must be at least 1");
  const double side = 2.0 * K + 1.0;
  if (std::pow(side, n) > kMaxEnumeration) {
    throw Error(ErrorCode::EnumerationCap, "enumeration over (2K+1)^n vectors exceeds the cap");
  }
  const std::size_t total = static_cast<std::size_t>(std::llround(std::pow(side, n)));
  const std::size_t chunks = std::max<std::size_t>(1, std::min<std::size_t>(worker_count() * 4, total));
  const std::size_t block = (total + chunks - 1) / chunks;
  std::vector<Candidate> best(chunks);

  parallel_for(chunks, [&](std::size_t c) {
    std::vector<int> k(n);
    Candidate& local = best[c];
    const std::size_t end = std::min(total, (c + 1) * block);
    for (std::size_t idx = c * block; idx < end; ++idx) {
      std::size_t rest = idx;
      for (int d = n - 1; d >= 0; --d) {
        k[d] = static_cast<int>(rest % static_cast<std::size_t>(side)) - K;
        rest /= static_cast<std::size_t>(side);
      }
      int lead = 0;
      for (int d = 0; d < n && lead == 0; ++d) lead = k[d];
      if (lead <= 0) continue;
      double objective = 0.0;
      double divisor = 0.0;
      eval(k, divisor, objective);
      if (objective < local.objective) {
        local.objective = objective;
        local.divisor = divisor;
        local.k = k;
      }
    }
  });

  Candidate out;
  for (auto& c : best)
    if (c.objective < out.objective) out = std::move(c);
  return out;
}

double euclidean(const std::vector<int>& k) {
  double s = 0.0;
  for (int x : k) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

double linear_form(std::span<const double> a, const std::vector<int>& k) {
  double dot = 0.0;
  double magnitude = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * k[i];
    magnitude += std::abs(a[i] * k[i]);
  }
  const double value = std::abs(dot);
  return value <= kSnap * static_cast<double>(a.size()) * magnitude ? 0.0 : value;
}

}  // namespace

SmallDivisor min_small_divisor(std::span<const double> a, int K) {
  const auto best = enumerate(static_cast<int>(a.size()), K,
                              [&](const std::vector<int>& k, double& divisor, double& objective) {
                                divisor = linear_form(a, k);
                                objective = divisor;
                              });
  return {best.k, best.divisor};
}

DiophantineWitness fit_witness(std::span<const double> a, double gamma, int K) {
  if (gamma < 0.0) throw Error(ErrorCode::InvalidArgument, "gamma must be nonnegative");
  const auto best = enumerate(static_cast<int>(a.size()), K,
                              [&](const std::vector<int>& k, double& divisor, double& objective) {
                                divisor = linear_form(a, k);
                                objective = divisor * std::pow(euclidean(k), gamma);
                              });
  DiophantineWitness w;
  w.C = best.objective;
  w.gamma = gamma;
  w.K = K;
  w.kind = WitnessKind::LinearForm;
  w.argmin = best.k;
  w.divisor = best.divisor;
  return w;
}

DiophantineWitness simultaneous_witness(const std::vector<std::vector<double>>& theta,
                                        double gamma, int K) {
  if (theta.empty()) throw Error(ErrorCode::InvalidArgument, "need at least one vector");
  if (gamma < 0.0) throw Error(ErrorCode::InvalidArgument, "gamma must be nonnegative");
  const std::size_t n = theta.front().size();
  for (const auto& t : theta) {
    if (t.size() != n) throw Error(ErrorCode::DimensionMismatch, "vectors differ in length");
  }
  const auto best = enumerate(static_cast<int>(n), K,
                              [&](const std::vector<int>& m, double& divisor, double& objective) {
                                divisor = 0.0;
                                for (const auto& t : theta) {
                                  double x = 0.0;
                                  double magnitude = 0.0;
                                  for (std::size_t j = 0; j < n; ++j) {
                                    x += m[j] * t[j];
                                    magnitude += std::abs(m[j] * t[j]);
                                  }
                                  double dist = std::abs(x - std::nearbyint(x));
                                  if (dist <= kSnap * static_cast<double>(n) * magnitude) dist = 0.0;
                                  divisor = std::max(divisor, dist);
                                }
                                objective = divisor * std::pow(euclidean(m), gamma);
                              });
  DiophantineWitness w;
  w.C = best.objective;
  w.gamma = gamma;
  w.K = K;
  w.kind = WitnessKind::Simultaneous;
  w.argmin = best.k;
  w.divisor = best.divisor;
  return w;
}

}  // namespace nilflow
