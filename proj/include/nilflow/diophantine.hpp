#pragma once

#include <span>
#include <string>
#include <vector>

namespace nilflow {

enum class WitnessKind { LinearForm, Simultaneous };

const char* to_string(WitnessKind kind);

/// Finite-frequency certificate of a small-divisor lower bound:
///   C = min over 0 < |k|_inf <= K of divisor(k) * |k|_2^gamma.
/// Enumeration uses the sup norm, the product uses the Euclidean norm.
struct DiophantineWitness {
  double C = 0.0;
  double gamma = 0.0;
  int K = 0;
  WitnessKind kind = WitnessKind::LinearForm;
  std::vector<int> argmin;
  /// divisor(argmin) before the |k|^gamma weight.
  double divisor = 0.0;

  bool valid() const noexcept { return C > 0.0; }
};

struct SmallDivisor {
  std::vector<int> k;
  double value = 0.0;
};

/// Upper bound on the number of enumerated frequency vectors.
inline constexpr double kMaxEnumeration = 2.0e8;

/// Exhaustive minimum of |a . k| over nonzero integer k with |k|_inf <= K.
/// Values within rounding error of zero are reported as exactly 0. Among
/// ties the representative k whose first nonzero entry is positive and which
/// comes first in lexicographic order wins.
SmallDivisor min_small_divisor(std::span<const double> a, int K);

DiophantineWitness fit_witness(std::span<const double> a, double gamma, int K);

/// Divisor max_i dist(m . theta_i, Z) over the listed vectors theta_i.
DiophantineWitness simultaneous_witness(const std::vector<std::vector<double>>& theta,
                                        double gamma, int K);

}  // namespace nilflow
