#pragma once

#include <span>
#include <vector>

#include "nilflow/torus.hpp"

namespace nilflow {

/// Values of f on the N^n grid x = j / N (first coordinate most significant).
/// Requires N >= 2K + 1.
std::vector<Complex> synthesize(const TorusFunction& f, int N);

/// Fourier coefficients with |k|_inf <= K of grid samples; K <= (N - 1) / 2.
TorusFunction analyze(std::span<const Complex> values, int dim, int N, int K);

/// Grid point coordinates for a flat grid index.
void grid_point(std::size_t index, int dim, int N, std::span<double> x);

}  // namespace nilflow
