#pragma once

#include <array>
#include <vector>

namespace aniso {

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule1D {
  std::vector<double> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// n in 1..5; throws std::invalid_argument otherwise.
QuadratureRule1D gauss_rule(int n);

/// Bilinear corner shapes on [-1,1]^2. Corner order: (-1,-1), (1,-1), (-1,1), (1,1).
struct Q1Eval {
  std::array<double, 4> values;
  std::array<double, 4> d_dxi;
  std::array<double, 4> d_deta;
};

Q1Eval q1_eval(double xi, double eta);

/// Linear shapes on [-1,1]. Node order: -1, +1.
struct P1Eval {
  std::array<double, 2> values;
  std::array<double, 2> gradients;
};

P1Eval p1_eval(double xi);

/// Maps a reference coordinate in [-1,1] to [a, b].
inline double map_to_interval(double xi, double a, double b) {
  return 0.5 * (a + b) + 0.5 * (b - a) * xi;
}

}  // namespace aniso
