#include "aniso/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace aniso {

QuadratureRule1D gauss_rule(int n) {
  switch (n) {
    case 1:
      return {{0.0}, {2.0}};
    case 2: {
      const double p = 1.0 / std::sqrt(3.0);
      return {{-p, p}, {1.0, 1.0}};
    }
    case 3: {
      const double p = std::sqrt(3.0 / 5.0);
      return {{-p, 0.0, p}, {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0}};
    }
    case 4: {
      const double a = std::sqrt(3.0 / 7.0 - 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double b = std::sqrt(3.0 / 7.0 + 2.0 / 7.0 * std::sqrt(6.0 / 5.0));
      const double wa = (18.0 + std::sqrt(30.0)) / 36.0;
      const double wb = (18.0 - std::sqrt(30.0)) / 36.0;
      return {{-b, -a, a, b}, {wb, wa, wa, wb}};
    }
    case 5: {
      const double a = std::sqrt(5.0 - 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double b = std::sqrt(5.0 + 2.0 * std::sqrt(10.0 / 7.0)) / 3.0;
      const double wa = (322.0 + 13.0 * std::sqrt(70.0)) / 900.0;
      const double wb = (322.0 - 13.0 * std::sqrt(70.0)) / 900.0;
      return {{-b, -a, 0.0, a, b}, {wb, wa, 128.0 / 225.0, wa, wb}};
    }
    default:
      throw std::invalid_argument("gauss_rule: unsupported point count " + std::to_string(n));
  }
}

Q1Eval q1_eval(double xi, double eta) {
  const double xm = 0.5 * (1.0 - xi);
  const double xp = 0.5 * (1.0 + xi);
  const double em = 0.5 * (1.0 - eta);
  const double ep = 0.5 * (1.0 + eta);
  Q1Eval e;
  e.values = {xm * em, xp * em, xm * ep, xp * ep};
  e.d_dxi = {-0.5 * em, 0.5 * em, -0.5 * ep, 0.5 * ep};
  e.d_deta = {-0.5 * xm, -0.5 * xp, 0.5 * xm, 0.5 * xp};
  return e;
}

P1Eval p1_eval(double xi) {
  return {{0.5 * (1.0 - xi), 0.5 * (1.0 + xi)}, {-0.5, 0.5}};
}

}  // namespace aniso
