#pragma once

// Closed-form eigenvalue oracles for 2x2 and 3x3 symmetric matrices,
// evaluated through the characteristic polynomial rather than any
// iterative scheme, so they are independent of the library eigensolver.

#include <algorithm>
#include <cmath>
#include <vector>

#include "kernelforge/matrix.hpp"

namespace testsupport {

// Roots of det(S - lambda I) for 2x2 symmetric S, ascending.
inline std::vector<double> charpoly_eigenvalues_2x2(const kernelforge::SymMatrix& s) {
  const double a = s(0, 0), b = s(0, 1), d = s(1, 1);
  const double mean = 0.5 * (a + d);
  const double disc = std::sqrt(0.25 * (a - d) * (a - d) + b * b);
  return {mean - disc, mean + disc};
}

// Roots of the cubic characteristic polynomial for 3x3 symmetric S,
// ascending. All roots are real; uses the trigonometric solution.
inline std::vector<double> charpoly_eigenvalues_3x3(const kernelforge::SymMatrix& s) {
  const double a = s(0, 0), b = s(1, 1), c = s(2, 2);
  const double d = s(0, 1), e = s(0, 2), f = s(1, 2);
  // lambda^3 - p1 lambda^2 + p2 lambda - p3 = 0 with the invariants below.
  const double p1 = a + b + c;
  const double p2 = a * b + a * c + b * c - d * d - e * e - f * f;
  const double p3 = a * b * c + 2.0 * d * e * f - a * f * f - b * e * e - c * d * d;

  // Depressed form via lambda = x + p1/3.
  const double q = p1 / 3.0;
  const double pp = p2 - p1 * p1 / 3.0;                             // coefficient of x
  const double qq = -2.0 * p1 * p1 * p1 / 27.0 + p1 * p2 / 3.0 - p3; // constant term
  // x^3 + pp x + qq = 0
  double roots[3];
  const double m = -pp / 3.0;
  if (m <= 0.0) {
    // Triple root up to rounding; pp >= 0 only when S is (near) scalar.
    roots[0] = roots[1] = roots[2] = 0.0;
  } else {
    const double sqm = std::sqrt(m);
    double arg = -qq / (2.0 * m * sqm);
    arg = std::clamp(arg, -1.0, 1.0);
    const double theta = std::acos(arg) / 3.0;
    constexpr double kTwoPiThirds = 2.0943951023931953;
    roots[0] = 2.0 * sqm * std::cos(theta);
    roots[1] = 2.0 * sqm * std::cos(theta - kTwoPiThirds);
    roots[2] = 2.0 * sqm * std::cos(theta + kTwoPiThirds);
  }
  std::vector<double> out = {roots[0] + q, roots[1] + q, roots[2] + q};
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace testsupport
