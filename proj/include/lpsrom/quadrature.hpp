#ifndef LPSROM_QUADRATURE_HPP
#define LPSROM_QUADRATURE_HPP

#include <array>
#include <vector>

namespace lpsrom {

// Quadrature on the reference triangle (0,0)-(1,0)-(0,1), weights normalized
// to sum to 1 (multiply by the physical cell area when integrating).
struct QuadRule {
  std::vector<std::array<double, 2>> points;  // (xi, eta)
  std::vector<double> weights;
};

// 6-point rule, exact for polynomials of degree 4.
const QuadRule& quad_degree4();

// 7-point rule, exact for polynomials of degree 5.
const QuadRule& quad_degree5();

// 3-point Gauss rule on [0,1], exact for degree 5 (boundary integrals).
struct LineRule {
  std::array<double, 3> points;
  std::array<double, 3> weights;
};
const LineRule& line_gauss3();

}  // namespace lpsrom

#endif
