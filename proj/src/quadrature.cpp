#include "lpsrom/quadrature.hpp"

#include <cmath>

namespace lpsrom {

namespace {

QuadRule make_degree4() {
  // Dunavant degree-4 rule: two symmetric orbits of three points.
  const double a1 = 0.445948490915965, w1 = 0.223381589678011;
  const double a2 = 0.091576213509771, w2 = 0.109951743655322;
  QuadRule r;
  auto orbit = [&r](double a, double w) {
    r.points.push_back({a, a});
    r.points.push_back({1.0 - 2.0 * a, a});
    r.points.push_back({a, 1.0 - 2.0 * a});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
  };
  orbit(a1, w1);
  orbit(a2, w2);
  return r;
}

QuadRule make_degree5() {
  // Dunavant degree-5 rule: centroid plus two symmetric orbits.
  const double a1 = 0.470142064105115, w1 = 0.132394152788506;
  const double a2 = 0.101286507323456, w2 = 0.125939180544827;
  QuadRule r;
  r.points.push_back({1.0 / 3.0, 1.0 / 3.0});
  r.weights.push_back(0.225);
  auto orbit = [&r](double a, double w) {
    r.points.push_back({a, a});
    r.points.push_back({1.0 - 2.0 * a, a});
    r.points.push_back({a, 1.0 - 2.0 * a});
    for (int i = 0; i < 3; ++i) r.weights.push_back(w);
  };
  orbit(a1, w1);
  orbit(a2, w2);
  return r;
}

}  // namespace

const QuadRule& quad_degree4() {
  static const QuadRule r = make_degree4();
  return r;
}

const QuadRule& quad_degree5() {
  static const QuadRule r = make_degree5();
  return r;
}

const LineRule& line_gauss3() {
  static const LineRule r = [] {
    LineRule l;
    const double s = std::sqrt(3.0 / 5.0) / 2.0;
    l.points = {0.5 - s, 0.5, 0.5 + s};
    l.weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
    return l;
  }();
  return r;
}

}  // namespace lpsrom
