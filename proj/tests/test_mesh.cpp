#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "lpsrom/errors.hpp"
#include "lpsrom/mesh.hpp"

using namespace lpsrom;

namespace {

// Brute-force edge incidence oracle: every edge in <= 2 cells, boundary
// edges in exactly 1, and the count-1 set matches the tagged list.
void check_conforming(const TriMesh& m) {
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles)
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  std::set<std::pair<int, int>> boundary;
  for (const auto& be : m.boundary_edges)
    boundary.insert({std::min(be.v0, be.v1), std::max(be.v0, be.v1)});
  for (const auto& [edge, c] : count) {
    CHECK(c <= 2);
    if (c == 1) CHECK(boundary.count(edge) == 1);
    if (c == 2) CHECK(boundary.count(edge) == 0);
  }
  CHECK(boundary.size() == static_cast<std::size_t>(
                               std::count_if(count.begin(), count.end(),
                                             [](const auto& kv) { return kv.second == 1; })));
}

int euler_characteristic(const TriMesh& m) {
  return m.num_vertices() - m.num_edges() + m.num_cells();
}

}  // namespace

TEST_CASE("rect mesh: single quad splits into 2 triangles") {
  TriMesh m = generate_rect_mesh(1, 1, 1.0, 1.0);
  CHECK(m.num_cells() == 2);
  CHECK(m.num_vertices() == 4);
  check_conforming(m);
}

TEST_CASE("rect mesh: 2x2 counts") {
  TriMesh m = generate_rect_mesh(2, 2, 1.0, 1.0);
  CHECK(m.num_cells() == 8);
  CHECK(m.num_vertices() == 9);
}

TEST_CASE("rect mesh: 4x4 unit square has max h = sqrt(2)/4") {
  TriMesh m = generate_rect_mesh(4, 4, 1.0, 1.0);
  CHECK(m.max_h() == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("rect mesh: positive areas, conforming, exact area, Euler formula") {
  TriMesh m = generate_rect_mesh(7, 5, 2.0, 1.5);
  for (int k = 0; k < m.num_cells(); ++k) CHECK(m.cell_area(k) > 0.0);
  check_conforming(m);
  CHECK(m.total_area() == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(euler_characteristic(m) == 1);
}

TEST_CASE("rect mesh: h_K equals the longest edge") {
  TriMesh m = generate_rect_mesh(3, 2, 1.0, 1.0);
  for (int k = 0; k < m.num_cells(); ++k) {
    double h = 0.0;
    for (int e = 0; e < 3; ++e) {
      const Vec2& a = m.vertices[m.triangles[k][e]];
      const Vec2& b = m.vertices[m.triangles[k][(e + 1) % 3]];
      h = std::max(h, std::hypot(a.x - b.x, a.y - b.y));
    }
    CHECK(m.h_per_cell[k] == doctest::Approx(h));
  }
}

TEST_CASE("rect mesh: invalid inputs") {
  CHECK_THROWS_AS(generate_rect_mesh(0, 1, 1.0, 1.0), GeometryError);
  CHECK_THROWS_AS(generate_rect_mesh(1, 1, 0.0, 1.0), GeometryError);
}

TEST_CASE("channel mesh: degenerate radius rejected") {
  CHECK_THROWS_AS(generate_channel_mesh(0.05, {0.2, 0.2}, 0.0), GeometryError);
}

TEST_CASE("channel mesh: cylinder outside the channel rejected") {
  CHECK_THROWS_AS(generate_channel_mesh(0.05, {0.0, 0.2}, 0.05), GeometryError);
}

TEST_CASE("channel mesh: benchmark-resolution grid") {
  TriMesh m = generate_channel_mesh(2.76e-2, {0.2, 0.2}, 0.05);
  check_conforming(m);
  for (int k = 0; k < m.num_cells(); ++k) CHECK(m.cell_area(k) > 0.0);

  // max h_K within a factor 2 of the target
  CHECK(m.max_h() <= 2.0 * 2.76e-2);
  CHECK(m.max_h() >= 0.5 * 2.76e-2);

  // annulus-like topology: V - E + F = 0
  CHECK(euler_characteristic(m) == 0);

  // area equals rectangle minus the polygonal hole, within the polygon error
  double rect_area = 2.2 * 0.41;
  double hole_area = M_PI * 0.05 * 0.05;
  CHECK(m.total_area() == doctest::Approx(rect_area - hole_area).epsilon(2e-3));
  CHECK(m.total_area() < rect_area - hole_area * 0.95);

  // every boundary tag present, cylinder edges carry vertices on the circle
  std::set<BoundaryTag> tags;
  for (const auto& be : m.boundary_edges) {
    tags.insert(be.tag);
    if (be.tag == BoundaryTag::Cylinder) {
      for (int v : {be.v0, be.v1}) {
        double d = std::hypot(m.vertices[v].x - 0.2, m.vertices[v].y - 0.2);
        CHECK(d == doctest::Approx(0.05).epsilon(1e-9));
      }
    }
  }
  CHECK(tags.size() == 5);
}

TEST_CASE("channel mesh: grading refines near the cylinder") {
  TriMesh m = generate_channel_mesh(4e-2, {0.2, 0.2}, 0.05);
  double near = 0.0, far = 0.0;
  for (int k = 0; k < m.num_cells(); ++k) {
    const auto& t = m.triangles[k];
    Vec2 c{(m.vertices[t[0]].x + m.vertices[t[1]].x + m.vertices[t[2]].x) / 3.0,
           (m.vertices[t[0]].y + m.vertices[t[1]].y + m.vertices[t[2]].y) / 3.0};
    double d = std::hypot(c.x - 0.2, c.y - 0.2);
    if (d < 0.15)
      near = std::max(near, m.h_per_cell[k]);
    else if (c.x > 1.0)
      far = std::max(far, m.h_per_cell[k]);
  }
  CHECK(near < 0.75 * far);
}
