#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "lpsrom/errors.hpp"
#include "lpsrom/io.hpp"

using namespace lpsrom;

namespace {

struct TempDir {
  std::filesystem::path dir;
  TempDir() {
    dir = std::filesystem::temp_directory_path() / "lpsrom_io_test";
    std::filesystem::create_directories(dir);
  }
  ~TempDir() { std::filesystem::remove_all(dir); }
  std::string path(const std::string& name) const { return (dir / name).string(); }
};

SnapshotSet make_set(unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> dist;
  SnapshotSet s;
  const int nv = 18, np = 9, n = 5;
  s.velocity.resize(nv, n);
  s.pressure.resize(np, n);
  for (int j = 0; j < n; ++j) {
    s.times.push_back(0.1 * (j + 1));
    for (int i = 0; i < nv; ++i) s.velocity(i, j) = dist(rng);
    for (int i = 0; i < np; ++i) s.pressure(i, j) = dist(rng);
  }
  s.has_initial = true;
  s.initial_time = 0.1;
  s.initial_velocity = VecX::Random(nv);
  s.mean_velocity = VecX::Random(nv);
  return s;
}

}  // namespace

TEST_CASE("snapshot round trip is bitwise exact") {
  TempDir tmp;
  SnapshotSet s = make_set(1);
  write_snapshots(s, tmp.path("snaps.bin"));
  SnapshotSet r = read_snapshots(tmp.path("snaps.bin"));
  CHECK(r.times == s.times);
  CHECK((r.velocity - s.velocity).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((r.pressure - s.pressure).lpNorm<Eigen::Infinity>() == 0.0);
  REQUIRE(r.mean_velocity.has_value());
  CHECK((*r.mean_velocity - *s.mean_velocity).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(r.has_initial);
  CHECK(r.initial_time == s.initial_time);
  CHECK((r.initial_velocity - s.initial_velocity).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("snapshot file errors: truncated and wrong magic") {
  TempDir tmp;
  SnapshotSet s = make_set(2);
  write_snapshots(s, tmp.path("snaps.bin"));

  auto size = std::filesystem::file_size(tmp.path("snaps.bin"));
  std::filesystem::resize_file(tmp.path("snaps.bin"), size / 2);
  CHECK_THROWS_AS(read_snapshots(tmp.path("snaps.bin")), FormatError);

  std::ofstream bad(tmp.path("bad.bin"), std::ios::binary);
  bad << "NOTMAGIC and some padding to get past the header reads";
  bad.close();
  CHECK_THROWS_AS(read_snapshots(tmp.path("bad.bin")), FormatError);

  CHECK_THROWS_AS(read_snapshots(tmp.path("missing.bin")), FormatError);
}

TEST_CASE("basis round trip preserves eigenvalues, modes and the mean") {
  TempDir tmp;
  PodBasis vel, pres;
  vel.modes = MatX::Random(20, 3);
  vel.eigenvalues = VecX::Random(6).cwiseAbs();
  vel.total_rank = 6;
  vel.dt_weight = 0.01;
  vel.mean_field = VecX::Random(20);
  pres.modes = MatX::Random(10, 3);
  pres.eigenvalues = VecX::Random(5).cwiseAbs();
  pres.total_rank = 5;
  pres.dt_weight = 0.01;
  write_basis(vel, pres, tmp.path("basis.bin"));
  auto [v, p] = read_basis(tmp.path("basis.bin"));
  CHECK((v.modes - vel.modes).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((p.modes - pres.modes).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((v.eigenvalues - vel.eigenvalues).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK((p.eigenvalues - pres.eigenvalues).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(v.total_rank == 6);
  CHECK(p.total_rank == 5);
  CHECK(v.dt_weight == 0.01);
  REQUIRE(v.mean_field.has_value());
  CHECK((*v.mean_field - *vel.mean_field).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(!p.mean_field.has_value());
}

TEST_CASE("mesh text format round trip") {
  TempDir tmp;
  TriMesh m = generate_rect_mesh(3, 2, 1.4, 0.7);
  write_mesh_text(m, tmp.path("mesh.txt"));
  TriMesh r = read_mesh_text(tmp.path("mesh.txt"));
  CHECK(r.num_vertices() == m.num_vertices());
  CHECK(r.num_cells() == m.num_cells());
  CHECK(r.boundary_edges.size() == m.boundary_edges.size());
  for (int v = 0; v < m.num_vertices(); ++v) {
    CHECK(r.vertices[v].x == m.vertices[v].x);
    CHECK(r.vertices[v].y == m.vertices[v].y);
  }
  for (int k = 0; k < m.num_cells(); ++k) CHECK(r.triangles[k] == m.triangles[k]);
}

TEST_CASE("mesh text format rejects malformed input") {
  TempDir tmp;
  std::ofstream os(tmp.path("bad.txt"));
  os << "vertices 2\n0 0\n1 0\ntriangles 1\n0 1 5\nboundary 0\n";
  os.close();
  CHECK_THROWS_AS(read_mesh_text(tmp.path("bad.txt")), GeometryError);

  std::ofstream os2(tmp.path("bad2.txt"));
  os2 << "points 2\n";
  os2.close();
  CHECK_THROWS_AS(read_mesh_text(tmp.path("bad2.txt")), FormatError);
}

TEST_CASE("vtk export: constant field values and subdivided cell count") {
  TempDir tmp;
  TriMesh m = generate_rect_mesh(2, 2, 1.0, 1.0);
  FeSpace space(m, 2);
  FeFunction c(space, 1);
  c.coeffs.setConstant(7.5);
  FeFunction v(space, 2);
  v.coeffs.head(space.dof_count()).setConstant(1.0);
  v.coeffs.tail(space.dof_count()).setConstant(-2.0);
  export_vtk(space, {{"pressure", &c}, {"velocity", &v}}, tmp.path("out.vtk"));

  std::ifstream is(tmp.path("out.vtk"));
  std::string line;
  int cells = -1, scalar_count = 0;
  bool in_scalars = false;
  while (std::getline(is, line)) {
    if (line.rfind("CELLS ", 0) == 0) cells = std::stoi(line.substr(6));
    if (line.rfind("LOOKUP_TABLE", 0) == 0) {
      in_scalars = true;
      continue;
    }
    if (in_scalars) {
      if (line.rfind("VECTORS", 0) == 0) {
        in_scalars = false;
        continue;
      }
      if (!line.empty()) {
        CHECK(std::stod(line) == 7.5);
        ++scalar_count;
      }
    }
  }
  CHECK(cells == 4 * m.num_cells());
  CHECK(scalar_count == space.dof_count());
}

TEST_CASE("csv round trip and qoi csv") {
  TempDir tmp;
  QoiSeries q;
  for (int i = 0; i < 4; ++i) {
    q.times.push_back(0.5 * i);
    q.c_d.push_back(3.0 + 0.01 * i);
    q.c_l.push_back(-0.2 * i);
    q.e_kin.push_back(1.0 / (1 + i));
    q.div_strong.push_back(1e-3 * i);
    q.div_weak.push_back(5e-4 * i);
  }
  write_qoi_csv(q, tmp.path("qoi.csv"));
  QoiSeries r = read_qoi_csv(tmp.path("qoi.csv"));
  CHECK(r.times == q.times);
  CHECK(r.c_d == q.c_d);
  CHECK(r.c_l == q.c_l);
  CHECK(r.e_kin == q.e_kin);
  CHECK(r.div_weak == q.div_weak);

  // byte-identical rewrite
  write_qoi_csv(r, tmp.path("qoi2.csv"));
  std::ifstream a(tmp.path("qoi.csv")), b(tmp.path("qoi2.csv"));
  std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
  std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
  CHECK(sa == sb);
}
