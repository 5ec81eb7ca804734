#include "lpsrom/io.hpp"

#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>

#include "lpsrom/errors.hpp"

namespace lpsrom {

namespace {

constexpr char kMagic[7] = {'L', 'P', 'S', 'R', 'O', 'M', '1'};

struct BinWriter {
  std::FILE* f;
  explicit BinWriter(const std::string& path) {
    f = std::fopen(path.c_str(), "wb");
    if (!f) throw FormatError("cannot open '" + path + "' for writing");
  }
  ~BinWriter() {
    if (f) std::fclose(f);
  }
  void raw(const void* p, std::size_t n) {
    if (std::fwrite(p, 1, n, f) != n) throw FormatError("short write");
  }
  void u32(std::uint32_t v) { raw(&v, 4); }
  void f64(double v) { raw(&v, 8); }
  void f64s(const double* p, std::size_t n) { raw(p, 8 * n); }
};

struct BinReader {
  std::FILE* f;
  std::string path;
  explicit BinReader(const std::string& p) : path(p) {
    f = std::fopen(p.c_str(), "rb");
    if (!f) throw FormatError("cannot open '" + p + "' for reading");
  }
  ~BinReader() {
    if (f) std::fclose(f);
  }
  void raw(void* p, std::size_t n) {
    if (std::fread(p, 1, n, f) != n)
      throw FormatError("truncated file '" + path + "'");
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, 4);
    return v;
  }
  double f64() {
    double v;
    raw(&v, 8);
    return v;
  }
  void f64s(double* p, std::size_t n) { raw(p, 8 * n); }
  void check_magic() {
    char m[7];
    raw(m, 7);
    if (std::memcmp(m, kMagic, 7) != 0)
      throw FormatError("bad magic in '" + path + "'");
  }
};

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void write_mesh_text(const TriMesh& mesh, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  os << "vertices " << mesh.num_vertices() << "\n";
  for (const auto& v : mesh.vertices)
    os << fmt_double(v.x) << " " << fmt_double(v.y) << "\n";
  os << "triangles " << mesh.num_cells() << "\n";
  for (const auto& t : mesh.triangles) os << t[0] << " " << t[1] << " " << t[2] << "\n";
  os << "boundary " << mesh.boundary_edges.size() << "\n";
  for (const auto& b : mesh.boundary_edges)
    os << b.v0 << " " << b.v1 << " " << to_string(b.tag) << "\n";
}

TriMesh read_mesh_text(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "' for reading");
  TriMesh m;
  std::string kw;
  int n = 0;
  if (!(is >> kw >> n) || kw != "vertices") throw FormatError("mesh file: expected 'vertices N'");
  m.vertices.resize(n);
  for (auto& v : m.vertices)
    if (!(is >> v.x >> v.y)) throw FormatError("mesh file: truncated vertex list");
  if (!(is >> kw >> n) || kw != "triangles")
    throw FormatError("mesh file: expected 'triangles M'");
  m.triangles.resize(n);
  for (auto& t : m.triangles)
    if (!(is >> t[0] >> t[1] >> t[2])) throw FormatError("mesh file: truncated triangle list");
  if (!(is >> kw >> n) || kw != "boundary") throw FormatError("mesh file: expected 'boundary B'");
  m.boundary_edges.resize(n);
  for (auto& b : m.boundary_edges) {
    std::string tag;
    if (!(is >> b.v0 >> b.v1 >> tag)) throw FormatError("mesh file: truncated boundary list");
    b.tag = boundary_tag_from_string(tag);
  }
  m.finalize();
  return m;
}

void write_snapshots(const SnapshotSet& set, const std::string& path) {
  BinWriter w(path);
  w.raw(kMagic, 7);
  w.u32(static_cast<std::uint32_t>(set.velocity.rows()));
  w.u32(static_cast<std::uint32_t>(set.pressure.rows()));
  w.u32(static_cast<std::uint32_t>(set.count()));
  std::uint32_t flags = 0;
  if (set.mean_velocity) flags |= 1u;
  if (set.has_initial) flags |= 2u;
  w.u32(flags);
  w.f64s(set.times.data(), set.times.size());
  w.f64s(set.velocity.data(), static_cast<std::size_t>(set.velocity.size()));
  w.f64s(set.pressure.data(), static_cast<std::size_t>(set.pressure.size()));
  if (set.mean_velocity)
    w.f64s(set.mean_velocity->data(), static_cast<std::size_t>(set.mean_velocity->size()));
  if (set.has_initial) {
    w.f64(set.initial_time);
    w.f64s(set.initial_velocity.data(), static_cast<std::size_t>(set.initial_velocity.size()));
  }
}

SnapshotSet read_snapshots(const std::string& path) {
  BinReader r(path);
  r.check_magic();
  std::uint32_t nv = r.u32(), np = r.u32(), ns = r.u32(), flags = r.u32();
  SnapshotSet s;
  s.times.resize(ns);
  r.f64s(s.times.data(), ns);
  s.velocity.resize(nv, ns);
  r.f64s(s.velocity.data(), static_cast<std::size_t>(nv) * ns);
  s.pressure.resize(np, ns);
  r.f64s(s.pressure.data(), static_cast<std::size_t>(np) * ns);
  if (flags & 1u) {
    VecX mean(nv);
    r.f64s(mean.data(), nv);
    s.mean_velocity = mean;
  }
  if (flags & 2u) {
    s.has_initial = true;
    s.initial_time = r.f64();
    s.initial_velocity.resize(nv);
    r.f64s(s.initial_velocity.data(), nv);
  }
  return s;
}

void write_basis(const PodBasis& vel, const PodBasis& pres, const std::string& path) {
  BinWriter w(path);
  w.raw(kMagic, 7);
  w.u32(static_cast<std::uint32_t>(vel.modes.rows()));
  w.u32(static_cast<std::uint32_t>(pres.modes.rows()));
  w.u32(static_cast<std::uint32_t>(vel.modes.cols()));
  std::uint32_t flags = vel.mean_field ? 1u : 0u;
  w.u32(flags);
  w.u32(static_cast<std::uint32_t>(vel.eigenvalues.size()));
  w.u32(static_cast<std::uint32_t>(pres.eigenvalues.size()));
  w.f64(vel.dt_weight);
  w.f64s(vel.eigenvalues.data(), vel.eigenvalues.size());
  w.f64s(pres.eigenvalues.data(), pres.eigenvalues.size());
  w.f64s(vel.modes.data(), static_cast<std::size_t>(vel.modes.size()));
  w.f64s(pres.modes.data(), static_cast<std::size_t>(pres.modes.size()));
  if (vel.mean_field) w.f64s(vel.mean_field->data(), vel.mean_field->size());
}

std::pair<PodBasis, PodBasis> read_basis(const std::string& path) {
  BinReader r(path);
  r.check_magic();
  std::uint32_t nv = r.u32(), np = r.u32(), rr = r.u32(), flags = r.u32();
  std::uint32_t rank_v = r.u32(), rank_p = r.u32();
  double dtw = r.f64();
  PodBasis vel, pres;
  vel.dt_weight = pres.dt_weight = dtw;
  vel.total_rank = rank_v;
  pres.total_rank = rank_p;
  vel.eigenvalues.resize(rank_v);
  r.f64s(vel.eigenvalues.data(), rank_v);
  pres.eigenvalues.resize(rank_p);
  r.f64s(pres.eigenvalues.data(), rank_p);
  vel.modes.resize(nv, rr);
  r.f64s(vel.modes.data(), static_cast<std::size_t>(nv) * rr);
  pres.modes.resize(np, rr);
  r.f64s(pres.modes.data(), static_cast<std::size_t>(np) * rr);
  if (flags & 1u) {
    VecX mean(nv);
    r.f64s(mean.data(), nv);
    vel.mean_field = mean;
  }
  return {std::move(vel), std::move(pres)};
}

void export_vtk(const FeSpace& space,
                const std::vector<std::pair<std::string, const FeFunction*>>& fields,
                const std::string& path) {
  if (space.order() != 2) throw ParameterError("export_vtk: expects the P2 space");
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  const int n = space.dof_count();
  os << "# vtk DataFile Version 3.0\nlpsrom field export\nASCII\n";
  os << "DATASET UNSTRUCTURED_GRID\n";
  os << "POINTS " << n << " double\n";
  for (int d = 0; d < n; ++d) {
    const Vec2& p = space.dof_coord(d);
    os << fmt_double(p.x) << " " << fmt_double(p.y) << " 0\n";
  }
  const int nc = space.mesh().num_cells();
  os << "CELLS " << 4 * nc << " " << 4 * nc * 4 << "\n";
  for (int k = 0; k < nc; ++k) {
    const auto& d = space.cell_dofs(k);
    // P2 triangle split into 4 linear triangles
    os << "3 " << d[0] << " " << d[3] << " " << d[5] << "\n";
    os << "3 " << d[3] << " " << d[1] << " " << d[4] << "\n";
    os << "3 " << d[5] << " " << d[4] << " " << d[2] << "\n";
    os << "3 " << d[3] << " " << d[4] << " " << d[5] << "\n";
  }
  os << "CELL_TYPES " << 4 * nc << "\n";
  for (int k = 0; k < 4 * nc; ++k) os << "5\n";
  if (!fields.empty()) {
    os << "POINT_DATA " << n << "\n";
    for (const auto& [name, f] : fields) {
      if (f->components == 1) {
        os << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
        for (int d = 0; d < n; ++d) os << fmt_double(f->coeffs[d]) << "\n";
      } else {
        os << "VECTORS " << name << " double\n";
        for (int d = 0; d < n; ++d)
          os << fmt_double(f->coeffs[d]) << " " << fmt_double(f->coeffs[d + n]) << " 0\n";
      }
    }
  }
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path + "' for writing");
  for (std::size_t i = 0; i < header.size(); ++i)
    os << header[i] << (i + 1 < header.size() ? "," : "\n");
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i)
      os << fmt_double(row[i]) << (i + 1 < row.size() ? "," : "\n");
  }
}

std::vector<std::vector<double>> read_csv(const std::string& path,
                                          std::vector<std::string>* header) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path + "' for reading");
  std::string line;
  if (!std::getline(is, line)) throw FormatError("empty csv '" + path + "'");
  if (header) {
    header->clear();
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header->push_back(cell);
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::strtod(cell.c_str(), nullptr));
    rows.push_back(std::move(row));
  }
  return rows;
}

void write_qoi_csv(const QoiSeries& qoi, const std::string& path) {
  std::vector<std::vector<double>> rows;
  rows.reserve(qoi.times.size());
  for (std::size_t i = 0; i < qoi.times.size(); ++i)
    rows.push_back({qoi.times[i], qoi.c_d[i], qoi.c_l[i], qoi.e_kin[i], qoi.div_strong[i],
                    qoi.div_weak[i]});
  write_csv(path, {"t", "c_d", "c_l", "e_kin", "div_strong", "div_weak"}, rows);
}

QoiSeries read_qoi_csv(const std::string& path) {
  auto rows = read_csv(path);
  QoiSeries q;
  for (const auto& r : rows) {
    if (r.size() < 6) throw FormatError("qoi csv: short row in '" + path + "'");
    q.times.push_back(r[0]);
    q.c_d.push_back(r[1]);
    q.c_l.push_back(r[2]);
    q.e_kin.push_back(r[3]);
    q.div_strong.push_back(r[4]);
    q.div_weak.push_back(r[5]);
  }
  return q;
}

}  // namespace lpsrom
