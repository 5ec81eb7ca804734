#include "lpsrom/mesh.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <deque>
#include <limits>
#include <tuple>

#include "lpsrom/errors.hpp"

namespace lpsrom {

const char* to_string(BoundaryTag tag) {
  switch (tag) {
    case BoundaryTag::Inlet: return "inlet";
    case BoundaryTag::Outlet: return "outlet";
    case BoundaryTag::WallTop: return "wall_top";
    case BoundaryTag::WallBottom: return "wall_bottom";
    case BoundaryTag::Cylinder: return "cylinder";
  }
  return "?";
}

BoundaryTag boundary_tag_from_string(const std::string& s) {
  if (s == "inlet") return BoundaryTag::Inlet;
  if (s == "outlet") return BoundaryTag::Outlet;
  if (s == "wall_top") return BoundaryTag::WallTop;
  if (s == "wall_bottom") return BoundaryTag::WallBottom;
  if (s == "cylinder") return BoundaryTag::Cylinder;
  throw FormatError("unknown boundary tag '" + s + "'");
}

namespace {

double signed_area2(const Vec2& a, const Vec2& b, const Vec2& c) {
  return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
}

double dist(const Vec2& a, const Vec2& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

}  // namespace

double TriMesh::cell_area(int k) const {
  const auto& t = triangles[k];
  return 0.5 * signed_area2(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
}

double TriMesh::max_h() const {
  double h = 0.0;
  for (double hk : h_per_cell) h = std::max(h, hk);
  return h;
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (int k = 0; k < num_cells(); ++k) a += cell_area(k);
  return a;
}

void TriMesh::finalize() {
  const int nv = num_vertices();
  h_per_cell.assign(triangles.size(), 0.0);
  for (std::size_t k = 0; k < triangles.size(); ++k) {
    auto& t = triangles[k];
    for (int i : t)
      if (i < 0 || i >= nv) throw GeometryError("triangle vertex index out of range");
    double a2 = signed_area2(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
    if (a2 < 0.0) {
      std::swap(t[1], t[2]);
      a2 = -a2;
    }
    if (a2 <= 0.0) throw GeometryError("degenerate triangle in mesh");
    double h = 0.0;
    for (int e = 0; e < 3; ++e)
      h = std::max(h, dist(vertices[t[e]], vertices[t[(e + 1) % 3]]));
    h_per_cell[k] = h;
  }

  // Edge table via sorted (lo,hi,cell,local) tuples.
  std::vector<std::tuple<int, int, int, int>> all;
  all.reserve(triangles.size() * 3);
  for (std::size_t k = 0; k < triangles.size(); ++k) {
    const auto& t = triangles[k];
    for (int e = 0; e < 3; ++e) {
      int a = t[e], b = t[(e + 1) % 3];
      all.emplace_back(std::min(a, b), std::max(a, b), static_cast<int>(k), e);
    }
  }
  std::sort(all.begin(), all.end());

  edges.clear();
  cell_edges.assign(triangles.size(), {-1, -1, -1});
  std::vector<int> edge_count;
  for (std::size_t i = 0; i < all.size();) {
    auto [lo, hi, cell, local] = all[i];
    int id = static_cast<int>(edges.size());
    edges.push_back({lo, hi});
    int cnt = 0;
    while (i < all.size() && std::get<0>(all[i]) == lo && std::get<1>(all[i]) == hi) {
      cell_edges[std::get<2>(all[i])][std::get<3>(all[i])] = id;
      ++cnt;
      ++i;
    }
    edge_count.push_back(cnt);
    if (cnt > 2) throw GeometryError("non-conforming mesh: edge shared by >2 cells");
  }

  // Boundary edges must be exactly the count-1 edges, one tag each.
  std::vector<std::array<int, 2>> from_count;
  for (std::size_t e = 0; e < edges.size(); ++e)
    if (edge_count[e] == 1) from_count.push_back(edges[e]);
  std::vector<std::array<int, 2>> declared;
  declared.reserve(boundary_edges.size());
  for (const auto& be : boundary_edges)
    declared.push_back({std::min(be.v0, be.v1), std::max(be.v0, be.v1)});
  std::sort(declared.begin(), declared.end());
  if (declared != from_count)
    throw GeometryError("boundary edge list does not match mesh boundary");
}

TriMesh generate_rect_mesh(int nx, int ny, double width, double height) {
  if (nx < 1 || ny < 1) throw GeometryError("generate_rect_mesh: nx, ny must be >= 1");
  if (!(width > 0.0) || !(height > 0.0))
    throw GeometryError("generate_rect_mesh: zero or negative dimensions");

  TriMesh m;
  auto vid = [nx](int i, int j) { return j * (nx + 1) + i; };
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      m.vertices.push_back({width * i / nx, height * j / ny});

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      int a = vid(i, j), b = vid(i + 1, j), c = vid(i + 1, j + 1), d = vid(i, j + 1);
      if ((i + j) % 2 == 0) {
        m.triangles.push_back({a, b, c});
        m.triangles.push_back({a, c, d});
      } else {
        m.triangles.push_back({a, b, d});
        m.triangles.push_back({b, c, d});
      }
    }
  }

  for (int i = 0; i < nx; ++i) {
    m.boundary_edges.push_back({vid(i, 0), vid(i + 1, 0), BoundaryTag::WallBottom});
    m.boundary_edges.push_back({vid(i, ny), vid(i + 1, ny), BoundaryTag::WallTop});
  }
  for (int j = 0; j < ny; ++j) {
    m.boundary_edges.push_back({vid(0, j), vid(0, j + 1), BoundaryTag::Inlet});
    m.boundary_edges.push_back({vid(nx, j), vid(nx, j + 1), BoundaryTag::Outlet});
  }
  m.finalize();
  return m;
}

// ---------------------------------------------------------------------------
// Delaunay machinery for the channel mesh.
// ---------------------------------------------------------------------------

namespace {

struct DelTri {
  int v[3];
  int nb[3];  // neighbor across edge (v[i], v[i+1]); -1 = none
  bool alive = true;
};

long double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
  long double acx = (long double)a.x - c.x, acy = (long double)a.y - c.y;
  long double bcx = (long double)b.x - c.x, bcy = (long double)b.y - c.y;
  return acx * bcy - acy * bcx;
}

// > 0 when p lies strictly inside the circumcircle of CCW triangle (a,b,c).
long double incircle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& p) {
  long double adx = (long double)a.x - p.x, ady = (long double)a.y - p.y;
  long double bdx = (long double)b.x - p.x, bdy = (long double)b.y - p.y;
  long double cdx = (long double)c.x - p.x, cdy = (long double)c.y - p.y;
  long double ad = adx * adx + ady * ady;
  long double bd = bdx * bdx + bdy * bdy;
  long double cd = cdx * cdx + cdy * cdy;
  return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
         ad * (bdx * cdy - bdy * cdx);
}

class Delaunay {
public:
  std::vector<Vec2> pts;
  std::vector<DelTri> tris;

  explicit Delaunay(double x0, double y0, double x1, double y1) {
    double cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
    double d = 40.0 * std::max(x1 - x0, y1 - y0);
    pts.push_back({cx - d, cy - 0.7 * d});
    pts.push_back({cx + d, cy - 0.7 * d});
    pts.push_back({cx, cy + d});
    tris.push_back({{0, 1, 2}, {-1, -1, -1}, true});
  }

  int insert(const Vec2& p) {
    int t0 = locate(p);
    if (t0 < 0) return -1;

    // Grow the cavity of triangles whose circumcircle strictly contains p.
    std::vector<int> bad;
    std::vector<char> in_bad(tris.size(), 0);
    std::deque<int> work{t0};
    in_bad[t0] = 1;
    while (!work.empty()) {
      int t = work.front();
      work.pop_front();
      bad.push_back(t);
      for (int e = 0; e < 3; ++e) {
        int n = tris[t].nb[e];
        if (n < 0 || in_bad[n]) continue;
        const DelTri& nt = tris[n];
        if (incircle(pts[nt.v[0]], pts[nt.v[1]], pts[nt.v[2]], p) > 0) {
          in_bad[n] = 1;
          work.push_back(n);
        }
      }
    }

    // Cavity boundary as directed edges (a,b) with outside neighbor.
    struct BEdge {
      int a, b, outer;
    };
    std::vector<BEdge> ring;
    for (int t : bad) {
      for (int e = 0; e < 3; ++e) {
        int n = tris[t].nb[e];
        if (n < 0 || !in_bad[n])
          ring.push_back({tris[t].v[e], tris[t].v[(e + 1) % 3], n});
      }
    }

    // Reject insertions that would create a degenerate fan.
    for (const auto& be : ring)
      if (orient2d(pts[be.a], pts[be.b], p) <= 0) return -1;

    int pid = static_cast<int>(pts.size());
    pts.push_back(p);

    for (int t : bad) tris[t].alive = false;

    // Fan the cavity; link siblings through a per-vertex lookup.
    std::vector<int> first_of_a(ring.size());
    std::vector<int> new_ids(ring.size());
    for (std::size_t i = 0; i < ring.size(); ++i) {
      new_ids[i] = static_cast<int>(tris.size());
      DelTri nt;
      nt.v[0] = ring[i].a;
      nt.v[1] = ring[i].b;
      nt.v[2] = pid;
      nt.nb[0] = ring[i].outer;
      nt.nb[1] = nt.nb[2] = -1;
      tris.push_back(nt);
      if (ring[i].outer >= 0) {
        DelTri& out = tris[ring[i].outer];
        for (int e = 0; e < 3; ++e)
          if (out.v[e] == ring[i].b && out.v[(e + 1) % 3] == ring[i].a)
            out.nb[e] = new_ids[i];
      }
    }
    for (std::size_t i = 0; i < ring.size(); ++i) {
      for (std::size_t j = 0; j < ring.size(); ++j) {
        if (ring[j].a == ring[i].b) tris[new_ids[i]].nb[1] = new_ids[j];
        if (ring[j].b == ring[i].a) tris[new_ids[i]].nb[2] = new_ids[j];
      }
    }
    last_hint_ = new_ids.empty() ? last_hint_ : new_ids[0];
    return pid;
  }

  int locate(const Vec2& p) const {
    int t = last_hint_;
    if (t < 0 || t >= (int)tris.size() || !tris[t].alive) t = first_alive();
    for (int step = 0; step < 4 * (int)tris.size() + 16; ++step) {
      const DelTri& tri = tris[t];
      int next = -1;
      for (int e = 0; e < 3; ++e) {
        if (orient2d(pts[tri.v[e]], pts[tri.v[(e + 1) % 3]], p) < 0) {
          next = tri.nb[e];
          break;
        }
      }
      if (next < 0) {
        if (next == -1 && inside(t, p)) return t;
        break;
      }
      t = next;
    }
    // Deterministic fallback.
    for (int k = 0; k < (int)tris.size(); ++k)
      if (tris[k].alive && inside(k, p)) return k;
    return -1;
  }

private:
  mutable int last_hint_ = 0;

  int first_alive() const {
    for (int k = 0; k < (int)tris.size(); ++k)
      if (tris[k].alive) return k;
    return 0;
  }

  bool inside(int t, const Vec2& p) const {
    const DelTri& tri = tris[t];
    for (int e = 0; e < 3; ++e)
      if (orient2d(pts[tri.v[e]], pts[tri.v[(e + 1) % 3]], p) < 0) return false;
    return true;
  }
};

Vec2 circumcenter(const Vec2& a, const Vec2& b, const Vec2& c) {
  double d = 2.0 * ((b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x));
  double ab = (b.x - a.x) * (b.x + a.x) + (b.y - a.y) * (b.y + a.y);
  double ac = (c.x - a.x) * (c.x + a.x) + (c.y - a.y) * (c.y + a.y);
  return {((c.y - a.y) * ab - (b.y - a.y) * ac) / d,
          ((b.x - a.x) * ac - (c.x - a.x) * ab) / d};
}

double tri_quality(const Vec2& a, const Vec2& b, const Vec2& c) {
  double l0 = dist(a, b), l1 = dist(b, c), l2 = dist(c, a);
  double area = 0.5 * std::abs(signed_area2(a, b, c));
  double s2 = l0 * l0 + l1 * l1 + l2 * l2;
  return s2 > 0 ? 4.0 * std::sqrt(3.0) * area / s2 : 0.0;  // 1 for equilateral
}

}  // namespace

TriMesh generate_channel_mesh(double target_h, Vec2 center, double radius,
                              const ChannelMeshOptions& opts) {
  const double L = opts.channel_length, H = opts.channel_height;
  if (!(target_h > 0.0)) throw GeometryError("generate_channel_mesh: target_h must be > 0");
  if (!(radius > 0.0)) throw GeometryError("generate_channel_mesh: cylinder radius must be > 0");
  if (center.x - radius <= 0.0 || center.x + radius >= L || center.y - radius <= 0.0 ||
      center.y + radius >= H)
    throw GeometryError("generate_channel_mesh: cylinder not strictly inside channel");
  if (target_h > 0.5 * radius * 3.14)
    throw GeometryError("generate_channel_mesh: target_h too coarse for the cylinder");

  const double g = std::clamp(opts.grading, 0.05, 1.0);
  auto size_at = [&](const Vec2& p) {
    double d = dist(p, center) - radius;
    double f = (d <= 2.0 * radius) ? g
               : (d >= 4.0 * radius)
                   ? 1.0
                   : g + (1.0 - g) * (d - 2.0 * radius) / (2.0 * radius);
    return target_h * f;
  };

  Delaunay del(0.0, 0.0, L, H);

  // Rectangle border, walked at the local target size and rescaled so the
  // last point lands on the corner.
  auto add_side = [&](Vec2 p0, Vec2 p1) {
    double len = dist(p0, p1);
    std::vector<double> s{0.0};
    while (s.back() < len) {
      Vec2 cur{p0.x + (p1.x - p0.x) * s.back() / len, p0.y + (p1.y - p0.y) * s.back() / len};
      s.push_back(s.back() + size_at(cur));
    }
    double scale = len / s.back();
    for (std::size_t i = 0; i + 1 < s.size(); ++i) {
      double t = s[i] * scale / len;
      del.insert({p0.x + (p1.x - p0.x) * t, p0.y + (p1.y - p0.y) * t});
    }
  };
  add_side({0, 0}, {L, 0});
  add_side({L, 0}, {L, H});
  add_side({L, H}, {0, H});
  add_side({0, H}, {0, 0});

  // Circle polygon, resolved at the graded local size; the half-step angular
  // offset keeps vertices off the horizontal symmetry line.
  int n_circ = std::max(16, (int)std::ceil(2.0 * M_PI * radius / (g * target_h)));
  std::vector<Vec2> circle_pts;
  for (int k = 0; k < n_circ; ++k) {
    double th = 2.0 * M_PI * (k + 0.5) / n_circ;
    Vec2 p{center.x + radius * std::cos(th), center.y + radius * std::sin(th)};
    circle_pts.push_back(p);
    del.insert(p);
  }
  const double chord = 2.0 * radius * std::sin(M_PI / n_circ);

  auto in_domain = [&](const Vec2& p, double margin) {
    if (p.x < margin || p.x > L - margin || p.y < margin || p.y > H - margin) return false;
    return dist(p, center) > radius + margin;
  };

  // Size- and quality-driven circumcenter refinement.
  std::deque<int> queue;
  for (int k = 0; k < (int)del.tris.size(); ++k) queue.push_back(k);
  int inserted = 0;
  const int max_inserted = 400000;
  while (!queue.empty() && inserted < max_inserted) {
    int t = queue.front();
    queue.pop_front();
    if (t >= (int)del.tris.size() || !del.tris[t].alive) continue;
    const DelTri& tri = del.tris[t];
    if (tri.v[0] < 3 || tri.v[1] < 3 || tri.v[2] < 3) continue;  // touches super-triangle
    const Vec2 &a = del.pts[tri.v[0]], &b = del.pts[tri.v[1]], &c = del.pts[tri.v[2]];
    Vec2 cen{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
    if (!in_domain(cen, 0.0)) continue;
    double hk = std::max({dist(a, b), dist(b, c), dist(c, a)});
    double s = size_at(cen);
    bool too_big = hk > 1.35 * s;
    bool poor = tri_quality(a, b, c) < 0.55;
    if (!too_big && !poor) continue;
    Vec2 cc = circumcenter(a, b, c);
    double sc = size_at(cc);
    if (!in_domain(cc, 0.45 * sc)) continue;
    if (dist(cc, center) < radius + 0.8 * chord) continue;  // protect circle segments
    int before = (int)del.tris.size();
    if (del.insert(cc) >= 0) {
      ++inserted;
      for (int k = before; k < (int)del.tris.size(); ++k) queue.push_back(k);
    }
  }

  // Extract alive triangles inside the domain, dropping the hole.
  TriMesh m;
  std::vector<int> remap(del.pts.size(), -1);
  for (const auto& tri : del.tris) {
    if (!tri.alive) continue;
    if (tri.v[0] < 3 || tri.v[1] < 3 || tri.v[2] < 3) continue;
    const Vec2 &a = del.pts[tri.v[0]], &b = del.pts[tri.v[1]], &c = del.pts[tri.v[2]];
    Vec2 cen{(a.x + b.x + c.x) / 3.0, (a.y + b.y + c.y) / 3.0};
    if (dist(cen, center) < radius) continue;
    std::array<int, 3> v{};
    for (int e = 0; e < 3; ++e) {
      int p = tri.v[e];
      if (remap[p] < 0) {
        remap[p] = m.num_vertices();
        m.vertices.push_back(del.pts[p]);
      }
      v[e] = remap[p];
    }
    m.triangles.push_back(v);
  }

  // Classify boundary edges by geometry. Border and circle points were
  // placed exactly on their curves, so tight tolerances are safe.
  const double tol = 1e-9 * std::max(L, H);
  {
    std::vector<std::tuple<int, int, int>> cnt;  // (lo,hi,count) via sort
    std::vector<std::array<int, 2>> raw;
    for (const auto& t : m.triangles)
      for (int e = 0; e < 3; ++e)
        raw.push_back({std::min(t[e], t[(e + 1) % 3]), std::max(t[e], t[(e + 1) % 3])});
    std::sort(raw.begin(), raw.end());
    for (std::size_t i = 0; i < raw.size();) {
      std::size_t j = i;
      while (j < raw.size() && raw[j] == raw[i]) ++j;
      if (j - i == 1) {
        int v0 = raw[i][0], v1 = raw[i][1];
        const Vec2 &p0 = m.vertices[v0], &p1 = m.vertices[v1];
        BoundaryTag tag;
        if (std::abs(dist(p0, center) - radius) < 1e-6 * radius &&
            std::abs(dist(p1, center) - radius) < 1e-6 * radius)
          tag = BoundaryTag::Cylinder;
        else if (p0.x < tol && p1.x < tol)
          tag = BoundaryTag::Inlet;
        else if (p0.x > L - tol && p1.x > L - tol)
          tag = BoundaryTag::Outlet;
        else if (p0.y < tol && p1.y < tol)
          tag = BoundaryTag::WallBottom;
        else if (p0.y > H - tol && p1.y > H - tol)
          tag = BoundaryTag::WallTop;
        else
          throw GeometryError("channel mesh: unclassifiable boundary edge");
        m.boundary_edges.push_back({v0, v1, tag});
      }
      i = j;
    }
  }

  // Smart Laplacian smoothing of interior vertices.
  {
    std::vector<char> fixed(m.vertices.size(), 0);
    for (const auto& be : m.boundary_edges) fixed[be.v0] = fixed[be.v1] = 1;
    std::vector<std::vector<int>> v2c(m.vertices.size());
    std::vector<std::vector<int>> v2v(m.vertices.size());
    for (int k = 0; k < m.num_cells(); ++k)
      for (int e = 0; e < 3; ++e) {
        int a = m.triangles[k][e];
        v2c[a].push_back(k);
        v2v[a].push_back(m.triangles[k][(e + 1) % 3]);
        v2v[a].push_back(m.triangles[k][(e + 2) % 3]);
      }
    auto min_quality = [&](int v) {
      double q = 1.0;
      for (int k : v2c[v]) {
        const auto& t = m.triangles[k];
        double a2 = signed_area2(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]);
        if (a2 <= 0) return -1.0;
        q = std::min(q, tri_quality(m.vertices[t[0]], m.vertices[t[1]], m.vertices[t[2]]));
      }
      return q;
    };
    for (int sweep = 0; sweep < opts.smoothing_sweeps; ++sweep) {
      for (int v = 0; v < m.num_vertices(); ++v) {
        if (fixed[v] || v2v[v].empty()) continue;
        Vec2 avg{0, 0};
        for (int w : v2v[v]) {
          avg.x += m.vertices[w].x;
          avg.y += m.vertices[w].y;
        }
        avg.x /= v2v[v].size();
        avg.y /= v2v[v].size();
        double q0 = min_quality(v);
        Vec2 old = m.vertices[v];
        m.vertices[v] = avg;
        double q1 = min_quality(v);
        if (q1 < q0) m.vertices[v] = old;
      }
    }
  }

  m.finalize();
  return m;
}

}  // namespace lpsrom
