#include "lpsrom/assembly.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "lpsrom/errors.hpp"
#include "lpsrom/quadrature.hpp"

namespace lpsrom {

int assembly_threads() {
  static const int n = [] {
    int t = 2;
    if (const char* env = std::getenv("LPSROM_THREADS")) {
      int v = std::atoi(env);
      if (v >= 1) t = std::min(v, 16);
    }
    return t;
  }();
  return n;
}

void parallel_cells(int n_cells, const std::function<void(int)>& body) {
  const int nt = std::min(assembly_threads(), std::max(1, n_cells));
  if (nt <= 1 || n_cells < 256) {
    for (int k = 0; k < n_cells; ++k) body(k);
    return;
  }
  std::vector<std::thread> ts;
  for (int w = 0; w < nt; ++w) {
    int lo = static_cast<int>(static_cast<long>(n_cells) * w / nt);
    int hi = static_cast<int>(static_cast<long>(n_cells) * (w + 1) / nt);
    ts.emplace_back([lo, hi, &body] {
      for (int k = lo; k < hi; ++k) body(k);
    });
  }
  for (auto& t : ts) t.join();
}

namespace {

// Physical gradients of all shape functions at one quadrature point.
void phys_grads(int order, const CellGeom& g, double xi, double eta, double out[][2]) {
  double gr[6][2];
  shape_grads_ref(order, xi, eta, gr);
  const int nd = order == 1 ? 3 : 6;
  for (int i = 0; i < nd; ++i) {
    out[i][0] = gr[i][0] * g.dxi[0] + gr[i][1] * g.deta[0];
    out[i][1] = gr[i][0] * g.dxi[1] + gr[i][1] * g.deta[1];
  }
}

Vec2 map_point(const TriMesh& mesh, int cell, double xi, double eta) {
  const auto& t = mesh.triangles[cell];
  const Vec2 &p0 = mesh.vertices[t[0]], &p1 = mesh.vertices[t[1]], &p2 = mesh.vertices[t[2]];
  return {p0.x + (p1.x - p0.x) * xi + (p2.x - p0.x) * eta,
          p0.y + (p1.y - p0.y) * xi + (p2.y - p0.y) * eta};
}

}  // namespace

SpMat assemble_mass(const FeSpace& space) {
  const int nd = space.dofs_per_cell();
  const int nc = space.mesh().num_cells();
  const QuadRule& qr = quad_degree4();
  std::vector<Triplet> trip(static_cast<std::size_t>(nc) * nd * nd);

  parallel_cells(nc, [&](int k) {
    CellGeom g = cell_geometry(space.mesh(), k);
    const auto& dofs = space.cell_dofs(k);
    double loc[6][6] = {};
    double N[6];
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      shape_values(space.order(), qr.points[q][0], qr.points[q][1], N);
      double w = qr.weights[q] * g.area;
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) loc[i][j] += w * N[i] * N[j];
    }
    std::size_t base = static_cast<std::size_t>(k) * nd * nd;
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j)
        trip[base + i * nd + j] = Triplet(dofs[i], dofs[j], loc[i][j]);
  });

  SpMat m(space.dof_count(), space.dof_count());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat assemble_stiffness(const FeSpace& space, double viscosity) {
  if (!(viscosity > 0.0)) throw ParameterError("assemble_stiffness: viscosity must be > 0");
  const int nd = space.dofs_per_cell();
  const int nc = space.mesh().num_cells();
  const QuadRule& qr = quad_degree4();
  std::vector<Triplet> trip(static_cast<std::size_t>(nc) * nd * nd);

  parallel_cells(nc, [&](int k) {
    CellGeom g = cell_geometry(space.mesh(), k);
    const auto& dofs = space.cell_dofs(k);
    double loc[6][6] = {};
    double pg[6][2];
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      phys_grads(space.order(), g, qr.points[q][0], qr.points[q][1], pg);
      double w = viscosity * qr.weights[q] * g.area;
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j)
          loc[i][j] += w * (pg[i][0] * pg[j][0] + pg[i][1] * pg[j][1]);
    }
    std::size_t base = static_cast<std::size_t>(k) * nd * nd;
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j)
        trip[base + i * nd + j] = Triplet(dofs[i], dofs[j], loc[i][j]);
  });

  SpMat m(space.dof_count(), space.dof_count());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat assemble_divergence(const FeSpace& vel_space, const FeSpace& pres_space) {
  if (&vel_space.mesh() != &pres_space.mesh())
    throw SpaceMismatchError("assemble_divergence: spaces on different meshes");
  const int ndv = vel_space.dofs_per_cell();
  const int ndp = pres_space.dofs_per_cell();
  const int nc = vel_space.mesh().num_cells();
  const int nvel = vel_space.dof_count();
  const QuadRule& qr = quad_degree4();
  std::vector<Triplet> trip(static_cast<std::size_t>(nc) * ndp * ndv * 2);

  parallel_cells(nc, [&](int k) {
    CellGeom g = cell_geometry(vel_space.mesh(), k);
    const auto& vdofs = vel_space.cell_dofs(k);
    const auto& pdofs = pres_space.cell_dofs(k);
    double locx[6][6] = {}, locy[6][6] = {};
    double pg[6][2], Np[6];
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      phys_grads(vel_space.order(), g, qr.points[q][0], qr.points[q][1], pg);
      shape_values(pres_space.order(), qr.points[q][0], qr.points[q][1], Np);
      double w = qr.weights[q] * g.area;
      for (int i = 0; i < ndp; ++i)
        for (int j = 0; j < ndv; ++j) {
          locx[i][j] += w * pg[j][0] * Np[i];
          locy[i][j] += w * pg[j][1] * Np[i];
        }
    }
    std::size_t base = static_cast<std::size_t>(k) * ndp * ndv * 2;
    for (int i = 0; i < ndp; ++i)
      for (int j = 0; j < ndv; ++j) {
        trip[base + (i * ndv + j) * 2] = Triplet(pdofs[i], vdofs[j], locx[i][j]);
        trip[base + (i * ndv + j) * 2 + 1] = Triplet(pdofs[i], vdofs[j] + nvel, locy[i][j]);
      }
  });

  SpMat m(pres_space.dof_count(), 2 * nvel);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat assemble_convection_scalar(const FeSpace& space, const FeFunction& advecting) {
  if (!advecting.space->same_space(space) || advecting.components != 2)
    throw SpaceMismatchError("assemble_convection: advecting field mismatch");
  const int nd = space.dofs_per_cell();
  const int nc = space.mesh().num_cells();
  const QuadRule& qr = quad_degree5();
  std::vector<Triplet> trip(static_cast<std::size_t>(nc) * nd * nd);

  parallel_cells(nc, [&](int k) {
    CellGeom g = cell_geometry(space.mesh(), k);
    const auto& dofs = space.cell_dofs(k);
    double loc[6][6] = {};
    double pg[6][2], N[6];
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      double xi = qr.points[q][0], eta = qr.points[q][1];
      phys_grads(space.order(), g, xi, eta, pg);
      shape_values(space.order(), xi, eta, N);
      Vec2 a = advecting.value_vec(k, xi, eta);
      double w = 0.5 * qr.weights[q] * g.area;
      for (int i = 0; i < nd; ++i)
        for (int j = 0; j < nd; ++j) {
          double adgj = a.x * pg[j][0] + a.y * pg[j][1];
          double adgi = a.x * pg[i][0] + a.y * pg[i][1];
          loc[i][j] += w * (adgj * N[i] - adgi * N[j]);
        }
    }
    std::size_t base = static_cast<std::size_t>(k) * nd * nd;
    for (int i = 0; i < nd; ++i)
      for (int j = 0; j < nd; ++j)
        trip[base + i * nd + j] = Triplet(dofs[i], dofs[j], loc[i][j]);
  });

  SpMat m(space.dof_count(), space.dof_count());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat assemble_convection(const FeSpace& vel_space, const FeFunction& advecting) {
  return block_diag2(assemble_convection_scalar(vel_space, advecting));
}

SpMat assemble_divdiv(const FeSpace& vel_space) {
  const int nd = vel_space.dofs_per_cell();
  const int nc = vel_space.mesh().num_cells();
  const int n = vel_space.dof_count();
  const QuadRule& qr = quad_degree4();
  std::vector<Triplet> trip(static_cast<std::size_t>(nc) * 4 * nd * nd);

  parallel_cells(nc, [&](int k) {
    CellGeom g = cell_geometry(vel_space.mesh(), k);
    const auto& dofs = vel_space.cell_dofs(k);
    double pg[6][2];
    double loc[2][2][6][6] = {};
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      phys_grads(vel_space.order(), g, qr.points[q][0], qr.points[q][1], pg);
      double w = qr.weights[q] * g.area;
      for (int ci = 0; ci < 2; ++ci)
        for (int cj = 0; cj < 2; ++cj)
          for (int i = 0; i < nd; ++i)
            for (int j = 0; j < nd; ++j)
              loc[ci][cj][i][j] += w * pg[i][ci] * pg[j][cj];
    }
    std::size_t base = static_cast<std::size_t>(k) * 4 * nd * nd;
    std::size_t idx = 0;
    for (int ci = 0; ci < 2; ++ci)
      for (int cj = 0; cj < 2; ++cj)
        for (int i = 0; i < nd; ++i)
          for (int j = 0; j < nd; ++j)
            trip[base + idx++] =
                Triplet(dofs[i] + ci * n, dofs[j] + cj * n, loc[ci][cj][i][j]);
  });

  SpMat m(2 * n, 2 * n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

SpMat block_diag2(const SpMat& a) {
  const int n = a.rows();
  assert(a.cols() == n);
  std::vector<Triplet> trip;
  trip.reserve(2 * a.nonZeros());
  for (int c = 0; c < a.outerSize(); ++c)
    for (SpMat::InnerIterator it(a, c); it; ++it) {
      trip.emplace_back(it.row(), it.col(), it.value());
      trip.emplace_back(it.row() + n, it.col() + n, it.value());
    }
  SpMat m(2 * n, 2 * n);
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

FeFunction interpolate(const FeSpace& space, const ScalarField& f) {
  FeFunction out(space, 1);
  for (int d = 0; d < space.dof_count(); ++d) {
    const Vec2& p = space.dof_coord(d);
    out.coeffs[d] = f(p.x, p.y);
  }
  return out;
}

FeFunction interpolate(const FeSpace& space, const VectorField& f) {
  FeFunction out(space, 2);
  const int n = space.dof_count();
  for (int d = 0; d < n; ++d) {
    const Vec2& p = space.dof_coord(d);
    Vec2 v = f(p.x, p.y);
    out.coeffs[d] = v.x;
    out.coeffs[d + n] = v.y;
  }
  return out;
}

double l2_norm(const FeFunction& f) {
  const QuadRule& qr = quad_degree4();
  const TriMesh& mesh = f.space->mesh();
  double acc = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellGeom g = cell_geometry(mesh, k);
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      double w = qr.weights[q] * g.area;
      for (int c = 0; c < f.components; ++c) {
        double v = f.value_scalar(k, qr.points[q][0], qr.points[q][1], c);
        acc += w * v * v;
      }
    }
  }
  return std::sqrt(acc);
}

double h1_seminorm(const FeFunction& f) {
  const QuadRule& qr = quad_degree4();
  const TriMesh& mesh = f.space->mesh();
  double acc = 0.0;
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellGeom g = cell_geometry(mesh, k);
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      double w = qr.weights[q] * g.area;
      for (int c = 0; c < f.components; ++c) {
        Vec2 gr = f.grad_scalar(k, qr.points[q][0], qr.points[q][1], c);
        acc += w * (gr.x * gr.x + gr.y * gr.y);
      }
    }
  }
  return std::sqrt(acc);
}

VecX assemble_forcing(const FeSpace& vel_space, const VectorField& f) {
  const int nd = vel_space.dofs_per_cell();
  const int n = vel_space.dof_count();
  const QuadRule& qr = quad_degree5();
  const TriMesh& mesh = vel_space.mesh();
  VecX rhs = VecX::Zero(2 * n);
  for (int k = 0; k < mesh.num_cells(); ++k) {
    CellGeom g = cell_geometry(mesh, k);
    const auto& dofs = vel_space.cell_dofs(k);
    double N[6];
    for (std::size_t q = 0; q < qr.points.size(); ++q) {
      double xi = qr.points[q][0], eta = qr.points[q][1];
      shape_values(vel_space.order(), xi, eta, N);
      Vec2 p = map_point(mesh, k, xi, eta);
      Vec2 fv = f(p.x, p.y);
      double w = qr.weights[q] * g.area;
      for (int i = 0; i < nd; ++i) {
        rhs[dofs[i]] += w * fv.x * N[i];
        rhs[dofs[i] + n] += w * fv.y * N[i];
      }
    }
  }
  return rhs;
}

VecX assemble_boundary_traction(const FeSpace& vel_space, BoundaryTag tag,
                                const VectorField& g) {
  const TriMesh& mesh = vel_space.mesh();
  const int n = vel_space.dof_count();
  const int nv = mesh.num_vertices();
  const LineRule& lr = line_gauss3();
  VecX rhs = VecX::Zero(2 * n);
  for (const auto& be : mesh.boundary_edges) {
    if (be.tag != tag) continue;
    const Vec2 &a = mesh.vertices[be.v0], &b = mesh.vertices[be.v1];
    double len = std::hypot(b.x - a.x, b.y - a.y);
    int mid_dof = -1;
    if (vel_space.order() == 2) {
      int lo = std::min(be.v0, be.v1), hi = std::max(be.v0, be.v1);
      auto it = std::lower_bound(mesh.edges.begin(), mesh.edges.end(),
                                 std::array<int, 2>{lo, hi});
      mid_dof = nv + static_cast<int>(it - mesh.edges.begin());
    }
    for (int q = 0; q < 3; ++q) {
      double t = lr.points[q], w = lr.weights[q] * len;
      Vec2 p{a.x + (b.x - a.x) * t, a.y + (b.y - a.y) * t};
      Vec2 gv = g(p.x, p.y);
      // Quadratic trace basis on the edge: ends then midpoint.
      double Ne[3] = {(1.0 - t) * (1.0 - 2.0 * t), t * (2.0 * t - 1.0), 4.0 * t * (1.0 - t)};
      int dofs[3] = {be.v0, be.v1, mid_dof};
      int nn = vel_space.order() == 2 ? 3 : 2;
      if (vel_space.order() == 1) {
        Ne[0] = 1.0 - t;
        Ne[1] = t;
      }
      for (int i = 0; i < nn; ++i) {
        rhs[dofs[i]] += w * gv.x * Ne[i];
        rhs[dofs[i] + n] += w * gv.y * Ne[i];
      }
    }
  }
  return rhs;
}

}  // namespace lpsrom
