#ifndef LPSROM_ASSEMBLY_HPP
#define LPSROM_ASSEMBLY_HPP

#include <Eigen/Sparse>
#include <functional>

#include "lpsrom/fe_space.hpp"

namespace lpsrom {

using SpMat = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

using ScalarField = std::function<double(double, double)>;
using VectorField = std::function<Vec2(double, double)>;

// Worker thread count for cell-parallel assembly. Defaults to 2 and is
// capped by the LPSROM_THREADS environment variable. Assembled values are
// independent of the thread count (each cell writes to a fixed slot).
int assembly_threads();
void parallel_cells(int n_cells, const std::function<void(int)>& body);

// L2 mass matrix, SPD.
SpMat assemble_mass(const FeSpace& space);

// viscosity * (grad u, grad v); symmetric PSD with constants in the kernel.
SpMat assemble_stiffness(const FeSpace& space, double viscosity);

// B[i,j] = (div phi_j, psi_i) over the stacked [u_x; u_y] velocity layout;
// size pres_dofs x 2*vel_dofs.
SpMat assemble_divergence(const FeSpace& vel_space, const FeSpace& pres_space);

// Skew part of the advection operator on one scalar component:
// C[i,j] = 1/2 [ (a.grad phi_j, phi_i) - (a.grad phi_i, phi_j) ].
// Exactly antisymmetric by construction.
SpMat assemble_convection_scalar(const FeSpace& space, const FeFunction& advecting);

// Velocity-block convection (block-diagonal expansion of the scalar form):
// w^T C(a) v = b(a, v, w) with the skew-symmetric trilinear form.
SpMat assemble_convection(const FeSpace& vel_space, const FeFunction& advecting);

// (div u, div v) Gram over velocity dofs, size 2n x 2n.
SpMat assemble_divdiv(const FeSpace& vel_space);

// [A 0; 0 A] for the stacked velocity layout.
SpMat block_diag2(const SpMat& a);

FeFunction interpolate(const FeSpace& space, const ScalarField& f);
FeFunction interpolate(const FeSpace& space, const VectorField& f);

double l2_norm(const FeFunction& f);
double h1_seminorm(const FeFunction& f);

// (f, phi_i) for a vector-valued forcing; length 2n.
VecX assemble_forcing(const FeSpace& vel_space, const VectorField& f);

// Boundary line integral (g, phi_i) over edges with the given tag; length 2n.
VecX assemble_boundary_traction(const FeSpace& vel_space, BoundaryTag tag,
                                const VectorField& g);

}  // namespace lpsrom

#endif
