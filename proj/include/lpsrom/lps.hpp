#ifndef LPSROM_LPS_HPP
#define LPSROM_LPS_HPP

#include "lpsrom/assembly.hpp"

namespace lpsrom {

// Scott-Zhang-like interpolation from the fine space (order l) onto the
// continuous buffer space (order l-1). Each buffer node takes the value of
// the L2 projection of the fine function onto P_{l-1} over one fixed
// adjacent cell (the adjacent cell of smallest index).
//
// The fluctuation operator is Id - Pi_h; the stabilized quantity is the
// gradient of the fluctuation, so every pressure lying in the buffer space
// (in particular all P1 pressures) is annihilated exactly.
class BufferProjector {
public:
  BufferProjector(const FeSpace& fine, const FeSpace& buffer);

  const FeSpace& fine() const { return *fine_; }
  const FeSpace& buffer() const { return *buffer_; }

  // Buffer coefficients of Pi_h(w) for fine coefficients w.
  const SpMat& projector_matrix() const { return proj_; }
  VecX apply(const VecX& fine_coeffs) const { return proj_ * fine_coeffs; }

  // Fine-space coefficients of the fluctuation (Id - Pi_h) w; the buffer
  // image is re-embedded into the fine space (exact, P_{l-1} is a subspace).
  const SpMat& fluctuation_matrix() const { return fluct_; }
  VecX fluctuation(const VecX& fine_coeffs) const { return fluct_ * fine_coeffs; }

  // Largest ratio ||Pi_h w|| / ||w|| in L2, estimated by power iteration.
  double measured_l2_stability(int iterations = 60) const;

private:
  const FeSpace* fine_;
  const FeSpace* buffer_;
  SpMat proj_;   // n_buffer x n_fine
  SpMat embed_;  // n_fine x n_buffer
  SpMat fluct_;  // n_fine x n_fine, Id - embed * proj
};

// Local stabilization parameters tau_K.
struct StabParams {
  std::vector<double> tau_per_cell;
  double dt = 0.0;
  double nu = 0.0;
  double mean_velocity = 0.0;

  // Diagnostic for the tau_K <= C h_K^2 hypothesis: the measured constant.
  double max_tau_over_h2(const TriMesh& mesh) const;
};

// tau_K = (4/dt^2 + 32 nu^2/(h_K/2)^4 + 4 Ubar/(h_K/2)^2)^(-1/2).
StabParams compute_tau(const TriMesh& mesh, double dt, double nu, double mean_velocity);

// Pressure stabilization matrix, q^T G p = sum_K tau_K (grad fluct(p),
// grad fluct(q))_K. Symmetric PSD; annihilates buffer-space pressures.
SpMat assemble_lps_matrix(const FeSpace& pres_space, const BufferProjector& projector,
                          const StabParams& tau);

// Cell-loop oracle for q^T G q, evaluated by direct quadrature of the
// fluctuation gradient (independent of the assembled matrix).
double lps_seminorm_sq_direct(const FeFunction& pressure, const BufferProjector& projector,
                              const StabParams& tau);

}  // namespace lpsrom

#endif
