#pragma once

// Moving LEO frame |Psi_n(t)> = exp(-i H_j t)|n>, amplitudes in that frame,
// the frame-effective Hamiltonian and a numerical check of the one-component
// (P-Q partitioned) memory-kernel equation.

#include <vector>

#include "aest/control.hpp"
#include "aest/lattice.hpp"

namespace aest {

/// Frame generated by H_j. The tracked state is |Psi_1(t)>, the image of
/// the sender site.
class LeoBasis {
 public:
  explicit LeoBasis(SpectralDecomposition generator);

  int size() const { return generator_.size(); }
  const SpectralDecomposition& generator() const { return generator_; }

  /// |Psi_1(t)>. O(n^2).
  ComplexVector basis_state(double t) const;
  /// V(t) = exp(-i H_j t) applied to v.
  ComplexVector rotate(double t, const ComplexVector& v) const;
  /// V(-t) v, i.e. the coordinates of v in the frame at time t.
  ComplexVector unrotate(double t, const ComplexVector& v) const;

 private:
  SpectralDecomposition generator_;
  RealVector sender_weights_;  // first row of the eigenvector matrix
};

/// exp(-i theta |phi><phi|) psi = psi + (exp(-i theta) - 1) phi <phi|psi>.
/// Throws ContractViolation unless |phi| = 1 within 1e-10.
ComplexVector apply_rank1_exp(const ComplexVector& psi, const ComplexVector& phi, double theta);

/// Unchecked in-place form used by the time steppers.
void apply_rank1_exp_inplace(ComplexVector& psi, const ComplexVector& phi, double theta);

struct FrameAmplitudes {
  double t = 0.0;
  ComplexVector a;  // a_n = <Psi_n(t)|psi>

  double total_weight() const { return a.squaredNorm(); }
};

/// Requires |psi| = 1 within 1e-9 (ContractViolation otherwise).
FrameAmplitudes frame_amplitudes(const LeoBasis& b, double t, const ComplexVector& psi);

/// 1 - |a_1(t)|^2 clamped to [0, 1].
double leakage(const LeoBasis& b, double t, const ComplexVector& psi);

/// V^dagger(t) (H0 - H_j) V(t) + c(t) |1><1|, the generator of the frame
/// amplitudes: i da/dt = H_eff(t) a.
ComplexMatrix effective_hamiltonian(const LeoBasis& b, const HoppingMatrix& h0,
                                    const PulseShape& p, double t);

/// Partition blocks and kernel data sampled on a uniform grid.
///
/// With P = a_1, Q = (a_2..a_n), h = H_eff[0][0], R the first row and W the
/// first column of H_eff without the diagonal entry and D the remaining
/// block, the tracked amplitude p(t) = exp(+i int_0^t h) P(t) obeys
///
///   dp/dt = -int_0^t R(t) G(t,s) W(s) exp(+i int_s^t h) p(s) ds,
///
/// G the time-ordered propagator of D. `kernel` holds the right-hand side
/// evaluated by trapezoid rule with G built from step-by-step products;
/// `p_dot` holds a centred finite difference of p from the full evolution.
struct MemoryKernelProbe {
  std::vector<double> grid;
  std::vector<Complex> h_diag;
  std::vector<ComplexVector> r_row;
  std::vector<ComplexVector> w_col;
  std::vector<ComplexMatrix> d_block;
  std::vector<Complex> p_series;
  std::vector<Complex> p_dot;
  std::vector<Complex> kernel;
  double fd_step = 0.0;
  double kernel_residual = 0.0;  // max_k |p_dot - kernel|
  double max_p_dot = 0.0;
};

/// n <= 8, steps >= 1000. Finite-difference step is T / (50 steps).
MemoryKernelProbe pq_kernel_check(const LeoBasis& b, const HoppingMatrix& h0, const PulseShape& p,
                                  double T, int steps);

}  // namespace aest
