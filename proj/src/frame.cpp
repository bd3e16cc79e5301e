#include "aest/frame.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aest {

namespace {

ComplexMatrix expm_hermitian(const ComplexMatrix& h, double t) {
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw NumericError("expm_hermitian: eigensolver did not converge");
  }
  ComplexVector phases(h.rows());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases[k] = std::polar(1.0, -solver.eigenvalues()[k] * t);
  }
  return solver.eigenvectors() * phases.asDiagonal() * solver.eigenvectors().adjoint();
}

RealMatrix generator_matrix(const SpectralDecomposition& s) {
  return s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.transpose();
}

// Lab-frame evolution under H0 + c(t)|Psi_1(t)><Psi_1(t)| for the kernel
// probe: exponential midpoint rule on pieces split at pulse breakpoints.
// Works for t1 < t0 as well.
class LabFrameStepper {
 public:
  LabFrameStepper(const LeoBasis& b, const HoppingMatrix& h0, const PulseShape& p, int substeps)
      : basis_(b), h0_(h0.matrix().cast<Complex>()), pulse_(p), substeps_(substeps) {}

  ComplexVector advance(ComplexVector psi, double t0, double t1) const {
    if (t0 == t1) return psi;
    const double lo = std::min(t0, t1);
    const double hi = std::max(t0, t1);
    std::vector<double> edges{lo};
    const auto inner = breakpoints(pulse_, lo, hi);
    edges.insert(edges.end(), inner.begin(), inner.end());
    edges.push_back(hi);
    if (t1 < t0) std::reverse(edges.begin(), edges.end());
    for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
      const double dt = (edges[s + 1] - edges[s]) / substeps_;
      for (int k = 0; k < substeps_; ++k) {
        const double mid = edges[s] + (k + 0.5) * dt;
        psi = expm_hermitian(hamiltonian(mid), dt) * psi;
      }
    }
    return psi;
  }

  ComplexMatrix hamiltonian(double t) const {
    const ComplexVector phi = basis_.basis_state(t);
    return h0_ + amplitude(pulse_, std::max(t, 0.0)) * (phi * phi.adjoint());
  }

 private:
  const LeoBasis& basis_;
  ComplexMatrix h0_;
  const PulseShape& pulse_;
  int substeps_;
};

}  // namespace

LeoBasis::LeoBasis(SpectralDecomposition generator)
    : generator_(std::move(generator)), sender_weights_(generator_.eigenvectors.row(0).transpose()) {
  if (generator_.size() < 2) {
    throw ConfigError("LeoBasis: generator dimension must be >= 2");
  }
}

ComplexVector LeoBasis::basis_state(double t) const {
  ComplexVector modes(size());
  for (Eigen::Index k = 0; k < modes.size(); ++k) {
    modes[k] = sender_weights_[k] * std::polar(1.0, -generator_.eigenvalues[k] * t);
  }
  return generator_.eigenvectors.cast<Complex>() * modes;
}

ComplexVector LeoBasis::rotate(double t, const ComplexVector& v) const {
  return propagate_exact(generator_, t, v);
}

ComplexVector LeoBasis::unrotate(double t, const ComplexVector& v) const {
  return propagate_exact(generator_, -t, v);
}

void apply_rank1_exp_inplace(ComplexVector& psi, const ComplexVector& phi, double theta) {
  const Complex overlap = phi.dot(psi);  // <phi|psi>, conjugating phi
  psi += (std::polar(1.0, -theta) - 1.0) * overlap * phi;
}

ComplexVector apply_rank1_exp(const ComplexVector& psi, const ComplexVector& phi, double theta) {
  if (psi.size() != phi.size()) {
    throw ConfigError("apply_rank1_exp: dimension mismatch");
  }
  if (std::abs(phi.norm() - 1.0) > 1e-10) {
    std::ostringstream msg;
    msg << "apply_rank1_exp: projector vector must be normalized (|phi| = " << phi.norm() << ")";
    throw ContractViolation(msg.str());
  }
  ComplexVector out = psi;
  apply_rank1_exp_inplace(out, phi, theta);
  return out;
}

FrameAmplitudes frame_amplitudes(const LeoBasis& b, double t, const ComplexVector& psi) {
  if (psi.size() != b.size()) {
    throw ConfigError("frame_amplitudes: dimension mismatch");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-9) {
    throw ContractViolation("frame_amplitudes: state is not normalized");
  }
  return {t, b.unrotate(t, psi)};
}

double leakage(const LeoBasis& b, double t, const ComplexVector& psi) {
  const auto frame = frame_amplitudes(b, t, psi);
  return std::clamp(1.0 - std::norm(frame.a[0]), 0.0, 1.0);
}

ComplexMatrix effective_hamiltonian(const LeoBasis& b, const HoppingMatrix& h0,
                                    const PulseShape& p, double t) {
  if (h0.size() != b.size()) {
    throw ConfigError("effective_hamiltonian: H0 and frame generator differ in dimension");
  }
  const ComplexMatrix v = propagator_matrix(b.generator(), t);
  const ComplexMatrix diff = (h0.matrix() - generator_matrix(b.generator())).cast<Complex>();
  ComplexMatrix h = v.adjoint() * diff * v;
  h(0, 0) += amplitude(p, t);
  return h;
}

MemoryKernelProbe pq_kernel_check(const LeoBasis& b, const HoppingMatrix& h0, const PulseShape& p,
                                  double T, int steps) {
  const int n = b.size();
  if (h0.size() != n) throw ConfigError("pq_kernel_check: dimension mismatch");
  if (n > 8) throw ConfigError("pq_kernel_check: n must be <= 8 (dense kernel cost guard)");
  if (steps < 1000) throw ConfigError("pq_kernel_check: need at least 1000 steps");
  if (!(T > 0.0)) throw ConfigError("pq_kernel_check: T must be positive");

  const double dt = T / steps;
  const double fd = T / (50.0 * steps);
  double c_max = p.intensity();
  if (const auto* bb = std::get_if<BangBangPulse>(&p.params())) c_max *= bb->gain;
  Eigen::SelfAdjointEigenSolver<RealMatrix> h0_spectrum(h0.matrix(), Eigen::EigenvaluesOnly);
  const double scale = h0_spectrum.eigenvalues().cwiseAbs().maxCoeff() + c_max;
  if (fd * scale > 1e-2) {
    std::ostringstream msg;
    msg << "pq_kernel_check: finite-difference step " << fd << " too coarse for energy scale "
        << scale;
    throw NumericError(msg.str());
  }

  const LabFrameStepper stepper(b, h0, p, 2);
  const RealMatrix hj = generator_matrix(b.generator());

  // Smooth part of h(t): <Psi_1(t)|H0|Psi_1(t)> - (H_j)_{11}. The pulse part is
  // integrated in closed form.
  auto smooth_h = [&](double t) {
    const ComplexVector phi = b.basis_state(t);
    return phi.dot(h0.matrix().cast<Complex>() * phi).real() - hj(0, 0);
  };

  MemoryKernelProbe probe;
  probe.fd_step = fd;
  const auto count = static_cast<std::size_t>(steps) + 1;
  probe.grid.resize(count);
  probe.h_diag.resize(count);
  probe.r_row.resize(count);
  probe.w_col.resize(count);
  probe.d_block.resize(count);
  probe.p_series.resize(count);
  probe.p_dot.resize(count);
  probe.kernel.resize(count);

  std::vector<Complex> a1(count);
  std::vector<double> theta(count);
  ComplexVector psi = ComplexVector::Zero(n);
  psi[0] = 1.0;
  double smooth_integral = 0.0;
  double previous_smooth = smooth_h(0.0);

  for (std::size_t k = 0; k < count; ++k) {
    const double t = static_cast<double>(k) * dt;
    probe.grid[k] = t;
    if (k > 0) {
      psi = stepper.advance(psi, probe.grid[k - 1], t);
      const double current = smooth_h(t);
      smooth_integral += 0.5 * dt * (previous_smooth + current);
      previous_smooth = current;
    }
    const ComplexMatrix heff = effective_hamiltonian(b, h0, p, t);
    probe.h_diag[k] = heff(0, 0);
    probe.r_row[k] = heff.row(0).tail(n - 1).transpose();
    probe.w_col[k] = heff.col(0).tail(n - 1);
    probe.d_block[k] = heff.bottomRightCorner(n - 1, n - 1);

    theta[k] = phase_integral(p, t) + smooth_integral;
    a1[k] = b.basis_state(t).dot(psi);
    probe.p_series[k] = std::polar(1.0, theta[k]) * a1[k];

    // p at t +/- fd from the same state; the local phase uses the midpoint rule
    // for the smooth part and the exact pulse integral.
    auto p_at = [&](double s) {
      const ComplexVector moved = stepper.advance(psi, t, s);
      const double local = theta[k] + (phase_integral(p, std::max(s, 0.0)) - phase_integral(p, t)) +
                           (s - t) * smooth_h(0.5 * (s + t));
      return std::polar(1.0, local) * b.basis_state(s).dot(moved);
    };
    if (k == 0) {
      // Second-order one-sided at the origin.
      probe.p_dot[k] = (-3.0 * probe.p_series[k] + 4.0 * p_at(fd) - p_at(2.0 * fd)) / (2.0 * fd);
    } else {
      probe.p_dot[k] = (p_at(t + fd) - p_at(t - fd)) / (2.0 * fd);
    }
  }

  // B_k = sum_j c_j G(t_k, t_j) W(t_j) a_1(t_j) with trapezoid weights c_0 = 1/2,
  // advanced by the midpoint exponential of the Q block.
  ComplexVector accumulated = 0.5 * probe.w_col[0] * a1[0];
  probe.kernel[0] = 0.0;
  for (std::size_t k = 1; k < count; ++k) {
    const double mid = 0.5 * (probe.grid[k - 1] + probe.grid[k]);
    const ComplexMatrix d_mid =
        effective_hamiltonian(b, h0, p, mid).bottomRightCorner(n - 1, n - 1);
    const ComplexVector v = probe.w_col[k] * a1[k];
    accumulated = expm_hermitian(d_mid, dt) * accumulated + v;
    const ComplexVector y = dt * (accumulated - 0.5 * v);
    probe.kernel[k] = -std::polar(1.0, theta[k]) * probe.r_row[k].cwiseProduct(y).sum();
  }

  for (std::size_t k = 0; k < count; ++k) {
    probe.kernel_residual = std::max(probe.kernel_residual, std::abs(probe.p_dot[k] - probe.kernel[k]));
    probe.max_p_dot = std::max(probe.max_p_dot, std::abs(probe.p_dot[k]));
  }
  return probe;
}

}  // namespace aest
