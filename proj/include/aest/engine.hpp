#pragma once

// Time-dependent Schroedinger propagation for
//
//   H(t) = H0 + c(t) |Psi_1(t)><Psi_1(t)|
//
// with a Strang splitting whose pulse factor is the exact rank-1 exponential.
// The grid is aligned to every switching instant of c(t), and both c and the
// frame state are evaluated at the step midpoint.

#include <optional>
#include <vector>

#include "aest/control.hpp"
#include "aest/frame.hpp"
#include "aest/lattice.hpp"

namespace aest {

struct StepPolicy {
  double max_step = 1e-2;
  int substeps_per_pulse_segment = 64;
  int kick_substeps = 8;  // per bang-bang kick window
};

struct EvolutionSpec {
  int n = 2;
  CouplingProfile channel = CouplingProfile::uniform();
  std::optional<CouplingProfile> leo_generator;
  PulseShape pulse;
  double total_time = 0.0;
  StepPolicy dt_policy;
  int sample_stride = 1;

  /// Throws ConfigError on any invalid field.
  void validate() const;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<double> fidelity;
  std::vector<double> leakage;
  std::vector<double> norm_drift;
  ComplexVector final_state;
  long long steps = 0;

  double final_fidelity() const { return fidelity.back(); }
  double max_norm_drift() const;
};

/// exp(-i H0 dt/2) as a dense matrix, reused for every step of one size.
class HalfStepPropagator {
 public:
  HalfStepPropagator(const SpectralDecomposition& h0, double dt);

  double dt() const { return dt_; }
  ComplexVector apply(const ComplexVector& psi) const { return matrix_ * psi; }

 private:
  double dt_;
  ComplexMatrix matrix_;
};

/// One Strang step from t to t + dt:
///   U0(dt/2) exp(-i c(t+dt/2) dt |Psi_1(t+dt/2)><Psi_1(t+dt/2)|) U0(dt/2).
/// Throws ContractViolation when a pulse breakpoint lies strictly inside the
/// step, or when dt does not match the half-step propagator.
ComplexVector step(const ComplexVector& psi, double t, double dt,
                   const HalfStepPropagator& u0_half, const LeoBasis& b, const PulseShape& p);

/// One pulse-constant stretch [start, end] of the grid split into `substeps`
/// equal steps.
struct GridSegment {
  double start;
  double end;
  int substeps;
};

/// Integration grid of `spec`: consecutive segments between the pulse
/// breakpoints in (0, T).
std::vector<GridSegment> integration_grid(const EvolutionSpec& spec);

/// Runs the spec from |1> = e_1, sampling every `sample_stride` steps and at
/// t = T. Throws NumericError if the norm drifts by more than 1e-6.
Trajectory evolve(const EvolutionSpec& spec);

/// Runs the same grid backwards from `final_state` at t = T to t = 0.
ComplexVector evolve_backward(const EvolutionSpec& spec, const ComplexVector& final_state);

/// |<target|psi>| for a 1-based site index.
double fidelity(const ComplexVector& psi, int target_site);

struct BosePeak {
  double t_peak;
  double f_peak;
};

/// Best arrival fidelity at the far end of an uncontrolled uniform chain over
/// [0, window]: dense scan followed by golden-section refinement.
BosePeak bose_baseline(int n, double window);

struct ConvergenceReport {
  std::vector<double> max_steps;     // dt, dt/2, dt/4
  std::vector<double> differences;   // |psi(dt) - psi(dt/2)|, |psi(dt/2) - psi(dt/4)|
  double observed_order = 0.0;
  double estimated_error = 0.0;      // extrapolated error of the finest run
  double recommended_max_step = 0.0;
  int recommended_refinement = 1;    // pass to refined() to reach ~1e-8
  bool at_machine_precision = false;
  bool non_monotone = false;
};

/// Same experiment with max_step divided and every substep count multiplied
/// by `factor`.
EvolutionSpec refined(const EvolutionSpec& spec, int factor);

/// Richardson study of `spec` at its own step size and two halvings (all
/// substep counts are doubled alongside max_step).
ConvergenceReport convergence_report(const EvolutionSpec& spec);

}  // namespace aest
