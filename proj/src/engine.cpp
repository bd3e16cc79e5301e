#include "aest/engine.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace aest {

namespace {

// Strang stepper working in the eigenbasis of H0, where the free half-steps
// are diagonal. The frame state |Psi_1(t)> is mapped into the same basis
// through the fixed overlap matrix U0^T U_j.
class EigenbasisStepper {
 public:
  EigenbasisStepper(const SpectralDecomposition& channel, const SpectralDecomposition& frame)
      : channel_(channel),
        frame_(frame),
        overlap_((channel.eigenvectors.transpose() * frame.eigenvectors).cast<Complex>()),
        sender_weights_(frame.eigenvectors.row(0).transpose()),
        far_end_row_(channel.eigenvectors.row(channel.size() - 1).transpose().cast<Complex>()) {}

  ComplexVector to_eigenbasis(const ComplexVector& psi) const {
    return channel_.eigenvectors.transpose().cast<Complex>() * psi;
  }
  ComplexVector to_sites(const ComplexVector& modes) const {
    return channel_.eigenvectors.cast<Complex>() * modes;
  }

  ComplexVector frame_state(double t) const {
    ComplexVector w(frame_.size());
    for (Eigen::Index k = 0; k < w.size(); ++k) {
      w[k] = sender_weights_[k] * std::polar(1.0, -frame_.eigenvalues[k] * t);
    }
    return overlap_ * w;
  }

  ComplexVector half_step_phases(double dt) const {
    ComplexVector phases(channel_.size());
    for (Eigen::Index k = 0; k < phases.size(); ++k) {
      phases[k] = std::polar(1.0, -channel_.eigenvalues[k] * 0.5 * dt);
    }
    return phases;
  }

  // Signed step: dt < 0 runs the exact inverse of the dt > 0 step.
  void advance(ComplexVector& modes, const ComplexVector& half_phases, double t_mid, double dt,
               double c_mid) const {
    modes.array() *= half_phases.array();
    if (c_mid != 0.0) {
      apply_rank1_exp_inplace(modes, frame_state(t_mid), c_mid * dt);
    }
    modes.array() *= half_phases.array();
  }

  double far_end_fidelity(const ComplexVector& modes) const {
    return std::abs(far_end_row_.cwiseProduct(modes).sum());
  }

  double leakage(const ComplexVector& modes, double t) const {
    const Complex a1 = frame_state(t).dot(modes);
    return std::clamp(1.0 - std::norm(a1), 0.0, 1.0);
  }

 private:
  const SpectralDecomposition& channel_;
  const SpectralDecomposition& frame_;
  ComplexMatrix overlap_;
  RealVector sender_weights_;
  ComplexVector far_end_row_;
};

struct Problem {
  SpectralDecomposition channel;
  SpectralDecomposition frame;
};

Problem make_problem(const EvolutionSpec& spec) {
  Problem problem{spectral(chain_hamiltonian(spec.channel, spec.n)), {}};
  problem.frame = spec.leo_generator ? spectral(chain_hamiltonian(*spec.leo_generator, spec.n))
                                     : problem.channel;
  return problem;
}

bool inside_kick(const PulseShape& p, double t) {
  return p.kind() == PulseKind::BangBang && amplitude(p, t) != 0.0;
}

}  // namespace

void EvolutionSpec::validate() const {
  if (n < 2) throw ConfigError("evolution spec: n must be >= 2");
  channel.validate();
  (void)couplings(channel, n);
  if (leo_generator) {
    leo_generator->validate();
    (void)couplings(*leo_generator, n);
  }
  if (!pulse.is_none() && !leo_generator) {
    throw ConfigError("evolution spec: a pulse requires a LEO generator profile");
  }
  if (!(total_time >= 0.0) || !std::isfinite(total_time)) {
    throw ConfigError("evolution spec: total_time must be finite and non-negative");
  }
  if (!(dt_policy.max_step > 0.0)) throw ConfigError("evolution spec: max_step must be positive");
  if (dt_policy.substeps_per_pulse_segment < 1 || dt_policy.kick_substeps < 1) {
    throw ConfigError("evolution spec: substep counts must be >= 1");
  }
  if (sample_stride < 1) throw ConfigError("evolution spec: sample_stride must be >= 1");
}

double Trajectory::max_norm_drift() const {
  return norm_drift.empty() ? 0.0 : *std::max_element(norm_drift.begin(), norm_drift.end());
}

HalfStepPropagator::HalfStepPropagator(const SpectralDecomposition& h0, double dt)
    : dt_(dt), matrix_(propagator_matrix(h0, 0.5 * dt)) {}

ComplexVector step(const ComplexVector& psi, double t, double dt,
                   const HalfStepPropagator& u0_half, const LeoBasis& b, const PulseShape& p) {
  if (!(dt > 0.0)) throw ConfigError("step: dt must be positive");
  if (std::abs(u0_half.dt() - dt) > 1e-12 * dt) {
    throw ContractViolation("step: half-step propagator was built for a different dt");
  }
  const double slack = 1e-12 * std::max(1.0, std::abs(t) + dt);
  for (const double bp : breakpoints(p, t, t + dt)) {
    if (bp - t > slack && (t + dt) - bp > slack) {
      std::ostringstream msg;
      msg << "step: pulse breakpoint " << bp << " inside (" << t << ", " << t + dt
          << "); split the step";
      throw ContractViolation(msg.str());
    }
  }
  const double mid = t + 0.5 * dt;
  ComplexVector out = u0_half.apply(psi);
  apply_rank1_exp_inplace(out, b.basis_state(mid), amplitude(p, mid) * dt);
  return u0_half.apply(out);
}

std::vector<GridSegment> integration_grid(const EvolutionSpec& spec) {
  std::vector<GridSegment> grid;
  const double T = spec.total_time;
  if (!(T > 0.0)) return grid;
  std::vector<double> edges{0.0};
  const auto inner = breakpoints(spec.pulse, 0.0, T);
  edges.insert(edges.end(), inner.begin(), inner.end());
  edges.push_back(T);
  const auto& policy = spec.dt_policy;
  grid.reserve(edges.size() - 1);
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s];
    const double b = edges[s + 1];
    if (!(b > a)) continue;
    const int base =
        inside_kick(spec.pulse, 0.5 * (a + b)) ? policy.kick_substeps : policy.substeps_per_pulse_segment;
    const double by_length = std::ceil((b - a) / policy.max_step);
    // Rounding slivers, e.g. k tau landing an ulp below T.
    const bool sliver = b - a < 1e-12 * std::max(1.0, T);
    grid.push_back({a, b, sliver ? 1 : std::max(base, static_cast<int>(by_length))});
  }
  return grid;
}

Trajectory evolve(const EvolutionSpec& spec) {
  spec.validate();
  const Problem problem = make_problem(spec);
  const EigenbasisStepper stepper(problem.channel, problem.frame);
  const int n = spec.n;

  ComplexVector start = ComplexVector::Zero(n);
  start[0] = 1.0;
  ComplexVector modes = stepper.to_eigenbasis(start);

  Trajectory traj;
  auto sample = [&](double t) {
    const double norm = modes.norm();
    const double drift = std::abs(norm - 1.0);
    if (drift > 1e-6) {
      std::ostringstream msg;
      msg << "evolve: norm drift " << drift << " at t=" << t << " (n=" << n
          << ", max_step=" << spec.dt_policy.max_step << "); reduce the step size";
      throw NumericError(msg.str());
    }
    traj.times.push_back(t);
    traj.fidelity.push_back(std::min(1.0, stepper.far_end_fidelity(modes)));
    traj.leakage.push_back(stepper.leakage(modes, t));
    traj.norm_drift.push_back(drift);
  };

  sample(0.0);
  long long counter = 0;
  for (const auto& seg : integration_grid(spec)) {
    const double dt = (seg.end - seg.start) / seg.substeps;
    const ComplexVector phases = stepper.half_step_phases(dt);
    for (int k = 0; k < seg.substeps; ++k) {
      const double t0 = seg.start + k * dt;
      const double mid = t0 + 0.5 * dt;
      stepper.advance(modes, phases, mid, dt, amplitude(spec.pulse, mid));
      ++counter;
      if (counter % spec.sample_stride == 0) {
        sample(k + 1 == seg.substeps ? seg.end : seg.start + (k + 1) * dt);
      }
    }
  }
  if (traj.times.back() != spec.total_time) sample(spec.total_time);

  traj.steps = counter;
  traj.final_state = stepper.to_sites(modes);
  return traj;
}

ComplexVector evolve_backward(const EvolutionSpec& spec, const ComplexVector& final_state) {
  spec.validate();
  if (final_state.size() != spec.n) throw ConfigError("evolve_backward: dimension mismatch");
  const Problem problem = make_problem(spec);
  const EigenbasisStepper stepper(problem.channel, problem.frame);
  ComplexVector modes = stepper.to_eigenbasis(final_state);
  const auto grid = integration_grid(spec);
  for (auto seg = grid.rbegin(); seg != grid.rend(); ++seg) {
    const double dt = (seg->end - seg->start) / seg->substeps;
    const ComplexVector phases = stepper.half_step_phases(-dt);
    for (int k = seg->substeps - 1; k >= 0; --k) {
      const double mid = seg->start + k * dt + 0.5 * dt;
      stepper.advance(modes, phases, mid, -dt, amplitude(spec.pulse, mid));
    }
  }
  return stepper.to_sites(modes);
}

double fidelity(const ComplexVector& psi, int target_site) {
  if (target_site < 1 || target_site > psi.size()) {
    throw ConfigError("fidelity: target site out of range");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-6) {
    throw ContractViolation("fidelity: state is not normalized");
  }
  return std::abs(psi[target_site - 1]);
}

BosePeak bose_baseline(int n, double window) {
  if (!(window > 0.0)) throw ConfigError("bose_baseline: window must be positive");
  const auto s = spectral(chain_hamiltonian(CouplingProfile::uniform(), n));
  const RealVector weights = s.eigenvectors.row(n - 1).transpose().cwiseProduct(
      s.eigenvectors.row(0).transpose());
  auto f = [&](double t) {
    Complex sum{0.0, 0.0};
    for (Eigen::Index k = 0; k < weights.size(); ++k) {
      sum += weights[k] * std::polar(1.0, -s.eigenvalues[k] * t);
    }
    return std::abs(sum);
  };

  const double bandwidth = s.eigenvalues.cwiseAbs().maxCoeff();
  const auto points = static_cast<long long>(std::max(1e4, std::ceil(50.0 * window * bandwidth)));
  const double h = window / static_cast<double>(points);
  long long best = 0;
  double best_f = f(0.0);
  for (long long i = 1; i <= points; ++i) {
    const double v = f(static_cast<double>(i) * h);
    if (v > best_f) {
      best_f = v;
      best = i;
    }
  }

  // Golden-section refinement on the bracketing cells.
  double lo = std::max(0.0, static_cast<double>(best - 1) * h);
  double hi = std::min(window, static_cast<double>(best + 1) * h);
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-14 * std::max(1.0, hi); ++iter) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    }
  }
  const double t_refined = 0.5 * (lo + hi);
  const double f_refined = f(t_refined);
  if (f_refined >= best_f) return {t_refined, f_refined};
  return {static_cast<double>(best) * h, best_f};
}

EvolutionSpec refined(const EvolutionSpec& spec, int factor) {
  if (factor < 1) throw ConfigError("refined: factor must be >= 1");
  EvolutionSpec out = spec;
  out.dt_policy.max_step /= factor;
  out.dt_policy.substeps_per_pulse_segment *= factor;
  out.dt_policy.kick_substeps *= factor;
  return out;
}

ConvergenceReport convergence_report(const EvolutionSpec& spec) {
  spec.validate();
  ConvergenceReport report;
  std::vector<ComplexVector> finals;
  for (const int factor : {1, 2, 4}) {
    const auto run = refined(spec, factor);
    report.max_steps.push_back(run.dt_policy.max_step);
    finals.push_back(evolve(run).final_state);
  }
  const double d1 = (finals[0] - finals[1]).norm();
  const double d2 = (finals[1] - finals[2]).norm();
  report.differences = {d1, d2};

  constexpr double kMachine = 1e-12;
  constexpr double kTarget = 1e-8;
  if (d1 < kMachine && d2 < kMachine) {
    report.at_machine_precision = true;
    report.estimated_error = std::max(d1, d2);
    report.recommended_max_step = spec.dt_policy.max_step;
    report.recommended_refinement = 1;
    return report;
  }
  report.non_monotone = !(d2 < d1);
  report.observed_order = std::log2(d1 / d2);
  const double order = report.non_monotone ? 1.0 : std::max(report.observed_order, 0.5);
  report.estimated_error = d2 / (std::pow(2.0, order) - 1.0);

  // Error of the coarse run is about 2^(2 order) times that of the finest.
  const double coarse_error = report.estimated_error * std::pow(2.0, 2.0 * order);
  double factor = std::pow(coarse_error / kTarget, 1.0 / order);
  int refinement = 1;
  while (refinement < factor && refinement < (1 << 20)) refinement *= 2;
  report.recommended_refinement = refinement;
  report.recommended_max_step = spec.dt_policy.max_step / refinement;
  return report;
}

}  // namespace aest
