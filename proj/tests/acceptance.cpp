// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
// Exit status counts failures outside the documented known-failure list.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <string>

#include "aest/lab.hpp"
#include "oracles.hpp"

using namespace aest;

namespace {

// Criterion 3 peak positions differ from the nominal values by several grid
// steps; see README "Known failures".
const std::set<int> kKnownFailures{3};

double g_max_drift = 0.0;
long long g_runs = 0;

Trajectory tracked(const EvolutionSpec& s) {
  auto t = evolve(s);
  g_max_drift = std::max(g_max_drift, t.max_norm_drift());
  ++g_runs;
  return t;
}

class Clock {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

int g_unexpected = 0;

void report(int id, const std::string& title, bool pass, const std::vector<std::string>& details) {
  std::printf("[%s] %d %s\n", pass ? "PASS" : "FAIL", id, title.c_str());
  for (const auto& d : details) std::printf("    %s\n", d.c_str());
  if (!pass && !kKnownFailures.count(id)) ++g_unexpected;
  if (!pass && kKnownFailures.count(id)) std::printf("    (documented known failure)\n");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[160];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

template <class... A>
std::string fmt(const char* f, A... a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a...);
  return buf;
}

EvolutionSpec leo(int n, CouplingProfile gen, PulseShape p, double T) {
  EvolutionSpec s;
  s.n = n;
  s.leo_generator = gen;
  s.pulse = p;
  s.total_time = T;
  s.sample_stride = 1 << 30;
  return s;
}

void criterion1() {
  Clock clock;
  bool pass = true;
  std::vector<std::string> d;
  for (int n : {5, 10, 20, 40}) {
    EvolutionSpec s;
    s.n = n;
    s.channel = CouplingProfile::pst();
    s.total_time = kPi / 2;
    const double f = tracked(s).final_fidelity();
    pass = pass && std::abs(f - 1.0) <= 1e-6;
    d.push_back(fmt("N=%d F(pi/2)=%.12f", n, f));
  }
  const double secs = clock.seconds();
  pass = pass && secs < 1.0;
  d.push_back(fmt("runtime %.3f s (budget 1 s)", secs));
  report(1, "PST mirror baseline: |F(pi/2) - 1| <= 1e-6 for N in {5,10,20,40}", pass, d);
}

void criterion2() {
  Clock clock;
  bool pass = true;
  std::vector<std::string> d;
  for (int n : {5, 20}) {
    const double fr = tracked(leo(n, CouplingProfile::pst(), PulseShape::rectangular(40.0, kPi / 20), kPi / 2))
                          .final_fidelity();
    const double tau = 2.405 * kPi / 80;
    const double fs = tracked(leo(n, CouplingProfile::pst(), PulseShape::sine(80.0, kPi / tau), kPi / 2))
                          .final_fidelity();
    pass = pass && fr >= 0.99 && fs >= 0.99;
    d.push_back(fmt("N=%d rect I=40 tau=pi/20 F=%.6f; sine I=80 tau=2.405pi/80 F=%.6f", n, fr, fs));
  }
  // Same runs from the preset (sine at the exact Bessel zero).
  for (const auto& v : preset("fig1a").variants) {
    d.push_back(fmt("preset %s F=%.6f", v.label.c_str(), tracked(v.spec).final_fidelity()));
  }
  const double secs = clock.seconds();
  pass = pass && secs < 10.0;
  d.push_back(fmt("runtime %.3f s (budget 10 s)", secs));
  report(2, "Fig. 1(a): F(T) >= 0.99 for rect and sine, N in {5,20}", pass, d);
}

void criterion3() {
  Clock clock;
  const auto s = preset("fig1b");
  bool pass = true;
  std::vector<std::string> d;
  const std::vector<std::vector<double>> targets{
      {2 * kPi / 50, 4 * kPi / 50, 6 * kPi / 50}, {2.405 * kPi / 50, 5.520 * kPi / 50}};
  for (std::size_t k = 0; k < s.sweeps.size(); ++k) {
    const auto& plan = s.sweeps[k];
    const auto x = plan.sweep.values();
    const auto f = run_sweep(plan, 0);
    const double step = x[1] - x[0];
    const auto peaks = find_peaks(x, f);
    std::string found;
    for (const auto& p : peaks) found += fmt(" %.4f", p.value);
    d.push_back(plan.label + " peaks at tau =" + found);
    for (double target : targets[k]) {
      double best = std::numeric_limits<double>::infinity(), where = 0.0;
      for (const auto& p : peaks) {
        if (std::abs(p.value - target) < best) {
          best = std::abs(p.value - target);
          where = p.value;
        }
      }
      const bool ok = best <= step;
      pass = pass && ok;
      d.push_back(fmt("  target %.5f nearest %.5f offset %.2f grid steps %s", target, where, best / step,
                      ok ? "ok" : "MISS"));
    }
  }
  const double secs = clock.seconds();
  pass = pass && secs < 120.0;
  d.push_back(fmt("runtime %.3f s (budget 120 s)", secs));
  report(3, "Fig. 1(b): sweep peaks within one grid step of 2 pi m/50 and {2.405, 5.520} pi/50", pass, d);
}

void criterion4() {
  Clock clock;
  const double T = 210 * kPi;
  const int n = 20;
  const auto cal = calibrate_j0(n, T);
  const auto wc = CouplingProfile::weak_ends(cal.j0);
  const double tau_s = 2.405 * kPi / 120;
  auto rect = leo(n, wc, PulseShape::rectangular(60.0, kPi / 30), T);
  auto sine = leo(n, wc, PulseShape::sine(120.0, kPi / tau_s), T);
  sine.dt_policy.max_step = tau_s / 256;
  const double fr = tracked(rect).final_fidelity();
  const double fs = tracked(sine).final_fidelity();
  const bool pass_values = fr >= 0.99 && fs >= 0.99;
  std::vector<std::string> d;
  d.push_back(fmt("calibrated J0=%.6f (first arrival), pulse-free F=%.6f", cal.j0, cal.fidelity));
  d.push_back(fmt("rect I=60 tau=pi/30 F=%.6f; sine I=120 tau=2.405pi/120 F=%.6f", fr, fs));
  d.push_back(fmt("reference F=0.999 (informational): rect %s, sine %s", fr >= 0.999 ? "met" : "not met",
                  fs >= 0.999 ? "met" : "not met"));
  // Informational: the global-maximum J0 of the same sweep.
  auto rect_g = rect;
  rect_g.leo_generator = CouplingProfile::weak_ends(cal.global_max_j0);
  auto sine_g = sine;
  sine_g.leo_generator = rect_g.leo_generator;
  d.push_back(fmt("informational: global-max J0=%.6f (pulse-free F=%.6f) gives rect F=%.6f, sine F=%.6f",
                  cal.global_max_j0, cal.global_max_fidelity, tracked(rect_g).final_fidelity(),
                  tracked(sine_g).final_fidelity()));
  const double secs = clock.seconds();
  d.push_back(fmt("runtime %.3f s (budget 300 s)", secs));
  report(4, "Fig. 2: calibrated WC generator, N=20, T=210 pi, F(T) >= 0.99 for rect and sine",
         pass_values && secs < 300.0, d);
}

void criterion5() {
  Clock clock;
  bool pass = true;
  std::vector<std::string> d;
  for (const auto& v : preset("fig3").variants) {
    const double f = tracked(v.spec).final_fidelity();
    pass = pass && f >= 0.95;
    d.push_back(fmt("%s F=%.6f", v.label.c_str(), f));
  }
  const double secs = clock.seconds();
  pass = pass && secs < 60.0;
  d.push_back(fmt("runtime %.3f s (budget 60 s)", secs));
  report(5, "Fig. 3: bang-bang I=120 tau=pi/120 gain 50 duty 1/50, F(T) >= 0.95 for N in {10,20,30,40}", pass,
         d);
}

void criterion6() {
  std::vector<std::string> d;
  double previous = 2.0;
  bool pass = true;
  for (int n : {5, 10, 20, 40}) {
    const auto peak = bose_baseline(n, 4.0 * n);
    pass = pass && peak.f_peak < previous;
    previous = peak.f_peak;
    d.push_back(fmt("N=%d max F=%.6f at t=%.4f (window 4N)", n, peak.f_peak, peak.t_peak));
  }
  report(6, "Bose baseline: max-over-time fidelity strictly decreases over N = 5, 10, 20, 40", pass, d);
}

void criterion7() {
  std::vector<std::string> d;
  const double tr = kPi / 20;
  const double rect = std::abs(condition_residual(PulseShape::rectangular(40.0, tr), tr).residual);
  const auto sine_p = sine_for_zero(80.0, 1);
  const double ts = sine_p.interval();
  const double sine = std::abs(condition_residual(sine_p, ts).residual);
  const double t_off = 0.1;
  const double off = std::abs(condition_residual(PulseShape::rectangular(3.0 / t_off, t_off), t_off).residual);
  bool pass = rect <= 1e-8 * tr && sine <= 1e-6 * ts && off > 0.1 * t_off;
  d.push_back(fmt("rect I tau = 2 pi: |residual|/tau = %.3e (<= 1e-8)", rect / tr));
  d.push_back(fmt("sine at z1: |residual|/tau = %.3e (<= 1e-6)", sine / ts));
  d.push_back(fmt("rect I tau = 3: |residual|/tau = %.3f (> 0.1)", off / t_off));
  const double expected[] = {2.404826, 5.520078, 8.653728};
  for (int k = 1; k <= 3; ++k) {
    const double z = bessel_j0_zero(k);
    pass = pass && std::abs(z - expected[k - 1]) <= 1e-6;
    d.push_back(fmt("zero %d = %.9f (expected %.6f)", k, z, expected[k - 1]));
  }
  report(7, "Condition checker residuals and first three Bessel zeros", pass, d);
}

void criterion8() {
  const auto on = tracked(leo(20, CouplingProfile::pst(), PulseShape::rectangular(40.0, kPi / 20), kPi / 2));
  const auto off = tracked(leo(20, CouplingProfile::pst(), PulseShape::rectangular(40.0, kPi / 40), kPi / 2));
  const double gap = on.final_fidelity() - off.final_fidelity();
  report(8, "Off-condition dynamics: halving tau lowers F(T) by at least 0.2 (N=20)", gap >= 0.2,
         {fmt("on-condition F=%.6f, I tau = pi F=%.6f, gap %.6f", on.final_fidelity(), off.final_fidelity(), gap)});
}

void criterion9() {
  std::vector<std::string> d;
  bool pass = true;

  // Rank-1 exponential against a dense Pade exponential.
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> angle(-100.0, 100.0);
  double rank1 = 0.0;
  for (int n = 2; n <= 16; ++n) {
    for (int trial = 0; trial < 20; ++trial) {
      const ComplexVector phi = oracle::random_state(rng, n);
      const ComplexVector psi = oracle::random_state(rng, n);
      const double theta = angle(rng);
      const ComplexMatrix projector = phi * phi.adjoint();
      rank1 = std::max(rank1, (apply_rank1_exp(psi, phi, theta) - oracle::dense_exp(projector, theta) * psi).norm());
    }
  }
  pass = pass && rank1 <= 1e-10;
  d.push_back(fmt("rank-1 vs dense exponential, n <= 16: max error %.3e (<= 1e-10)", rank1));

  // Strang order on smooth pulses.
  double worst_order = 1e9;
  for (int n : {5, 20}) {
    auto s = leo(n, CouplingProfile::pst(), sine_for_zero(80.0, 1), kPi / 2);
    s.dt_policy.max_step = 5e-3;
    s.dt_policy.substeps_per_pulse_segment = 1;
    const auto r = convergence_report(s);
    worst_order = std::min(worst_order, r.observed_order);
    d.push_back(fmt("Strang order, sine N=%d: %.3f", n, r.observed_order));
  }
  pass = pass && worst_order >= 1.7;

  // P-Q kernel residual under refinement.
  const auto h0 = chain_hamiltonian(CouplingProfile::uniform(), 4);
  const LeoBasis b4(spectral(chain_hamiltonian(CouplingProfile::pst(), 4)));
  const auto pulse = PulseShape::rectangular(40.0, kPi / 20);
  const double r1 = pq_kernel_check(b4, h0, pulse, kPi / 20, 1000).kernel_residual;
  const double r2 = pq_kernel_check(b4, h0, pulse, kPi / 20, 2000).kernel_residual;
  const double r4 = pq_kernel_check(b4, h0, pulse, kPi / 20, 4000).kernel_residual;
  pass = pass && r2 < r1 && r4 < r2;
  d.push_back(fmt("P-Q kernel residual n=4: %.3e, %.3e, %.3e at 1000/2000/4000 steps", r1, r2, r4));

  // Frame amplitude weight along an evolved trajectory and random states.
  double weight = 0.0;
  const LeoBasis b20(spectral(chain_hamiltonian(CouplingProfile::pst(), 20)));
  for (int trial = 0; trial < 200; ++trial) {
    const ComplexVector psi = oracle::random_state(rng, 20);
    const double t = 0.01 * trial;
    weight = std::max(weight, std::abs(frame_amplitudes(b20, t, psi).total_weight() - 1.0));
  }
  for (double T : {0.3, 0.9, kPi / 2}) {
    const auto traj = tracked(leo(20, CouplingProfile::pst(), PulseShape::rectangular(40.0, kPi / 20), T));
    weight = std::max(weight, std::abs(frame_amplitudes(b20, T, traj.final_state).total_weight() - 1.0));
  }
  pass = pass && weight <= 1e-9;
  d.push_back(fmt("|sum |a_n|^2 - 1| max %.3e (<= 1e-9)", weight));

  pass = pass && g_max_drift <= 1e-8;
  d.push_back(fmt("norm drift over %lld evolve runs in this suite: max %.3e (<= 1e-8)", g_runs, g_max_drift));
  report(9, "Property suites: unitarity, rank-1 exponential, Strang order, P-Q kernel, amplitude weight", pass, d);
}

}  // namespace

int main() {
  Clock total;
  const std::vector<void (*)()> criteria{criterion1, criterion2, criterion3, criterion4, criterion5,
                                         criterion6, criterion7, criterion8, criterion9};
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    try {
      criteria[k]();
    } catch (const std::exception& e) {
      report(static_cast<int>(k + 1), "aborted", false, {e.what()});
    }
  }
  std::printf("total runtime %.1f s; unexpected failures: %d\n", total.seconds(), g_unexpected);
  return g_unexpected == 0 ? 0 : 1;
}
