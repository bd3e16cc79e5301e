#include "aest/control.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>

namespace aest {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

long long half_period_index(double t, double tau) {
  return static_cast<long long>(std::floor(t / tau));
}

bool is_odd(long long n) { return (n % 2) != 0; }

// Nodes and weights of the 16-point Gauss-Legendre rule on [-1, 1].
struct GaussLegendre16 {
  std::array<double, 16> nodes{};
  std::array<double, 16> weights{};

  GaussLegendre16() {
    constexpr int n = 16;
    for (int i = 0; i < n / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 0.0;
      for (int iter = 0; iter < 100; ++iter) {
        double p0 = 1.0;
        double p1 = x;
        for (int k = 2; k <= n; ++k) {
          const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      nodes[static_cast<std::size_t>(i)] = -x;
      nodes[static_cast<std::size_t>(n - 1 - i)] = x;
      weights[static_cast<std::size_t>(i)] = w;
      weights[static_cast<std::size_t>(n - 1 - i)] = w;
    }
  }
};

const GaussLegendre16& gauss_legendre16() {
  static const GaussLegendre16 rule;
  return rule;
}

Complex integrate_phase_factor(const PulseShape& p, const std::vector<double>& edges,
                               const std::vector<int>& panels) {
  const auto& gl = gauss_legendre16();
  Complex sum{0.0, 0.0};
  for (std::size_t s = 0; s + 1 < edges.size(); ++s) {
    const double a = edges[s];
    const double h = (edges[s + 1] - a) / panels[s];
    for (int k = 0; k < panels[s]; ++k) {
      const double lo = a + k * h;
      const double half = 0.5 * h;
      const double mid = lo + half;
      Complex panel{0.0, 0.0};
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double phi = phase_integral(p, mid + half * gl.nodes[q]);
        panel += gl.weights[q] * std::polar(1.0, -phi);
      }
      sum += half * panel;
    }
  }
  return sum;
}

}  // namespace

namespace detail {

double bessel_j0_series(double x) {
  const double q = -0.25 * x * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    term *= q / (static_cast<double>(k) * k);
    sum += term;
    if (std::abs(term) < 1e-18 * std::max(1.0, std::abs(sum))) break;
  }
  return sum;
}

// Hankel asymptotic expansion, truncated at its smallest term.
double bessel_j0_asymptotic(double x) {
  double p = 0.0;
  double q = 0.0;
  double a = 1.0;  // a_k / x^k
  double previous = std::numeric_limits<double>::infinity();
  for (int k = 0; k < 200; ++k) {
    if (k > 0) {
      const double odd = 2.0 * k - 1.0;
      a *= odd * odd / (8.0 * k * x);
    }
    if (a > previous) break;
    previous = a;
    const int r = k % 4;
    if (r == 0) p += a;
    if (r == 1) q -= a;
    if (r == 2) p -= a;
    if (r == 3) q += a;
    if (a < 1e-18) break;
  }
  const double chi = x - 0.25 * kPi;
  return std::sqrt(2.0 / (kPi * x)) * (p * std::cos(chi) - q * std::sin(chi));
}

}  // namespace detail

std::string to_string(PulseKind kind) {
  switch (kind) {
    case PulseKind::None:
      return "none";
    case PulseKind::Rectangular:
      return "rect";
    case PulseKind::Sine:
      return "sine";
    case PulseKind::BangBang:
      return "bb";
  }
  return "unknown";
}

PulseShape::PulseShape(Params p) : params_(p) { validate(); }

PulseShape PulseShape::rectangular(double intensity, double half_period) {
  return PulseShape(RectangularPulse{intensity, half_period});
}

PulseShape PulseShape::sine(double intensity, double omega) {
  return PulseShape(SinePulse{intensity, omega});
}

PulseShape PulseShape::bang_bang(double base_intensity, double half_period, double duty,
                                 double gain, int sign) {
  return PulseShape(BangBangPulse{base_intensity, half_period, duty, gain, sign});
}

void PulseShape::validate() const {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  std::visit(Overloaded{
                 [](const NoPulse&) {},
                 [&](const RectangularPulse& r) {
                   if (!positive(r.intensity) || !positive(r.half_period)) {
                     throw ConfigError("rectangular pulse: I and tau must be positive");
                   }
                 },
                 [&](const SinePulse& s) {
                   if (!positive(s.intensity) || !positive(s.omega)) {
                     throw ConfigError("sine pulse: I and omega must be positive");
                   }
                 },
                 [&](const BangBangPulse& b) {
                   if (!positive(b.base_intensity) || !positive(b.half_period)) {
                     throw ConfigError("bang-bang pulse: I and tau must be positive");
                   }
                   if (!(b.duty > 0.0 && b.duty <= 1.0)) {
                     throw ConfigError("bang-bang pulse: duty must lie in (0, 1]");
                   }
                   if (!(b.gain >= 1.0) || !std::isfinite(b.gain)) {
                     throw ConfigError("bang-bang pulse: gain must be >= 1");
                   }
                   if (b.sign != 1 && b.sign != -1) {
                     throw ConfigError("bang-bang pulse: sign must be +1 or -1");
                   }
                 },
             },
             params_);
}

PulseKind PulseShape::kind() const {
  return static_cast<PulseKind>(params_.index());
}

double PulseShape::interval() const {
  return std::visit(Overloaded{
                        [](const NoPulse&) { return 0.0; },
                        [](const RectangularPulse& r) { return r.half_period; },
                        [](const SinePulse& s) { return kPi / s.omega; },
                        [](const BangBangPulse& b) { return b.half_period; },
                    },
                    params_);
}

double PulseShape::intensity() const {
  return std::visit(Overloaded{
                        [](const NoPulse&) { return 0.0; },
                        [](const RectangularPulse& r) { return r.intensity; },
                        [](const SinePulse& s) { return s.intensity; },
                        [](const BangBangPulse& b) { return b.base_intensity; },
                    },
                    params_);
}

double PulseShape::kick_area() const {
  if (const auto* b = std::get_if<BangBangPulse>(&params_)) {
    return b->gain * b->base_intensity * b->duty * b->half_period;
  }
  return 0.0;
}

PulseShape PulseShape::with_interval(double tau) const {
  return std::visit(Overloaded{
                        [](const NoPulse&) { return PulseShape::none(); },
                        [&](RectangularPulse r) {
                          r.half_period = tau;
                          return PulseShape(r);
                        },
                        [&](SinePulse s) {
                          s.omega = kPi / tau;
                          return PulseShape(s);
                        },
                        [&](BangBangPulse b) {
                          b.half_period = tau;
                          return PulseShape(b);
                        },
                    },
                    params_);
}

PulseShape PulseShape::with_intensity(double intensity) const {
  return std::visit(Overloaded{
                        [](const NoPulse&) { return PulseShape::none(); },
                        [&](RectangularPulse r) {
                          r.intensity = intensity;
                          return PulseShape(r);
                        },
                        [&](SinePulse s) {
                          s.intensity = intensity;
                          return PulseShape(s);
                        },
                        [&](BangBangPulse b) {
                          b.base_intensity = intensity;
                          return PulseShape(b);
                        },
                    },
                    params_);
}

double amplitude(const PulseShape& p, double t) {
  return std::visit(Overloaded{
                        [](const NoPulse&) { return 0.0; },
                        [&](const RectangularPulse& r) {
                          const auto n = half_period_index(t, r.half_period);
                          return is_odd(n) ? -r.intensity : r.intensity;
                        },
                        [&](const SinePulse& s) { return s.intensity * std::sin(s.omega * t); },
                        [&](const BangBangPulse& b) {
                          const auto n = half_period_index(t, b.half_period);
                          const double start = static_cast<double>(n) * b.half_period;
                          if (t >= start + b.duty * b.half_period) return 0.0;
                          const double height = b.sign * b.gain * b.base_intensity;
                          return is_odd(n) ? height : -height;
                        },
                    },
                    p.params());
}

double phase_integral(const PulseShape& p, double t) {
  return std::visit(
      Overloaded{
          [](const NoPulse&) { return 0.0; },
          [&](const RectangularPulse& r) {
            const auto n = half_period_index(t, r.half_period);
            const double rem = std::clamp(t - static_cast<double>(n) * r.half_period, 0.0, r.half_period);
            // Complete +/- pairs cancel; an odd count leaves one positive half-period.
            const double whole = is_odd(n) ? r.intensity * r.half_period : 0.0;
            return whole + (is_odd(n) ? -r.intensity : r.intensity) * rem;
          },
          [&](const SinePulse& s) { return s.intensity / s.omega * (1.0 - std::cos(s.omega * t)); },
          [&](const BangBangPulse& b) {
            const auto n = half_period_index(t, b.half_period);
            const double height = b.sign * b.gain * b.base_intensity;
            const double area = height * b.duty * b.half_period;
            const double rem = std::clamp(t - static_cast<double>(n) * b.half_period, 0.0,
                                          b.duty * b.half_period);
            // Kicks alternate -area, +area, ... starting with n = 0.
            const double whole = is_odd(n) ? -area : 0.0;
            return whole + (is_odd(n) ? height : -height) * rem;
          },
      },
      p.params());
}

std::vector<double> breakpoints(const PulseShape& p, double t0, double t1) {
  std::vector<double> out;
  if (!(t0 < t1)) return out;
  auto scan = [&](double tau, double offset_fraction, bool with_offset) {
    long long k = std::max(0LL, half_period_index(t0, tau) - 1);
    for (;; ++k) {
      const double start = static_cast<double>(k) * tau;
      if (start >= t1) break;
      if (start > t0) out.push_back(start);
      if (with_offset) {
        const double end = start + offset_fraction * tau;
        if (end > t0 && end < t1) out.push_back(end);
      }
    }
  };
  std::visit(Overloaded{
                 [](const NoPulse&) {},
                 [&](const RectangularPulse& r) { scan(r.half_period, 0.0, false); },
                 [](const SinePulse&) {},
                 [&](const BangBangPulse& b) { scan(b.half_period, b.duty, b.duty < 1.0); },
             },
             p.params());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

ConditionReport condition_residual(const PulseShape& p, double window, int quad_points,
                                   double tolerance) {
  if (!(window > 0.0)) throw ConfigError("condition_residual: window must be positive");
  if (quad_points < 64) throw ConfigError("condition_residual: need at least 64 quadrature points");

  std::vector<double> edges{0.0};
  const auto inner = breakpoints(p, 0.0, window);
  edges.insert(edges.end(), inner.begin(), inner.end());
  edges.push_back(window);
  const std::size_t segments = edges.size() - 1;

  const int total_panels = std::max<int>(quad_points / 16, static_cast<int>(segments));
  std::vector<int> panels(segments);
  for (std::size_t s = 0; s < segments; ++s) {
    const double share = (edges[s + 1] - edges[s]) / window;
    panels[s] = std::max(1, static_cast<int>(std::ceil(share * total_panels)));
  }

  Complex coarse = integrate_phase_factor(p, edges, panels);
  Complex fine{};
  double error = std::numeric_limits<double>::infinity();
  for (int level = 0; level < 14; ++level) {
    for (auto& k : panels) k *= 2;
    fine = integrate_phase_factor(p, edges, panels);
    error = std::abs(fine - coarse);
    if (error <= 1e-9 * window) break;
    coarse = fine;
  }
  if (!(error <= 1e-9 * window)) {
    std::ostringstream msg;
    msg << "condition_residual: quadrature did not converge (estimated error " << error
        << ", window " << window << ")";
    throw NumericError(msg.str());
  }

  ConditionReport report;
  report.residual = fine;
  report.window = window;
  report.tolerance = tolerance;
  report.quadrature_error = error;
  report.satisfied = std::abs(fine) <= tolerance * window;
  switch (p.kind()) {
    case PulseKind::None:
      break;
    case PulseKind::Rectangular:
      report.nearest_family_member = std::round(p.intensity() * p.interval() / (2.0 * kPi));
      break;
    case PulseKind::BangBang:
      report.nearest_family_member = std::round(std::abs(p.kick_area()) / kPi);
      break;
    case PulseKind::Sine: {
      const double x = p.intensity() * p.interval() / kPi;
      double best = bessel_j0_zero(1);
      for (int k = 2; k <= 20; ++k) {
        const double z = bessel_j0_zero(k);
        if (std::abs(z - x) < std::abs(best - x)) best = z;
      }
      report.nearest_family_member = best;
      break;
    }
  }
  return report;
}

RectCondition rect_condition(double intensity, double half_period) {
  if (!(intensity > 0.0) || !(half_period > 0.0)) {
    throw ConfigError("rect_condition: I and tau must be positive");
  }
  const double x = intensity * half_period / (2.0 * kPi);
  const double nearest = std::round(x);
  const bool ok = nearest >= 1.0 && std::abs(x - nearest) <= 1e-9;
  return {ok, std::max(1, static_cast<int>(nearest))};
}

double bessel_j0(double x) {
  const double ax = std::abs(x);
  return ax <= 12.0 ? detail::bessel_j0_series(ax) : detail::bessel_j0_asymptotic(ax);
}

double bessel_j0_zero(int k) {
  if (k < 1 || k > 20) {
    throw ConfigError("bessel_j0_zero: index must lie in [1, 20], got " + std::to_string(k));
  }
  // z_k lies in ((k - 1/2) pi, k pi).
  double lo = (k - 0.5) * kPi;
  double hi = k * kPi;
  double flo = bessel_j0(lo);
  if (flo * bessel_j0(hi) > 0.0) {
    throw NumericError("bessel_j0_zero: no sign change in bracket for k=" + std::to_string(k));
  }
  while (hi - lo > 4.0 * std::numeric_limits<double>::epsilon() * hi) {
    const double mid = 0.5 * (lo + hi);
    const double fm = bessel_j0(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

PulseShape sine_for_zero(double intensity, int k) {
  if (!(intensity > 0.0)) throw ConfigError("sine_for_zero: I must be positive");
  const double tau = bessel_j0_zero(k) * kPi / intensity;
  return PulseShape::sine(intensity, kPi / tau);
}

}  // namespace aest
