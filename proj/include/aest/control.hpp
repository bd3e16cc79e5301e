#pragma once

// Control waveforms c(t) for the leakage-elimination term, their exact
// running integrals, switching instants and the single-interval
// decoupling condition  int_0^tau exp(-i Phi(s)) ds = 0.

#include <string>
#include <variant>
#include <vector>

#include "aest/common.hpp"

namespace aest {

struct NoPulse {};

/// +I on [n tau, (n+1) tau) for even n, -I for odd n.
struct RectangularPulse {
  double intensity;
  double half_period;
};

/// I sin(omega t).
struct SinePulse {
  double intensity;
  double omega;
};

/// Narrow kicks of height gain * I lasting duty * tau at the start of every
/// half-period. With sign = +1 the kick is positive for odd n and negative
/// for even n; sign = -1 flips every kick.
struct BangBangPulse {
  double base_intensity;
  double half_period;
  double duty = 1.0 / 50.0;
  double gain = 50.0;
  int sign = +1;
};

enum class PulseKind { None, Rectangular, Sine, BangBang };

std::string to_string(PulseKind kind);

class PulseShape {
 public:
  using Params = std::variant<NoPulse, RectangularPulse, SinePulse, BangBangPulse>;

  PulseShape() = default;

  static PulseShape none() { return PulseShape(NoPulse{}); }
  static PulseShape rectangular(double intensity, double half_period);
  static PulseShape sine(double intensity, double omega);
  static PulseShape bang_bang(double base_intensity, double half_period, double duty = 1.0 / 50.0,
                              double gain = 50.0, int sign = +1);

  PulseKind kind() const;
  const Params& params() const { return params_; }
  bool is_none() const { return kind() == PulseKind::None; }

  /// Control interval tau: the half-period for Rectangular/BangBang and
  /// pi / omega for Sine. Zero for None.
  double interval() const;
  double intensity() const;

  /// Area of one bang-bang kick, gain * I * duty * tau. Zero for other kinds.
  double kick_area() const;

  /// Same waveform family with the control interval replaced. For Sine the
  /// frequency becomes pi / tau.
  PulseShape with_interval(double tau) const;
  PulseShape with_intensity(double intensity) const;

 private:
  explicit PulseShape(Params p);
  void validate() const;

  Params params_ = NoPulse{};
};

/// c(t), t >= 0.
double amplitude(const PulseShape& p, double t);

/// Phi(t) = int_0^t c(s) ds in closed form.
double phase_integral(const PulseShape& p, double t);

/// Discontinuities of c strictly inside (t0, t1), ascending. Each instant is
/// built as k * tau or k * tau + duty * tau so that repeated calls return
/// bit-identical values.
std::vector<double> breakpoints(const PulseShape& p, double t0, double t1);

struct ConditionReport {
  Complex residual;
  bool satisfied = false;
  /// Nearest integer m (rectangular, bang-bang in units of pi) or nearest
  /// Bessel zero (sine) to the pulse parameters.
  double nearest_family_member = 0.0;
  double tolerance = 0.0;
  double window = 0.0;
  double quadrature_error = 0.0;
};

/// Evaluates int_0^window exp(-i Phi(s)) ds with composite 16-point
/// Gauss-Legendre panels aligned to the breakpoints. `quad_points` is the
/// total number of nodes on the coarse pass (>= 64); the pass is repeated
/// with doubled panels until the two estimates agree to 1e-9 * window.
/// satisfied <=> |residual| <= tolerance * window.
ConditionReport condition_residual(const PulseShape& p, double window, int quad_points = 256,
                                   double tolerance = 1e-6);

struct RectCondition {
  bool satisfied;
  int m;
};

/// I tau = 2 pi m for a positive integer m, to 1e-9 in m.
RectCondition rect_condition(double intensity, double half_period);

/// Zeroth-order Bessel function of the first kind, |x| <= 1e3.
double bessel_j0(double x);

/// k-th positive zero of J0, 1 <= k <= 20.
double bessel_j0_zero(int k);

namespace detail {
double bessel_j0_series(double x);
double bessel_j0_asymptotic(double x);
}  // namespace detail

/// Sine pulse with tau = z_k pi / I and omega = pi / tau, so J0(I tau / pi) = 0.
PulseShape sine_for_zero(double intensity, int k);

}  // namespace aest
