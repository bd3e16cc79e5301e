#include <cmath>
#include <fstream>
#include <limits>
#include <map>

#include "aest/lab.hpp"

namespace aest {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kFig1Time = kPi / 2;
constexpr double kFig2Time = 210.0 * kPi;

const std::vector<int> kFig1aLengths{5, 20};
const std::vector<int> kFig2Lengths{20, 30, 40};
const std::vector<int> kFig3Lengths{10, 20, 30, 40};
const std::vector<int> kBoseLengths{5, 10, 20, 40};

EvolutionSpec leo_spec(int n, CouplingProfile generator, PulseShape pulse, double T) {
  EvolutionSpec s;
  s.n = n;
  s.channel = CouplingProfile::uniform();
  s.leo_generator = generator;
  s.pulse = pulse;
  s.total_time = T;
  return s;
}

std::vector<int> lengths(const std::vector<int>& defaults, const ScenarioOptions& options) {
  if (options.n) return {*options.n};
  return defaults;
}

std::string label(const std::string& stem, const std::string& shape, int n) {
  return stem + "_" + shape + "_n" + std::to_string(n);
}

double number(const Json& j, const char* key) {
  if (!j.contains(key)) throw ConfigError(std::string("config: missing field '") + key + "'");
  if (!j.at(key).is_number()) throw ConfigError(std::string("config: field '") + key + "' must be a number");
  return j.at(key).get<double>();
}

double number_or(const Json& j, const char* key, double fallback) {
  return j.contains(key) ? number(j, key) : fallback;
}

int integer(const Json& j, const char* key) {
  if (!j.at(key).is_number_integer()) {
    throw ConfigError(std::string("config: field '") + key + "' must be an integer");
  }
  return j.at(key).get<int>();
}

std::string text(const Json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_string()) {
    throw ConfigError(std::string("config: field '") + key + "' must be a string");
  }
  return j.at(key).get<std::string>();
}

void finalize(Scenario& s, const ScenarioOptions& options) {
  if (options.config) {
    for (auto& v : s.variants) apply_overrides(v.spec, *options.config);
    for (auto& p : s.sweeps) {
      apply_overrides(p.base, *options.config);
      if (options.config->contains("sweep")) p.sweep = sweep_from_json(options.config->at("sweep"));
    }
  }
  for (auto& v : s.variants) {
    v.spec.validate();
    if (s.name != ScenarioName::Custom) check_preset_pulse(v.spec.pulse);
    if (!(options.config && options.config->contains("sample_stride"))) {
      v.spec.sample_stride = auto_sample_stride(v.spec);
    }
  }
  for (auto& p : s.sweeps) {
    p.base.validate();
    p.sweep.validate();
  }
}

}  // namespace

std::string to_string(ScenarioName name) {
  switch (name) {
    case ScenarioName::Fig1a:
      return "fig1a";
    case ScenarioName::Fig1b:
      return "fig1b";
    case ScenarioName::Fig2:
      return "fig2";
    case ScenarioName::Fig3:
      return "fig3";
    case ScenarioName::BoseBaseline:
      return "bose_baseline";
    case ScenarioName::Custom:
      return "custom";
  }
  return "custom";
}

ScenarioName scenario_from_string(const std::string& name) {
  static const std::map<std::string, ScenarioName> names{
      {"fig1a", ScenarioName::Fig1a}, {"fig1b", ScenarioName::Fig1b},
      {"fig2", ScenarioName::Fig2},   {"fig3", ScenarioName::Fig3},
      {"bose_baseline", ScenarioName::BoseBaseline}, {"custom", ScenarioName::Custom}};
  const auto it = names.find(name);
  if (it == names.end()) throw ConfigError("unknown scenario '" + name + "'");
  return it->second;
}

std::string to_string(SweepParameter p) {
  switch (p) {
    case SweepParameter::Tau:
      return "tau";
    case SweepParameter::Intensity:
      return "intensity";
    case SweepParameter::J0:
      return "j0";
    case SweepParameter::ChainLength:
      return "chain_length";
  }
  return "tau";
}

std::string to_string(Reduction r) {
  return r == Reduction::FinalFidelity ? "final_fidelity" : "max_fidelity";
}

std::string to_string(CalibrationPolicy p) {
  return p == CalibrationPolicy::FirstArrival ? "first_arrival" : "global_max";
}

CalibrationPolicy calibration_policy_from_string(const std::string& name) {
  if (name == "first_arrival") return CalibrationPolicy::FirstArrival;
  if (name == "global_max") return CalibrationPolicy::GlobalMax;
  throw ConfigError("unknown calibration policy '" + name + "'");
}

void SweepSpec::validate() const {
  if (!std::isfinite(from) || !std::isfinite(to) || !(from < to)) {
    throw ConfigError("sweep: need finite from < to");
  }
  if (points < 2) throw ConfigError("sweep: need at least 2 points");
}

std::vector<double> SweepSpec::values() const {
  validate();
  std::vector<double> v(static_cast<std::size_t>(points));
  const double span = to - from;
  for (int i = 0; i < points; ++i) {
    v[static_cast<std::size_t>(i)] = from + span * static_cast<double>(i) / (points - 1);
  }
  v.back() = to;
  return v;
}

EvolutionSpec apply_sweep_value(const EvolutionSpec& base, SweepParameter p, double value) {
  EvolutionSpec s = base;
  switch (p) {
    case SweepParameter::Tau:
      s.pulse = base.pulse.with_interval(value);
      break;
    case SweepParameter::Intensity:
      s.pulse = base.pulse.with_intensity(value);
      break;
    case SweepParameter::J0:
      if (!base.leo_generator || base.leo_generator->kind != CouplingKind::WeakEnds) {
        throw ConfigError("sweep: j0 requires a weak_ends LEO generator");
      }
      s.leo_generator->j0 = value;
      break;
    case SweepParameter::ChainLength:
      s.n = static_cast<int>(std::lround(value));
      break;
  }
  return s;
}

void check_preset_pulse(const PulseShape& p) {
  switch (p.kind()) {
    case PulseKind::None:
      return;
    case PulseKind::Rectangular: {
      const auto& r = std::get<RectangularPulse>(p.params());
      if (!rect_condition(r.intensity, r.half_period).satisfied) {
        throw ConfigError("preset pulse violates I tau = 2 pi m: I = " + format_double(r.intensity) +
                          ", tau = " + format_double(r.half_period));
      }
      return;
    }
    case PulseKind::Sine: {
      const double tau = p.interval();
      const auto report = condition_residual(p, tau);
      if (!(std::abs(report.residual) <= 1e-5 * tau)) {
        throw ConfigError("preset sine pulse misses a Bessel zero: |residual| = " +
                          format_double(std::abs(report.residual)));
      }
      return;
    }
    case PulseKind::BangBang:
      if (std::abs(std::abs(p.kick_area()) - kPi) > 1e-9) {
        throw ConfigError("preset bang-bang kick area is " + format_double(p.kick_area()) + ", not pi");
      }
      return;
  }
}

Scenario preset(const std::string& name, const ScenarioOptions& options) {
  return preset(scenario_from_string(name), options);
}

Scenario preset(ScenarioName name, const ScenarioOptions& options) {
  if (options.n && *options.n < 2) throw ConfigError("preset: n must be >= 2");
  Scenario s;
  s.name = name;
  const auto pst = CouplingProfile::pst();

  switch (name) {
    case ScenarioName::Fig1a:
      for (int n : lengths(kFig1aLengths, options)) {
        s.variants.push_back({label("fig1a", "rect", n),
                              leo_spec(n, pst, PulseShape::rectangular(40.0, kPi / 20), kFig1Time)});
        s.variants.push_back({label("fig1a", "sine", n), leo_spec(n, pst, sine_for_zero(80.0, 1), kFig1Time)});
      }
      break;

    case ScenarioName::Fig1b: {
      const int n = options.n.value_or(10);
      const SweepSpec sweep{SweepParameter::Tau, kPi / 500, 0.6, 600, Reduction::FinalFidelity};
      s.sweeps.push_back({"fig1b_rect", leo_spec(n, pst, PulseShape::rectangular(50.0, kPi / 25), kFig1Time),
                          sweep});
      s.sweeps.push_back({"fig1b_sine", leo_spec(n, pst, sine_for_zero(50.0, 1), kFig1Time), sweep});
      break;
    }

    case ScenarioName::Fig2: {
      const auto ns = lengths(kFig2Lengths, options);
      std::map<int, double> j0;
      for (int n : ns) {
        s.calibrations.push_back(calibrate_j0(n, kFig2Time, options.calibration));
        j0[n] = s.calibrations.back().j0;
      }
      // Shared J0: the value calibrated for the shortest default chain.
      const int reference = kFig2Lengths.front();
      if (!j0.count(reference)) {
        s.calibrations.push_back(calibrate_j0(reference, kFig2Time, options.calibration));
        j0[reference] = s.calibrations.back().j0;
      }
      const auto sine = sine_for_zero(120.0, 1);
      auto add = [&](int n, double value, const std::string& suffix) {
        const auto wc = CouplingProfile::weak_ends(value);
        s.variants.push_back({label("fig2", "rect", n) + suffix,
                              leo_spec(n, wc, PulseShape::rectangular(60.0, kPi / 30), kFig2Time)});
        auto sv = leo_spec(n, wc, sine, kFig2Time);
        sv.dt_policy.max_step = sine.interval() / 256;
        s.variants.push_back({label("fig2", "sine", n) + suffix, sv});
      };
      for (int n : ns) add(n, j0[n], "");
      for (int n : ns) {
        if (n != reference) add(n, j0[reference], "_shared");
      }
      Json per_n = Json::object();
      for (int n : ns) per_n[std::to_string(n)] = j0[n];
      s.metadata["j0"] = per_n;
      s.metadata["shared_j0"] = j0[reference];
      s.metadata["shared_j0_reference_n"] = reference;
      s.metadata["calibration_policy"] = to_string(options.calibration.policy);
      break;
    }

    case ScenarioName::Fig3:
      for (int n : lengths(kFig3Lengths, options)) {
        s.variants.push_back(
            {label("fig3", "bb", n), leo_spec(n, pst, PulseShape::bang_bang(120.0, kPi / 120), kFig1Time)});
      }
      break;

    case ScenarioName::BoseBaseline: {
      Json peaks = Json::object();
      for (int n : lengths(kBoseLengths, options)) {
        EvolutionSpec spec;
        spec.n = n;
        spec.total_time = 4.0 * n;
        s.variants.push_back({"bose_n" + std::to_string(n), spec});
        const auto peak = bose_baseline(n, spec.total_time);
        peaks[std::to_string(n)] = {{"t_peak", peak.t_peak}, {"f_peak", peak.f_peak}};
      }
      s.metadata["bose_peaks"] = peaks;
      break;
    }

    case ScenarioName::Custom: {
      if (!options.config) throw ConfigError("custom scenario needs a config document");
      const Json& c = *options.config;
      auto spec = spec_from_json(c);
      if (options.n) spec.n = *options.n;
      const std::string name_ = c.contains("label") ? text(c, "label") : std::string("custom");
      if (c.contains("sweep")) {
        s.sweeps.push_back({name_, spec, sweep_from_json(c.at("sweep"))});
      } else {
        s.variants.push_back({name_, spec});
      }
      for (auto& v : s.variants) {
        if (!c.contains("sample_stride")) v.spec.sample_stride = auto_sample_stride(v.spec);
      }
      for (auto& p : s.sweeps) p.sweep.validate();
      return s;
    }
  }
  finalize(s, options);
  return s;
}

Json to_json(const CouplingProfile& c) {
  Json j{{"kind", to_string(c.kind)}, {"j", c.j}};
  if (c.kind == CouplingKind::WeakEnds) j["j0"] = c.j0;
  return j;
}

Json to_json(const PulseShape& p) {
  return std::visit(
      Overloaded{
          [](const NoPulse&) { return Json{{"kind", "none"}}; },
          [](const RectangularPulse& r) {
            return Json{{"kind", "rect"}, {"intensity", r.intensity}, {"tau", r.half_period}};
          },
          [&](const SinePulse& s) {
            return Json{{"kind", "sine"}, {"intensity", s.intensity}, {"omega", s.omega}, {"tau", p.interval()}};
          },
          [](const BangBangPulse& b) {
            return Json{{"kind", "bb"},       {"intensity", b.base_intensity}, {"tau", b.half_period},
                        {"duty", b.duty},     {"gain", b.gain},                {"sign", b.sign}};
          },
      },
      p.params());
}

Json to_json(const EvolutionSpec& s) {
  return Json{{"n", s.n},
              {"channel", to_json(s.channel)},
              {"leo_generator", s.leo_generator ? to_json(*s.leo_generator) : Json(nullptr)},
              {"pulse", to_json(s.pulse)},
              {"total_time", s.total_time},
              {"dt_policy",
               {{"max_step", s.dt_policy.max_step},
                {"substeps_per_pulse_segment", s.dt_policy.substeps_per_pulse_segment},
                {"kick_substeps", s.dt_policy.kick_substeps}}},
              {"sample_stride", s.sample_stride}};
}

Json to_json(const SweepSpec& s) {
  return Json{{"parameter", to_string(s.parameter)},
              {"from", s.from},
              {"to", s.to},
              {"points", s.points},
              {"reduction", to_string(s.reduction)}};
}

CouplingProfile coupling_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: coupling profile must be an object");
  CouplingProfile c;
  c.kind = coupling_kind_from_string(text(j, "kind"));
  c.j = number_or(j, "j", 1.0);
  if (c.kind == CouplingKind::WeakEnds) c.j0 = number(j, "j0");
  c.validate();
  return c;
}

PulseShape pulse_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: pulse must be an object");
  const std::string kind = text(j, "kind");
  if (kind == "none") return PulseShape::none();
  if (kind == "rect" || kind == "rectangular") {
    return PulseShape::rectangular(number(j, "intensity"), number(j, "tau"));
  }
  if (kind == "sine") {
    const double intensity = number(j, "intensity");
    if (j.contains("omega")) return PulseShape::sine(intensity, number(j, "omega"));
    return PulseShape::sine(intensity, kPi / number(j, "tau"));
  }
  if (kind == "bb" || kind == "bang_bang") {
    const BangBangPulse defaults{};
    double sign = number_or(j, "sign", defaults.sign);
    return PulseShape::bang_bang(number(j, "intensity"), number(j, "tau"), number_or(j, "duty", defaults.duty),
                                 number_or(j, "gain", defaults.gain), static_cast<int>(sign));
  }
  throw ConfigError("config: unknown pulse kind '" + kind + "'");
}

SweepSpec sweep_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: sweep must be an object");
  SweepSpec s;
  const std::string parameter = text(j, "parameter");
  if (parameter == "tau") {
    s.parameter = SweepParameter::Tau;
  } else if (parameter == "intensity") {
    s.parameter = SweepParameter::Intensity;
  } else if (parameter == "j0") {
    s.parameter = SweepParameter::J0;
  } else if (parameter == "chain_length") {
    s.parameter = SweepParameter::ChainLength;
  } else {
    throw ConfigError("config: unknown sweep parameter '" + parameter + "'");
  }
  s.from = number(j, "from");
  s.to = number(j, "to");
  s.points = integer(j, "points");
  if (j.contains("reduction")) {
    const std::string r = text(j, "reduction");
    if (r == "final_fidelity") {
      s.reduction = Reduction::FinalFidelity;
    } else if (r == "max_fidelity") {
      s.reduction = Reduction::MaxFidelity;
    } else {
      throw ConfigError("config: unknown reduction '" + r + "'");
    }
  }
  s.validate();
  return s;
}

void apply_overrides(EvolutionSpec& spec, const Json& j) {
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (key == "n") {
      spec.n = integer(j, "n");
    } else if (key == "channel") {
      spec.channel = coupling_from_json(value);
    } else if (key == "leo_generator") {
      if (value.is_null()) {
        spec.leo_generator.reset();
      } else {
        spec.leo_generator = coupling_from_json(value);
      }
    } else if (key == "pulse") {
      spec.pulse = pulse_from_json(value);
    } else if (key == "total_time") {
      spec.total_time = number(j, "total_time");
    } else if (key == "dt_policy") {
      if (!value.is_object()) throw ConfigError("config: dt_policy must be an object");
      for (const auto& [k, v] : value.items()) {
        if (k == "max_step") {
          spec.dt_policy.max_step = number(value, "max_step");
        } else if (k == "substeps_per_pulse_segment") {
          spec.dt_policy.substeps_per_pulse_segment = integer(value, "substeps_per_pulse_segment");
        } else if (k == "kick_substeps") {
          spec.dt_policy.kick_substeps = integer(value, "kick_substeps");
        } else {
          throw ConfigError("config: unknown dt_policy field '" + k + "'");
        }
      }
    } else if (key == "sample_stride") {
      spec.sample_stride = integer(j, "sample_stride");
    } else if (key == "sweep" || key == "label") {
      // handled by the scenario builder
    } else {
      throw ConfigError("config: unknown field '" + key + "'");
    }
  }
}

EvolutionSpec spec_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("config: document must be a JSON object");
  for (const char* key : {"n", "channel", "total_time", "pulse"}) {
    if (!j.contains(key)) throw ConfigError(std::string("config: missing field '") + key + "'");
  }
  EvolutionSpec spec;
  apply_overrides(spec, j);
  spec.validate();
  return spec;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
}

long long total_steps(const EvolutionSpec& spec) {
  long long steps = 0;
  for (const auto& seg : integration_grid(spec)) steps += seg.substeps;
  return steps;
}

int auto_sample_stride(const EvolutionSpec& spec, int rows) {
  const long long steps = total_steps(spec);
  const long long stride = std::max<long long>(1, steps / std::max(1, rows));
  return static_cast<int>(std::min<long long>(stride, std::numeric_limits<int>::max()));
}

}  // namespace aest
