// Command-line front end: run presets, sweeps, J0 calibration, pulse checks
// and peak detection.

#include <cstdio>
#include <iostream>

#include "CLI11.hpp"
#include "aest/lab.hpp"

using namespace aest;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitIo = 4;

ScenarioOptions scenario_options(const std::optional<int>& n, const std::string& config,
                                 const std::string& policy) {
  ScenarioOptions o;
  o.n = n;
  if (!config.empty()) o.config = read_json_file(config);
  o.calibration.policy = calibration_policy_from_string(policy);
  return o;
}

void print_record(const RunRecord& r) {
  std::cout << "run " << r.id << " (" << r.scenario << ") " << r.wall_time << " s\n";
  for (const auto& path : r.outputs) std::cout << "  " << path << "\n";
}

PulseShape pulse_for(const std::string& shape, double intensity, double tau, double duty, double gain) {
  if (shape == "rect") return PulseShape::rectangular(intensity, tau);
  if (shape == "sine") return PulseShape::sine(intensity, kPi / tau);
  if (shape == "bb") return PulseShape::bang_bang(intensity, tau, duty, gain);
  throw ConfigError("unknown shape '" + shape + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Almost-exact state transfer laboratory"};
  app.set_version_flag("--version", AEST_VERSION);
  app.require_subcommand(1);

  std::string scenario = "fig1a";
  std::optional<int> n;
  std::string config;
  std::string out = "out";
  int threads = 0;
  std::string policy = "first_arrival";

  auto* run_cmd = app.add_subcommand("run", "Run a scenario preset or custom config");
  run_cmd->add_option("--scenario", scenario, "fig1a|fig1b|fig2|fig3|bose_baseline|custom")->required();
  run_cmd->add_option("--n", n, "Single chain length");
  run_cmd->add_option("--config", config, "JSON config mirroring EvolutionSpec")->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out, "Output directory")->required();
  run_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");
  run_cmd->add_option("--j0-policy", policy, "first_arrival|global_max");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run the sweeps of a scenario");
  sweep_cmd->add_option("--scenario", scenario, "fig1b or custom with a sweep block")->required();
  sweep_cmd->add_option("--n", n, "Chain length");
  sweep_cmd->add_option("--config", config, "JSON config")->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", out, "Output directory")->required();
  sweep_cmd->add_option("--threads", threads, "Worker threads (0: all cores)");

  int cal_n = 20;
  double cal_t = 210.0 * kPi;
  int cal_points = 400;
  auto* cal_cmd = app.add_subcommand("calibrate", "Calibrate the weak end coupling J0");
  cal_cmd->add_option("--n", cal_n, "Chain length")->required();
  cal_cmd->add_option("--T", cal_t, "Transfer time")->required();
  cal_cmd->add_option("--out", out, "Output directory")->required();
  cal_cmd->add_option("--points", cal_points, "Log-grid points on [0.01, 0.3]");
  cal_cmd->add_option("--policy", policy, "first_arrival|global_max");

  std::string shape;
  double intensity = 0.0, tau = 0.0, window = 0.0, duty = 1.0 / 50, gain = 50.0;
  auto* check_cmd = app.add_subcommand("check-pulse", "Print the decoupling-condition report of a pulse");
  check_cmd->add_option("--shape", shape, "rect|sine|bb")->required();
  check_cmd->add_option("--I", intensity, "Intensity")->required();
  check_cmd->add_option("--tau", tau, "Control interval")->required();
  check_cmd->add_option("--window", window, "Integration window (default tau)");
  check_cmd->add_option("--duty", duty, "Bang-bang duty fraction");
  check_cmd->add_option("--gain", gain, "Bang-bang gain");

  std::string input;
  auto* peaks_cmd = app.add_subcommand("peaks", "Local maxima of a sweep CSV");
  peaks_cmd->add_option("--in", input, "Sweep CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) {
      const auto s = preset(scenario, scenario_options(n, config, policy));
      print_record(run(s, out, {threads}));
    } else if (*sweep_cmd) {
      auto s = preset(scenario, scenario_options(n, config, policy));
      if (s.sweeps.empty()) throw ConfigError("scenario '" + scenario + "' has no sweep");
      s.variants.clear();
      print_record(run(s, out, {threads}));
    } else if (*cal_cmd) {
      CalibrationOptions o;
      o.points = cal_points;
      o.policy = calibration_policy_from_string(policy);
      Scenario s;
      s.name = ScenarioName::Custom;
      s.calibrations.push_back(calibrate_j0(cal_n, cal_t, o));
      const auto& c = s.calibrations.back();
      s.metadata = {{"j0", c.j0}, {"policy", to_string(c.policy)}};
      print_record(run(s, out, {1}));
      std::cout << "j0 = " << format_double(c.j0) << "  F(T) = " << format_double(c.fidelity) << "\n"
                << "global max j0 = " << format_double(c.global_max_j0)
                << "  F(T) = " << format_double(c.global_max_fidelity) << "\n";
    } else if (*check_cmd) {
      const auto p = pulse_for(shape, intensity, tau, duty, gain);
      const auto r = condition_residual(p, window > 0.0 ? window : p.interval());
      Json j{{"shape", to_string(p.kind())},
             {"intensity", p.intensity()},
             {"tau", p.interval()},
             {"window", r.window},
             {"residual_re", r.residual.real()},
             {"residual_im", r.residual.imag()},
             {"residual_abs", std::abs(r.residual)},
             {"tolerance", r.tolerance},
             {"satisfied", r.satisfied},
             {"nearest_family_member", r.nearest_family_member},
             {"quadrature_error", r.quadrature_error}};
      if (p.kind() == PulseKind::Rectangular) {
        const auto rc = rect_condition(p.intensity(), p.interval());
        j["rect_condition"] = {{"satisfied", rc.satisfied}, {"m", rc.m}};
      }
      if (p.kind() == PulseKind::BangBang) j["kick_area"] = p.kick_area();
      std::cout << j.dump(2) << "\n";
    } else if (*peaks_cmd) {
      const auto data = read_sweep_csv(input);
      std::cout << data.param << ",fidelity\n";
      for (const auto& p : find_peaks(data.value, data.fidelity)) {
        std::cout << format_double(p.value) << "," << format_double(p.fidelity) << "\n";
      }
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ContractViolation& e) {
    std::cerr << "contract violation: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const IoError& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "i/o error: " << e.what() << "\n";
    return kExitIo;
  }
  return 0;
}
