#pragma once

// Scenario presets for the figure reproductions, parameter sweeps, J0
// calibration, peak detection and CSV / JSON persistence.

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "aest/engine.hpp"
#include "json.hpp"

namespace aest {

using Json = nlohmann::json;

enum class ScenarioName { Fig1a, Fig1b, Fig2, Fig3, BoseBaseline, Custom };

std::string to_string(ScenarioName name);
ScenarioName scenario_from_string(const std::string& name);

enum class SweepParameter { Tau, Intensity, J0, ChainLength };
enum class Reduction { FinalFidelity, MaxFidelity };

std::string to_string(SweepParameter p);
std::string to_string(Reduction r);

struct SweepSpec {
  SweepParameter parameter = SweepParameter::Tau;
  double from = 0.0;
  double to = 1.0;
  int points = 2;
  Reduction reduction = Reduction::FinalFidelity;

  void validate() const;
  /// Uniform grid from..to inclusive, endpoints exact.
  std::vector<double> values() const;
};

/// `base` with the swept parameter set to `value`. Chain lengths are rounded
/// to the nearest integer.
EvolutionSpec apply_sweep_value(const EvolutionSpec& base, SweepParameter p, double value);

struct Variant {
  std::string label;
  EvolutionSpec spec;
};

struct SweepPlan {
  std::string label;
  EvolutionSpec base;
  SweepSpec sweep;
};

enum class CalibrationPolicy { FirstArrival, GlobalMax };

std::string to_string(CalibrationPolicy p);
CalibrationPolicy calibration_policy_from_string(const std::string& name);

struct CalibrationOptions {
  CalibrationPolicy policy = CalibrationPolicy::FirstArrival;
  int points = 400;  // log grid on [lo, hi]
  double lo = 0.01;
  double hi = 0.3;
  double arrival_threshold = 0.95;
};

struct Calibration {
  int n = 0;
  double total_time = 0.0;
  CalibrationPolicy policy = CalibrationPolicy::FirstArrival;
  double j0 = 0.0;
  double fidelity = 0.0;  // pulse-free F(T) under H_WC(j0)
  double global_max_j0 = 0.0;
  double global_max_fidelity = 0.0;
  std::vector<double> grid;
  std::vector<double> grid_fidelity;
};

/// Thrown when no calibration grid point reaches F = 0.5. Carries the sweep.
class CalibrationError : public NumericError {
 public:
  CalibrationError(const std::string& what, Calibration sweep)
      : NumericError(what), sweep_(std::move(sweep)) {}
  const Calibration& sweep() const { return sweep_; }

 private:
  Calibration sweep_;
};

/// Pulse-free F(T) at the far end of an H_WC(j0) chain, exact.
double weak_coupling_fidelity(int n, double j0, double T);

/// Chooses J0 for the weak-end generator by a pulse-free log-grid sweep of
/// F(T) under H_WC alone. FirstArrival takes the best point of the lowest-j0
/// lobe whose fidelity reaches `arrival_threshold`; GlobalMax takes the best
/// point overall. Both refine by golden section between the neighbouring
/// grid points. Requires n >= 4.
Calibration calibrate_j0(int n, double T, const CalibrationOptions& options = {});

struct Scenario {
  ScenarioName name = ScenarioName::Custom;
  std::vector<Variant> variants;
  std::vector<SweepPlan> sweeps;
  std::vector<Calibration> calibrations;
  Json metadata = Json::object();
};

struct ScenarioOptions {
  std::optional<int> n;
  /// JSON document with EvolutionSpec field names; fields present override
  /// every variant of a preset. Custom scenarios need a complete document.
  std::optional<Json> config;
  CalibrationOptions calibration;
};

/// Builds a named preset, applies overrides and checks every variant's pulse
/// against its decoupling condition (ConfigError when one fails).
Scenario preset(ScenarioName name, const ScenarioOptions& options = {});
Scenario preset(const std::string& name, const ScenarioOptions& options = {});

/// Throws ConfigError unless the pulse meets its family condition:
/// rect_condition for Rectangular, |condition_residual| <= 1e-5 tau for Sine,
/// kick area pi for BangBang.
void check_preset_pulse(const PulseShape& p);

Json to_json(const CouplingProfile& c);
Json to_json(const PulseShape& p);
Json to_json(const EvolutionSpec& s);
Json to_json(const SweepSpec& s);
CouplingProfile coupling_from_json(const Json& j);
PulseShape pulse_from_json(const Json& j);
SweepSpec sweep_from_json(const Json& j);
/// Overwrites the fields present in `j`.
void apply_overrides(EvolutionSpec& spec, const Json& j);
/// Requires n, channel, total_time, and pulse (with leo_generator unless none).
EvolutionSpec spec_from_json(const Json& j);

Json read_json_file(const std::filesystem::path& path);

/// Number of Strang steps of a spec.
long long total_steps(const EvolutionSpec& spec);
/// Stride giving roughly `rows` samples.
int auto_sample_stride(const EvolutionSpec& spec, int rows = 1000);

struct RunRecord {
  std::string id;
  std::string scenario;
  Json parameters;
  std::string code_version;
  double wall_time = 0.0;
  std::vector<std::string> outputs;
};

struct RunOptions {
  int threads = 0;  // 0: hardware concurrency
};

/// Executes every variant and sweep of the scenario on a worker pool and
/// writes `<label>.csv` plus `<label>.json` for each, calibration sweeps and
/// `run_record.json`. CSV payloads are deterministic.
RunRecord run(const Scenario& scenario, const std::filesystem::path& output_dir,
              const RunOptions& options = {});

/// Reduction of one sweep point.
double sweep_point(const EvolutionSpec& base, const SweepSpec& sweep, double value);

/// All points of a sweep, in grid order.
std::vector<double> run_sweep(const SweepPlan& plan, int threads = 0);

std::string format_double(double v);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& t);
void write_sweep_csv(const std::filesystem::path& path, const std::string& param,
                     const std::vector<double>& values, const std::vector<double>& fidelity);

struct SweepData {
  std::string param;
  std::vector<double> value;
  std::vector<double> fidelity;
};

SweepData read_sweep_csv(const std::filesystem::path& path);

struct Peak {
  std::size_t index = 0;
  double value = 0.0;     // refined parameter value
  double fidelity = 0.0;  // refined peak height
};

/// Local maxima by 3-point comparison. A plateau counts once, at its leftmost
/// point, and is not refined; isolated maxima are refined by the parabola
/// through the three points.
std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& f);

/// Calls fn(i) for i in [0, count) on `threads` workers. The first exception
/// is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace aest
