#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <thread>

#include "aest/lab.hpp"

#ifndef AEST_VERSION
#define AEST_VERSION "unknown"
#endif

namespace aest {

namespace {

namespace fs = std::filesystem;

[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const ContractViolation& e) {
    throw ContractViolation(context + ": " + e.what());
  } catch (const NumericError& e) {
    throw NumericError(context + ": " + e.what());
  } catch (const IoError& e) {
    throw IoError(context + ": " + e.what());
  }
}

std::string fnv1a_hex(const std::string& s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

void write_text(const fs::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  out.close();
  if (!out) throw IoError("write failed for " + path.string());
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, count);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> stop{false};
  std::exception_ptr first;
  std::mutex guard;
  auto work = [&] {
    while (!stop) {
      const std::size_t i = next++;
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(guard);
        if (!first) first = std::current_exception();
        stop = true;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (first) std::rethrow_exception(first);
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trajectory_csv(const fs::path& path, const Trajectory& t) {
  std::string body = "t,fidelity,leakage,norm_drift\n";
  body.reserve(body.size() + t.times.size() * 96);
  for (std::size_t k = 0; k < t.times.size(); ++k) {
    body += format_double(t.times[k]);
    body += ',';
    body += format_double(t.fidelity[k]);
    body += ',';
    body += format_double(t.leakage[k]);
    body += ',';
    body += format_double(t.norm_drift[k]);
    body += '\n';
  }
  write_text(path, body);
}

void write_sweep_csv(const fs::path& path, const std::string& param, const std::vector<double>& values,
                     const std::vector<double>& fidelity) {
  if (values.size() != fidelity.size()) throw ContractViolation("write_sweep_csv: column length mismatch");
  std::string body = "param,value,fidelity_at_T\n";
  for (std::size_t k = 0; k < values.size(); ++k) {
    body += param + ',' + format_double(values[k]) + ',' + format_double(fidelity[k]) + '\n';
  }
  write_text(path, body);
}

double sweep_point(const EvolutionSpec& base, const SweepSpec& sweep, double value) {
  EvolutionSpec spec = apply_sweep_value(base, sweep.parameter, value);
  if (sweep.reduction == Reduction::FinalFidelity) {
    spec.sample_stride = std::numeric_limits<int>::max();
    return evolve(spec).final_fidelity();
  }
  spec.sample_stride = 1;
  const auto traj = evolve(spec);
  return *std::max_element(traj.fidelity.begin(), traj.fidelity.end());
}

std::vector<double> run_sweep(const SweepPlan& plan, int threads) {
  const auto values = plan.sweep.values();
  std::vector<double> out(values.size());
  parallel_for(values.size(), threads, [&](std::size_t i) {
    try {
      out[i] = sweep_point(plan.base, plan.sweep, values[i]);
    } catch (const Error&) {
      rethrow_with_context(plan.label + " at " + to_string(plan.sweep.parameter) + " = " +
                           format_double(values[i]));
    }
  });
  return out;
}

RunRecord run(const Scenario& scenario, const fs::path& output_dir, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  if (ec || !fs::is_directory(output_dir)) {
    throw IoError("cannot create output directory " + output_dir.string() + ": " + ec.message());
  }

  RunRecord record;
  record.scenario = to_string(scenario.name);
  record.code_version = AEST_VERSION;
  Json variants = Json::array();
  for (const auto& v : scenario.variants) variants.push_back({{"label", v.label}, {"spec", to_json(v.spec)}});
  Json sweeps = Json::array();
  for (const auto& p : scenario.sweeps) {
    sweeps.push_back({{"label", p.label}, {"base", to_json(p.base)}, {"sweep", to_json(p.sweep)}});
  }
  record.parameters = {{"scenario", record.scenario},
                       {"variants", variants},
                       {"sweeps", sweeps},
                       {"metadata", scenario.metadata}};
  record.id = fnv1a_hex(record.parameters.dump());

  // One job per variant and one per sweep point.
  struct SweepJob {
    std::size_t plan;
    std::size_t point;
  };
  std::vector<std::vector<double>> sweep_values;
  std::vector<std::vector<double>> sweep_results;
  std::vector<SweepJob> sweep_jobs;
  for (std::size_t p = 0; p < scenario.sweeps.size(); ++p) {
    sweep_values.push_back(scenario.sweeps[p].sweep.values());
    sweep_results.emplace_back(sweep_values.back().size());
    for (std::size_t i = 0; i < sweep_values.back().size(); ++i) sweep_jobs.push_back({p, i});
  }
  std::vector<Trajectory> trajectories(scenario.variants.size());
  std::vector<double> variant_seconds(scenario.variants.size());
  const std::size_t jobs = scenario.variants.size() + sweep_jobs.size();
  parallel_for(jobs, options.threads, [&](std::size_t j) {
    if (j < scenario.variants.size()) {
      const auto& v = scenario.variants[j];
      try {
        const auto t0 = std::chrono::steady_clock::now();
        trajectories[j] = evolve(v.spec);
        variant_seconds[j] = seconds_since(t0);
      } catch (const Error&) {
        rethrow_with_context(v.label);
      }
      return;
    }
    const auto job = sweep_jobs[j - scenario.variants.size()];
    const auto& plan = scenario.sweeps[job.plan];
    const double value = sweep_values[job.plan][job.point];
    try {
      sweep_results[job.plan][job.point] = sweep_point(plan.base, plan.sweep, value);
    } catch (const Error&) {
      rethrow_with_context(plan.label + " at " + to_string(plan.sweep.parameter) + " = " + format_double(value));
    }
  });

  const std::string created = utc_now();
  auto sidecar = [&](const fs::path& csv, Json body) {
    body["run_id"] = record.id;
    body["scenario"] = record.scenario;
    body["code_version"] = record.code_version;
    body["created_at"] = created;
    fs::path json_path = csv;
    json_path.replace_extension(".json");
    write_text(json_path, body.dump(2) + "\n");
    record.outputs.push_back(csv.string());
    record.outputs.push_back(json_path.string());
  };

  for (std::size_t k = 0; k < scenario.variants.size(); ++k) {
    const auto& v = scenario.variants[k];
    const auto& t = trajectories[k];
    const fs::path csv = output_dir / (v.label + ".csv");
    write_trajectory_csv(csv, t);
    sidecar(csv, {{"label", v.label},
                  {"kind", "trajectory"},
                  {"spec", to_json(v.spec)},
                  {"rows", t.times.size()},
                  {"steps", t.steps},
                  {"final_fidelity", t.final_fidelity()},
                  {"max_norm_drift", t.max_norm_drift()},
                  {"wall_time", variant_seconds[k]}});
  }
  for (std::size_t p = 0; p < scenario.sweeps.size(); ++p) {
    const auto& plan = scenario.sweeps[p];
    const fs::path csv = output_dir / (plan.label + ".csv");
    write_sweep_csv(csv, to_string(plan.sweep.parameter), sweep_values[p], sweep_results[p]);
    sidecar(csv, {{"label", plan.label},
                  {"kind", "sweep"},
                  {"spec", to_json(plan.base)},
                  {"sweep", to_json(plan.sweep)},
                  {"rows", sweep_values[p].size()}});
  }
  for (const auto& c : scenario.calibrations) {
    const std::string label = "calibration_n" + std::to_string(c.n);
    const fs::path csv = output_dir / (label + ".csv");
    write_sweep_csv(csv, "j0", c.grid, c.grid_fidelity);
    sidecar(csv, {{"label", label},
                  {"kind", "calibration"},
                  {"n", c.n},
                  {"total_time", c.total_time},
                  {"policy", to_string(c.policy)},
                  {"j0", c.j0},
                  {"fidelity", c.fidelity},
                  {"global_max_j0", c.global_max_j0},
                  {"global_max_fidelity", c.global_max_fidelity},
                  {"rows", c.grid.size()}});
  }

  record.wall_time = seconds_since(start);
  const Json summary{{"id", record.id},
                     {"scenario", record.scenario},
                     {"parameters", record.parameters},
                     {"code_version", record.code_version},
                     {"wall_time", record.wall_time},
                     {"created_at", created},
                     {"outputs", record.outputs}};
  write_text(output_dir / "run_record.json", summary.dump(2) + "\n");
  return record;
}

}  // namespace aest
