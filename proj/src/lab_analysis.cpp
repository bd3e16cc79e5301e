#include <cmath>
#include <fstream>
#include <sstream>

#include "aest/lab.hpp"

namespace aest {

namespace {

double parse_double(const std::string& field, const std::string& where) {
  try {
    std::size_t used = 0;
    const double v = std::stod(field, &used);
    if (used != field.size()) throw std::invalid_argument(field);
    return v;
  } catch (const std::exception&) {
    throw ConfigError(where + ": not a number '" + field + "'");
  }
}

// Maximum of f on [lo, hi] by golden section.
template <class F>
std::pair<double, double> golden_max(F&& f, double lo, double hi) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int iter = 0; iter < 200 && hi - lo > 1e-13 * std::max(1.0, std::abs(hi)); ++iter) {
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
  return f1 >= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

}  // namespace

SweepData read_sweep_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ConfigError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "param,value,fidelity_at_T") {
    throw ConfigError(path.string() + ": expected header 'param,value,fidelity_at_T'");
  }
  SweepData data;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string param, value, fidelity, extra;
    if (!std::getline(ss, param, ',') || !std::getline(ss, value, ',') || !std::getline(ss, fidelity, ',') ||
        std::getline(ss, extra, ',')) {
      throw ConfigError(path.string() + ": row " + std::to_string(row) + " needs 3 fields");
    }
    if (data.param.empty()) data.param = param;
    const std::string where = path.string() + ":" + std::to_string(row);
    data.value.push_back(parse_double(value, where));
    data.fidelity.push_back(parse_double(fidelity, where));
  }
  return data;
}

std::vector<Peak> find_peaks(const std::vector<double>& x, const std::vector<double>& f) {
  if (x.size() != f.size()) throw ContractViolation("find_peaks: column length mismatch");
  std::vector<Peak> peaks;
  const std::size_t n = f.size();
  if (n < 3) return peaks;
  std::size_t i = 1;
  while (i + 1 < n) {
    if (!(f[i] > f[i - 1])) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && f[j + 1] == f[i]) ++j;
    if (j + 1 < n && f[j + 1] < f[i]) {
      Peak p{i, x[i], f[i]};
      if (j == i) {
        const double x0 = x[i - 1], x1 = x[i], x2 = x[i + 1];
        const double f0 = f[i - 1], f1 = f[i], f2 = f[i + 1];
        const double den = (x1 - x0) * (f1 - f2) - (x1 - x2) * (f1 - f0);
        if (den != 0.0) {
          const double num = (x1 - x0) * (x1 - x0) * (f1 - f2) - (x1 - x2) * (x1 - x2) * (f1 - f0);
          const double xv = x1 - 0.5 * num / den;
          if (xv > x0 && xv < x2) {
            const double l0 = (xv - x1) * (xv - x2) / ((x0 - x1) * (x0 - x2));
            const double l1 = (xv - x0) * (xv - x2) / ((x1 - x0) * (x1 - x2));
            const double l2 = (xv - x0) * (xv - x1) / ((x2 - x0) * (x2 - x1));
            p.value = xv;
            p.fidelity = f0 * l0 + f1 * l1 + f2 * l2;
          }
        }
      }
      peaks.push_back(p);
    }
    i = j + 1;
  }
  return peaks;
}

double weak_coupling_fidelity(int n, double j0, double T) {
  const auto s = spectral(chain_hamiltonian(CouplingProfile::weak_ends(j0), n));
  Complex sum{0.0, 0.0};
  for (int k = 0; k < n; ++k) {
    sum += s.eigenvectors(n - 1, k) * s.eigenvectors(0, k) * std::polar(1.0, -s.eigenvalues[k] * T);
  }
  return std::abs(sum);
}

Calibration calibrate_j0(int n, double T, const CalibrationOptions& options) {
  if (n < 4) throw ConfigError("calibrate_j0: n must be >= 4");
  if (!(T > 0.0) || !std::isfinite(T)) throw ConfigError("calibrate_j0: T must be positive");
  if (options.points < 60) throw ConfigError("calibrate_j0: need at least 60 grid points");
  if (!(options.lo > 0.0 && options.lo < options.hi && options.hi < 1.0)) {
    throw ConfigError("calibrate_j0: need 0 < lo < hi < 1");
  }

  Calibration c;
  c.n = n;
  c.total_time = T;
  c.policy = options.policy;
  const double log_lo = std::log(options.lo), log_hi = std::log(options.hi);
  const auto points = static_cast<std::size_t>(options.points);
  for (std::size_t i = 0; i < points; ++i) {
    const double u = static_cast<double>(i) / static_cast<double>(points - 1);
    const double j0 = i + 1 == points ? options.hi : std::exp(log_lo + u * (log_hi - log_lo));
    c.grid.push_back(j0);
    c.grid_fidelity.push_back(weak_coupling_fidelity(n, j0, T));
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < points; ++i) {
    if (c.grid_fidelity[i] > c.grid_fidelity[best]) best = i;
  }
  if (c.grid_fidelity[best] < 0.5) {
    std::ostringstream msg;
    msg << "calibrate_j0: no j0 in [" << options.lo << ", " << options.hi << "] reaches F = 0.5 at T = " << T
        << " for n = " << n << " (best " << c.grid_fidelity[best] << ")";
    throw CalibrationError(msg.str(), c);
  }

  auto f = [&](double log_j0) { return weak_coupling_fidelity(n, std::exp(log_j0), T); };
  auto refine = [&](std::size_t i) {
    const double lo = std::log(c.grid[i == 0 ? 0 : i - 1]);
    const double hi = std::log(c.grid[std::min(i + 1, points - 1)]);
    auto [x, v] = golden_max(f, lo, hi);
    if (v < c.grid_fidelity[i]) return std::pair{c.grid[i], c.grid_fidelity[i]};
    return std::pair{std::exp(x), v};
  };

  const auto global = refine(best);
  c.global_max_j0 = global.first;
  c.global_max_fidelity = global.second;

  std::size_t chosen = best;
  if (options.policy == CalibrationPolicy::FirstArrival) {
    std::size_t i = 0;
    while (i < points && c.grid_fidelity[i] < options.arrival_threshold) ++i;
    if (i < points) {
      chosen = i;
      for (; i < points && c.grid_fidelity[i] >= options.arrival_threshold; ++i) {
        if (c.grid_fidelity[i] > c.grid_fidelity[chosen]) chosen = i;
      }
    }
  }
  const auto pick = chosen == best ? global : refine(chosen);
  c.j0 = pick.first;
  c.fidelity = pick.second;
  return c;
}

}  // namespace aest
