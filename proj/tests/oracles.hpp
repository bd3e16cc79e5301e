#pragma once

// Independent reference computations for the unit tests. Nothing here calls
// into the library's numerical paths.

#include <cmath>
#include <complex>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

namespace oracle {

using Cx = std::complex<double>;

// Cyclic Jacobi eigenvalues of a real symmetric matrix, ascending.
inline std::vector<double> jacobi_eigenvalues(Eigen::MatrixXd a) {
  const auto n = a.rows();
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
      }
    }
  }
  std::vector<double> ev(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) ev[static_cast<std::size_t>(i)] = a(i, i);
  std::sort(ev.begin(), ev.end());
  return ev;
}

// exp(-i h t) by Pade scaling-and-squaring (Eigen unsupported module).
inline Eigen::MatrixXcd dense_exp(const Eigen::MatrixXcd& h, double t) {
  Eigen::MatrixXcd m = Cx(0.0, -t) * h;
  return m.exp();
}

// J0 by its power series in long double, 60 terms.
inline double bessel_j0_series(double x) {
  long double q = -0.25L * static_cast<long double>(x) * x;
  long double term = 1.0L, sum = 1.0L;
  for (int k = 1; k < 60; ++k) {
    term *= q / (static_cast<long double>(k) * k);
    sum += term;
  }
  return static_cast<double>(sum);
}

inline Eigen::VectorXcd random_state(std::mt19937_64& rng, int n) {
  std::normal_distribution<double> g;
  Eigen::VectorXcd v(n);
  for (int i = 0; i < n; ++i) v[i] = Cx(g(rng), g(rng));
  return v / v.norm();
}

inline Eigen::VectorXcd unit(int n, int site_1based) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
  v[site_1based - 1] = 1.0;
  return v;
}

}  // namespace oracle
