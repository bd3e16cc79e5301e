#include "aest/lattice.hpp"

#include <cmath>
#include <sstream>

namespace aest {

std::string to_string(CouplingKind kind) {
  switch (kind) {
    case CouplingKind::Uniform:
      return "uniform";
    case CouplingKind::Pst:
      return "pst";
    case CouplingKind::WeakEnds:
      return "weak_ends";
  }
  return "unknown";
}

CouplingKind coupling_kind_from_string(const std::string& name) {
  if (name == "uniform") return CouplingKind::Uniform;
  if (name == "pst") return CouplingKind::Pst;
  if (name == "weak_ends" || name == "wc") return CouplingKind::WeakEnds;
  throw ConfigError("unknown coupling profile '" + name + "'");
}

void CouplingProfile::validate() const {
  if (!(j > 0.0) || !std::isfinite(j)) {
    throw ConfigError("coupling profile: j must be positive and finite");
  }
  if (kind == CouplingKind::WeakEnds && !(j0 > 0.0 && j0 < j)) {
    throw ConfigError("coupling profile: weak_ends requires 0 < j0 < j");
  }
}

std::vector<double> couplings(const CouplingProfile& profile, int n) {
  if (n < 2) {
    throw ConfigError("couplings: chain length must be >= 2, got " + std::to_string(n));
  }
  profile.validate();
  std::vector<double> bonds(static_cast<std::size_t>(n - 1), profile.j);
  switch (profile.kind) {
    case CouplingKind::Uniform:
      break;
    case CouplingKind::Pst:
      for (int i = 1; i < n; ++i) {
        bonds[static_cast<std::size_t>(i - 1)] = std::sqrt(static_cast<double>(i) * (n - i));
      }
      break;
    case CouplingKind::WeakEnds:
      if (n < 3) {
        throw ConfigError("couplings: weak_ends profile needs at least 3 sites");
      }
      bonds.front() = profile.j0;
      bonds.back() = profile.j0;
      break;
  }
  return bonds;
}

HoppingMatrix::HoppingMatrix(std::span<const double> bonds) : bonds_(bonds.begin(), bonds.end()) {
  if (bonds_.empty()) {
    throw ConfigError("hopping_matrix: need at least one bond");
  }
  const auto n = static_cast<Eigen::Index>(bonds_.size() + 1);
  matrix_ = RealMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const double c = bonds_[static_cast<std::size_t>(i)];
    if (!std::isfinite(c)) {
      throw ConfigError("hopping_matrix: non-finite coupling at bond " + std::to_string(i + 1));
    }
    matrix_(i, i + 1) = c;
    matrix_(i + 1, i) = c;
  }
}

HoppingMatrix hopping_matrix(std::span<const double> bonds) { return HoppingMatrix(bonds); }

HoppingMatrix chain_hamiltonian(const CouplingProfile& profile, int n) {
  const auto bonds = couplings(profile, n);
  return HoppingMatrix(bonds);
}

double SpectralDecomposition::reconstruction_residual(const RealMatrix& h) const {
  const RealMatrix rebuilt = eigenvectors * eigenvalues.asDiagonal() * eigenvectors.transpose();
  return (h - rebuilt).cwiseAbs().maxCoeff();
}

double SpectralDecomposition::orthonormality_residual() const {
  const auto n = eigenvectors.cols();
  return (eigenvectors.transpose() * eigenvectors - RealMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

SpectralDecomposition spectral(const HoppingMatrix& h) {
  if (h.size() < 2) {
    throw ConfigError("spectral: matrix dimension must be >= 2");
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver(h.matrix());
  if (solver.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "spectral: eigensolver did not converge (n=" << h.size()
        << ", max |coupling|=" << h.matrix().cwiseAbs().maxCoeff() << ")";
    throw NumericError(msg.str());
  }
  return {solver.eigenvalues(), solver.eigenvectors()};
}

ComplexVector propagate_exact(const SpectralDecomposition& s, double t, const ComplexVector& v) {
  if (v.size() != s.size()) {
    throw ConfigError("propagate_exact: vector has dimension " + std::to_string(v.size()) +
                      ", expected " + std::to_string(s.size()));
  }
  ComplexVector modes = s.eigenvectors.transpose().cast<Complex>() * v;
  for (Eigen::Index k = 0; k < modes.size(); ++k) {
    modes[k] *= std::polar(1.0, -s.eigenvalues[k] * t);
  }
  return s.eigenvectors.cast<Complex>() * modes;
}

ComplexMatrix propagator_matrix(const SpectralDecomposition& s, double t) {
  ComplexVector phases(s.size());
  for (Eigen::Index k = 0; k < phases.size(); ++k) {
    phases[k] = std::polar(1.0, -s.eigenvalues[k] * t);
  }
  const ComplexMatrix u = s.eigenvectors.cast<Complex>();
  return u * phases.asDiagonal() * u.transpose();
}

}  // namespace aest
