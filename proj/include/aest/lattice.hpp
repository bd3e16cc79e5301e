#pragma once

// Single-excitation XY chains.
//
// In the one-excitation sector the chain Hamiltonian is a real symmetric
// tridiagonal matrix with zero diagonal. The hopping amplitude between sites
// i and i+1 equals the coupling J_{i,i+1} itself, which puts mirror transfer
// of the engineered chain at t = pi/2. Sites are numbered from 1 in all
// user-facing text and from 0 in code.

#include <span>
#include <string>
#include <vector>

#include "aest/common.hpp"

namespace aest {

enum class CouplingKind { Uniform, Pst, WeakEnds };

std::string to_string(CouplingKind kind);
CouplingKind coupling_kind_from_string(const std::string& name);

struct CouplingProfile {
  CouplingKind kind = CouplingKind::Uniform;
  double j = 1.0;   // base coupling
  double j0 = 0.0;  // end-bond coupling, WeakEnds only

  static CouplingProfile uniform(double j = 1.0) { return {CouplingKind::Uniform, j, 0.0}; }
  static CouplingProfile pst() { return {CouplingKind::Pst, 1.0, 0.0}; }
  static CouplingProfile weak_ends(double j0, double j = 1.0) {
    return {CouplingKind::WeakEnds, j, j0};
  }

  /// Throws ConfigError unless j > 0 and, for WeakEnds, 0 < j0 < j.
  void validate() const;
};

/// Bond strengths J_{1,2} ... J_{n-1,n} for a chain of n sites.
///
/// Uniform gives j everywhere, Pst gives sqrt(i (n - i)) for bond i (1-based)
/// and WeakEnds gives j0 on the first and last bond and j in between.
/// Throws ConfigError for n < 2, or for WeakEnds with n < 3.
std::vector<double> couplings(const CouplingProfile& profile, int n);

/// Tridiagonal single-excitation Hamiltonian.
class HoppingMatrix {
 public:
  /// Builds the n x n matrix with off-diagonal entries `bonds` (n = size + 1).
  explicit HoppingMatrix(std::span<const double> bonds);

  int size() const { return static_cast<int>(matrix_.rows()); }
  const RealMatrix& matrix() const { return matrix_; }
  const std::vector<double>& bonds() const { return bonds_; }

 private:
  std::vector<double> bonds_;
  RealMatrix matrix_;
};

HoppingMatrix hopping_matrix(std::span<const double> bonds);

/// Convenience: hopping_matrix(couplings(profile, n)).
HoppingMatrix chain_hamiltonian(const CouplingProfile& profile, int n);

/// Eigen-decomposition h = U diag(lambda) U^T with ascending eigenvalues and
/// orthonormal real eigenvectors stored column-wise.
struct SpectralDecomposition {
  RealVector eigenvalues;
  RealMatrix eigenvectors;

  int size() const { return static_cast<int>(eigenvalues.size()); }

  /// max |h - U diag(lambda) U^T| over all entries.
  double reconstruction_residual(const RealMatrix& h) const;
  /// max |U^T U - I| over all entries.
  double orthonormality_residual() const;
};

/// Throws ConfigError for n < 2 and NumericError when the eigensolver fails.
SpectralDecomposition spectral(const HoppingMatrix& h);

/// exp(-i h t) v, computed as U diag(exp(-i lambda t)) U^T v.
ComplexVector propagate_exact(const SpectralDecomposition& s, double t, const ComplexVector& v);

/// Dense exp(-i h t).
ComplexMatrix propagator_matrix(const SpectralDecomposition& s, double t);

}  // namespace aest
