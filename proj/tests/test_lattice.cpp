#include "doctest.h"

#include <cmath>
#include <random>

#include "aest/lattice.hpp"
#include "oracles.hpp"

using namespace aest;

TEST_CASE("couplings for the three profiles") {
  const auto pst = couplings(CouplingProfile::pst(), 5);
  REQUIRE(pst.size() == 4);
  CHECK(pst[0] == doctest::Approx(2.0));
  CHECK(pst[1] == doctest::Approx(std::sqrt(6.0)));
  CHECK(pst[2] == doctest::Approx(std::sqrt(6.0)));
  CHECK(pst[3] == doctest::Approx(2.0));

  CHECK(couplings(CouplingProfile::uniform(), 4) == std::vector<double>{1.0, 1.0, 1.0});
  CHECK(couplings(CouplingProfile::weak_ends(0.1), 5) == std::vector<double>{0.1, 1.0, 1.0, 0.1});
}

TEST_CASE("couplings error paths") {
  CHECK_THROWS_AS(couplings(CouplingProfile::uniform(), 1), ConfigError);
  CHECK_THROWS_AS(couplings(CouplingProfile::weak_ends(0.1), 2), ConfigError);
  CHECK_THROWS_AS(couplings(CouplingProfile::weak_ends(1.5), 6), ConfigError);
  CHECK_THROWS_AS(couplings(CouplingProfile::weak_ends(0.0), 6), ConfigError);
  CHECK_THROWS_AS(couplings(CouplingProfile::uniform(-1.0), 6), ConfigError);
}

TEST_CASE("hopping matrix layout") {
  const std::vector<double> one{1.0};
  const auto h = hopping_matrix(one);
  CHECK(h.size() == 2);
  CHECK(h.matrix()(0, 1) == 1.0);
  CHECK(h.matrix()(1, 0) == 1.0);
  CHECK(h.matrix()(0, 0) == 0.0);
  CHECK_THROWS_AS(hopping_matrix(std::vector<double>{}), ConfigError);
  CHECK_THROWS_AS(hopping_matrix(std::vector<double>{1.0, NAN}), ConfigError);
}

TEST_CASE("hopping matrices are tridiagonal, symmetric and zero-diagonal up to n = 64") {
  for (int n = 3; n <= 64; ++n) {
    for (const auto& profile :
         {CouplingProfile::uniform(), CouplingProfile::pst(), CouplingProfile::weak_ends(0.05)}) {
      const auto h = chain_hamiltonian(profile, n);
      const auto& m = h.matrix();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (std::abs(i - j) != 1) {
            REQUIRE(m(i, j) == 0.0);
          } else {
            REQUIRE(m(i, j) == m(j, i));
            REQUIRE(std::isfinite(m(i, j)));
          }
        }
      }
    }
  }
}

TEST_CASE("PST spectra match a Jacobi eigensolver") {
  const auto h3 = chain_hamiltonian(CouplingProfile::pst(), 3);
  const auto jac3 = oracle::jacobi_eigenvalues(h3.matrix());
  CHECK(jac3[0] == doctest::Approx(-2.0).epsilon(1e-12));
  CHECK(std::abs(jac3[1]) < 1e-12);
  CHECK(jac3[2] == doctest::Approx(2.0).epsilon(1e-12));
  const auto s3 = spectral(h3);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(s3.eigenvalues[k] - jac3[static_cast<std::size_t>(k)]) < 1e-12);

  const auto h10 = chain_hamiltonian(CouplingProfile::pst(), 10);
  const auto jac10 = oracle::jacobi_eigenvalues(h10.matrix());
  const auto s10 = spectral(h10);
  for (int k = 0; k < 10; ++k) {
    CHECK(std::abs(jac10[static_cast<std::size_t>(k)] - (-9.0 + 2.0 * k)) < 1e-9);
    CHECK(std::abs(s10.eigenvalues[k] - (-9.0 + 2.0 * k)) < 1e-9);
  }
}

TEST_CASE("PST spectrum is equally spaced for every n <= 64") {
  for (int n = 2; n <= 64; ++n) {
    const auto s = spectral(chain_hamiltonian(CouplingProfile::pst(), n));
    for (int k = 0; k < n; ++k) {
      REQUIRE(std::abs(s.eigenvalues[k] - (-(n - 1) + 2.0 * k)) < 1e-9);
    }
  }
}

TEST_CASE("spectral decomposition of the two-site chain") {
  const auto s = spectral(hopping_matrix(std::vector<double>{1.0}));
  CHECK(s.eigenvalues[0] == doctest::Approx(-1.0));
  CHECK(s.eigenvalues[1] == doctest::Approx(1.0));
  const double r = 1.0 / std::sqrt(2.0);
  // Eigenvectors up to sign: (1, -1)/sqrt2 and (1, 1)/sqrt2.
  CHECK(std::abs(std::abs(s.eigenvectors(0, 0)) - r) < 1e-14);
  CHECK(std::abs(s.eigenvectors(0, 0) + s.eigenvectors(1, 0)) < 1e-14);
  CHECK(std::abs(s.eigenvectors(0, 1) - s.eigenvectors(1, 1)) < 1e-14);
}

TEST_CASE("spectral invariants hold for PST n = 20 and all profiles") {
  const auto h = chain_hamiltonian(CouplingProfile::pst(), 20);
  const auto s = spectral(h);
  CHECK(s.reconstruction_residual(h.matrix()) <= 1e-10);
  CHECK(s.orthonormality_residual() <= 1e-10);
  for (int n : {3, 17, 64}) {
    const auto hw = chain_hamiltonian(CouplingProfile::weak_ends(0.03), n);
    const auto sw = spectral(hw);
    CHECK(sw.reconstruction_residual(hw.matrix()) <= 1e-10);
    CHECK(sw.orthonormality_residual() <= 1e-10);
    for (int k = 1; k < n; ++k) CHECK(sw.eigenvalues[k] >= sw.eigenvalues[k - 1]);
  }
}

TEST_CASE("propagate_exact examples") {
  const auto s2 = spectral(hopping_matrix(std::vector<double>{1.0}));
  const ComplexVector e1 = oracle::unit(2, 1);
  CHECK((propagate_exact(s2, 0.0, e1) - e1).norm() < 1e-15);

  const ComplexVector out = propagate_exact(s2, kPi / 2, e1);
  CHECK(std::abs(out[0]) < 1e-14);
  CHECK(std::abs(out[1] - Complex(0.0, -1.0)) < 1e-14);

  const auto s10 = spectral(chain_hamiltonian(CouplingProfile::pst(), 10));
  const ComplexVector mirrored = propagate_exact(s10, kPi / 2, oracle::unit(10, 1));
  CHECK(std::abs(std::abs(mirrored[9]) - 1.0) < 1e-8);

  CHECK_THROWS_AS(propagate_exact(s10, 1.0, e1), ConfigError);
}

TEST_CASE("propagate_exact agrees with a Pade matrix exponential") {
  const auto h = chain_hamiltonian(CouplingProfile::weak_ends(0.2), 9);
  const auto s = spectral(h);
  std::mt19937_64 rng(11);
  const ComplexVector v = oracle::random_state(rng, 9);
  for (double t : {0.3, 2.7, 41.0}) {
    const ComplexVector expected = oracle::dense_exp(h.matrix().cast<Complex>(), t) * v;
    CHECK((propagate_exact(s, t, v) - expected).norm() < 1e-10);
    CHECK((propagator_matrix(s, t) * v - expected).norm() < 1e-10);
  }
}

TEST_CASE("propagate_exact is unitary and composes") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> time(-20.0, 20.0);
  std::uniform_int_distribution<int> size(2, 64);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = size(rng);
    const auto profile = trial % 3 == 0   ? CouplingProfile::uniform()
                         : trial % 3 == 1 ? CouplingProfile::pst()
                                          : CouplingProfile::weak_ends(0.1);
    if (profile.kind == CouplingKind::WeakEnds && n < 3) continue;
    const auto s = spectral(chain_hamiltonian(profile, n));
    const ComplexVector v = oracle::random_state(rng, n);
    const double t1 = time(rng), t2 = time(rng);
    const ComplexVector a = propagate_exact(s, t1, v);
    REQUIRE(std::abs(a.norm() - 1.0) < 1e-12);
    const ComplexVector ab = propagate_exact(s, t2, a);
    const ComplexVector direct = propagate_exact(s, t1 + t2, v);
    REQUIRE((ab - direct).norm() < 1e-10);
  }
}

TEST_CASE("PST mirrors the sender onto the far end for every n <= 64") {
  for (int n = 2; n <= 64; ++n) {
    const auto s = spectral(chain_hamiltonian(CouplingProfile::pst(), n));
    const ComplexVector out = propagate_exact(s, kPi / 2, oracle::unit(n, 1));
    REQUIRE(std::abs(std::abs(out[n - 1]) - 1.0) < 1e-8);
  }
}
