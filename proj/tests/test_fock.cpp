#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "lopsim/fock.hpp"
#include "test_util.hpp"

using namespace lopsim;
using Catch::Approx;

TEST_CASE("enumerate_basis produces the canonical order") {
  const SectorBasis b22 = enumerate_basis(2, 2);
  REQUIRE(b22.size() == 3);
  REQUIRE(b22.occupation_at(0).counts() == std::vector<int>{2, 0});
  REQUIRE(b22.occupation_at(1).counts() == std::vector<int>{1, 1});
  REQUIRE(b22.occupation_at(2).counts() == std::vector<int>{0, 2});

  const SectorBasis b10 = enumerate_basis(1, 0);
  REQUIRE(b10.size() == 1);
  REQUIRE(b10.occupation_at(0).counts() == std::vector<int>{0});

  const SectorBasis b32 = enumerate_basis(3, 2);
  REQUIRE(b32.size() == 6);
  REQUIRE(b32.occupation_at(0).counts() == std::vector<int>{2, 0, 0});
  REQUIRE(b32.occupation_at(1).counts() == std::vector<int>{1, 1, 0});
  REQUIRE(b32.occupation_at(2).counts() == std::vector<int>{1, 0, 1});
  REQUIRE(b32.occupation_at(3).counts() == std::vector<int>{0, 2, 0});
  REQUIRE(b32.occupation_at(4).counts() == std::vector<int>{0, 1, 1});
  REQUIRE(b32.occupation_at(5).counts() == std::vector<int>{0, 0, 2});

  REQUIRE_THROWS_AS(enumerate_basis(0, 2), std::invalid_argument);
  REQUIRE_THROWS_AS(enumerate_basis(2, -1), std::invalid_argument);
}

TEST_CASE("basis indexing is a bijection and sector-closed") {
  for (int n = 1; n <= 6; ++n) {
    for (int k = 0; k <= 4; ++k) {
      const SectorBasis basis = enumerate_basis(n, k);
      REQUIRE(basis.size() == lopsim::detail::binomial(n + k - 1, k));
      for (std::size_t i = 0; i < basis.size(); ++i) {
        REQUIRE(basis.occupation_at(i).total() == k);
        REQUIRE(basis.index_of(basis.occupation_at(i)) == i);
      }
    }
  }
  const SectorBasis basis = enumerate_basis(2, 1);
  REQUIRE_THROWS_AS(basis.index_of(OccupationVector({2, 0})), std::invalid_argument);
}

TEST_CASE("occupation vectors validate their counts") {
  REQUIRE_THROWS_AS(OccupationVector({1, -1}), std::invalid_argument);
  const OccupationVector occ({0, 3, 1});
  REQUIRE(occ.total() == 4);
  REQUIRE(occ.count(1) == 3);
  REQUIRE(occ.to_string() == "(0,3,1)");
}

TEST_CASE("single photon preparations") {
  const StateVector two = single_photon_state(2, {0, 1});
  REQUIRE(two.total_photons() == 2);
  REQUIRE(two.amplitude(two.basis().index_of(OccupationVector({1, 1}))) == Complex(1.0, 0.0));

  const StateVector three = single_photon_state(3, {0, 1});
  REQUIRE(three.amplitude(three.basis().index_of(OccupationVector({1, 1, 0}))) == Complex(1.0, 0.0));

  const StateVector vac = single_photon_state(1, {});
  REQUIRE(vac.total_photons() == 0);
  REQUIRE(vac.amplitude(0) == Complex(1.0, 0.0));

  REQUIRE_THROWS_AS(single_photon_state(2, {0, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(single_photon_state(2, {2}), std::out_of_range);
}

TEST_CASE("inner product conjugates the left argument") {
  const StateVector x = single_photon_state(2, {0, 1});
  REQUIRE(inner_product(x, x) == Complex(1.0, 0.0));

  const StateVector twenty = basis_state(OccupationVector({2, 0}));
  REQUIRE(inner_product(twenty, x) == Complex(0.0, 0.0));

  std::mt19937_64 rng(71);
  const SectorBasis basis(3, 2);
  for (int trial = 0; trial < 25; ++trial) {
    const StateVector a = lopsim_test::random_state(basis, rng);
    const StateVector b = lopsim_test::random_state(basis, rng);
    const Complex ab = inner_product(a, b);
    const Complex ba = inner_product(b, a);
    REQUIRE(std::abs(ab - std::conj(ba)) < 1e-12);
  }

  const StateVector other = single_photon_state(3, {0});
  REQUIRE_THROWS_AS(inner_product(x, other), std::invalid_argument);
}

TEST_CASE("norm of the post-splitter two-photon amplitudes is one") {
  // alpha = cos(pi/8), beta = sin(pi/8); amplitudes (-sqrt(2) a b, a^2 - b^2, sqrt(2) a b).
  const double a = std::cos(std::numbers::pi / 8);
  const double b = std::sin(std::numbers::pi / 8);
  SectorBasis basis(2, 2);
  Eigen::VectorXcd amps(3);
  amps << -std::sqrt(2.0) * a * b, a * a - b * b, std::sqrt(2.0) * a * b;
  const StateVector state(basis, amps);
  REQUIRE(inner_product(state, state).real() == Approx(1.0).margin(1e-12));
  REQUIRE(inner_product(state, state).imag() == 0.0);
}

TEST_CASE("fidelity ignores a global phase only") {
  const StateVector twenty = basis_state(OccupationVector({2, 0}));
  const StateVector eleven = single_photon_state(2, {0, 1});

  Eigen::VectorXcd rotated = twenty.amplitudes() * std::polar(1.0, 0.987);
  const StateVector phase(twenty.basis(), rotated);
  REQUIRE(fidelity_up_to_phase(twenty, phase) == Approx(1.0).margin(1e-12));
  REQUIRE(fidelity_up_to_phase(twenty, eleven) == Approx(0.0).margin(1e-12));

  Eigen::VectorXcd big = twenty.amplitudes() * 2.0;
  REQUIRE_THROWS_AS(fidelity_up_to_phase(twenty, StateVector(twenty.basis(), big)), std::invalid_argument);
}

TEST_CASE("logical modes require unit norm") {
  Eigen::VectorXcd good(2);
  good << 1.0 / std::sqrt(2.0), Complex(0.0, 1.0) / std::sqrt(2.0);
  REQUIRE_NOTHROW(LogicalMode(good));

  Eigen::VectorXcd bad(2);
  bad << 1.0, 1.0;
  REQUIRE_THROWS_AS(LogicalMode(bad), std::invalid_argument);

  const LogicalMode mode = LogicalMode::physical(3, 1);
  REQUIRE(mode.coeffs()(1) == Complex(1.0, 0.0));
  REQUIRE(mode.coeffs()(0) == Complex(0.0, 0.0));
}
