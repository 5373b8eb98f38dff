#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numbers>
#include <random>

#include "lopsim/bounds.hpp"
#include "lopsim/postselect.hpp"
#include "test_util.hpp"

using namespace lopsim;
using Catch::Approx;

namespace {
constexpr double pi = std::numbers::pi;
}

TEST_CASE("pattern validation") {
  REQUIRE_THROWS_AS(PostselectionPattern({0, 0}, {1, 0}), std::invalid_argument);
  REQUIRE_THROWS_AS(PostselectionPattern({0}, {-1}), std::invalid_argument);
  REQUIRE_THROWS_AS(PostselectionPattern({0, 1}, {1}), std::invalid_argument);
  REQUIRE_NOTHROW(PostselectionPattern({}, {}));
}

TEST_CASE("two photons bunch behind a 50/50 splitter") {
  const StateVector mixed = apply_mode_unitary(single_photon_state(2, {0, 1}), beam_splitter({0, 1, pi / 4}, 2));
  const PostselectionOutcome out = postselect(mixed, PostselectionPattern({1}, {0}));
  REQUIRE(out.probability == Approx(0.5).margin(1e-12));
  REQUIRE(out.conditional_state.has_value());
  REQUIRE(out.conditional_state->n_modes() == 1);
  REQUIRE(fidelity_up_to_phase(*out.conditional_state, basis_state(OccupationVector({2}))) ==
          Approx(1.0).margin(1e-12));
}

TEST_CASE("empty pattern is a no-op") {
  std::mt19937_64 rng(8);
  const StateVector psi = lopsim_test::random_state(SectorBasis(3, 2), rng);
  const PostselectionOutcome out = postselect(psi, PostselectionPattern({}, {}));
  REQUIRE(out.probability == Approx(1.0).margin(1e-12));
  REQUIRE(lopsim_test::max_abs_diff(out.conditional_state->amplitudes(), psi.amplitudes()) < 1e-12);
}

TEST_CASE("product basis states condition exactly") {
  const PostselectionOutcome out = postselect(single_photon_state(2, {0, 1}), PostselectionPattern({1}, {1}));
  REQUIRE(out.probability == Approx(1.0).margin(1e-12));
  REQUIRE(out.conditional_state->amplitude(
              out.conditional_state->basis().index_of(OccupationVector({1}))) == Complex(1.0, 0.0));
}

TEST_CASE("impossible or degenerate patterns are rejected") {
  const StateVector psi = single_photon_state(2, {0});
  REQUIRE_THROWS_AS(postselect(psi, PostselectionPattern({1}, {2})), std::invalid_argument);
  REQUIRE_THROWS_AS(postselect(psi, PostselectionPattern({0, 1}, {1, 0})), std::invalid_argument);
  REQUIRE_THROWS_AS(postselect(psi, PostselectionPattern({5}, {0})), std::out_of_range);
}

TEST_CASE("zero-probability outcomes carry no conditional state") {
  const PostselectionOutcome out = postselect(single_photon_state(2, {0}), PostselectionPattern({1}, {1}));
  REQUIRE(out.probability == 0.0);
  REQUIRE_FALSE(out.conditional_state.has_value());
}

TEST_CASE("outcome probabilities over a measured pair are complete") {
  std::mt19937_64 rng(21);
  const StateVector psi = lopsim_test::random_state(SectorBasis(4, 3), rng);
  double total = 0.0;
  for (int c1 = 0; c1 <= 3; ++c1) {
    for (int c2 = 0; c1 + c2 <= 3; ++c2) {
      total += postselect(psi, PostselectionPattern({1, 3}, {c1, c2})).probability;
    }
  }
  REQUIRE(total == Approx(1.0).margin(1e-10));
}

TEST_CASE("postselection commutes with deferral") {
  std::mt19937_64 rng(22);
  const StateVector psi = lopsim_test::random_state(SectorBasis(4, 3), rng);

  const PostselectionOutcome joint = postselect(psi, PostselectionPattern({1, 3}, {1, 0}));
  const PostselectionOutcome first = postselect(psi, PostselectionPattern({1}, {1}));
  REQUIRE(first.conditional_state.has_value());
  // After measuring mode 1, the remaining modes (0,2,3) re-index to (0,1,2).
  const PostselectionOutcome second = postselect(*first.conditional_state, PostselectionPattern({2}, {0}));

  REQUIRE(joint.probability == Approx(first.probability * second.probability).margin(1e-12));
  REQUIRE(lopsim_test::max_abs_diff(joint.conditional_state->amplitudes(),
                                    second.conditional_state->amplitudes()) < 1e-10);
}

TEST_CASE("marginal count distributions") {
  const std::vector<double> det = marginal_count_distribution(basis_state(OccupationVector({2, 0})), 0);
  REQUIRE(det.size() == 3);
  REQUIRE(det[0] == 0.0);
  REQUIRE(det[1] == 0.0);
  REQUIRE(det[2] == Approx(1.0).margin(1e-15));

  const StateVector split = apply_mode_unitary(single_photon_state(2, {0}), beam_splitter({0, 1, pi / 4}, 2));
  const std::vector<double> half = marginal_count_distribution(split, 0);
  REQUIRE(half[0] == Approx(0.5).margin(1e-12));
  REQUIRE(half[1] == Approx(0.5).margin(1e-12));

  // Equal superposition of |110>, |101>, |011>: mode 0 holds one photon with
  // probability 2/3.
  SectorBasis basis(3, 2);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(6);
  const double r = 1.0 / std::sqrt(3.0);
  amps(basis.index_of(OccupationVector({1, 1, 0}))) = r;
  amps(basis.index_of(OccupationVector({1, 0, 1}))) = r;
  amps(basis.index_of(OccupationVector({0, 1, 1}))) = r;
  const std::vector<double> thirds = marginal_count_distribution(StateVector(basis, amps), 0);
  REQUIRE(thirds[0] == Approx(1.0 / 3.0).margin(1e-12));
  REQUIRE(thirds[1] == Approx(2.0 / 3.0).margin(1e-12));
  REQUIRE(thirds[2] == 0.0);

  REQUIRE_THROWS_AS(marginal_count_distribution(split, 2), std::out_of_range);
}

TEST_CASE("marginal expectation matches the photon-number expectation") {
  std::mt19937_64 rng(23);
  for (int trial = 0; trial < 10; ++trial) {
    const StateVector psi = lopsim_test::random_state(SectorBasis(3, 3), rng);
    for (int m = 0; m < 3; ++m) {
      const std::vector<double> dist = marginal_count_distribution(psi, m);
      double mean = 0.0;
      for (std::size_t c = 0; c < dist.size(); ++c) mean += static_cast<double>(c) * dist[c];
      REQUIRE(mean == Approx(expected_photon_number(psi, LogicalMode::physical(3, m))).margin(1e-10));
    }
  }
}

TEST_CASE("completeness over every required count of one mode") {
  std::mt19937_64 rng(24);
  const StateVector psi = lopsim_test::random_state(SectorBasis(3, 2), rng);
  double total = 0.0;
  for (int c = 0; c <= 2; ++c) total += postselect(psi, PostselectionPattern({2}, {c})).probability;
  REQUIRE(total == Approx(1.0).margin(1e-10));
}
