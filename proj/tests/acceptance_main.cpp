// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one pass/fail line per criterion.  Exits nonzero if any
// criterion fails.

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "lopsim/io.hpp"
#include "lopsim/search.hpp"
#include "test_util.hpp"

using namespace lopsim;

namespace {

int failures = 0;

void report(int criterion, bool pass, const std::string& name, const std::string& detail) {
  std::printf("[%s] %d. %s: %s\n", pass ? "PASS" : "FAIL", criterion, name.c_str(), detail.c_str());
  if (!pass) ++failures;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.3e", v);
  return buf;
}

StateVector cs_target_state() {
  SectorBasis basis(3, 2);
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(6);
  const double r = 1.0 / std::sqrt(3.0);
  amps(basis.index_of(OccupationVector({1, 1, 0}))) = r;
  amps(basis.index_of(OccupationVector({1, 0, 1}))) = r;
  amps(basis.index_of(OccupationVector({0, 1, 1}))) = r;
  return StateVector(std::move(basis), std::move(amps));
}

void criterion_1_theorem1() {
  const Theorem1Report report_data = verify_theorem1(kTheorem1DefaultConfigs, 200, 20260809);
  const bool pass = report_data.trials >= 1000 && report_data.max_observed_expectation <= 1.0 + 1e-9 &&
                    report_data.max_identity_deviation <= 1e-10;
  report(1, pass, "Theorem-1 property suite",
         "trials=" + std::to_string(report_data.trials) +
             " max_expectation-1=" + fmt(report_data.max_observed_expectation - 1.0) +
             " max_closed_form_dev=" + fmt(report_data.max_identity_deviation));
}

void criterion_2_ns_protocol() {
  const ProtocolTrace trace = run_ns_two_photon_protocol();
  const StateVector& snap = trace.steps[1].state;
  Eigen::VectorXcd expected(3);
  expected << -0.5, 1.0 / std::sqrt(2.0), 0.5;
  const double snap_dev = (snap.amplitudes() - expected).cwiseAbs().maxCoeff();
  const double fid = fidelity_up_to_phase(trace.final_state, basis_state(OccupationVector({2, 0})));
  const bool pass = snap_dev <= 1e-10 && std::abs(fid - 1.0) <= 1e-10;
  report(2, pass, "NS two-photon protocol",
         "step-2 snapshot dev=" + fmt(snap_dev) + " |fidelity(|20>)-1|=" + fmt(std::abs(fid - 1.0)));
}

void criterion_3_cs_protocol() {
  const ProtocolTrace trace = run_cs_three_mode_protocol();
  const double fid = fidelity_up_to_phase(trace.final_state, cs_target_state());
  Eigen::VectorXcd coeffs(3);
  const double r = 1.0 / std::sqrt(3.0);
  coeffs << r, r, r;
  const double e = expected_photon_number(trace.final_state, LogicalMode(coeffs));
  const double bound_exact = bound_from_expectation(4.0 / 3.0);
  const double bound_measured = bound_from_expectation(e);
  const bool pass = std::abs(fid - 1.0) <= 1e-10 && std::abs(e - 4.0 / 3.0) <= 1e-10 &&
                    bound_exact == 0.75 && std::abs(bound_measured - 0.75) <= 1e-12;
  report(3, pass, "CS three-mode protocol",
         "|fidelity-1|=" + fmt(std::abs(fid - 1.0)) + " |E-4/3|=" + fmt(std::abs(e - 4.0 / 3.0)) +
             " bound(4/3)=" + (bound_exact == 0.75 ? std::string("3/4 exact") : fmt(bound_exact)));
}

void criterion_4_ns_bound() {
  const ProtocolTrace trace = run_ns_two_photon_protocol();
  const double e = expected_photon_number(trace.final_state, LogicalMode::physical(2, 0));
  const double bound_exact = bound_from_expectation(2.0);
  const double bound_measured = bound_from_expectation(e);
  const bool pass =
      bound_exact == 0.5 && std::abs(e - 2.0) <= 1e-10 && std::abs(bound_measured - 0.5) <= 1e-12;
  report(4, pass, "NS bound arithmetic",
         "E(|20> mode)=" + fmt(e) + " bound(2)=" + (bound_exact == 0.5 ? std::string("1/2 exact") : fmt(bound_exact)));
}

void criterion_5_half_probability_pair() {
  const StateVector mixed =
      apply_mode_unitary(single_photon_state(2, {0, 1}), beam_splitter({0, 1, std::numbers::pi / 4}, 2));
  const PostselectionOutcome out = postselect(mixed, PostselectionPattern({1}, {0}));
  const double fid = out.conditional_state
                         ? fidelity_up_to_phase(*out.conditional_state, basis_state(OccupationVector({2})))
                         : 0.0;
  const bool pass = std::abs(out.probability - 0.5) <= 1e-12 && std::abs(fid - 1.0) <= 1e-12;
  report(5, pass, "50/50 splitter + postselection yields |2> at probability 1/2",
         "|p-1/2|=" + fmt(std::abs(out.probability - 0.5)) + " |fidelity-1|=" + fmt(std::abs(fid - 1.0)));
}

void criterion_6_oracle_equivalence() {
  double max_diff = 0.0;
  for (int n = 1; n <= 4; ++n) {
    for (int k = 1; k <= 4; ++k) {
      for (int trial = 0; trial < 100; ++trial) {
        std::mt19937_64 rng(
            detail::derive_seed(6060, static_cast<std::uint64_t>(((n * 5 + k) * 1000) + trial)));
        const ModeUnitary u = haar_random_unitary(n, rng);
        const StateVector psi = lopsim_test::random_state(SectorBasis(n, k), rng);
        const double diff = (apply_mode_unitary(psi, u).amplitudes() - lift_oracle(psi, u).amplitudes())
                                .cwiseAbs()
                                .maxCoeff();
        if (diff > max_diff) max_diff = diff;
      }
    }
  }
  report(6, max_diff <= 1e-10, "permanent lift vs polynomial-expansion oracle",
         "100 unitaries per (n,k), n,k<=4; max dev=" + fmt(max_diff));
}

// Criteria 7 and 8 share the optimizer runs.
void criteria_7_8_search() {
  SearchConfig ns_config;
  ns_config.n_ancilla_modes = 2;
  ns_config.n_ancilla_photons = 1;
  ns_config.restarts = 20;
  ns_config.max_iterations = 4000;
  ns_config.seed = 7;

  SearchConfig cs_config;
  cs_config.n_ancilla_modes = 2;
  cs_config.n_ancilla_photons = 2;
  cs_config.restarts = 12;
  cs_config.max_iterations = 5000;
  cs_config.seed = 11;

  bool ns_pass = false;
  bool bounds_respected = true;
  std::string ns_detail = "optimizer raised an error";
  std::string cs_detail;
  double ns_probability = 0.0;
  double cs_probability = 0.0;
  try {
    const SearchResult ns_result = optimize_gate(ns_spec(), ns_config);
    ns_probability = ns_result.best_success_probability;

    // Round-trip the circuit through its serialized form before re-checking.
    const PostselectedCircuit replayed =
        io::circuit_from_json(nlohmann::json::parse(io::to_json(ns_result.best_circuit).dump()));
    const GateCheckResult recheck = check_postselected_gate(replayed, ns_spec());
    const double replay_gap = std::abs(recheck.success_probability - ns_result.best_success_probability);

    ns_pass = ns_result.found_valid && ns_result.best_success_probability >= 0.2499 &&
              recheck.is_valid && replay_gap <= 1e-8;
    ns_detail = "NS p=" + fmt(ns_result.best_success_probability) + " dev=" + fmt(ns_result.best_deviation) +
                " replay_gap=" + fmt(replay_gap);
    bounds_respected = bounds_respected && ns_result.best_success_probability <= 0.5 + 1e-8;
  } catch (const std::exception& e) {
    ns_detail = std::string("optimizer error: ") + e.what();
    bounds_respected = false;
  }

  try {
    const SearchResult cs_result = optimize_gate(cs_spec(), cs_config);
    cs_probability = cs_result.best_success_probability;
    const bool cs_reached = cs_result.found_valid && cs_result.best_success_probability >= 0.070;
    cs_detail = std::string("; CS stretch (2 ancilla modes, 2 photons, 12 restarts): p=") +
                fmt(cs_result.best_success_probability) + (cs_reached ? " reached" : " not reached (reported)");
    if (cs_result.found_valid) {
      bounds_respected = bounds_respected && cs_result.best_success_probability <= 0.75 + 1e-8;
    }
  } catch (const std::exception& e) {
    cs_detail = std::string("; CS stretch error: ") + e.what();
    bounds_respected = false;
  }

  report(7, ns_pass, "optimizer regression", ns_detail + cs_detail);
  report(8, bounds_respected, "proven bounds never exceeded",
         "NS p=" + fmt(ns_probability) + " <= 0.5, CS p=" + fmt(cs_probability) + " <= 0.75");
}

void criterion_9_entangled_state() {
  try {
    const ProtocolTrace trace = build_entangled_cs_state();
    const double fid = fidelity_up_to_phase(trace.final_state, entangled_cs_target());

    int cs_steps = 0;
    for (const auto& step : trace.steps) {
      if (step.label.rfind("apply CS", 0) == 0) ++cs_steps;
    }

    const SectorBasis& basis = trace.final_state.basis();
    double p00 = 0.0, p11 = 0.0, other = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const OccupationVector& occ = basis.occupation_at(i);
      const double w = std::norm(trace.final_state.amplitude(i));
      if (occ.count(0) == 0 && occ.count(1) == 0) {
        p00 += w;
      } else if (occ.count(0) == 1 && occ.count(1) == 1) {
        p11 += w;
      } else {
        other += w;
      }
    }
    // The fidelity floor of 1e-8 allows marginal slack of a few 1e-4.
    const bool pass = fid >= 1.0 - 1e-8 && cs_steps == 1 && std::abs(p00 - 0.5) <= 5e-4 &&
                      std::abs(p11 - 0.5) <= 5e-4 && other <= 5e-4;
    report(9, pass, "entangled pair from one CS",
           "1-fidelity=" + fmt(1.0 - fid) + " cs_steps=" + std::to_string(cs_steps) +
               " marginal(0,0)=" + fmt(p00) + " marginal(1,1)=" + fmt(p11));
  } catch (const std::exception& e) {
    report(9, false, "entangled pair from one CS", std::string("error: ") + e.what());
  }
}

}  // namespace

int main() {
  criterion_1_theorem1();
  criterion_2_ns_protocol();
  criterion_3_cs_protocol();
  criterion_4_ns_bound();
  criterion_5_half_probability_pair();
  criterion_6_oracle_equivalence();
  criteria_7_8_search();
  criterion_9_entangled_state();

  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all acceptance criteria passed\n");
  return 0;
}
