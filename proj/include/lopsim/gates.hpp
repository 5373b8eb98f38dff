#pragma once

// Target gate specifications (NS, CS), candidate postselected circuits, and
// the proportionality check that decides whether a circuit implements a gate
// and with what success probability.

#include <Eigen/Dense>

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "lopsim/fock.hpp"
#include "lopsim/optics.hpp"
#include "lopsim/postselect.hpp"

namespace lopsim {

// Amplitudes below this are treated as absent when checking whether a state's
// support fits inside a gate's computational basis.
inline constexpr double kSupportEps = 1e-14;

// The scale |lambda| below which a conditional map is considered to never
// fire: the zero map is proportional to every target but implements nothing.
inline constexpr double kScaleFloor = 1e-18;

// A diagonal target gate over an explicit computational basis of occupation
// vectors on the signal modes.
class GateSpec {
 public:
  GateSpec(int n_signal_modes, std::vector<OccupationVector> computational_basis,
           Eigen::VectorXcd target_diagonal)
      : n_signal_modes_(n_signal_modes),
        basis_(std::move(computational_basis)),
        diagonal_(std::move(target_diagonal)) {
    if (n_signal_modes_ < 1) throw std::invalid_argument("GateSpec: need at least one signal mode");
    if (basis_.empty() || static_cast<std::size_t>(diagonal_.size()) != basis_.size()) {
      throw std::invalid_argument("GateSpec: diagonal size must match the computational basis");
    }
    for (const auto& occ : basis_) {
      if (occ.n_modes() != n_signal_modes_) {
        throw std::invalid_argument("GateSpec: basis occupation has wrong mode count");
      }
    }
    for (Eigen::Index i = 0; i < diagonal_.size(); ++i) {
      if (std::abs(std::abs(diagonal_(i)) - 1.0) > kDefaultTol) {
        throw std::invalid_argument("GateSpec: target diagonal entries must have unit modulus");
      }
    }
  }

  int n_signal_modes() const { return n_signal_modes_; }
  const std::vector<OccupationVector>& computational_basis() const { return basis_; }
  const Eigen::VectorXcd& target_diagonal() const { return diagonal_; }

 private:
  int n_signal_modes_;
  std::vector<OccupationVector> basis_;
  Eigen::VectorXcd diagonal_;
};

// NS: flips the sign of the two-photon amplitude of one mode.
inline GateSpec ns_spec() {
  std::vector<OccupationVector> basis{OccupationVector({0}), OccupationVector({1}), OccupationVector({2})};
  Eigen::VectorXcd diag(3);
  diag << 1.0, 1.0, -1.0;
  return GateSpec(1, std::move(basis), std::move(diag));
}

// CS: flips the sign of the one-photon-in-each amplitude of two modes.
inline GateSpec cs_spec() {
  std::vector<OccupationVector> basis{OccupationVector({0, 0}), OccupationVector({1, 0}),
                                      OccupationVector({0, 1}), OccupationVector({1, 1})};
  Eigen::VectorXcd diag(4);
  diag << 1.0, 1.0, 1.0, -1.0;
  return GateSpec(2, std::move(basis), std::move(diag));
}

// A candidate gate implementation: single helper photons in ancilla modes, a
// unitary on signal + ancilla modes (signal modes come first), and a photon
// count pattern on exactly the ancilla modes.
class PostselectedCircuit {
 public:
  PostselectedCircuit(int n_signal_modes, int n_ancilla_modes, OccupationVector ancilla_preparation,
                      ModeUnitary unitary, PostselectionPattern pattern)
      : n_signal_modes_(n_signal_modes),
        n_ancilla_modes_(n_ancilla_modes),
        ancilla_preparation_(std::move(ancilla_preparation)),
        unitary_(std::move(unitary)),
        pattern_(std::move(pattern)) {
    if (n_signal_modes_ < 1 || n_ancilla_modes_ < 0) {
      throw std::invalid_argument("PostselectedCircuit: invalid mode counts");
    }
    if (ancilla_preparation_.n_modes() != n_ancilla_modes_) {
      throw std::invalid_argument("PostselectedCircuit: ancilla preparation has wrong mode count");
    }
    for (int c : ancilla_preparation_.counts()) {
      if (c != 0 && c != 1) {
        throw std::invalid_argument("PostselectedCircuit: ancilla preparation must use single photons");
      }
    }
    if (unitary_.n_modes() != n_signal_modes_ + n_ancilla_modes_) {
      throw std::invalid_argument("PostselectedCircuit: unitary must act on signal + ancilla modes");
    }
    std::vector<bool> measured(static_cast<std::size_t>(n_ancilla_modes_), false);
    for (int m : pattern_.measured_modes()) {
      if (m < n_signal_modes_ || m >= n_signal_modes_ + n_ancilla_modes_) {
        throw std::invalid_argument("PostselectedCircuit: pattern must measure exactly the ancilla modes");
      }
      measured[static_cast<std::size_t>(m - n_signal_modes_)] = true;
    }
    for (bool b : measured) {
      if (!b) throw std::invalid_argument("PostselectedCircuit: pattern must measure exactly the ancilla modes");
    }
  }

  int n_signal_modes() const { return n_signal_modes_; }
  int n_ancilla_modes() const { return n_ancilla_modes_; }
  const OccupationVector& ancilla_preparation() const { return ancilla_preparation_; }
  const ModeUnitary& unitary() const { return unitary_; }
  const PostselectionPattern& pattern() const { return pattern_; }

  // Required photon counts indexed by local ancilla mode (0..n_ancilla-1).
  std::vector<int> pattern_counts_by_ancilla() const {
    std::vector<int> counts(static_cast<std::size_t>(n_ancilla_modes_), 0);
    for (std::size_t i = 0; i < pattern_.measured_modes().size(); ++i) {
      counts[static_cast<std::size_t>(pattern_.measured_modes()[i] - n_signal_modes_)] =
          pattern_.required_counts()[i];
    }
    return counts;
  }

 private:
  int n_signal_modes_;
  int n_ancilla_modes_;
  OccupationVector ancilla_preparation_;
  ModeUnitary unitary_;
  PostselectionPattern pattern_;
};

struct GateCheckResult {
  bool is_valid = false;
  double success_probability = 0.0;
  Complex scale{0.0, 0.0};  // fitted lambda with M ~ lambda * T
  Eigen::MatrixXcd conditional_matrix;
  double deviation = 0.0;
};

namespace detail {

inline std::vector<int> concat_counts(const OccupationVector& a, const std::vector<int>& b) {
  std::vector<int> counts = a.counts();
  counts.insert(counts.end(), b.begin(), b.end());
  return counts;
}

}  // namespace detail

// Feeds every computational basis state through the circuit and fits the
// resulting unnormalized conditional map M against lambda * T.  The deviation
// includes any conditional amplitude that leaks outside the computational
// basis; a map that changes the relative weight of basis states, or moves
// photons where the target has none, cannot implement the gate.
inline GateCheckResult check_postselected_gate(const PostselectedCircuit& circuit, const GateSpec& spec,
                                               double tol = 1e-8) {
  if (circuit.n_signal_modes() != spec.n_signal_modes()) {
    throw std::invalid_argument("check_postselected_gate: signal mode count mismatch");
  }
  const auto& comp = spec.computational_basis();
  const std::size_t nb = comp.size();
  const int anc_photons = circuit.ancilla_preparation().total();
  const int pattern_total = circuit.pattern().total_required();
  const std::vector<int> pattern_counts = circuit.pattern_counts_by_ancilla();

  // Unnormalized conditional amplitudes per input, over the full output
  // signal sector of that input.
  std::vector<SectorBasis> out_sectors;
  std::vector<Eigen::VectorXcd> columns;
  out_sectors.reserve(nb);
  columns.reserve(nb);
  for (std::size_t b = 0; b < nb; ++b) {
    const int total_out = comp[b].total() + anc_photons - pattern_total;
    if (total_out < 0) {
      throw std::invalid_argument(
          "check_postselected_gate: pattern removes more photons than input " + comp[b].to_string() +
          " provides");
    }
    const OccupationVector in_occ(detail::concat_counts(comp[b], circuit.ancilla_preparation().counts()));
    SectorBasis out_sector(spec.n_signal_modes(), total_out);
    Eigen::VectorXcd col(static_cast<Eigen::Index>(out_sector.size()));
    for (std::size_t s = 0; s < out_sector.size(); ++s) {
      const OccupationVector out_occ(detail::concat_counts(out_sector.occupation_at(s), pattern_counts));
      col(static_cast<Eigen::Index>(s)) = transition_amplitude(circuit.unitary(), in_occ, out_occ);
    }
    out_sectors.push_back(std::move(out_sector));
    columns.push_back(std::move(col));
  }

  // lambda = <T, M> / <T, T> over the Frobenius inner product; T is diagonal
  // over the computational basis, so only the diagonal entries contribute.
  Complex t_dot_m(0.0, 0.0);
  for (std::size_t b = 0; b < nb; ++b) {
    if (comp[b].total() != out_sectors[b].total_photons()) continue;
    const std::size_t diag_idx = out_sectors[b].index_of(comp[b]);
    t_dot_m += std::conj(spec.target_diagonal()(static_cast<Eigen::Index>(b))) *
               columns[b](static_cast<Eigen::Index>(diag_idx));
  }
  const Complex lambda = t_dot_m / static_cast<double>(nb);

  double deviation_sq = 0.0;
  Eigen::MatrixXcd m_report = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(nb),
                                                     static_cast<Eigen::Index>(nb));
  for (std::size_t b = 0; b < nb; ++b) {
    Eigen::VectorXcd target_col = Eigen::VectorXcd::Zero(columns[b].size());
    if (comp[b].total() == out_sectors[b].total_photons()) {
      target_col(static_cast<Eigen::Index>(out_sectors[b].index_of(comp[b]))) =
          lambda * spec.target_diagonal()(static_cast<Eigen::Index>(b));
    }
    deviation_sq += (columns[b] - target_col).squaredNorm();
    for (std::size_t bp = 0; bp < nb; ++bp) {
      if (comp[bp].total() != out_sectors[b].total_photons()) continue;
      m_report(static_cast<Eigen::Index>(bp), static_cast<Eigen::Index>(b)) =
          columns[b](static_cast<Eigen::Index>(out_sectors[b].index_of(comp[bp])));
    }
  }

  GateCheckResult result;
  result.scale = lambda;
  result.success_probability = std::norm(lambda);
  result.conditional_matrix = std::move(m_report);
  result.deviation = std::sqrt(deviation_sq);
  result.is_valid = result.deviation <= tol && result.success_probability > kScaleFloor;
  return result;
}

// Multiplies each amplitude by the target diagonal entry selected by the
// occupation of the signal modes.  Support outside the computational basis is
// rejected rather than extended.
inline StateVector apply_ideal_gate(const StateVector& state, const GateSpec& spec,
                                    const std::vector<int>& signal_modes) {
  if (static_cast<int>(signal_modes.size()) != spec.n_signal_modes()) {
    throw std::invalid_argument("apply_ideal_gate: wrong number of signal modes");
  }
  for (int m : signal_modes) {
    if (m < 0 || m >= state.n_modes()) throw std::out_of_range("apply_ideal_gate: mode index out of range");
  }

  const SectorBasis& basis = state.basis();
  Eigen::VectorXcd out = state.amplitudes();
  std::vector<int> restricted(signal_modes.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const OccupationVector& occ = basis.occupation_at(i);
    for (std::size_t k = 0; k < signal_modes.size(); ++k) restricted[k] = occ.count(signal_modes[k]);

    bool found = false;
    for (std::size_t b = 0; b < spec.computational_basis().size(); ++b) {
      if (spec.computational_basis()[b].counts() == restricted) {
        out(static_cast<Eigen::Index>(i)) *= spec.target_diagonal()(static_cast<Eigen::Index>(b));
        found = true;
        break;
      }
    }
    if (!found && std::abs(state.amplitude(i)) > kSupportEps) {
      throw std::invalid_argument("apply_ideal_gate: state has support outside the gate's computational basis at " +
                                  occ.to_string());
    }
  }
  return StateVector(basis, std::move(out));
}

// Runs a postselected circuit on a subset of a state's modes: appends the
// ancilla preparation, applies the circuit unitary embedded so that its
// signal slots line up with signal_modes, then postselects the ancillas.
// The conditional state lives on the original modes in their original order.
inline PostselectionOutcome apply_postselected_circuit(const StateVector& state,
                                                       const PostselectedCircuit& circuit,
                                                       const std::vector<int>& signal_modes) {
  if (static_cast<int>(signal_modes.size()) != circuit.n_signal_modes()) {
    throw std::invalid_argument("apply_postselected_circuit: wrong number of signal modes");
  }
  std::vector<bool> used(static_cast<std::size_t>(state.n_modes()), false);
  for (int m : signal_modes) {
    if (m < 0 || m >= state.n_modes()) {
      throw std::out_of_range("apply_postselected_circuit: mode index out of range");
    }
    if (used[static_cast<std::size_t>(m)]) {
      throw std::invalid_argument("apply_postselected_circuit: duplicate signal mode");
    }
    used[static_cast<std::size_t>(m)] = true;
  }

  const int n0 = state.n_modes();
  const int n_anc = circuit.n_ancilla_modes();
  const int n_comb = n0 + n_anc;

  // Combined state: original occupations extended by the ancilla preparation.
  const SectorBasis comb_basis(n_comb, state.total_photons() + circuit.ancilla_preparation().total());
  Eigen::VectorXcd comb = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(comb_basis.size()));
  for (std::size_t i = 0; i < state.basis().size(); ++i) {
    const Complex amp = state.amplitude(i);
    if (amp == Complex(0.0, 0.0)) continue;
    const OccupationVector occ(
        detail::concat_counts(state.basis().occupation_at(i), circuit.ancilla_preparation().counts()));
    comb(static_cast<Eigen::Index>(comb_basis.index_of(occ))) = amp;
  }

  // Embed the circuit unitary: local mode i is signal_modes[i] for the signal
  // slots and n0 + (i - n_signal) for the ancilla slots.
  auto global_of = [&](int local) {
    return local < circuit.n_signal_modes() ? signal_modes[static_cast<std::size_t>(local)]
                                            : n0 + (local - circuit.n_signal_modes());
  };
  Eigen::MatrixXcd embedded = Eigen::MatrixXcd::Identity(n_comb, n_comb);
  const Eigen::MatrixXcd& u = circuit.unitary().matrix();
  for (int i = 0; i < circuit.unitary().n_modes(); ++i) {
    for (int j = 0; j < circuit.unitary().n_modes(); ++j) {
      embedded(global_of(i), global_of(j)) = u(i, j);
    }
  }

  StateVector evolved = apply_mode_unitary(StateVector(comb_basis, std::move(comb)), ModeUnitary(embedded));

  std::vector<int> measured(static_cast<std::size_t>(n_anc));
  for (int a = 0; a < n_anc; ++a) measured[static_cast<std::size_t>(a)] = n0 + a;
  return postselect(evolved, PostselectionPattern(std::move(measured), circuit.pattern_counts_by_ancilla()));
}

}  // namespace lopsim
