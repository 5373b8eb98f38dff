#pragma once

// Photon-count measurements on mode subsets: success probability and the
// renormalized conditional state on the unmeasured modes.

#include <Eigen/Dense>

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <vector>

#include "lopsim/fock.hpp"

namespace lopsim {

class PostselectionPattern {
 public:
  PostselectionPattern() = default;

  PostselectionPattern(std::vector<int> measured_modes, std::vector<int> required_counts)
      : measured_modes_(std::move(measured_modes)), required_counts_(std::move(required_counts)) {
    if (measured_modes_.size() != required_counts_.size()) {
      throw std::invalid_argument("PostselectionPattern: modes and counts must have the same length");
    }
    for (int c : required_counts_) {
      if (c < 0) throw std::invalid_argument("PostselectionPattern: negative required count");
    }
    std::vector<int> sorted = measured_modes_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      throw std::invalid_argument("PostselectionPattern: duplicate measured mode");
    }
  }

  const std::vector<int>& measured_modes() const { return measured_modes_; }
  const std::vector<int>& required_counts() const { return required_counts_; }

  int total_required() const {
    int t = 0;
    for (int c : required_counts_) t += c;
    return t;
  }

 private:
  std::vector<int> measured_modes_;
  std::vector<int> required_counts_;
};

struct PostselectionOutcome {
  double probability = 0.0;
  // Present iff probability > 0; lives on the unmeasured modes, which keep
  // their relative order and are re-indexed from 0.
  std::optional<StateVector> conditional_state;
};

inline PostselectionOutcome postselect(const StateVector& state, const PostselectionPattern& pattern) {
  const int n = state.n_modes();
  for (int m : pattern.measured_modes()) {
    if (m < 0 || m >= n) throw std::out_of_range("postselect: measured mode out of range");
  }
  const int required_total = pattern.total_required();
  if (required_total > state.total_photons()) {
    throw std::invalid_argument("postselect: required counts exceed the sector's photon total");
  }
  if (static_cast<int>(pattern.measured_modes().size()) >= n) {
    throw std::invalid_argument("postselect: pattern must leave at least one unmeasured mode");
  }

  std::vector<int> required_by_mode(static_cast<std::size_t>(n), -1);
  for (std::size_t i = 0; i < pattern.measured_modes().size(); ++i) {
    required_by_mode[static_cast<std::size_t>(pattern.measured_modes()[i])] = pattern.required_counts()[i];
  }
  std::vector<int> remaining_modes;
  for (int m = 0; m < n; ++m) {
    if (required_by_mode[static_cast<std::size_t>(m)] < 0) remaining_modes.push_back(m);
  }

  const SectorBasis cond_basis(static_cast<int>(remaining_modes.size()),
                               state.total_photons() - required_total);
  Eigen::VectorXcd cond = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(cond_basis.size()));
  double probability = 0.0;

  const SectorBasis& basis = state.basis();
  std::vector<int> stripped(remaining_modes.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const OccupationVector& occ = basis.occupation_at(i);
    bool matches = true;
    for (int m = 0; m < n; ++m) {
      const int req = required_by_mode[static_cast<std::size_t>(m)];
      if (req >= 0 && occ.count(m) != req) {
        matches = false;
        break;
      }
    }
    if (!matches) continue;
    const Complex amp = state.amplitude(i);
    probability += std::norm(amp);
    for (std::size_t r = 0; r < remaining_modes.size(); ++r) {
      stripped[r] = occ.count(remaining_modes[r]);
    }
    cond(static_cast<Eigen::Index>(cond_basis.index_of(OccupationVector(stripped)))) = amp;
  }

  PostselectionOutcome outcome;
  outcome.probability = probability;
  if (probability > 0.0) {
    outcome.conditional_state = StateVector(cond_basis, cond / std::sqrt(probability));
  }
  return outcome;
}

// Probability of each photon count in one mode, indexed by count (0..total).
inline std::vector<double> marginal_count_distribution(const StateVector& state, int mode) {
  if (mode < 0 || mode >= state.n_modes()) {
    throw std::out_of_range("marginal_count_distribution: mode index out of range");
  }
  std::vector<double> dist(static_cast<std::size_t>(state.total_photons()) + 1, 0.0);
  const SectorBasis& basis = state.basis();
  for (std::size_t i = 0; i < basis.size(); ++i) {
    dist[static_cast<std::size_t>(basis.occupation_at(i).count(mode))] += std::norm(state.amplitude(i));
  }
  return dist;
}

}  // namespace lopsim
