#pragma once

// Fock-basis combinatorics for a fixed total photon number distributed over
// a fixed set of modes, plus the dense complex state vector over that basis.
//
// Basis order is reverse-lexicographic on occupation vectors: the first
// mode's count decreases first, so for 2 modes and 2 photons the order is
// (2,0), (1,1), (0,2).  All mode indices are 0-based.

#include <Eigen/Dense>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lopsim {

using Complex = std::complex<double>;

inline constexpr double kDefaultTol = 1e-10;

namespace detail {

inline std::size_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::size_t result = 1;
  for (int i = 1; i <= k; ++i) {
    result = result * static_cast<std::size_t>(n - k + i) / static_cast<std::size_t>(i);
  }
  return result;
}

inline double factorial(int n) {
  double result = 1.0;
  for (int i = 2; i <= n; ++i) result *= i;
  return result;
}

}  // namespace detail

// Photon counts per mode.  Immutable after construction.
class OccupationVector {
 public:
  OccupationVector() = default;

  explicit OccupationVector(std::vector<int> counts) : counts_(std::move(counts)) {
    for (int c : counts_) {
      if (c < 0) throw std::invalid_argument("OccupationVector: negative photon count");
    }
    total_ = std::accumulate(counts_.begin(), counts_.end(), 0);
  }

  int n_modes() const { return static_cast<int>(counts_.size()); }
  int total() const { return total_; }

  int count(int mode) const {
    if (mode < 0 || mode >= n_modes()) throw std::out_of_range("OccupationVector: mode index out of range");
    return counts_[static_cast<std::size_t>(mode)];
  }

  const std::vector<int>& counts() const { return counts_; }

  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < n_modes(); ++i) {
      if (i > 0) s += ",";
      s += std::to_string(counts_[static_cast<std::size_t>(i)]);
    }
    return s + ")";
  }

  friend bool operator==(const OccupationVector& a, const OccupationVector& b) {
    return a.counts_ == b.counts_;
  }

 private:
  std::vector<int> counts_;
  int total_ = 0;
};

// All occupation vectors of a (n_modes, total_photons) sector in canonical
// (reverse-lexicographic) order, with the inverse index map.  Cheap to copy;
// the enumeration is shared and immutable.
class SectorBasis {
 public:
  SectorBasis(int n_modes, int total_photons) {
    if (n_modes < 1) throw std::invalid_argument("SectorBasis: n_modes must be >= 1");
    if (total_photons < 0) throw std::invalid_argument("SectorBasis: total_photons must be >= 0");
    auto data = std::make_shared<Data>();
    data->n_modes = n_modes;
    data->total = total_photons;
    std::vector<int> occ(static_cast<std::size_t>(n_modes), 0);
    auto fill = [&](auto&& self, int mode, int remaining) -> void {
      if (mode == n_modes - 1) {
        occ[static_cast<std::size_t>(mode)] = remaining;
        data->index.emplace(occ, data->states.size());
        data->states.emplace_back(occ);
        occ[static_cast<std::size_t>(mode)] = 0;
        return;
      }
      for (int c = remaining; c >= 0; --c) {
        occ[static_cast<std::size_t>(mode)] = c;
        self(self, mode + 1, remaining - c);
      }
      occ[static_cast<std::size_t>(mode)] = 0;
    };
    fill(fill, 0, total_photons);
    if (data->states.size() != detail::binomial(n_modes + total_photons - 1, total_photons)) {
      throw std::logic_error("SectorBasis: enumeration does not match stars-and-bars count");
    }
    data_ = std::move(data);
  }

  int n_modes() const { return data_->n_modes; }
  int total_photons() const { return data_->total; }
  std::size_t size() const { return data_->states.size(); }

  const OccupationVector& occupation_at(std::size_t i) const {
    if (i >= size()) throw std::out_of_range("SectorBasis: index out of range");
    return data_->states[i];
  }

  std::size_t index_of(const OccupationVector& occ) const {
    auto it = data_->index.find(occ.counts());
    if (it == data_->index.end()) {
      throw std::invalid_argument("SectorBasis: occupation " + occ.to_string() + " not in sector");
    }
    return it->second;
  }

  bool same_sector(const SectorBasis& other) const {
    return n_modes() == other.n_modes() && total_photons() == other.total_photons();
  }

 private:
  struct Data {
    int n_modes = 0;
    int total = 0;
    std::vector<OccupationVector> states;
    std::map<std::vector<int>, std::size_t> index;
  };
  std::shared_ptr<const Data> data_;
};

inline SectorBasis enumerate_basis(int n_modes, int total_photons) {
  return SectorBasis(n_modes, total_photons);
}

// Dense complex amplitudes over one photon-number sector.
class StateVector {
 public:
  StateVector(SectorBasis basis, Eigen::VectorXcd amplitudes)
      : basis_(std::move(basis)), amplitudes_(std::move(amplitudes)) {
    if (static_cast<std::size_t>(amplitudes_.size()) != basis_.size()) {
      throw std::invalid_argument("StateVector: amplitude count does not match basis size");
    }
  }

  const SectorBasis& basis() const { return basis_; }
  const Eigen::VectorXcd& amplitudes() const { return amplitudes_; }
  int n_modes() const { return basis_.n_modes(); }
  int total_photons() const { return basis_.total_photons(); }

  Complex amplitude(std::size_t i) const { return amplitudes_(static_cast<Eigen::Index>(i)); }

  double norm() const { return amplitudes_.norm(); }

  bool is_normalized(double tol = kDefaultTol) const { return std::abs(norm() - 1.0) <= tol; }

  StateVector normalized() const {
    const double n = norm();
    if (n == 0.0) throw std::invalid_argument("StateVector: cannot normalize the zero vector");
    return StateVector(basis_, amplitudes_ / n);
  }

 private:
  SectorBasis basis_;
  Eigen::VectorXcd amplitudes_;
};

// A normalized complex combination of the mode annihilation operators.
class LogicalMode {
 public:
  explicit LogicalMode(Eigen::VectorXcd coeffs, double tol = kDefaultTol) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() < 1) throw std::invalid_argument("LogicalMode: needs at least one mode");
    if (std::abs(coeffs_.norm() - 1.0) > tol) {
      throw std::invalid_argument("LogicalMode: coefficients must have unit 2-norm");
    }
  }

  static LogicalMode physical(int n_modes, int mode) {
    if (mode < 0 || mode >= n_modes) throw std::out_of_range("LogicalMode: mode index out of range");
    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(n_modes);
    c(mode) = Complex(1.0, 0.0);
    return LogicalMode(std::move(c));
  }

  int n_modes() const { return static_cast<int>(coeffs_.size()); }
  const Eigen::VectorXcd& coeffs() const { return coeffs_; }

 private:
  Eigen::VectorXcd coeffs_;
};

// The basis state for a single occupation.
inline StateVector basis_state(const OccupationVector& occ) {
  SectorBasis basis(occ.n_modes(), occ.total());
  Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  amps(static_cast<Eigen::Index>(basis.index_of(occ))) = Complex(1.0, 0.0);
  return StateVector(std::move(basis), std::move(amps));
}

inline StateVector vacuum_state(int n_modes) {
  return basis_state(OccupationVector(std::vector<int>(static_cast<std::size_t>(n_modes), 0)));
}

// One photon in each listed mode, vacuum elsewhere.  Listing a mode twice is
// rejected; multi-photon initial occupations are not a valid preparation.
inline StateVector single_photon_state(int n_modes, const std::vector<int>& occupied_modes) {
  std::vector<int> counts(static_cast<std::size_t>(n_modes), 0);
  for (int m : occupied_modes) {
    if (m < 0 || m >= n_modes) throw std::out_of_range("single_photon_state: mode index out of range");
    if (counts[static_cast<std::size_t>(m)] != 0) {
      throw std::invalid_argument("single_photon_state: duplicate mode index");
    }
    counts[static_cast<std::size_t>(m)] = 1;
  }
  return basis_state(OccupationVector(std::move(counts)));
}

// <x|y>, conjugating x.
inline Complex inner_product(const StateVector& x, const StateVector& y) {
  if (!x.basis().same_sector(y.basis())) {
    throw std::invalid_argument("inner_product: states live in different sectors");
  }
  return x.amplitudes().dot(y.amplitudes());
}

// |<x|y>|^2 for normalized states; 1 exactly when x and y agree up to a
// global phase.
inline double fidelity_up_to_phase(const StateVector& x, const StateVector& y) {
  if (!x.basis().same_sector(y.basis())) {
    throw std::invalid_argument("fidelity_up_to_phase: states live in different sectors");
  }
  if (!x.is_normalized() || !y.is_normalized()) {
    throw std::invalid_argument("fidelity_up_to_phase: states must be normalized");
  }
  return std::norm(inner_product(x, y));
}

}  // namespace lopsim
