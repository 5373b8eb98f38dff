#pragma once

// Mode unitaries and their lift to photon-number sectors.
//
// Convention: ModeUnitary stores the Schrodinger-action matrix S defined by
//
//     U a_l^dag U^dag = sum_j S_{jl} a_j^dag,
//
// so column l of S is the image of mode l's creation operator.  The
// Heisenberg matrix u appearing in U^dag a_l^dag U = sum_j u_{jl} a_j^dag is
// S^dag and is available through heisenberg_matrix().
//
// Two independent lift implementations are provided: apply_mode_unitary uses
// the permanent formula for transition amplitudes, lift_oracle substitutes
// the transformed creation operators into the state's operator polynomial
// and expands.  They must agree; tests compare them on random inputs.

#include <Eigen/Dense>

#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "lopsim/fock.hpp"

namespace lopsim {

class ModeUnitary {
 public:
  explicit ModeUnitary(Eigen::MatrixXcd schrodinger_matrix, double tol = kDefaultTol)
      : matrix_(std::move(schrodinger_matrix)) {
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() < 1) {
      throw std::invalid_argument("ModeUnitary: matrix must be square and nonempty");
    }
    const Eigen::MatrixXcd residual =
        matrix_ * matrix_.adjoint() - Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols());
    if (residual.cwiseAbs().maxCoeff() > tol) {
      throw std::invalid_argument("ModeUnitary: matrix is not unitary within tolerance");
    }
  }

  int n_modes() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Eigen::MatrixXcd heisenberg_matrix() const { return matrix_.adjoint(); }

 private:
  Eigen::MatrixXcd matrix_;
};

struct BeamSplitterParams {
  int mode_a = 0;
  int mode_b = 1;
  double theta = 0.0;
};

inline ModeUnitary identity_unitary(int n_modes) {
  return ModeUnitary(Eigen::MatrixXcd::Identity(n_modes, n_modes));
}

// Beam splitter acting as a_a^dag -> cos(theta) a_a^dag + sin(theta) a_b^dag
// and a_b^dag -> -sin(theta) a_a^dag + cos(theta) a_b^dag.
inline ModeUnitary beam_splitter(const BeamSplitterParams& params, int n_modes) {
  if (params.mode_a < 0 || params.mode_a >= n_modes || params.mode_b < 0 || params.mode_b >= n_modes) {
    throw std::out_of_range("beam_splitter: mode index out of range");
  }
  if (params.mode_a == params.mode_b) {
    throw std::invalid_argument("beam_splitter: modes must be distinct");
  }
  const double alpha = std::cos(params.theta);
  const double beta = std::sin(params.theta);
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n_modes, n_modes);
  m(params.mode_a, params.mode_a) = alpha;
  m(params.mode_a, params.mode_b) = -beta;
  m(params.mode_b, params.mode_a) = beta;
  m(params.mode_b, params.mode_b) = alpha;
  return ModeUnitary(std::move(m));
}

inline ModeUnitary phase_shifter(int mode, double phi, int n_modes) {
  if (mode < 0 || mode >= n_modes) throw std::out_of_range("phase_shifter: mode index out of range");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Identity(n_modes, n_modes);
  m(mode, mode) = std::polar(1.0, phi);
  return ModeUnitary(std::move(m));
}

// Matrix product corresponding to "apply v first, then u".
inline ModeUnitary compose(const ModeUnitary& u, const ModeUnitary& v) {
  if (u.n_modes() != v.n_modes()) throw std::invalid_argument("compose: mode count mismatch");
  return ModeUnitary(u.matrix() * v.matrix());
}

// Matrix permanent.  Ryser's formula with Gray-code subset iteration for
// dimension >= 3, direct expansion below that.  Dimension 0 is 1 by the
// empty-product convention.
inline Complex permanent(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("permanent: matrix must be square");
  const int n = static_cast<int>(m.rows());
  if (n == 0) return Complex(1.0, 0.0);
  if (n == 1) return m(0, 0);
  if (n == 2) return m(0, 0) * m(1, 1) + m(0, 1) * m(1, 0);
  if (n > 62) throw std::invalid_argument("permanent: dimension too large");

  std::vector<Complex> row_sums(static_cast<std::size_t>(n), Complex(0.0, 0.0));
  Complex total(0.0, 0.0);
  std::uint64_t prev_gray = 0;
  const std::uint64_t subsets = std::uint64_t{1} << n;
  for (std::uint64_t i = 1; i < subsets; ++i) {
    const std::uint64_t gray = i ^ (i >> 1);
    const std::uint64_t diff = gray ^ prev_gray;
    const int col = std::countr_zero(diff);
    const double flip = (gray & diff) != 0 ? 1.0 : -1.0;
    for (int r = 0; r < n; ++r) {
      row_sums[static_cast<std::size_t>(r)] += flip * m(r, col);
    }
    Complex prod(1.0, 0.0);
    for (int r = 0; r < n; ++r) prod *= row_sums[static_cast<std::size_t>(r)];
    const int k = std::popcount(gray);
    if (((n - k) & 1) == 0) {
      total += prod;
    } else {
      total -= prod;
    }
    prev_gray = gray;
  }
  return total;
}

// <output| lift(u) |input> = Per(S[output, input]) / sqrt(prod out_i! prod in_j!),
// where S[output, input] repeats row i output_i times and column j input_j times.
inline Complex transition_amplitude(const ModeUnitary& u, const OccupationVector& input,
                                    const OccupationVector& output) {
  if (input.n_modes() != u.n_modes() || output.n_modes() != u.n_modes()) {
    throw std::invalid_argument("transition_amplitude: mode count mismatch");
  }
  if (input.total() != output.total()) {
    throw std::invalid_argument("transition_amplitude: photon number mismatch (linear optics conserves it)");
  }
  const int k = input.total();
  if (k == 0) return Complex(1.0, 0.0);

  std::vector<int> rows;
  std::vector<int> cols;
  rows.reserve(static_cast<std::size_t>(k));
  cols.reserve(static_cast<std::size_t>(k));
  double norm = 1.0;
  for (int i = 0; i < u.n_modes(); ++i) {
    for (int r = 0; r < output.count(i); ++r) rows.push_back(i);
    for (int c = 0; c < input.count(i); ++c) cols.push_back(i);
    norm *= detail::factorial(output.count(i)) * detail::factorial(input.count(i));
  }
  Eigen::MatrixXcd sub(k, k);
  for (int r = 0; r < k; ++r) {
    for (int c = 0; c < k; ++c) {
      sub(r, c) = u.matrix()(rows[static_cast<std::size_t>(r)], cols[static_cast<std::size_t>(c)]);
    }
  }
  return permanent(sub) / std::sqrt(norm);
}

// Lift of a mode unitary to the state's sector, via transition amplitudes.
inline StateVector apply_mode_unitary(const StateVector& state, const ModeUnitary& u) {
  if (u.n_modes() != state.n_modes()) {
    throw std::invalid_argument("apply_mode_unitary: mode count mismatch");
  }
  const SectorBasis& basis = state.basis();
  const std::size_t dim = basis.size();
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(dim));
  for (std::size_t in_idx = 0; in_idx < dim; ++in_idx) {
    const Complex amp = state.amplitude(in_idx);
    if (amp == Complex(0.0, 0.0)) continue;
    const OccupationVector& in_occ = basis.occupation_at(in_idx);
    for (std::size_t out_idx = 0; out_idx < dim; ++out_idx) {
      out(static_cast<Eigen::Index>(out_idx)) +=
          amp * transition_amplitude(u, in_occ, basis.occupation_at(out_idx));
    }
  }
  return StateVector(basis, std::move(out));
}

// Same contract as apply_mode_unitary, computed without permanents: write the
// state as a polynomial in creation operators, substitute
// a_l^dag <- sum_j S_{jl} a_j^dag, and expand monomial by monomial.
inline StateVector lift_oracle(const StateVector& state, const ModeUnitary& u) {
  if (u.n_modes() != state.n_modes()) {
    throw std::invalid_argument("lift_oracle: mode count mismatch");
  }
  const SectorBasis& basis = state.basis();
  const int n = u.n_modes();
  const Eigen::MatrixXcd& s = u.matrix();

  std::map<std::vector<int>, Complex> expanded;
  for (std::size_t in_idx = 0; in_idx < basis.size(); ++in_idx) {
    const Complex amp = state.amplitude(in_idx);
    if (amp == Complex(0.0, 0.0)) continue;
    const OccupationVector& occ = basis.occupation_at(in_idx);

    double in_norm = 1.0;
    for (int j = 0; j < n; ++j) in_norm *= detail::factorial(occ.count(j));

    std::map<std::vector<int>, Complex> poly;
    poly.emplace(std::vector<int>(static_cast<std::size_t>(n), 0), amp / std::sqrt(in_norm));

    for (int l = 0; l < n; ++l) {
      for (int rep = 0; rep < occ.count(l); ++rep) {
        std::map<std::vector<int>, Complex> next;
        for (const auto& [mono, coeff] : poly) {
          for (int j = 0; j < n; ++j) {
            const Complex s_jl = s(j, l);
            if (s_jl == Complex(0.0, 0.0)) continue;
            std::vector<int> bumped = mono;
            ++bumped[static_cast<std::size_t>(j)];
            next[std::move(bumped)] += coeff * s_jl;
          }
        }
        poly = std::move(next);
      }
    }
    for (const auto& [mono, coeff] : poly) expanded[mono] += coeff;
  }

  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(basis.size()));
  for (const auto& [mono, coeff] : expanded) {
    double out_norm = 1.0;
    for (int c : mono) out_norm *= detail::factorial(c);
    const std::size_t idx = basis.index_of(OccupationVector(mono));
    out(static_cast<Eigen::Index>(idx)) = coeff * std::sqrt(out_norm);
  }
  return StateVector(basis, std::move(out));
}

}  // namespace lopsim
