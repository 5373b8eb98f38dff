#pragma once

// Deterministic seed derivation and Haar-random mode unitaries.

#include <Eigen/Dense>

#include <cstdint>
#include <random>

#include "lopsim/optics.hpp"

namespace lopsim {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Independent stream for (seed, index); identical inputs give identical
// streams regardless of how work is scheduled.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  return splitmix64(seed ^ splitmix64(index + 0x9E3779B97F4A7C15ull));
}

}  // namespace detail

// Haar-distributed unitary: QR factorization of a matrix of independent
// standard complex Gaussians, with the phase convention fixed by making the
// triangular factor's diagonal real positive.
inline ModeUnitary haar_random_unitary(int n_modes, std::mt19937_64& rng) {
  if (n_modes < 1) throw std::invalid_argument("haar_random_unitary: need at least one mode");
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd g(n_modes, n_modes);
  for (int i = 0; i < n_modes; ++i) {
    for (int j = 0; j < n_modes; ++j) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      g(i, j) = Complex(re, im);
    }
  }
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(g);
  Eigen::MatrixXcd q = qr.householderQ();
  const Eigen::MatrixXcd r = qr.matrixQR();
  for (int j = 0; j < n_modes; ++j) {
    const Complex d = r(j, j);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(j) *= d / mag;
  }
  return ModeUnitary(std::move(q));
}

}  // namespace lopsim
