#pragma once

// Derivative-free search over postselected circuits.  For a fixed ancilla
// budget the unitary is optimized per postselection pattern with a penalized
// simplex search, and the best valid circuit across patterns and restarts is
// returned.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "lopsim/bounds.hpp"
#include "lopsim/gates.hpp"
#include "lopsim/nelder_mead.hpp"
#include "lopsim/rng.hpp"

namespace lopsim {

// Thrown when a search reports a valid circuit above a proven success-
// probability bound; that indicates a simulator defect, not a discovery.
class bound_violation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SearchConfig {
  int n_ancilla_modes = 2;
  int n_ancilla_photons = 1;
  int restarts = 20;
  int max_iterations = 4000;
  double validity_tolerance = 1e-8;
  double penalty_weight = 1e3;
  std::uint64_t seed = 1;
  // When nonempty, restart 0 of every pattern starts from these parameters
  // instead of a random draw; see unitary_log_params.  The search does not
  // use any known construction unless this is set.
  std::vector<double> warm_start;
};

struct SearchResult {
  PostselectedCircuit best_circuit;
  bool found_valid = false;
  double best_success_probability = 0.0;
  double best_deviation = 0.0;
  std::vector<double> history;  // per-restart best penalized objective
};

// U = exp(iH) with H Hermitian assembled from n diagonal reals followed by
// the re/im pairs of the upper triangle in row-major order.  Surjective onto
// the unitary group and continuous in the parameters.
inline ModeUnitary parameterize_unitary(const std::vector<double>& params) {
  const std::size_t len = params.size();
  const int n = static_cast<int>(std::lround(std::sqrt(static_cast<double>(len))));
  if (n < 1 || static_cast<std::size_t>(n) * static_cast<std::size_t>(n) != len) {
    throw std::invalid_argument("parameterize_unitary: length must be a positive perfect square");
  }
  Eigen::MatrixXcd h = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 0; i < n; ++i) h(i, i) = params[static_cast<std::size_t>(i)];
  std::size_t t = static_cast<std::size_t>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const Complex v(params[t], params[t + 1]);
      h(i, j) = v;
      h(j, i) = std::conj(v);
      t += 2;
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  if (es.info() != Eigen::Success) {
    throw std::runtime_error("parameterize_unitary: eigendecomposition failed");
  }
  Eigen::VectorXcd phases(n);
  for (int k = 0; k < n; ++k) phases(k) = std::polar(1.0, es.eigenvalues()(k));
  return ModeUnitary(es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint());
}

// Parameters whose parameterize_unitary reproduces the given unitary, via
// the Hermitian log from a Schur decomposition (exact up to round-off since
// unitary matrices are normal).  Used to warm-start a search from a
// serialized circuit.
inline std::vector<double> unitary_log_params(const ModeUnitary& u) {
  const int n = u.n_modes();
  Eigen::ComplexSchur<Eigen::MatrixXcd> schur(u.matrix());
  if (schur.info() != Eigen::Success) {
    throw std::runtime_error("unitary_log_params: Schur decomposition failed");
  }
  Eigen::VectorXcd angles(n);
  for (int i = 0; i < n; ++i) angles(i) = std::arg(schur.matrixT()(i, i));
  const Eigen::MatrixXcd h = schur.matrixU() * angles.asDiagonal() * schur.matrixU().adjoint();
  std::vector<double> params(static_cast<std::size_t>(n) * static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) params[static_cast<std::size_t>(i)] = h(i, i).real();
  std::size_t t = static_cast<std::size_t>(n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      params[t] = h(i, j).real();
      params[t + 1] = h(i, j).imag();
      t += 2;
    }
  }
  return params;
}

// Proven ceiling for the gates this library knows; 1 otherwise.
inline double known_success_bound(const GateSpec& spec) {
  auto matches = [&](const GateSpec& reference) {
    if (spec.n_signal_modes() != reference.n_signal_modes()) return false;
    if (spec.computational_basis().size() != reference.computational_basis().size()) return false;
    for (std::size_t i = 0; i < reference.computational_basis().size(); ++i) {
      if (!(spec.computational_basis()[i] == reference.computational_basis()[i])) return false;
    }
    return (spec.target_diagonal() - reference.target_diagonal()).cwiseAbs().maxCoeff() <= 1e-12;
  };
  if (matches(ns_spec())) return bound_from_expectation(2.0);
  if (matches(cs_spec())) return bound_from_expectation(4.0 / 3.0);
  return 1.0;
}

namespace detail {

inline void validate_search_config(const SearchConfig& config) {
  if (config.n_ancilla_modes < 0) throw std::invalid_argument("SearchConfig: negative ancilla mode count");
  if (config.n_ancilla_photons < 0 || config.n_ancilla_photons > config.n_ancilla_modes) {
    throw std::invalid_argument("SearchConfig: ancilla photons must be between 0 and ancilla modes");
  }
  if (config.restarts < 1) throw std::invalid_argument("SearchConfig: need at least one restart");
  if (config.max_iterations < 1) throw std::invalid_argument("SearchConfig: need at least one iteration");
  if (!(config.validity_tolerance > 0.0)) throw std::invalid_argument("SearchConfig: tolerance must be positive");
  if (!(config.penalty_weight > 0.0)) throw std::invalid_argument("SearchConfig: penalty must be positive");
}

// All ancilla count patterns whose totals equal the ancilla photon number;
// patterns with other totals change the signal sector and can never yield a
// valid gate.
inline std::vector<std::vector<int>> ancilla_patterns(int n_ancilla_modes, int n_ancilla_photons) {
  if (n_ancilla_modes == 0) return {std::vector<int>{}};
  std::vector<std::vector<int>> patterns;
  const SectorBasis basis(n_ancilla_modes, n_ancilla_photons);
  patterns.reserve(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) patterns.push_back(basis.occupation_at(i).counts());
  return patterns;
}

inline PostselectedCircuit make_search_circuit(const GateSpec& spec, const SearchConfig& config,
                                               ModeUnitary unitary, const std::vector<int>& pattern_counts) {
  std::vector<int> prep(static_cast<std::size_t>(config.n_ancilla_modes), 0);
  for (int i = 0; i < config.n_ancilla_photons; ++i) prep[static_cast<std::size_t>(i)] = 1;
  std::vector<int> measured(static_cast<std::size_t>(config.n_ancilla_modes));
  for (int i = 0; i < config.n_ancilla_modes; ++i) {
    measured[static_cast<std::size_t>(i)] = spec.n_signal_modes() + i;
  }
  return PostselectedCircuit(spec.n_signal_modes(), config.n_ancilla_modes, OccupationVector(std::move(prep)),
                             std::move(unitary), PostselectionPattern(std::move(measured), pattern_counts));
}

}  // namespace detail

// Best penalized score over the ancilla patterns: success probability minus
// penalty_weight * deviation^2.  Patterns whose postselection never fires on
// any computational input are skipped; if none fires the sentinel value
// -penalty_weight is returned.
inline double objective(const std::vector<double>& params, const GateSpec& spec, const SearchConfig& config) {
  detail::validate_search_config(config);
  ModeUnitary u = parameterize_unitary(params);
  if (u.n_modes() != spec.n_signal_modes() + config.n_ancilla_modes) {
    throw std::invalid_argument("objective: parameter count does not match signal + ancilla modes");
  }
  double best = -std::numeric_limits<double>::infinity();
  bool any_fired = false;
  for (const auto& pattern : detail::ancilla_patterns(config.n_ancilla_modes, config.n_ancilla_photons)) {
    const GateCheckResult r = check_postselected_gate(detail::make_search_circuit(spec, config, u, pattern),
                                                      spec, config.validity_tolerance);
    if (r.success_probability <= kScaleFloor) continue;
    any_fired = true;
    best = std::max(best, r.success_probability - config.penalty_weight * r.deviation * r.deviation);
  }
  return any_fired ? best : -config.penalty_weight;
}

// Seeded multi-restart simplex search per pattern.  Each restart draws its
// start point from a stream derived from (seed, restart index), runs the
// penalized search, then escalates the penalty weight tenfold until the
// deviation clears the validity tolerance (the stationary point at a fixed
// weight sits at deviation of order 1/weight, so a fixed weight cannot land
// on the valid set).  Deterministic given the config.
inline SearchResult optimize_gate(const GateSpec& spec, const SearchConfig& config) {
  constexpr double pi = std::numbers::pi;
  detail::validate_search_config(config);

  const int n = spec.n_signal_modes() + config.n_ancilla_modes;
  const std::size_t n_params = static_cast<std::size_t>(n) * static_cast<std::size_t>(n);
  if (!config.warm_start.empty() && config.warm_start.size() != n_params) {
    throw std::invalid_argument("SearchConfig: warm start has the wrong parameter count");
  }
  const auto patterns = detail::ancilla_patterns(config.n_ancilla_modes, config.n_ancilla_photons);

  std::optional<PostselectedCircuit> best_valid_circuit;
  double best_valid_probability = -1.0;
  std::optional<PostselectedCircuit> fallback_circuit;
  double fallback_deviation = std::numeric_limits<double>::infinity();
  double fallback_probability = 0.0;
  std::vector<double> history;

  std::uint64_t flat_restart = 0;
  for (const auto& pattern : patterns) {
    auto evaluate = [&](const std::vector<double>& x) -> GateCheckResult {
      return check_postselected_gate(detail::make_search_circuit(spec, config, parameterize_unitary(x), pattern),
                                     spec, config.validity_tolerance);
    };
    auto penalized = [&](double weight) {
      return [&, weight](const std::vector<double>& x) {
        const GateCheckResult r = evaluate(x);
        if (r.success_probability <= kScaleFloor) return weight;
        return -(r.success_probability - weight * r.deviation * r.deviation);
      };
    };

    for (int restart = 0; restart < config.restarts; ++restart, ++flat_restart) {
      std::mt19937_64 rng(detail::derive_seed(config.seed, flat_restart));
      std::uniform_real_distribution<double> uniform(-pi, pi);
      std::vector<double> x(n_params);
      if (restart == 0 && !config.warm_start.empty()) {
        x = config.warm_start;
      } else {
        for (double& v : x) v = uniform(rng);
      }

      double weight = config.penalty_weight;
      x = detail::nelder_mead(penalized(weight), x, 0.7, config.max_iterations, 1e-10).x;
      GateCheckResult check = evaluate(x);
      for (int round = 0; round < 14 && check.deviation > 0.25 * config.validity_tolerance; ++round) {
        weight *= 10.0;
        x = detail::nelder_mead(penalized(weight), x, 0.05, config.max_iterations, 1e-12).x;
        check = evaluate(x);
      }

      history.push_back(check.success_probability -
                        config.penalty_weight * check.deviation * check.deviation);

      if (check.is_valid && check.success_probability > best_valid_probability) {
        best_valid_circuit = detail::make_search_circuit(spec, config, parameterize_unitary(x), pattern);
        best_valid_probability = check.success_probability;
      }
      if (check.deviation < fallback_deviation) {
        fallback_circuit = detail::make_search_circuit(spec, config, parameterize_unitary(x), pattern);
        fallback_deviation = check.deviation;
        fallback_probability = check.success_probability;
      }
    }
  }

  if (best_valid_circuit) {
    // Re-verify rather than trust the loop bookkeeping.
    const GateCheckResult check =
        check_postselected_gate(*best_valid_circuit, spec, config.validity_tolerance);
    const double bound = known_success_bound(spec);
    if (check.is_valid && check.success_probability > bound + 1e-8) {
      throw bound_violation_error("optimize_gate: success probability " +
                                  detail::format_value(check.success_probability) +
                                  " exceeds the proven bound " + detail::format_value(bound) +
                                  "; this indicates a simulator defect");
    }
    return SearchResult{*best_valid_circuit, check.is_valid, check.success_probability, check.deviation,
                        std::move(history)};
  }
  return SearchResult{*fallback_circuit, false, fallback_probability, fallback_deviation, std::move(history)};
}

}  // namespace lopsim
