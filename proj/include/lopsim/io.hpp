#pragma once

// JSON interchange formats.  Complex numbers are [re, im] pairs and state
// amplitudes are listed in canonical basis order.  Parsers name the first
// invalid or missing field in their error messages.

#include <json.hpp>

#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "lopsim/bounds.hpp"
#include "lopsim/fock.hpp"
#include "lopsim/gates.hpp"
#include "lopsim/optics.hpp"
#include "lopsim/postselect.hpp"
#include "lopsim/search.hpp"

namespace lopsim::io {

using nlohmann::json;

namespace detail {

inline const json& require(const json& j, const char* field, const char* context) {
  if (!j.is_object() || !j.contains(field)) {
    throw std::invalid_argument(std::string(context) + ": missing field '" + field + "'");
  }
  return j.at(field);
}

inline int require_int(const json& j, const char* field, const char* context) {
  const json& v = require(j, field, context);
  if (!v.is_number_integer()) {
    throw std::invalid_argument(std::string(context) + ": field '" + field + "' must be an integer");
  }
  return v.get<int>();
}

inline Complex complex_from(const json& v, const char* context) {
  if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
    throw std::invalid_argument(std::string(context) + ": complex values must be [re, im] pairs");
  }
  return Complex(v[0].get<double>(), v[1].get<double>());
}

inline json complex_to(const Complex& c) { return json::array({c.real(), c.imag()}); }

inline std::vector<int> int_vector_from(const json& v, const char* field, const char* context) {
  if (!v.is_array()) {
    throw std::invalid_argument(std::string(context) + ": field '" + field + "' must be an array");
  }
  std::vector<int> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number_integer()) {
      throw std::invalid_argument(std::string(context) + ": field '" + field + "' must hold integers");
    }
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace detail

inline json to_json(const StateVector& state) {
  json amps = json::array();
  for (std::size_t i = 0; i < state.basis().size(); ++i) {
    amps.push_back(detail::complex_to(state.amplitude(i)));
  }
  return json{{"n_modes", state.n_modes()},
              {"total_photons", state.total_photons()},
              {"amplitudes", std::move(amps)}};
}

inline StateVector state_from_json(const json& j) {
  constexpr const char* ctx = "state";
  const int n_modes = detail::require_int(j, "n_modes", ctx);
  const int total = detail::require_int(j, "total_photons", ctx);
  const json& amps = detail::require(j, "amplitudes", ctx);
  if (!amps.is_array()) throw std::invalid_argument("state: field 'amplitudes' must be an array");
  SectorBasis basis(n_modes, total);
  if (amps.size() != basis.size()) {
    throw std::invalid_argument("state: field 'amplitudes' has wrong length for the sector");
  }
  Eigen::VectorXcd v(static_cast<Eigen::Index>(amps.size()));
  for (std::size_t i = 0; i < amps.size(); ++i) {
    v(static_cast<Eigen::Index>(i)) = detail::complex_from(amps[i], ctx);
  }
  return StateVector(std::move(basis), std::move(v));
}

inline json to_json(const ModeUnitary& u) {
  json rows = json::array();
  for (int i = 0; i < u.n_modes(); ++i) {
    json row = json::array();
    for (int j = 0; j < u.n_modes(); ++j) row.push_back(detail::complex_to(u.matrix()(i, j)));
    rows.push_back(std::move(row));
  }
  return json{{"n_modes", u.n_modes()}, {"convention", "schrodinger"}, {"matrix", std::move(rows)}};
}

inline ModeUnitary unitary_from_json(const json& j) {
  constexpr const char* ctx = "unitary";
  const int n = detail::require_int(j, "n_modes", ctx);
  const json& convention = detail::require(j, "convention", ctx);
  if (!convention.is_string() || convention.get<std::string>() != "schrodinger") {
    throw std::invalid_argument("unitary: field 'convention' must be \"schrodinger\"");
  }
  const json& rows = detail::require(j, "matrix", ctx);
  if (!rows.is_array() || rows.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("unitary: field 'matrix' must be an n_modes x n_modes array");
  }
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || row.size() != static_cast<std::size_t>(n)) {
      throw std::invalid_argument("unitary: field 'matrix' must be an n_modes x n_modes array");
    }
    for (int k = 0; k < n; ++k) m(i, k) = detail::complex_from(row[static_cast<std::size_t>(k)], ctx);
  }
  return ModeUnitary(std::move(m));
}

inline json to_json(const PostselectionPattern& pattern) {
  return json{{"measured_modes", pattern.measured_modes()}, {"required_counts", pattern.required_counts()}};
}

inline PostselectionPattern pattern_from_json(const json& j) {
  constexpr const char* ctx = "pattern";
  return PostselectionPattern(
      detail::int_vector_from(detail::require(j, "measured_modes", ctx), "measured_modes", ctx),
      detail::int_vector_from(detail::require(j, "required_counts", ctx), "required_counts", ctx));
}

inline json to_json(const PostselectedCircuit& circuit) {
  return json{{"n_signal_modes", circuit.n_signal_modes()},
              {"n_ancilla_modes", circuit.n_ancilla_modes()},
              {"ancilla_preparation", circuit.ancilla_preparation().counts()},
              {"unitary", to_json(circuit.unitary())},
              {"pattern", to_json(circuit.pattern())}};
}

inline PostselectedCircuit circuit_from_json(const json& j) {
  constexpr const char* ctx = "circuit";
  const int n_signal = detail::require_int(j, "n_signal_modes", ctx);
  const int n_ancilla = detail::require_int(j, "n_ancilla_modes", ctx);
  std::vector<int> prep =
      detail::int_vector_from(detail::require(j, "ancilla_preparation", ctx), "ancilla_preparation", ctx);
  ModeUnitary unitary = unitary_from_json(detail::require(j, "unitary", ctx));
  PostselectionPattern pattern = pattern_from_json(detail::require(j, "pattern", ctx));
  return PostselectedCircuit(n_signal, n_ancilla, OccupationVector(std::move(prep)), std::move(unitary),
                             std::move(pattern));
}

inline json to_json(const GateCheckResult& r) {
  json matrix = json::array();
  for (Eigen::Index i = 0; i < r.conditional_matrix.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < r.conditional_matrix.cols(); ++j) {
      row.push_back(detail::complex_to(r.conditional_matrix(i, j)));
    }
    matrix.push_back(std::move(row));
  }
  return json{{"is_valid", r.is_valid},
              {"success_probability", r.success_probability},
              {"scale", detail::complex_to(r.scale)},
              {"deviation", r.deviation},
              {"conditional_matrix", std::move(matrix)}};
}

inline json to_json(const ProtocolTrace& trace) {
  json steps = json::array();
  for (const auto& step : trace.steps) {
    steps.push_back(json{{"label", step.label}, {"state", to_json(step.state)}});
  }
  return json{{"steps", std::move(steps)},
              {"final_state", to_json(trace.final_state)},
              {"claimed_success_probability", trace.claimed_success_probability}};
}

inline json to_json(const Theorem1Report& report) {
  json configs = json::array();
  for (const auto& cfg : report.configurations) {
    configs.push_back(json{{"n_modes", cfg.n_modes},
                           {"k_photons", cfg.k_photons},
                           {"seed", cfg.seed},
                           {"max_expectation", cfg.max_expectation},
                           {"max_identity_deviation", cfg.max_identity_deviation}});
  }
  return json{{"trials", report.trials},
              {"max_observed_expectation", report.max_observed_expectation},
              {"max_identity_deviation", report.max_identity_deviation},
              {"configurations", std::move(configs)}};
}

inline json to_json(const SearchConfig& config) {
  return json{{"n_ancilla_modes", config.n_ancilla_modes},
              {"n_ancilla_photons", config.n_ancilla_photons},
              {"restarts", config.restarts},
              {"max_iterations", config.max_iterations},
              {"validity_tolerance", config.validity_tolerance},
              {"penalty_weight", config.penalty_weight},
              {"seed", config.seed},
              {"warm_start", config.warm_start}};
}

inline json to_json(const SearchResult& result) {
  return json{{"best_circuit", to_json(result.best_circuit)},
              {"found_valid", result.found_valid},
              {"best_success_probability", result.best_success_probability},
              {"best_deviation", result.best_deviation},
              {"history", result.history}};
}

inline json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw std::invalid_argument("cannot parse " + path + ": " + e.what());
  }
  return j;
}

inline void save_json_file(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot open file for writing: " + path);
  out << j.dump(2) << "\n";
  if (!out) throw std::invalid_argument("failed writing file: " + path);
}

}  // namespace lopsim::io
