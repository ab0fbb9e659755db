#pragma once

#include <iomanip>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "finop/digit_unitary.hpp"
#include "finop/isomorphism.hpp"
#include "finop/matrix_rep.hpp"
#include "finop/operator.hpp"
#include "finop/step_function.hpp"

namespace finop::io {

using nlohmann::json;

// Adding 0.0 folds -0.0 into +0.0 so output does not depend on how a zero arose.
inline json complex_to_json(const Complex& z) { return json::array({z.real() + 0.0, z.imag() + 0.0}); }

inline Complex complex_from_json(const json& j) {
  if (!j.is_array() || j.size() != 2) throw Error("complex number must be a [re, im] pair");
  return {j[0].get<double>(), j[1].get<double>()};
}

inline json grid_to_json(const GridSpec& g) { return {{"N", g.N}, {"M", g.M}, {"p", g.p}}; }

inline GridSpec grid_from_json(const json& j) {
  return GridSpec(j.at("N").get<int>(), j.at("M").get<int>(), j.at("p").get<int>());
}

/// {"N", "M", "p", "values": [cell][row-major [re, im] pairs]}
inline json to_json(const StepFunction& f) {
  json j = grid_to_json(f.grid());
  json cells = json::array();
  for (const auto& v : f.values()) {
    json cell = json::array();
    for (Eigen::Index r = 0; r < v.rows(); ++r)
      for (Eigen::Index c = 0; c < v.cols(); ++c) cell.push_back(complex_to_json(v(r, c)));
    cells.push_back(std::move(cell));
  }
  j["values"] = std::move(cells);
  return j;
}

inline StepFunction step_function_from_json(const json& j) {
  const GridSpec g = grid_from_json(j);
  const json& cells = j.at("values");
  std::vector<MatrixValue> values;
  values.reserve(cells.size());
  for (const auto& cell : cells) {
    if (cell.size() != static_cast<std::size_t>(g.M) * static_cast<std::size_t>(g.M))
      throw Error("step function cell must hold M*M complex entries");
    MatrixValue v(g.M, g.M);
    for (int r = 0; r < g.M; ++r)
      for (int c = 0; c < g.M; ++c) v(r, c) = complex_from_json(cell[static_cast<std::size_t>(r * g.M + c)]);
    values.push_back(std::move(v));
  }
  return StepFunction(g, std::move(values));
}

/// {"grid": {...}, "terms": [{"shift": [...], "coeff": StepFunction}]}
inline json to_json(const FiniteOperator& a) {
  json terms = json::array();
  for (const auto& [j, coeff] : a.terms())
    terms.push_back({{"shift", unflatten(j, a.grid().N, a.grid().p)}, {"coeff", to_json(coeff)}});
  return {{"grid", grid_to_json(a.grid())}, {"terms", std::move(terms)}};
}

inline FiniteOperator operator_from_json(const json& j) {
  const GridSpec g = grid_from_json(j.at("grid"));
  FiniteOperator::TermMap terms;
  for (const auto& t : j.at("terms")) {
    const auto shift = t.at("shift").get<CellIndex>();
    if (static_cast<int>(shift.size()) != g.N) throw Error("operator term shift has wrong dimension");
    StepFunction coeff = step_function_from_json(t.at("coeff"));
    if (!terms.emplace(flatten(shift, g.p), std::move(coeff)).second) throw Error("duplicate shift in operator");
  }
  return FiniteOperator(g, std::move(terms));
}

/// Nested rows of [re, im] pairs.
inline json matrix_to_json(const Eigen::MatrixXcd& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(complex_to_json(m(r, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

/// One line per row; each entry contributes a "re,im" column pair.
inline std::string matrix_to_csv(const Eigen::MatrixXcd& m) {
  std::ostringstream os;
  os << std::setprecision(std::numeric_limits<double>::max_digits10);
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) os << ',';
      os << m(r, c).real() + 0.0 << ',' << m(r, c).imag() + 0.0;
    }
    os << '\n';
  }
  return os.str();
}

inline json to_json(const Spectrum& s) {
  json out = json::array();
  for (const auto& z : s.eigenvalues) out.push_back(complex_to_json(z));
  return out;
}

inline json to_json(const CellPermutation& P) {
  return {{"N", P.N()}, {"M", P.M()}, {"level", P.level()}, {"forward", P.forward()}};
}

inline json to_json(const SpectralReport& r) {
  return {{"pde_spectrum", to_json(r.pde)},
          {"ode_spectrum", to_json(r.ode)},
          {"max_deviation", r.max_deviation},
          {"tolerance", r.tolerance},
          {"verdict", r.pass ? "PASS" : "FAIL"}};
}

inline json to_json(const ConjugationResult& c) {
  return {{"level", c.level},
          {"K", c.permutation.size()},
          {"ode", to_json(c.ode)},
          {"permutation", to_json(c.permutation)},
          {"spectral_report", to_json(c.spectral_report)}};
}

}  // namespace finop::io
