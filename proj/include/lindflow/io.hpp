#pragma once

#include <cstdio>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lindflow/bloch_dynamics.hpp"
#include "lindflow/bloch_map.hpp"
#include "lindflow/hhd.hpp"
#include "lindflow/su_algebra.hpp"

namespace lindflow::io {

using json = nlohmann::json;

/// Thrown for malformed input documents.
class FormatError : public Error {
 public:
  using Error::Error;
};

/// 17 significant digits, C-locale decimal point.
inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json tensor_to_json(const SparseTensor& t) {
  json out = json::array();
  for (const auto& e : t.entries()) {
    out.push_back({{"j", e.j + 1}, {"k", e.k + 1}, {"l", e.l + 1}, {"value", e.value}});
  }
  return out;
}

inline json structure_tensors_to_json(const SuBasis& basis) {
  return {{"dim", basis.dim()},
          {"ordering", kBasisOrderTag},
          {"index_origin", 1},
          {"f", tensor_to_json(basis.f())},
          {"d", tensor_to_json(basis.d())}};
}

inline json real_matrix_to_json(const RMatrix& m) {
  json rows = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c) + 0.0);
    rows.push_back(std::move(row));
  }
  return rows;
}

inline json real_vector_to_json(const RVector& v) {
  json out = json::array();
  for (Eigen::Index k = 0; k < v.size(); ++k) out.push_back(v(k) + 0.0);  // no -0
  return out;
}

inline json complex_matrix_to_json(const CMatrix& m) {
  return {{"re", real_matrix_to_json(m.real())}, {"im", real_matrix_to_json(m.imag())}};
}

namespace detail {

inline RMatrix real_rows(const json& rows, const std::string& where) {
  if (!rows.is_array() || rows.empty()) throw FormatError(where + ": expected a nested array");
  const std::size_t nr = rows.size();
  const std::size_t nc = rows.front().is_array() ? rows.front().size() : 0;
  if (nc == 0) throw FormatError(where + ": rows must be non-empty arrays");
  RMatrix out(static_cast<Eigen::Index>(nr), static_cast<Eigen::Index>(nc));
  for (std::size_t r = 0; r < nr; ++r) {
    if (!rows[r].is_array() || rows[r].size() != nc) {
      throw FormatError(where + ": ragged matrix at row " + std::to_string(r + 1));
    }
    for (std::size_t c = 0; c < nc; ++c) {
      if (!rows[r][c].is_number()) throw FormatError(where + ": non-numeric entry");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = rows[r][c].get<double>();
    }
  }
  return out;
}

}  // namespace detail

/// Parses {"re": [[…]], "im": [[…]]}; "im" may be omitted for real matrices.
inline CMatrix complex_matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_object() || !j.contains("re")) throw FormatError(where + ": expected {\"re\", \"im\"}");
  const RMatrix re = detail::real_rows(j.at("re"), where + ".re");
  RMatrix im = RMatrix::Zero(re.rows(), re.cols());
  if (j.contains("im")) {
    im = detail::real_rows(j.at("im"), where + ".im");
    if (im.rows() != re.rows() || im.cols() != re.cols()) {
      throw FormatError(where + ": re/im shapes differ (" + std::to_string(re.rows()) + "x" +
                        std::to_string(re.cols()) + " vs " + std::to_string(im.rows()) + "x" +
                        std::to_string(im.cols()) + ")");
    }
  }
  CMatrix out(re.rows(), re.cols());
  out.real() = re;
  out.imag() = im;
  return out;
}

inline RVector real_vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw FormatError(where + ": expected an array");
  RVector out(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) {
    if (!j[k].is_number()) throw FormatError(where + ": non-numeric entry");
    out(static_cast<Eigen::Index>(k)) = j[k].get<double>();
  }
  return out;
}

/// Writes both representations of a state given by Bloch coordinates.
inline json state_to_json(const RVector& a, const SuBasis& basis) {
  CMatrix m = matrix_from_coordinates(a, basis, 1.0 / static_cast<double>(basis.dim()));
  m = (0.5 * (m + m.adjoint())).eval();
  const PositivityReport pos = positivity_check(m);
  return {{"matrix", complex_matrix_to_json(m)},
          {"bloch", real_vector_to_json(a)},
          {"purity", (1.0 + (static_cast<double>(basis.dim()) - 1.0) * a.squaredNorm()) /
                         static_cast<double>(basis.dim())},
          {"positive", pos.positive},
          {"min_eigenvalue", pos.min_eigenvalue}};
}

inline json state_to_json(const DensityMatrix& rho, const SuBasis& basis) {
  json out = state_to_json(to_bloch(rho, basis).coords(), basis);
  out["matrix"] = complex_matrix_to_json(rho.matrix());
  return out;
}

/// Reads {"matrix": {...}} or {"bloch": [...]}. The result is Hermitian with
/// unit trace; positivity is recorded, not enforced.
inline DensityMatrix state_from_json(const json& j, const SuBasis& basis) {
  if (j.contains("matrix")) {
    const CMatrix m = complex_matrix_from_json(j.at("matrix"), "matrix");
    if (m.rows() != static_cast<Eigen::Index>(basis.dim()) || m.cols() != m.rows()) {
      throw FormatError("state matrix must be " + std::to_string(basis.dim()) + "x" +
                        std::to_string(basis.dim()));
    }
    return DensityMatrix::hermitian_unit_trace(m);
  }
  if (j.contains("bloch")) {
    const RVector a = real_vector_from_json(j.at("bloch"), "bloch");
    return from_bloch(BlochVector(basis.dim(), a), basis);
  }
  throw FormatError("state must contain \"matrix\" or \"bloch\"");
}

inline json spectrum_to_json(const Spectrum& s) {
  json values = json::array();
  for (Eigen::Index k = 0; k < s.eigenvalues.size(); ++k) {
    values.push_back({{"re", s.eigenvalues(k).real()}, {"im", s.eigenvalues(k).imag()}});
  }
  return {{"eigenvalues", values}, {"rates", real_vector_to_json(s.rates)}};
}

inline json residuals_to_json(const HHDResiduals& r) {
  return {{"riccati", r.riccati}, {"linear", r.linear},
          {"scalar", r.scalar},   {"trace", r.trace},
          {"orthogonality", r.orthogonality}, {"symmetry", r.symmetry}};
}

/// {P, p, residuals}; with a single scale parameter γ the entries scale as γ².
inline json hhd_to_json(const HHDecomposition& dec, std::optional<double> gamma = std::nullopt) {
  json out = {{"dim", dec.dim},
              {"P", real_matrix_to_json(dec.P)},
              {"p", real_vector_to_json(dec.p)},
              {"residuals", residuals_to_json(dec.residuals)}};
  if (gamma) {
    out["gamma"] = *gamma;
    out["gamma_power"] = 2;
  }
  return out;
}

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
  const std::size_t n = adjoint_size(traj.dim);
  os << "t";
  for (std::size_t k = 1; k <= n; ++k) os << ",a_" << k;
  os << ",purity";
  if (traj.potential) os << ",phi";
  os << '\n';
  for (std::size_t row = 0; row < traj.times.size(); ++row) {
    os << format_double(traj.times[row]);
    for (Eigen::Index k = 0; k < traj.states[row].size(); ++k) {
      os << ',' << format_double(traj.states[row](k));
    }
    os << ',' << format_double(traj.purity[row]);
    if (traj.potential) os << ',' << format_double((*traj.potential)[row]);
    os << '\n';
  }
}

}  // namespace lindflow::io
