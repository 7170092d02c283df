#pragma once

#include <algorithm>
#include <array>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "lindflow/io.hpp"
#include "lindflow/lindflow.hpp"

namespace lindflow::cli {

using json = nlohmann::json;

/// Thrown by load_config / parse_config; carries every violation found.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems)
      : Error(join(problems)), problems_(std::move(problems)) {}
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  static std::string join(const std::vector<std::string>& items) {
    std::string out = "invalid config:";
    for (const auto& s : items) out += "\n  - " + s;
    return out;
  }
  std::vector<std::string> problems_;
};

inline const std::array<const char*, 5> kCommandOrder = {"validate", "steady-state", "spectrum",
                                                          "decompose", "simulate"};

inline bool is_command(const std::string& name) {
  return std::find(kCommandOrder.begin(), kCommandOrder.end(), name) != kCommandOrder.end();
}

struct Tolerances {
  double structural = tol::structural;
  double spectral = tol::spectral;
  double riccati = kRiccatiTolerance;
};

struct ModelConfig {
  int version = 1;
  std::size_t dim = 0;
  std::vector<CMatrix> jumps;   // already multiplied by gamma when present
  std::optional<double> gamma;
  std::optional<RVector> initial_bloch;
  std::vector<double> time_grid;
  std::vector<std::string> commands;
  Tolerances tolerances;
  std::string canonical;        // canonical dump of the source document
};

namespace detail {

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::string hex64(std::uint64_t x) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(x));
  return buf;
}

}  // namespace detail

inline ModelConfig parse_config(const json& doc) {
  std::vector<std::string> problems;
  ModelConfig cfg;
  if (!doc.is_object()) throw ConfigError({"top level must be a JSON object"});
  cfg.canonical = doc.dump();

  if (!doc.contains("version")) {
    problems.push_back("missing \"version\"");
  } else if (!doc["version"].is_number_integer() || doc["version"].get<int>() != 1) {
    problems.push_back("unsupported \"version\" (expected 1)");
  }

  if (!doc.contains("dim") || !doc["dim"].is_number_integer() || doc["dim"].get<int>() < 2) {
    problems.push_back("\"dim\" must be an integer >= 2");
  } else {
    cfg.dim = doc["dim"].get<std::size_t>();
  }

  if (doc.contains("gamma")) {
    if (!doc["gamma"].is_number() || doc["gamma"].get<double>() <= 0.0) {
      problems.push_back("\"gamma\" must be a positive number");
    } else {
      cfg.gamma = doc["gamma"].get<double>();
    }
  }

  if (!doc.contains("jumps") || !doc["jumps"].is_array()) {
    problems.push_back("\"jumps\" must be an array of {re, im} matrices");
  } else {
    for (std::size_t a = 0; a < doc["jumps"].size(); ++a) {
      const std::string where = "jumps[" + std::to_string(a) + "]";
      try {
        CMatrix b = io::complex_matrix_from_json(doc["jumps"][a], where);
        if (cfg.dim != 0 && (b.rows() != static_cast<Eigen::Index>(cfg.dim) || b.cols() != b.rows())) {
          problems.push_back(where + ": dimension mismatch, got " + std::to_string(b.rows()) + "x" +
                             std::to_string(b.cols()) + " for dim " + std::to_string(cfg.dim));
          continue;
        }
        if (cfg.gamma) b *= *cfg.gamma;
        cfg.jumps.push_back(std::move(b));
      } catch (const io::FormatError& e) {
        problems.push_back(e.what());
      }
    }
  }

  if (doc.contains("initial_state") && cfg.dim >= 2) {
    const json& s = doc["initial_state"];
    try {
      const SuBasis basis = generate_basis(cfg.dim);
      if (s.contains("bloch")) {
        const RVector a = io::real_vector_from_json(s["bloch"], "initial_state.bloch");
        if (static_cast<std::size_t>(a.size()) != adjoint_size(cfg.dim)) {
          problems.push_back("initial_state.bloch: length " + std::to_string(a.size()) +
                             ", expected " + std::to_string(adjoint_size(cfg.dim)));
        } else if (a.norm() > 1.0 + kPositivityTolerance) {
          problems.push_back("initial_state.bloch: |a0| = " + io::format_double(a.norm()) +
                             " exceeds 1");
        } else {
          cfg.initial_bloch = a;
        }
      } else {
        const DensityMatrix rho = io::state_from_json(s, basis);
        cfg.initial_bloch = to_bloch(rho, basis).coords();
      }
    } catch (const Error& e) {
      problems.push_back(std::string("initial_state: ") + e.what());
    }
  }

  if (doc.contains("time_grid")) {
    const json& g = doc["time_grid"];
    if (g.is_array()) {
      for (const auto& t : g) {
        if (!t.is_number()) {
          problems.push_back("time_grid: non-numeric entry");
          break;
        }
        cfg.time_grid.push_back(t.get<double>());
      }
    } else if (g.is_object()) {
      const double t0 = g.value("t_start", 0.0);
      const double t1 = g.value("t_end", 0.0);
      const int steps = g.value("steps", 0);
      if (steps < 1) problems.push_back("time_grid.steps must be >= 1");
      if (!(t1 > t0)) problems.push_back("time_grid.t_end must exceed t_start");
      if (steps >= 1 && t1 > t0) {
        for (int k = 0; k <= steps; ++k) cfg.time_grid.push_back(t0 + (t1 - t0) * k / steps);
      }
    } else {
      problems.push_back("time_grid must be {t_start, t_end, steps} or an explicit list");
    }
    for (std::size_t k = 1; k < cfg.time_grid.size(); ++k) {
      if (!(cfg.time_grid[k] > cfg.time_grid[k - 1])) {
        problems.push_back("time_grid must be strictly increasing");
        break;
      }
    }
  }

  if (doc.contains("commands")) {
    if (!doc["commands"].is_array()) {
      problems.push_back("\"commands\" must be an array");
    } else {
      for (const auto& c : doc["commands"]) {
        const std::string name = c.is_string() ? c.get<std::string>() : std::string("<non-string>");
        if (!is_command(name)) {
          problems.push_back("unknown command \"" + name + "\"");
        } else {
          cfg.commands.push_back(name);
        }
      }
    }
  }

  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    auto read = [&](const char* key, double& slot) {
      if (!t.contains(key)) return;
      if (!t[key].is_number() || t[key].get<double>() <= 0.0) {
        problems.push_back(std::string("tolerances.") + key + " must be a positive number");
      } else {
        slot = t[key].get<double>();
      }
    };
    read("structural", cfg.tolerances.structural);
    read("spectral", cfg.tolerances.spectral);
    read("riccati", cfg.tolerances.riccati);
  }

  if (!problems.empty()) throw ConfigError(std::move(problems));
  return cfg;
}

inline ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open config file " + path});
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("parse error: ") + e.what()});
  }
  return parse_config(doc);
}

struct ValidationItem {
  std::string name;
  double residual;
  double tolerance;
  bool pass;
  std::string note;
};

namespace detail {

// Deterministic Hermitian unit-trace probes: the initial state, 𝕀/D, and
// 𝕀/D shifted along each generator.
inline std::vector<CMatrix> validation_probes(const ModelConfig& cfg, const SuBasis& basis) {
  std::vector<CMatrix> probes;
  const double inv_d = 1.0 / static_cast<double>(cfg.dim);
  if (cfg.initial_bloch) probes.push_back(matrix_from_coordinates(*cfg.initial_bloch, basis, inv_d));
  const auto n = static_cast<Eigen::Index>(basis.size());
  probes.push_back(matrix_from_coordinates(RVector::Zero(n), basis, inv_d));
  for (Eigen::Index k = 0; k < n; ++k) {
    RVector a = RVector::Zero(n);
    a(k) = 0.5;
    if (k + 1 < n) a(k + 1) = -0.25;
    probes.push_back(matrix_from_coordinates(a, basis, inv_d));
  }
  return probes;
}

inline double model_scale(const LindbladModel& model) {
  double s = 0.0;
  for (const auto& b : model.jumps()) s += b.squaredNorm();
  return std::max(1.0, s);
}

}  // namespace detail

/// Runs the invariant suites at the configured model. Residuals are relative
/// to max(1, Σ‖B_α‖²) (and to ‖M‖² for the Riccati block).
inline std::vector<ValidationItem> validate(const ModelConfig& cfg) {
  const SuBasis basis = generate_basis(cfg.dim);
  const LindbladModel model(cfg.dim, cfg.jumps);
  const double scale = detail::model_scale(model);
  const auto probes = detail::validation_probes(cfg, basis);
  const BlochGenerator gen = build_generator(model, basis);
  const Tolerances& t = cfg.tolerances;

  double trace = 0, herm = 0, ident = 0, purity_law = 0, bloch = 0;
  for (const auto& rho : probes) {
    const CMatrix l = lindbladian(model, rho);
    trace = std::max(trace, std::abs(l.trace()));
    herm = std::max(herm, hermiticity_defect(l));
    ident = std::max(ident, (l + grad_phi(model, rho) - solenoidal_R(model, rho)).cwiseAbs().maxCoeff());
    const complex rate = 2.0 * lindflow::detail::trace_of_product(rho, l);
    purity_law = std::max(purity_law, std::abs(rate + 4.0 * potential_phi_holomorphic(model, rho)));
    const RVector a = bloch_coordinates(rho, basis);
    bloch = std::max(bloch, (bloch_coordinates(l, basis) - gen.rate(a)).cwiseAbs().maxCoeff());
  }
  std::vector<ValidationItem> items;
  auto add = [&](std::string name, double residual, double tolerance, std::string note = {}) {
    items.push_back({std::move(name), residual, tolerance, residual <= tolerance, std::move(note)});
  };
  add("trace_preservation", trace / scale, t.structural);
  add("hermiticity_preservation", herm / scale, t.structural);
  add("decomposition_identity", ident / scale, t.structural);
  add("purity_law", purity_law / scale, t.spectral);
  add("bloch_generator_consistency", bloch / scale, t.spectral,
      model.has_traced_jumps() ? "jumps with nonzero trace: correction term folded into M" : "");

  Eigen::EigenSolver<RMatrix> eig(gen.M, false);
  add("dissipativity", std::max(0.0, eig.eigenvalues().real().maxCoeff()) / scale, t.spectral);
  add("solenoidal_divergence",
      std::abs(materialize(SuperopKind::R_map, model).divergence()) / scale, t.spectral);

  try {
    const HHDecomposition dec = orthogonal_decomposition(gen, t.riccati);
    add("hhd_riccati", dec.residuals.riccati, t.riccati);
    add("hhd_linear", dec.residuals.linear, t.riccati);
    add("hhd_scalar", dec.residuals.scalar, t.riccati);
    add("hhd_trace", dec.residuals.trace, t.riccati);
    add("hhd_orthogonality", dec.residuals.orthogonality, t.riccati);
  } catch (const Error& e) {
    items.push_back({"hhd", INFINITY, t.riccati, false, e.what()});
  }
  return items;
}

struct RunReport {
  json body;
  bool ok = true;
};

struct RunOptions {
  std::optional<std::filesystem::path> out_dir;
  bool timestamp = true;
};

namespace detail {

inline void write_file(const std::optional<std::filesystem::path>& dir, const std::string& name,
                       const std::string& content) {
  if (!dir) return;
  std::filesystem::create_directories(*dir);
  std::ofstream out(*dir / name, std::ios::binary);
  if (!out) throw Error("cannot write " + (*dir / name).string());
  out << content;
}

inline std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace detail

/// Executes the requested commands in the fixed order validate → steady-state
/// → spectrum → decompose → simulate. A failing command is recorded and the
/// remaining commands still run.
inline RunReport run(const ModelConfig& cfg, const std::vector<std::string>& requested,
                     const RunOptions& opts = {}) {
  RunReport report;
  json& body = report.body;
  body["provenance"] = {{"config_hash", detail::hex64(detail::fnv1a(cfg.canonical))},
                        {"library_version", kVersion},
                        {"basis_ordering", kBasisOrderTag}};
  if (opts.timestamp) body["timestamp"] = detail::utc_timestamp();
  body["dim"] = cfg.dim;
  body["commands"] = json::object();

  const SuBasis basis = generate_basis(cfg.dim);
  const LindbladModel model(cfg.dim, cfg.jumps);
  const BlochGenerator gen = build_generator(model, basis);
  const auto wants = [&](const char* name) {
    return std::find(requested.begin(), requested.end(), name) != requested.end();
  };

  std::optional<HHDecomposition> dec;
  for (const char* name : kCommandOrder) {
    if (!wants(name)) continue;
    const std::string cmd = name;
    json out;
    try {
      if (cmd == "validate") {
        json list = json::array();
        bool all = true;
        for (const auto& item : validate(cfg)) {
          list.push_back({{"name", item.name},
                          {"residual", item.residual},
                          {"tolerance", item.tolerance},
                          {"pass", item.pass},
                          {"note", item.note}});
          all = all && item.pass;
        }
        out["checks"] = list;
        out["status"] = all ? "pass" : "fail";
        if (!all) report.ok = false;
      } else if (cmd == "steady-state") {
        std::optional<BlochVector> a0;
        if (cfg.initial_bloch) a0 = BlochVector(cfg.dim, *cfg.initial_bloch);
        const BlochVector ss = steady_state(gen, a0);
        out["state"] = io::state_to_json(ss.coords(), basis);
        out["generator_residual"] = gen.rate(ss.coords()).norm();
        out["status"] = "ok";
        detail::write_file(opts.out_dir, "steady_state.json", out["state"].dump(2) + "\n");
      } else if (cmd == "spectrum") {
        out["spectrum"] = io::spectrum_to_json(spectrum(gen));
        out["status"] = "ok";
        detail::write_file(opts.out_dir, "spectrum.json", out["spectrum"].dump(2) + "\n");
      } else if (cmd == "decompose") {
        dec = orthogonal_decomposition(gen, cfg.tolerances.riccati);
        out["hhd"] = io::hhd_to_json(*dec, cfg.gamma);
        if (cfg.initial_bloch) {
          const FlowSplit split = decompose(*dec, gen, *cfg.initial_bloch);
          out["at_initial_state"] = {{"grad_part", io::real_vector_to_json(split.grad_part)},
                                     {"sol_part", io::real_vector_to_json(split.sol_part)},
                                     {"inner_product", split.grad_part.dot(split.sol_part)},
                                     {"potential", potential_tilde(*dec, *cfg.initial_bloch)}};
        }
        out["status"] = "ok";
        detail::write_file(opts.out_dir, "hhd.json", out["hhd"].dump(2) + "\n");
      } else if (cmd == "simulate") {
        if (!cfg.initial_bloch) throw Error("simulate needs \"initial_state\"");
        if (cfg.time_grid.empty()) throw Error("simulate needs \"time_grid\"");
        Trajectory traj = evolve(gen, BlochVector(cfg.dim, *cfg.initial_bloch), cfg.time_grid);
        if (!dec) {
          try {
            dec = orthogonal_decomposition(gen, cfg.tolerances.riccati);
          } catch (const Error&) {
          }
        }
        if (dec) {
          std::vector<double> phi;
          for (const auto& a : traj.states) phi.push_back(potential_tilde(*dec, a));
          traj.potential = std::move(phi);
          const LyapunovReport ly = lyapunov_check(*dec, gen, traj);
          out["lyapunov"] = {{"monotone", ly.monotone},
                             {"max_increase", ly.max_increase},
                             {"max_rate_error", ly.max_rate_error}};
        }
        bool purity_monotone = true;
        for (std::size_t k = 1; k < traj.purity.size(); ++k) {
          if (traj.purity[k] > traj.purity[k - 1] + kMonotoneTolerance) purity_monotone = false;
        }
        out["samples"] = traj.times.size();
        out["final_state"] = io::real_vector_to_json(traj.states.back());
        out["final_purity"] = traj.purity.back();
        out["purity_monotone"] = purity_monotone;
        out["status"] = "ok";
        std::ostringstream csv;
        io::write_trajectory_csv(csv, traj);
        detail::write_file(opts.out_dir, "trajectory.csv", csv.str());
      }
    } catch (const Error& e) {
      out["status"] = "error";
      out["error"] = std::string(cmd) + ": " + e.what();
      report.ok = false;
    }
    body["commands"][cmd] = out;
  }
  body["ok"] = report.ok;
  detail::write_file(opts.out_dir, "report.json", body.dump(2) + "\n");
  return report;
}

inline RunReport run(const ModelConfig& cfg, const RunOptions& opts = {}) {
  return run(cfg, cfg.commands, opts);
}

/// Replaces every configured tolerance with a single override value.
inline void override_tolerances(ModelConfig& cfg, double value) {
  cfg.tolerances = {value, value, value};
}

}  // namespace lindflow::cli
