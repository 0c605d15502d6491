#pragma once

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <system_error>
#include <vector>

#include "beamgp/dataset.hpp"
#include "beamgp/detail/text.hpp"
#include "beamgp/errors.hpp"

namespace beamgp {

/// Sidecar configuration for a dataset CSV: geometry, optional reference
/// stiffness, and boundary conditions given as `bc.<kind>.<x> = <value>`.
struct SidecarConfig {
  std::optional<double> length;
  std::optional<double> fiber_distance;
  std::optional<double> ei_ref;
  std::vector<BoundaryCondition> boundary_conditions;
};

inline SidecarConfig parse_sidecar_text(std::istream& in, const std::string& origin) {
  SidecarConfig cfg;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string stripped = detail::trim(line.substr(0, line.find('#')));
    if (stripped.empty()) continue;
    const std::size_t eq = stripped.find('=');
    if (eq == std::string::npos)
      throw ParseError(origin + ": expected key = value", line_no);
    const std::string key = detail::trim(stripped.substr(0, eq));
    const std::string value_text = detail::trim(stripped.substr(eq + 1));
    const std::optional<double> value = detail::try_parse_double(value_text);
    if (!value) throw ParseError(origin + ": bad numeric value '" + value_text + "'", line_no);

    if (key == "L") {
      cfg.length = *value;
    } else if (key == "c") {
      cfg.fiber_distance = *value;
    } else if (key == "ei_ref") {
      cfg.ei_ref = *value;
    } else if (key.rfind("bc.", 0) == 0) {
      const auto parts = detail::split(key, '.');
      if (parts.size() < 3) throw ParseError(origin + ": bc key needs bc.<kind>.<x>", line_no);
      const auto kind = parse_kind_tag(parts[1]);
      if (!kind) throw ParseError(origin + ": unknown kind tag '" + parts[1] + "'", line_no);
      std::string x_text = parts[2];
      for (std::size_t i = 3; i < parts.size(); ++i) x_text += "." + parts[i];
      const std::optional<double> x = detail::try_parse_double(x_text);
      if (!x) throw ParseError(origin + ": bad bc location '" + x_text + "'", line_no);
      cfg.boundary_conditions.push_back({*kind, *x, *value});
    } else {
      throw ParseError(origin + ": unknown key '" + key + "'", line_no);
    }
  }
  return cfg;
}

inline SidecarConfig parse_sidecar(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  return parse_sidecar_text(in, path);
}

/// Reads the `kind,label,x,value[,sigma]` CSV. Rows are grouped into sets by
/// (kind, label) in first-appearance order; row order within a set follows the
/// file. An empty sigma means Learnable; an explicit sigma fixes the noise.
inline Problem load_problem_csv_stream(std::istream& in, const SidecarConfig& cfg,
                                       const std::string& origin) {
  if (!cfg.length) throw ConfigError(origin + ": config does not define the beam length L");
  Problem problem;
  problem.length = *cfg.length;
  problem.fiber_distance = cfg.fiber_distance;
  problem.boundary_conditions = cfg.boundary_conditions;

  std::string line;
  long line_no = 0;
  if (!std::getline(in, line)) throw ParseError(origin + ": empty file");
  ++line_no;
  {
    const auto header = detail::split(line, ',');
    if (header.size() < 4 || detail::trim(header[0]) != "kind" ||
        detail::trim(header[1]) != "label" || detail::trim(header[2]) != "x" ||
        detail::trim(header[3]) != "value")
      throw ParseError(origin + ": expected header kind,label,x,value[,sigma]", line_no);
  }

  struct PendingSet {
    QuantityKind kind;
    std::string label;
    std::vector<double> xs, ys;
    std::optional<double> sigma;  // nullopt = Learnable
    bool sigma_seen = false;
    long first_line = 0;
  };
  std::vector<PendingSet> pending;

  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    const auto fields = detail::split(line, ',');
    if (fields.size() < 4 || fields.size() > 5)
      throw ParseError(origin + ": expected 4 or 5 fields", line_no);
    const std::string tag = detail::trim(fields[0]);
    const auto kind = parse_kind_tag(tag);
    if (!kind) throw ParseError(origin + ": unknown kind tag '" + tag + "'", line_no);
    const std::string label = detail::trim(fields[1]);
    const auto x = detail::try_parse_double(fields[2]);
    const auto value = detail::try_parse_double(fields[3]);
    if (!x || !value) throw ParseError(origin + ": bad numeric field", line_no);
    if (!(*x >= 0.0 && *x <= problem.length))
      throw ParseError(origin + ": location " + detail::format_double(*x) +
                           " outside the beam [0, " + detail::format_double(problem.length) + "]",
                       line_no);
    std::optional<double> sigma;
    if (fields.size() == 5 && !detail::trim(fields[4]).empty()) {
      sigma = detail::try_parse_double(fields[4]);
      if (!sigma) throw ParseError(origin + ": bad sigma field", line_no);
      if (*sigma < 0.0) throw ParseError(origin + ": sigma must be >= 0", line_no);
    }

    PendingSet* set = nullptr;
    for (PendingSet& p : pending)
      if (p.kind == *kind && p.label == label) set = &p;
    if (set == nullptr) {
      pending.push_back({*kind, label, {}, {}, sigma, true, line_no});
      set = &pending.back();
    } else {
      if (set->sigma != sigma)
        throw ParseError(origin + ": inconsistent sigma within set '" + label + "'", line_no);
    }
    set->xs.push_back(*x);
    set->ys.push_back(*value);
  }

  for (PendingSet& p : pending) {
    ObservationSet set;
    set.kind = p.kind;
    set.label = p.label;
    set.locations = std::move(p.xs);
    set.values = std::move(p.ys);
    set.noise = p.sigma ? NoiseSpec::known(*p.sigma) : NoiseSpec::learnable();
    problem.observation_sets.push_back(std::move(set));
  }
  problem.validate();
  return problem;
}

inline Problem load_problem_csv(const std::string& path, const SidecarConfig& cfg) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset file: " + path);
  return load_problem_csv_stream(in, cfg, path);
}

/// Writes the dataset CSV. Boundary conditions flatten to virtual sigma-0 rows,
/// so reloading the file reproduces the same expanded block structure.
inline void write_problem_csv_stream(const Problem& problem, std::ostream& out) {
  out << "kind,label,x,value,sigma\n";
  for (const ObservationSet& s : problem.expanded_sets()) {
    for (std::size_t i = 0; i < s.size(); ++i) {
      out << kind_tag(s.kind) << ',' << s.label << ',' << detail::format_double(s.locations[i])
          << ',' << detail::format_double(s.values[i]) << ',';
      if (s.noise.is_known()) out << detail::format_double(s.noise.sigma);
      out << '\n';
    }
  }
}

inline void write_problem_csv(const Problem& problem, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write dataset file: " + path);
  write_problem_csv_stream(problem, out);
  if (!out) throw IoError("failed while writing dataset file: " + path);
}

/// Writes the sidecar config (without bc entries; those live in the CSV).
inline void write_sidecar(const Problem& problem, std::optional<double> ei_ref,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write config file: " + path);
  out << "L = " << detail::format_double(problem.length) << '\n';
  if (problem.fiber_distance)
    out << "c = " << detail::format_double(*problem.fiber_distance) << '\n';
  if (ei_ref) out << "ei_ref = " << detail::format_double(*ei_ref) << '\n';
  if (!out) throw IoError("failed while writing config file: " + path);
}

}  // namespace beamgp
