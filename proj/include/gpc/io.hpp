#pragma once

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gpc/engineering.hpp"
#include "gpc/grid.hpp"

namespace gpc {

// Full-precision scientific formatting; %.17e round-trips every double
// bit-exactly through strtod, which the CSV contract relies on.
inline std::string format_full(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17e", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Trajectory CSV
// ---------------------------------------------------------------------------

inline std::string trajectory_csv_header(int d, bool bits) {
  const char* unit = bits ? "bits" : "nats";
  std::ostringstream os;
  os << "t";
  for (int a = 1; a <= d + 1; ++a) os << ",lambda_markov_" << a;
  for (int a = 1; a <= d + 1; ++a) os << ",lambda_combined_" << a;
  os << ",capacity_markov_" << unit << ",capacity_combined_" << unit << ",advantage_" << unit
     << ",cp_lower_margin,cp_upper_margin,bound_flag";
  return os.str();
}

inline void write_trajectory_csv(std::ostream& out, const Trajectory& traj,
                                 bool bits = false) {
  const double unit = bits ? 1.0 / std::numbers::ln2 : 1.0;
  out << trajectory_csv_header(traj.d, bits) << "\n";
  for (std::size_t i = 0; i < traj.grid.size(); ++i) {
    out << format_full(traj.grid.time(i));
    for (double v : traj.markov[i].lambdas) out << ',' << format_full(v);
    for (double v : traj.combined[i].lambdas) out << ',' << format_full(v);
    out << ',' << format_full(traj.capacity_markov[i] * unit) << ','
        << format_full(traj.capacity_combined[i] * unit) << ','
        << format_full(traj.advantage[i] * unit) << ',' << format_full(traj.cp_lower_margin[i])
        << ',' << format_full(traj.cp_upper_margin[i]) << ','
        << int(traj.combined_is_bound[i]) << "\n";
  }
}

// JSON-lines alternative to the CSV: one object per grid point, same field
// names. Non-finite values serialize as null.
inline void write_trajectory_jsonl(std::ostream& out, const Trajectory& traj,
                                   bool bits = false) {
  const double unit = bits ? 1.0 / std::numbers::ln2 : 1.0;
  const std::string suffix = bits ? "bits" : "nats";
  for (std::size_t i = 0; i < traj.grid.size(); ++i) {
    nlohmann::json j;
    j["t"] = traj.grid.time(i);
    j["lambda_markov"] = traj.markov[i].lambdas;
    j["lambda_combined"] = traj.combined[i].lambdas;
    j["capacity_markov_" + suffix] = traj.capacity_markov[i] * unit;
    j["capacity_combined_" + suffix] = traj.capacity_combined[i] * unit;
    j["advantage_" + suffix] = traj.advantage[i] * unit;
    j["cp_lower_margin"] = traj.cp_lower_margin[i];
    j["cp_upper_margin"] = traj.cp_upper_margin[i];
    j["bound_flag"] = traj.combined_is_bound[i] != 0;
    out << j.dump() << "\n";
  }
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream is(line);
  while (std::getline(is, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline double parse_double(const std::string& s, std::size_t line_no) {
  const char* begin = s.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  while (end && *end != '\0' && std::isspace(static_cast<unsigned char>(*end))) ++end;
  if (end == begin || (end && *end != '\0'))
    throw std::invalid_argument("line " + std::to_string(line_no) + ": cannot parse number '" +
                                s + "'");
  return v;
}

inline bool looks_numeric(const std::string& s) {
  const char* begin = s.c_str();
  char* end = nullptr;
  std::strtod(begin, &end);
  return end != begin;
}

}  // namespace detail

inline CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto fields = detail::split_csv_line(line);
    if (table.header.empty() && table.rows.empty() && !detail::looks_numeric(fields[0])) {
      table.header = fields;
      continue;
    }
    std::vector<double> row;
    row.reserve(fields.size());
    for (const auto& f : fields) row.push_back(detail::parse_double(f, line_no));
    if (!table.rows.empty() && row.size() != table.rows.front().size())
      throw std::invalid_argument("line " + std::to_string(line_no) +
                                  ": inconsistent column count");
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return read_csv(in);
}

// ---------------------------------------------------------------------------
// Sweep CSV
// ---------------------------------------------------------------------------

inline void write_sweep_csv(std::ostream& out, const SweepRequest& req,
                            const SweepResult& result) {
  const bool has_gamma = req.family != ScenarioFamily::kBeyondSemigroup;
  const bool has_z = req.family == ScenarioFamily::kExpDecay;
  const bool has_r = req.family == ScenarioFamily::kBeyondSemigroup;
  out << "scenario";
  if (has_gamma) out << ",gamma";
  if (has_z) out << ",z";
  out << ",omega";
  if (has_r) out << ",r";
  out << ",d,alpha_star,cp_sufficient_holds,full_cp_ok_until_s,max_advantage_nats,"
         "window_total_length_s,bound_flag\n";
  for (const auto& row : result.rows) {
    out << family_name(req.family);
    if (has_gamma) out << ',' << format_full(row.gamma);
    if (has_z) out << ',' << format_full(row.z);
    out << ',' << format_full(row.omega);
    if (has_r) out << ',' << format_full(row.r);
    out << ',' << row.d << ',' << row.alpha_star << ',' << int(row.cp_sufficient_holds) << ','
        << format_full(row.full_cp_ok_until) << ',' << format_full(row.max_advantage) << ','
        << format_full(row.window_total_length) << ',' << int(row.bound_flag) << "\n";
  }
}

inline void write_sweep_jsonl(std::ostream& out, const SweepRequest& req,
                              const SweepResult& result) {
  for (const auto& row : result.rows) {
    nlohmann::json j;
    j["scenario"] = family_name(req.family);
    if (!std::isnan(row.gamma)) j["gamma"] = row.gamma;
    if (!std::isnan(row.z)) j["z"] = row.z;
    j["omega"] = row.omega;
    if (!std::isnan(row.r)) j["r"] = row.r;
    j["d"] = row.d;
    j["alpha_star"] = row.alpha_star;
    j["cp_sufficient_holds"] = row.cp_sufficient_holds;
    j["full_cp_ok_until_s"] = row.full_cp_ok_until;
    j["max_advantage_nats"] = row.max_advantage;
    j["window_total_length_s"] = row.window_total_length;
    j["bound_flag"] = row.bound_flag;
    out << j.dump() << "\n";
  }
}

// ---------------------------------------------------------------------------
// ell tables: t, ell_1, ..., ell_{d+1} per line, comma separated
// ---------------------------------------------------------------------------

struct EllTable {
  UniformGrid grid;
  std::vector<std::vector<double>> ell;  // [alpha][i]
};

inline EllTable read_ell_table(std::istream& in, int d) {
  const CsvTable csv = read_csv(in);
  if (csv.rows.size() < 3) throw std::invalid_argument("ell table: need at least 3 rows");
  const std::size_t cols = static_cast<std::size_t>(d) + 2;
  if (csv.rows.front().size() != cols)
    throw std::invalid_argument("ell table: expected " + std::to_string(cols) +
                                " columns (t plus d+1 values) for d=" + std::to_string(d));
  const std::size_t n = csv.rows.size();
  if (std::abs(csv.rows.front()[0]) > 1e-12)
    throw std::invalid_argument("ell table: time column must start at 0");
  const double t_max = csv.rows.back()[0];
  if (!(t_max > 0.0)) throw std::invalid_argument("ell table: final time must be > 0");
  const double h = t_max / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(csv.rows[i][0] - h * static_cast<double>(i)) > 1e-9 * std::max(1.0, t_max))
      throw std::invalid_argument("ell table: time column must be uniform");

  EllTable table;
  table.grid = UniformGrid(t_max, n - 1);
  table.ell.assign(d + 1, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (int a = 0; a <= d; ++a) table.ell[a][i] = csv.rows[i][a + 1];
  return table;
}

inline EllTable read_ell_table_file(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  return read_ell_table(in, d);
}

// ---------------------------------------------------------------------------
// Sweep configuration: flat key=value text, or JSON selected by extension
// ---------------------------------------------------------------------------

struct SweepConfig {
  SweepRequest request;
  std::size_t steps = 0;
  double t_max = 0.0;
};

namespace detail {

inline ParamRange parse_range_text(const std::string& value, const std::string& key) {
  // "min:max:count" or a single value
  ParamRange r;
  const auto c1 = value.find(':');
  if (c1 == std::string::npos) {
    r.min = r.max = parse_double(value, 0);
    r.count = 1;
    return r;
  }
  const auto c2 = value.find(':', c1 + 1);
  if (c2 == std::string::npos)
    throw std::invalid_argument("config key '" + key + "': ranges are min:max:count");
  r.min = parse_double(value.substr(0, c1), 0);
  r.max = parse_double(value.substr(c1 + 1, c2 - c1 - 1), 0);
  const double cnt = parse_double(value.substr(c2 + 1), 0);
  r.count = static_cast<int>(cnt);
  if (r.count < 1 || cnt != r.count)
    throw std::invalid_argument("config key '" + key + "': count must be a positive integer");
  if (!(r.min <= r.max))
    throw std::invalid_argument("config key '" + key + "': min must be <= max");
  return r;
}

inline std::string trim(std::string s) {
  const auto issp = [](unsigned char c) { return std::isspace(c); };
  while (!s.empty() && issp(s.front())) s.erase(s.begin());
  while (!s.empty() && issp(s.back())) s.pop_back();
  return s;
}

}  // namespace detail

// Assembles a SweepConfig from parsed key/value pairs; unknown keys are
// rejected so typos cannot silently fall back to defaults.
inline SweepConfig build_sweep_config(
    const std::vector<std::pair<std::string, std::string>>& entries,
    const std::vector<std::pair<std::string, ParamRange>>& ranges) {
  SweepConfig cfg;
  bool have_scenario = false, have_tmax = false, have_steps = false;
  bool has_gamma = false, has_z = false, has_omega = false, has_r = false;

  for (const auto& [key, value] : entries) {
    if (key == "scenario") {
      const auto fam = parse_family(value);
      if (!fam || *fam == ScenarioFamily::kCustom)
        throw std::invalid_argument("config key 'scenario': unknown or unsweepable value '" +
                                    value + "'");
      cfg.request.family = *fam;
      have_scenario = true;
    } else if (key == "d") {
      cfg.request.d = static_cast<int>(detail::parse_double(value, 0));
    } else if (key == "alpha_star") {
      cfg.request.alpha_star = static_cast<int>(detail::parse_double(value, 0));
    } else if (key == "t_max") {
      cfg.t_max = detail::parse_double(value, 0);
      have_tmax = true;
    } else if (key == "steps") {
      const double s = detail::parse_double(value, 0);
      cfg.steps = static_cast<std::size_t>(s);
      have_steps = true;
    } else if (key == "advantage_tol") {
      cfg.request.advantage_tol = detail::parse_double(value, 0);
    } else if (key == "cp_tol") {
      cfg.request.cp_tol = detail::parse_double(value, 0);
    } else if (key != "gamma" && key != "z" && key != "omega" && key != "r") {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  for (const auto& [key, range] : ranges) {
    if (key == "gamma") {
      cfg.request.gamma = range;
      has_gamma = true;
    } else if (key == "z") {
      cfg.request.z = range;
      has_z = true;
    } else if (key == "omega") {
      cfg.request.omega = range;
      has_omega = true;
    } else if (key == "r") {
      cfg.request.r = range;
      has_r = true;
    }
  }

  if (!have_scenario) throw std::invalid_argument("config: missing key 'scenario'");
  if (!have_tmax) throw std::invalid_argument("config: missing key 't_max'");
  if (!have_steps) throw std::invalid_argument("config: missing key 'steps'");
  if (cfg.steps < 2) throw std::invalid_argument("config: steps must be >= 2");
  if (!(cfg.t_max > 0.0)) throw std::invalid_argument("config: t_max must be > 0");
  cfg.request.grid = UniformGrid(cfg.t_max, cfg.steps);

  const ScenarioFamily fam = cfg.request.family;
  if (!has_omega) throw std::invalid_argument("config: missing key 'omega'");
  if (fam != ScenarioFamily::kBeyondSemigroup && !has_gamma)
    throw std::invalid_argument("config: missing key 'gamma'");
  if (fam == ScenarioFamily::kExpDecay && !has_z)
    throw std::invalid_argument("config: missing key 'z'");
  if (fam == ScenarioFamily::kBeyondSemigroup && !has_r)
    throw std::invalid_argument("config: missing key 'r'");
  if (fam == ScenarioFamily::kBeyondSemigroup && has_gamma)
    throw std::invalid_argument("config: 'gamma' does not apply to beyond-semigroup");
  if (fam != ScenarioFamily::kExpDecay && has_z)
    throw std::invalid_argument("config: 'z' only applies to exp-decay");
  if (fam != ScenarioFamily::kBeyondSemigroup && has_r)
    throw std::invalid_argument("config: 'r' only applies to beyond-semigroup");
  return cfg;
}

inline SweepConfig parse_sweep_config_text(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::pair<std::string, ParamRange>> ranges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string trimmed = detail::trim(line);
    if (trimmed.empty() || trimmed[0] == '#') continue;
    const auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key=value");
    const std::string key = detail::trim(trimmed.substr(0, eq));
    const std::string value = detail::trim(trimmed.substr(eq + 1));
    if (key == "gamma" || key == "z" || key == "omega" || key == "r")
      ranges.emplace_back(key, detail::parse_range_text(value, key));
    entries.emplace_back(key, value);
  }
  return build_sweep_config(entries, ranges);
}

inline SweepConfig parse_sweep_config_json(std::istream& in) {
  nlohmann::json j;
  in >> j;
  if (!j.is_object()) throw std::invalid_argument("config: JSON root must be an object");
  std::vector<std::pair<std::string, std::string>> entries;
  std::vector<std::pair<std::string, ParamRange>> ranges;
  for (const auto& [key, val] : j.items()) {
    if (key == "gamma" || key == "z" || key == "omega" || key == "r") {
      ParamRange r;
      if (val.is_number()) {
        r.min = r.max = val.get<double>();
        r.count = 1;
      } else if (val.is_object()) {
        for (const auto& [k2, unused] : val.items())
          if (k2 != "min" && k2 != "max" && k2 != "count")
            throw std::invalid_argument("config key '" + key + "': unknown range field '" +
                                        k2 + "'");
        r.min = val.at("min").get<double>();
        r.max = val.contains("max") ? val.at("max").get<double>() : r.min;
        r.count = val.contains("count") ? val.at("count").get<int>() : 1;
        if (r.count < 1)
          throw std::invalid_argument("config key '" + key + "': count must be >= 1");
        if (!(r.min <= r.max))
          throw std::invalid_argument("config key '" + key + "': min must be <= max");
      } else {
        throw std::invalid_argument("config key '" + key +
                                    "': expected a number or {min,max,count}");
      }
      ranges.emplace_back(key, r);
      entries.emplace_back(key, std::string());
    } else if (val.is_string()) {
      entries.emplace_back(key, val.get<std::string>());
    } else {
      entries.emplace_back(key, val.dump());
    }
  }
  return build_sweep_config(entries, ranges);
}

inline SweepConfig parse_sweep_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open file: " + path);
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0)
    return parse_sweep_config_json(in);
  return parse_sweep_config_text(in);
}

}  // namespace gpc
