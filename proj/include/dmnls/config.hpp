#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "dmnls/dispersion.hpp"
#include "dmnls/errors.hpp"

namespace dmnls {

enum class StudyKind { gamma, propagator, averaging, order };

inline std::string study_name(StudyKind k) {
  switch (k) {
    case StudyKind::gamma: return "gamma";
    case StudyKind::propagator: return "propagator";
    case StudyKind::averaging: return "averaging";
    case StudyKind::order: return "order";
  }
  return "unknown";
}

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Accepts plain decimals plus the two shorthands that keep configs exact:
// dyadic powers "2^-6" and small rationals "10/3".
inline double parse_number(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t.empty()) throw ConfigError(key, "key '" + key + "': empty numeric value");
  std::size_t caret = t.find('^');
  if (caret != std::string::npos) {
    try {
      const double base = std::stod(t.substr(0, caret));
      const double expo = std::stod(t.substr(caret + 1));
      return std::pow(base, expo);
    } catch (const std::exception&) {
      throw ConfigError(key, "key '" + key + "': cannot parse power '" + t + "'");
    }
  }
  std::size_t slash = t.find('/');
  if (slash != std::string::npos) {
    try {
      const double num = std::stod(t.substr(0, slash));
      const double den = std::stod(t.substr(slash + 1));
      if (den == 0.0) throw std::runtime_error("zero denominator");
      return num / den;
    } catch (const std::exception&) {
      throw ConfigError(key, "key '" + key + "': cannot parse ratio '" + t + "'");
    }
  }
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(t, &used);
  } catch (const std::exception&) {
    throw ConfigError(key, "key '" + key + "': cannot parse number '" + t + "'");
  }
  if (used != t.size())
    throw ConfigError(key, "key '" + key + "': trailing junk in number '" + t + "'");
  return v;
}

inline bool parse_flag(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  if (t == "on" || t == "true" || t == "1") return true;
  if (t == "off" || t == "false" || t == "0") return false;
  throw ConfigError(key, "key '" + key + "': expected on/off, got '" + t + "'");
}

inline std::vector<std::string> split_commas(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(trim(cur));
  return parts;
}

inline std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 14695981039346656037ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

} // namespace detail

// Named management profiles available to configs and the command line.
inline std::vector<Segment> named_map_segments(const std::string& name) {
  if (name == "unit") return {};
  if (name == "twopiece") return {{0.5, 3.0}, {0.5, -1.0}};
  if (name == "symmetric3") return {{0.25, 3.0}, {0.5, -1.0}, {0.25, 3.0}};
  throw ConfigError("map", "unknown map name '" + name + "'");
}

// Parses a command-line map specification: a named profile, an inline
// "length:value,length:value" list, or "@file" pointing at a config-style
// file of `segment = length, value` lines.
inline std::vector<Segment> parse_map_spec(const std::string& spec);

// A fully resolved study description. Everything a run needs is in here, and
// the canonical text below reproduces it key for key, so equal hashes mean
// equal runs.
struct ExperimentConfig {
  StudyKind kind = StudyKind::averaging;
  std::vector<Segment> segments;  // empty means the unit map
  int dim = 1;
  int n = 512;
  double box = 20.0;
  std::vector<double> eps;        // strictly decreasing, in (0,1)
  double horizon_a = -1.0;        // T_eps = a log(1/eps); <0 resolves by dim
  double t_cap = 16.0;
  double t_end = 1.0;             // gamma / propagator / order horizon
  double dt_cap = 1e-2;
  double dt_eps_fraction = 0.25;
  double theta = 0.5;             // propagator data filter regularity
  double pair_q = 10.0 / 3.0;
  double pair_r = 10.0 / 3.0;
  int pair_dim = 3;
  double norm_s = 0.5;
  int snapshot_stride = 10;
  int samples_per_period = 16;
  double order_dt0 = 4e-3;
  std::string data = "gaussian";  // propagator data: gaussian | rough
  bool linear_only = false;
  bool timings = false;
  std::string out_dir;
  std::string ground_state_path;

  double horizon_coefficient() const {
    if (horizon_a > 0.0) return horizon_a;
    return dim == 3 ? 0.5 : 1.0;
  }

  DispersionMap map() const {
    return segments.empty() ? DispersionMap::unit()
                            : DispersionMap::validate_admissible(segments);
  }

  static ExperimentConfig parse_text(const std::string& text);
  static ExperimentConfig parse_file(const std::string& path);

  // Deterministic full serialization: scalar keys sorted, then segment lines
  // in map order. Two configs hash equal iff every semantic field agrees;
  // out_dir stays out on purpose, the destination is not part of the
  // computation.
  std::string canonical_text() const {
    std::vector<std::string> lines;
    lines.push_back("box=" + detail::format_double(box));
    lines.push_back("data=" + data);
    lines.push_back("dim=" + std::to_string(dim));
    lines.push_back("dt0=" + detail::format_double(order_dt0));
    lines.push_back("dt_cap=" + detail::format_double(dt_cap));
    lines.push_back("dt_eps_fraction=" + detail::format_double(dt_eps_fraction));
    {
      std::string e = "eps=";
      for (std::size_t i = 0; i < eps.size(); ++i) {
        if (i) e += ',';
        e += detail::format_double(eps[i]);
      }
      lines.push_back(e);
    }
    lines.push_back("ground_state=" + ground_state_path);
    lines.push_back("horizon_a=" + detail::format_double(horizon_coefficient()));
    lines.push_back("linear_only=" + std::string(linear_only ? "on" : "off"));
    lines.push_back("n=" + std::to_string(n));
    lines.push_back("pair_dim=" + std::to_string(pair_dim));
    lines.push_back("pair_q=" + detail::format_double(pair_q));
    lines.push_back("pair_r=" + detail::format_double(pair_r));
    lines.push_back("s=" + detail::format_double(norm_s));
    lines.push_back("samples_per_period=" + std::to_string(samples_per_period));
    lines.push_back("snapshot_stride=" + std::to_string(snapshot_stride));
    lines.push_back("study=" + study_name(kind));
    lines.push_back("t_cap=" + detail::format_double(t_cap));
    lines.push_back("t_end=" + detail::format_double(t_end));
    lines.push_back("theta=" + detail::format_double(theta));
    lines.push_back("timings=" + std::string(timings ? "on" : "off"));
    std::string out;
    for (const std::string& l : lines) {
      out += l;
      out += '\n';
    }
    for (const Segment& s : segments)
      out += "segment=" + detail::format_double(s.length) + "," +
             detail::format_double(s.value) + "\n";
    return out;
  }

  std::uint64_t hash() const { return detail::fnv1a64(canonical_text()); }

  std::string hash_hex() const {
    char buf[24];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(hash()));
    return buf;
  }
};

inline ExperimentConfig ExperimentConfig::parse_text(const std::string& text) {
  ExperimentConfig cfg;
  bool saw_study = false, saw_map_name = false;
  std::string map_name;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line.erase(hash_pos);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("", "line " + std::to_string(lineno) +
                                ": expected 'key = value', got '" + line + "'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));

    if (key == "study") {
      saw_study = true;
      if (value == "gamma") cfg.kind = StudyKind::gamma;
      else if (value == "propagator") cfg.kind = StudyKind::propagator;
      else if (value == "averaging") cfg.kind = StudyKind::averaging;
      else if (value == "order") cfg.kind = StudyKind::order;
      else throw ConfigError("study", "key 'study': unknown study '" + value + "'");
    } else if (key == "map") {
      saw_map_name = true;
      map_name = value;
    } else if (key == "segment") {
      const auto parts = detail::split_commas(value);
      if (parts.size() != 2)
        throw ConfigError("segment", "key 'segment': expected 'length, value'");
      cfg.segments.push_back(Segment{detail::parse_number("segment", parts[0]),
                                     detail::parse_number("segment", parts[1])});
    } else if (key == "eps") {
      cfg.eps.clear();
      for (const std::string& p : detail::split_commas(value))
        cfg.eps.push_back(detail::parse_number("eps", p));
    } else if (key == "dim") {
      cfg.dim = static_cast<int>(detail::parse_number(key, value));
    } else if (key == "n") {
      cfg.n = static_cast<int>(detail::parse_number(key, value));
    } else if (key == "box") {
      cfg.box = detail::parse_number(key, value);
    } else if (key == "a") {
      cfg.horizon_a = detail::parse_number(key, value);
    } else if (key == "t_cap") {
      cfg.t_cap = detail::parse_number(key, value);
    } else if (key == "t_end") {
      cfg.t_end = detail::parse_number(key, value);
    } else if (key == "dt_cap") {
      cfg.dt_cap = detail::parse_number(key, value);
    } else if (key == "dt_eps_fraction") {
      cfg.dt_eps_fraction = detail::parse_number(key, value);
    } else if (key == "theta") {
      cfg.theta = detail::parse_number(key, value);
    } else if (key == "pair_q") {
      cfg.pair_q = detail::parse_number(key, value);
    } else if (key == "pair_r") {
      cfg.pair_r = detail::parse_number(key, value);
    } else if (key == "pair_dim") {
      cfg.pair_dim = static_cast<int>(detail::parse_number(key, value));
    } else if (key == "s") {
      cfg.norm_s = detail::parse_number(key, value);
    } else if (key == "snapshot_stride") {
      cfg.snapshot_stride = static_cast<int>(detail::parse_number(key, value));
    } else if (key == "samples_per_period") {
      cfg.samples_per_period = static_cast<int>(detail::parse_number(key, value));
    } else if (key == "dt0") {
      cfg.order_dt0 = detail::parse_number(key, value);
    } else if (key == "data") {
      if (value != "gaussian" && value != "rough")
        throw ConfigError("data", "key 'data': expected gaussian or rough");
      cfg.data = value;
    } else if (key == "linear_only") {
      cfg.linear_only = detail::parse_flag(key, value);
    } else if (key == "timings") {
      cfg.timings = detail::parse_flag(key, value);
    } else if (key == "out_dir") {
      cfg.out_dir = value;
    } else if (key == "ground_state") {
      cfg.ground_state_path = value;
    } else {
      throw ConfigError(key, "unknown key '" + key + "'");
    }
  }

  if (!saw_study) throw ConfigError("study", "key 'study' is required");
  if (saw_map_name) {
    if (!cfg.segments.empty())
      throw ConfigError("map", "key 'map': give a named map or segment lines, not both");
    cfg.segments = named_map_segments(map_name);
  }

  if (cfg.dim < 1 || cfg.dim > 3)
    throw ConfigError("dim", "key 'dim': must be 1, 2, or 3");
  if (cfg.n < 8 || cfg.n % 2 != 0)
    throw ConfigError("n", "key 'n': must be even and at least 8");
  if (!(cfg.box > 0.0))
    throw ConfigError("box", "key 'box': must be positive");
  for (double e : cfg.eps)
    if (!(e > 0.0 && e < 1.0))
      throw ConfigError("eps", "key 'eps': values must lie in (0,1), got " +
                                   detail::format_double(e));
  for (std::size_t i = 1; i < cfg.eps.size(); ++i)
    if (!(cfg.eps[i] < cfg.eps[i - 1]))
      throw ConfigError("eps", "key 'eps': values must be strictly decreasing");
  if (cfg.kind != StudyKind::order && cfg.eps.empty())
    throw ConfigError("eps", "key 'eps' is required for this study");
  if (cfg.horizon_a != -1.0 && !(cfg.horizon_a > 0.0))
    throw ConfigError("a", "key 'a': must be positive");
  if (!(cfg.t_cap > 0.0)) throw ConfigError("t_cap", "key 't_cap': must be positive");
  if (!(cfg.t_end > 0.0)) throw ConfigError("t_end", "key 't_end': must be positive");
  if (!(cfg.dt_cap > 0.0)) throw ConfigError("dt_cap", "key 'dt_cap': must be positive");
  if (!(cfg.dt_eps_fraction > 0.0 && cfg.dt_eps_fraction <= 1.0))
    throw ConfigError("dt_eps_fraction", "key 'dt_eps_fraction': must be in (0,1]");
  if (!(cfg.theta >= 0.0)) throw ConfigError("theta", "key 'theta': must be >= 0");
  if (!(cfg.norm_s >= 0.0)) throw ConfigError("s", "key 's': must be >= 0");
  if (cfg.snapshot_stride < 1)
    throw ConfigError("snapshot_stride", "key 'snapshot_stride': must be >= 1");
  if (cfg.samples_per_period < 1)
    throw ConfigError("samples_per_period", "key 'samples_per_period': must be >= 1");
  if (!(cfg.order_dt0 > 0.0)) throw ConfigError("dt0", "key 'dt0': must be positive");
  if (cfg.kind == StudyKind::order && !cfg.segments.empty())
    throw ConfigError("map", "key 'map': order study requires the unit map");

  cfg.map(); // surfaces MapRejected for inadmissible segment sets
  return cfg;
}

inline ExperimentConfig ExperimentConfig::parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_text(buf.str());
}

inline std::vector<Segment> parse_map_spec(const std::string& spec) {
  if (spec.empty()) throw ConfigError("map", "empty map specification");
  if (spec[0] == '@') {
    std::ifstream in(spec.substr(1), std::ios::binary);
    if (!in) throw IoError("cannot open map file '" + spec.substr(1) + "'");
    std::vector<Segment> segs;
    std::string line;
    while (std::getline(in, line)) {
      const std::size_t hash_pos = line.find('#');
      if (hash_pos != std::string::npos) line.erase(hash_pos);
      line = detail::trim(line);
      if (line.empty()) continue;
      const std::size_t eq = line.find('=');
      const std::string value = eq == std::string::npos ? line : detail::trim(line.substr(eq + 1));
      if (eq != std::string::npos && detail::trim(line.substr(0, eq)) != "segment")
        throw ConfigError("map", "map file may only contain 'segment = length, value' lines");
      const auto parts = detail::split_commas(value);
      if (parts.size() != 2)
        throw ConfigError("map", "map file line '" + line + "': expected 'length, value'");
      segs.push_back(Segment{detail::parse_number("map", parts[0]),
                             detail::parse_number("map", parts[1])});
    }
    return segs;
  }
  if (spec.find(':') == std::string::npos) return named_map_segments(spec);
  std::vector<Segment> segs;
  for (const std::string& piece : detail::split_commas(spec)) {
    const std::size_t colon = piece.find(':');
    if (colon == std::string::npos)
      throw ConfigError("map", "inline map piece '" + piece + "': expected 'length:value'");
    segs.push_back(Segment{detail::parse_number("map", piece.substr(0, colon)),
                           detail::parse_number("map", piece.substr(colon + 1))});
  }
  return segs;
}

} // namespace dmnls
