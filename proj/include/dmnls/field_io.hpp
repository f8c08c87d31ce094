#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "dmnls/grid.hpp"
#include "dmnls/ground_state.hpp"
#include "dmnls/trajectory.hpp"
#include "dmnls/version.hpp"

namespace dmnls {

// Field snapshot format (.fld): one JSON header line terminated by '\n',
// then the raw samples in storage order as little-endian interleaved
// re, im doubles. The header pins the grid, so a reader never has to guess
// the payload size.

struct FieldMeta {
  double t = 0.0;
  double eps = 1.0;
  std::string desc;
};

namespace detail {

inline void byteswap_doubles(std::vector<double>& v) {
  for (double& d : v) {
    std::uint64_t bits;
    std::memcpy(&bits, &d, 8);
    bits = ((bits & 0x00000000000000ffULL) << 56) | ((bits & 0x000000000000ff00ULL) << 40) |
           ((bits & 0x0000000000ff0000ULL) << 24) | ((bits & 0x00000000ff000000ULL) << 8) |
           ((bits & 0x000000ff00000000ULL) >> 8) | ((bits & 0x0000ff0000000000ULL) >> 24) |
           ((bits & 0x00ff000000000000ULL) >> 40) | ((bits & 0xff00000000000000ULL) >> 56);
    std::memcpy(&d, &bits, 8);
  }
}

inline constexpr bool host_is_little_endian() {
  return std::endian::native == std::endian::little;
}

} // namespace detail

inline void write_field(const std::string& path, const Field& f,
                        const FieldMeta& meta = {}) {
  require_valid(f, "write field");
  nlohmann::ordered_json header;
  header["kind"] = "field";
  header["dim"] = f.grid.dim;
  header["n"] = f.grid.n;
  header["box"] = f.grid.box;
  header["t"] = meta.t;
  header["eps"] = meta.eps;
  header["desc"] = meta.desc;

  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << header.dump() << '\n';
  std::vector<double> payload;
  payload.reserve(2 * f.samples.size());
  for (const Complex& z : f.samples) {
    payload.push_back(z.real());
    payload.push_back(z.imag());
  }
  if (!detail::host_is_little_endian()) detail::byteswap_doubles(payload);
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (!out) throw IoError("short write to '" + path + "'");
}

inline std::pair<Field, FieldMeta> read_field(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "' for reading");
  std::string header_line;
  if (!std::getline(in, header_line))
    throw IoError("'" + path + "': missing header line");
  nlohmann::json header;
  try {
    header = nlohmann::json::parse(header_line);
  } catch (const nlohmann::json::exception& e) {
    throw IoError("'" + path + "': bad header: " + e.what());
  }
  if (header.value("kind", "") != "field")
    throw IoError("'" + path + "': not a field snapshot");
  SpectralGrid grid;
  try {
    grid = SpectralGrid::make(header.at("dim").get<int>(), header.at("n").get<int>(),
                              header.at("box").get<double>());
  } catch (const std::exception& e) {
    throw IoError("'" + path + "': bad grid in header: " + std::string(e.what()));
  }
  FieldMeta meta;
  meta.t = header.value("t", 0.0);
  meta.eps = header.value("eps", 1.0);
  meta.desc = header.value("desc", "");

  std::vector<double> payload(2 * grid.size());
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload.size() * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != payload.size() * sizeof(double))
    throw IoError("'" + path + "': truncated payload");
  char extra;
  if (in.read(&extra, 1))
    throw IoError("'" + path + "': trailing bytes after payload");
  if (!detail::host_is_little_endian()) detail::byteswap_doubles(payload);

  Field f = Field::zero(grid);
  for (std::size_t i = 0; i < f.samples.size(); ++i)
    f.samples[i] = Complex{payload[2 * i], payload[2 * i + 1]};
  require_valid(f, "read field");
  return {std::move(f), std::move(meta)};
}

namespace detail {

inline std::string sidecar_path(const std::string& fld_path) {
  const std::size_t dot = fld_path.rfind('.');
  const std::string stem =
      (dot == std::string::npos) ? fld_path : fld_path.substr(0, dot);
  return stem + ".json";
}

} // namespace detail

// A converged profile is stored as profile.fld plus a JSON sidecar holding
// the convergence certificate, so later runs can reuse it without solving.
inline void write_ground_state(const std::string& fld_path, const GroundState& gs) {
  write_field(fld_path, gs.profile, FieldMeta{0.0, 1.0, "ground state"});
  nlohmann::ordered_json side;
  side["kind"] = "ground_state";
  side["residual"] = gs.residual;
  side["stabilizer_gap"] = gs.stabilizer_gap;
  side["mass"] = gs.mass;
  side["min_sample"] = gs.min_sample;
  side["tolerance"] = gs.tolerance;
  side["iterations"] = gs.iterations;
  side["version"] = std::string(library_version);
  std::ofstream out(detail::sidecar_path(fld_path), std::ios::binary);
  if (!out) throw IoError("cannot open '" + detail::sidecar_path(fld_path) + "' for writing");
  out << side.dump(2) << '\n';
  if (!out) throw IoError("short write to '" + detail::sidecar_path(fld_path) + "'");
}

inline GroundState load_ground_state(const std::string& fld_path) {
  auto [profile, meta] = read_field(fld_path);
  std::ifstream in(detail::sidecar_path(fld_path), std::ios::binary);
  if (!in) throw IoError("cannot open sidecar '" + detail::sidecar_path(fld_path) + "'");
  nlohmann::json side;
  try {
    in >> side;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad ground state sidecar: " + std::string(e.what()));
  }
  if (side.value("kind", "") != "ground_state")
    throw IoError("'" + detail::sidecar_path(fld_path) + "': not a ground state sidecar");

  GroundState gs;
  gs.profile = std::move(profile);
  gs.residual = side.at("residual").get<double>();
  gs.stabilizer_gap = side.at("stabilizer_gap").get<double>();
  gs.mass = side.at("mass").get<double>();
  gs.min_sample = side.value("min_sample", 0.0);
  gs.tolerance = side.at("tolerance").get<double>();
  gs.iterations = side.at("iterations").get<int>();

  if (!(gs.residual <= gs.tolerance))
    throw IoError("stored profile does not meet its own tolerance");
  for (const Complex& z : gs.profile.samples)
    if (std::abs(z.imag()) > 1e-12)
      throw IoError("stored profile is not real valued");
  const double l2 = l2_norm(gs.profile);
  if (std::abs(l2 * l2 - gs.mass) > 1e-9 * std::max(1.0, gs.mass))
    throw IoError("stored profile mass disagrees with its sidecar");
  return gs;
}

// Trajectory persistence: a directory with trajectory.json plus one .fld
// file per snapshot.
inline void write_trajectory(const std::string& dir, const Trajectory& traj) {
  if (traj.count() == 0) throw InvalidParameter("refusing to write an empty trajectory");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());

  nlohmann::ordered_json manifest;
  manifest["kind"] = "trajectory";
  manifest["dim"] = traj.grid.dim;
  manifest["n"] = traj.grid.n;
  manifest["box"] = traj.grid.box;
  manifest["dt"] = traj.dt;
  manifest["eps"] = traj.eps;
  manifest["map"] = traj.map_desc;
  manifest["snapshot_stride"] = traj.snapshot_stride;
  manifest["nonlinear"] = traj.nonlinear;
  manifest["times"] = traj.times;
  manifest["mass_log"] = traj.mass_log;
  manifest["tail_frac_max"] = traj.tail_frac_max;
  manifest["version"] = std::string(library_version);

  std::vector<std::string> names;
  for (std::size_t i = 0; i < traj.count(); ++i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%05zu.fld", i);
    names.emplace_back(buf);
    write_field(dir + "/" + names.back(), traj.snapshots[i],
                FieldMeta{traj.times[i], traj.eps, "snapshot"});
  }
  manifest["snapshots"] = names;
  const std::string path = dir + "/trajectory.json";
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << manifest.dump(2) << '\n';
  if (!out) throw IoError("short write to '" + path + "'");
}

inline Trajectory read_trajectory(const std::string& dir) {
  const std::string path = dir + "/trajectory.json";
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  nlohmann::json manifest;
  try {
    in >> manifest;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("bad trajectory manifest: " + std::string(e.what()));
  }
  if (manifest.value("kind", "") != "trajectory")
    throw IoError("'" + path + "': not a trajectory manifest");

  Trajectory traj;
  traj.grid = SpectralGrid::make(manifest.at("dim").get<int>(), manifest.at("n").get<int>(),
                                 manifest.at("box").get<double>());
  traj.dt = manifest.at("dt").get<double>();
  traj.eps = manifest.at("eps").get<double>();
  traj.map_desc = manifest.value("map", "unit");
  traj.snapshot_stride = manifest.value("snapshot_stride", 1);
  traj.nonlinear = manifest.value("nonlinear", true);
  traj.times = manifest.at("times").get<std::vector<double>>();
  traj.mass_log = manifest.at("mass_log").get<std::vector<double>>();
  traj.tail_frac_max = manifest.value("tail_frac_max", 0.0);
  for (const auto& name : manifest.at("snapshots")) {
    auto [field, meta] = read_field(dir + "/" + name.get<std::string>());
    if (!(field.grid == traj.grid))
      throw IoError("trajectory snapshot grid disagrees with manifest");
    traj.snapshots.push_back(std::move(field));
  }
  if (traj.snapshots.size() != traj.times.size())
    throw IoError("trajectory snapshot count disagrees with stamp count");
  return traj;
}

} // namespace dmnls
