#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "dmnls/experiments.hpp"

namespace dmnls {

// CSV schema, one line per study row. Floats are printed with %.17g so a
// rerun of the same config reproduces the file byte for byte; the runtime
// column is zeroed unless the config asked for timings, for the same reason.
//
//   study,eps,T_eps,dt,error,slope_floor,mass_drift,tail_frac,runtime_s,status

inline std::string report_csv_text(const ConvergenceReport& rep) {
  std::string out =
      "study,eps,T_eps,dt,error,slope_floor,mass_drift,tail_frac,runtime_s,status\n";
  char buf[512];
  for (const StudyRow& r : rep.rows) {
    const double runtime = rep.timings ? r.runtime_s : 0.0;
    std::snprintf(buf, sizeof buf,
                  "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%s\n",
                  rep.study.c_str(), r.eps, r.t_end, r.dt, r.error, r.slope_floor,
                  r.mass_drift, r.tail_frac, runtime, r.status.c_str());
    out += buf;
  }
  return out;
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw IoError("short write to '" + path + "'");
}

inline void write_report_csv(const ConvergenceReport& rep, const std::string& path) {
  write_text(path, report_csv_text(rep));
}

inline nlohmann::ordered_json report_json(const ConvergenceReport& rep) {
  nlohmann::ordered_json j;
  j["study"] = rep.study;
  j["status"] = rep.status;
  j["version"] = rep.version;
  j["config_hash"] = rep.config_hash;
  j["slope_floor"] = rep.slope_floor;
  j["rows"] = nlohmann::ordered_json::array();
  for (const StudyRow& r : rep.rows) {
    nlohmann::ordered_json row;
    row["eps"] = r.eps;
    row["t_end"] = r.t_end;
    row["dt"] = r.dt;
    row["error"] = std::isfinite(r.error) ? nlohmann::ordered_json(r.error)
                                          : nlohmann::ordered_json();
    row["slope_floor"] = r.slope_floor;
    row["mass_drift"] = r.mass_drift;
    row["tail_frac"] = r.tail_frac;
    row["runtime_s"] = rep.timings ? r.runtime_s : 0.0;
    row["status"] = r.status;
    j["rows"].push_back(row);
  }
  if (rep.has_fit) {
    j["fit"] = {{"slope", rep.fit.slope},
                {"intercept", rep.fit.intercept},
                {"r_squared", rep.fit.r_squared},
                {"jackknife_spread", rep.fit.jackknife_spread},
                {"points", rep.fit.points}};
  } else {
    j["fit"] = nullptr;
  }
  j["gates"] = nlohmann::ordered_json::array();
  for (const GateResult& g : rep.gates)
    j["gates"].push_back({{"name", g.name}, {"passed", g.passed}, {"detail", g.detail}});
  j["warnings"] = rep.warnings;
  j["config"] = rep.config_echo;
  return j;
}

inline void write_report_json(const ConvergenceReport& rep, const std::string& path) {
  write_text(path, report_json(rep).dump(2) + "\n");
}

// Log-log scatter of the rows with the fitted line, as a self-contained SVG.
inline std::string report_svg_text(const ConvergenceReport& rep) {
  const int width = 640, height = 480;
  const double ml = 70, mr = 20, mt = 48, mb = 56;
  const bool x_is_dt = rep.study == "order";

  std::vector<double> xs, ys;
  for (const StudyRow& r : rep.rows) {
    const double x = x_is_dt ? r.dt : r.eps;
    if (x > 0.0 && r.error > 0.0 && std::isfinite(r.error)) {
      xs.push_back(std::log10(x));
      ys.push_back(std::log10(r.error));
    }
  }

  std::string svg;
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n",
                width, height, width, height);
  svg += buf;
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::snprintf(buf, sizeof buf,
                "<text x=\"%d\" y=\"28\" font-family=\"sans-serif\" font-size=\"16\">"
                "%s study (%s)</text>\n",
                static_cast<int>(ml), rep.study.c_str(), rep.status.c_str());
  svg += buf;

  if (xs.size() < 2) {
    svg += "<text x=\"70\" y=\"240\" font-family=\"sans-serif\" font-size=\"14\">"
           "errors at numerical floor; nothing to plot</text>\n</svg>\n";
    return svg;
  }

  double x_lo = *std::min_element(xs.begin(), xs.end());
  double x_hi = *std::max_element(xs.begin(), xs.end());
  double y_lo = *std::min_element(ys.begin(), ys.end());
  double y_hi = *std::max_element(ys.begin(), ys.end());
  const double x_pad = 0.05 * std::max(1e-6, x_hi - x_lo);
  const double y_pad = 0.05 * std::max(1e-6, y_hi - y_lo);
  x_lo -= x_pad;
  x_hi += x_pad;
  y_lo -= y_pad;
  y_hi += y_pad;

  auto px = [&](double lx) {
    return ml + (lx - x_lo) / (x_hi - x_lo) * (width - ml - mr);
  };
  auto py = [&](double ly) {
    return height - mb - (ly - y_lo) / (y_hi - y_lo) * (height - mt - mb);
  };

  std::snprintf(buf, sizeof buf,
                "<rect x=\"%.1f\" y=\"%.1f\" width=\"%.1f\" height=\"%.1f\" "
                "fill=\"none\" stroke=\"black\"/>\n",
                ml, mt, width - ml - mr, height - mt - mb);
  svg += buf;

  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  px(xs[i]), height - mb, px(xs[i]), height - mb + 6.0);
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"middle\">%.3g</text>\n",
                  px(xs[i]), height - mb + 20.0, std::pow(10.0, xs[i]));
    svg += buf;
  }
  for (int k = 0; k <= 3; ++k) {
    const double ly = y_lo + (y_hi - y_lo) * k / 3.0;
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"black\"/>\n",
                  ml - 6.0, py(ly), ml, py(ly));
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"11\" text-anchor=\"end\">%.3g</text>\n",
                  ml - 10.0, py(ly) + 4.0, std::pow(10.0, ly));
    svg += buf;
  }
  std::snprintf(buf, sizeof buf,
                "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"13\" "
                "text-anchor=\"middle\">%s</text>\n",
                ml + (width - ml - mr) / 2.0, height - 12.0, x_is_dt ? "dt" : "eps");
  svg += buf;
  std::snprintf(buf, sizeof buf,
                "<text x=\"18\" y=\"%.1f\" font-family=\"sans-serif\" font-size=\"13\" "
                "transform=\"rotate(-90 18 %.1f)\" text-anchor=\"middle\">error</text>\n",
                mt + (height - mt - mb) / 2.0, mt + (height - mt - mb) / 2.0);
  svg += buf;

  if (rep.has_fit) {
    const double lx0 = x_lo + x_pad, lx1 = x_hi - x_pad;
    const double log10e = 0.43429448190325182;
    auto fit_ly = [&](double lx) {
      // fit lives in natural logs: log err = slope * log eps + intercept
      return rep.fit.slope * lx + rep.fit.intercept * log10e;
    };
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" "
                  "stroke=\"#c33\" stroke-width=\"1.5\"/>\n",
                  px(lx0), py(fit_ly(lx0)), px(lx1), py(fit_ly(lx1)));
    svg += buf;
    std::snprintf(buf, sizeof buf,
                  "<text x=\"%.1f\" y=\"%.1f\" font-family=\"sans-serif\" "
                  "font-size=\"12\" fill=\"#c33\">slope %.3f, R^2 %.4f</text>\n",
                  ml + 12.0, mt + 18.0, rep.fit.slope, rep.fit.r_squared);
    svg += buf;
  }

  for (std::size_t i = 0; i < xs.size(); ++i) {
    std::snprintf(buf, sizeof buf,
                  "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"4\" fill=\"#226\"/>\n",
                  px(xs[i]), py(ys[i]));
    svg += buf;
  }
  svg += "</svg>\n";
  return svg;
}

inline void write_report_svg(const ConvergenceReport& rep, const std::string& path) {
  write_text(path, report_svg_text(rep));
}

// Writes csv/json/svg plus a manifest listing them, into `dir`.
inline void write_report_bundle(const ConvergenceReport& rep, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
  const std::string base = dir + "/" + rep.study;
  write_report_csv(rep, base + ".csv");
  write_report_json(rep, base + ".json");
  write_report_svg(rep, base + ".svg");

  nlohmann::ordered_json manifest;
  manifest["kind"] = "run_manifest";
  manifest["study"] = rep.study;
  manifest["status"] = rep.status;
  manifest["config_hash"] = rep.config_hash;
  manifest["version"] = rep.version;
  manifest["files"] = {rep.study + ".csv", rep.study + ".json", rep.study + ".svg"};
  write_text(dir + "/manifest.json", manifest.dump(2) + "\n");
}

} // namespace dmnls
