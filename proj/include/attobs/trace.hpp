// Trace output: a fixed CSV schema shared by all scenarios plus gnuplot
// script generation.  Columns: t, truth Euler angles, then per observer
// {name}_yaw, {name}_pitch, {name}_roll, {name}_dist, {name}_V.  Floats are
// written as %.17g so identical runs produce byte-identical files.
#pragma once

#include "attobs/so3.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace attobs {

struct ObserverTrace {
  std::string name;
  std::vector<double> yaw, pitch, roll;  // estimate, radians
  std::vector<double> dist;              // attitude distance to truth, [0, 1]
  std::vector<double> V;                 // Lyapunov value of the Qc estimate
};

struct SimulationTrace {
  std::vector<double> t;
  std::vector<double> yaw_true, pitch_true, roll_true;
  std::vector<ObserverTrace> observers;
};

namespace detail {

inline void append_num(std::string& row, double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  row += buf;
}

inline std::vector<std::string> split_csv_header(const std::string& line) {
  std::vector<std::string> cols;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      cols.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  cols.push_back(cur);
  return cols;
}

}  // namespace detail

inline std::string trace_header(const SimulationTrace& tr) {
  std::string h = "t,yaw_true,pitch_true,roll_true";
  for (const auto& ob : tr.observers) {
    for (const char* f : {"yaw", "pitch", "roll", "dist", "V"}) {
      h += "," + ob.name + "_" + f;
    }
  }
  return h;
}

inline void write_trace_csv(const SimulationTrace& tr, std::ostream& out) {
  for (const auto& ob : tr.observers) {
    if (ob.yaw.size() != tr.t.size() || ob.dist.size() != tr.t.size() ||
        ob.V.size() != tr.t.size()) {
      throw std::invalid_argument("trace: observer series length mismatch");
    }
  }
  out << trace_header(tr) << "\n";
  std::string row;
  for (size_t k = 0; k < tr.t.size(); ++k) {
    row.clear();
    detail::append_num(row, tr.t[k]);
    for (double v : {tr.yaw_true[k], tr.pitch_true[k], tr.roll_true[k]}) {
      row += ',';
      detail::append_num(row, v);
    }
    for (const auto& ob : tr.observers) {
      for (double v : {ob.yaw[k], ob.pitch[k], ob.roll[k], ob.dist[k], ob.V[k]}) {
        row += ',';
        detail::append_num(row, v);
      }
    }
    row += '\n';
    out << row;
  }
}

inline void write_trace_csv(const SimulationTrace& tr, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open trace output " + path);
  write_trace_csv(tr, f);
}

struct PlotScripts {
  std::string euler_script;  // path of the Euler-angle figure script
  std::string error_script;  // path of the log-scale distance figure script
};

/// Generate two gnuplot scripts next to an existing trace CSV: one plotting
/// truth vs estimated Euler angles in degrees, one plotting each observer's
/// attitude distance on a log axis.  The CSV header is validated first and
/// a missing column is reported by name.
inline PlotScripts emit_plot_scripts(const std::string& csv_path) {
  std::ifstream f(csv_path);
  if (!f) throw std::runtime_error("cannot open trace " + csv_path);
  std::string header;
  if (!std::getline(f, header)) {
    throw std::runtime_error("trace " + csv_path + " is empty");
  }
  const auto cols = detail::split_csv_header(header);
  auto has = [&](const std::string& name) {
    for (const auto& c : cols) {
      if (c == name) return true;
    }
    return false;
  };
  for (const char* req : {"t", "yaw_true", "pitch_true", "roll_true"}) {
    if (!has(req)) {
      throw std::runtime_error("trace " + csv_path + " missing column " + req);
    }
  }
  std::vector<std::string> obs_names;
  for (const auto& c : cols) {
    const auto pos = c.rfind("_dist");
    if (pos != std::string::npos && pos + 5 == c.size()) {
      obs_names.push_back(c.substr(0, pos));
    }
  }
  for (const auto& ob : obs_names) {
    for (const char* f2 : {"_yaw", "_pitch", "_roll", "_V"}) {
      if (!has(ob + f2)) {
        throw std::runtime_error("trace " + csv_path + " missing column " + ob + f2);
      }
    }
  }

  const auto dot = csv_path.rfind('.');
  const std::string stem =
      dot == std::string::npos ? csv_path : csv_path.substr(0, dot);
  PlotScripts ps{stem + "_euler.gp", stem + "_dist.gp"};

  {
    std::ofstream g(ps.euler_script);
    if (!g) throw std::runtime_error("cannot write " + ps.euler_script);
    g << "# gnuplot: truth vs estimated Euler angles\n";
    g << "set datafile separator ','\n";
    g << "set key autotitle columnhead\n";
    g << "set key outside\n";
    g << "set xlabel 't [s]'\n";
    g << "set ylabel 'angle [deg]'\n";
    g << "set grid\n";
    g << "rad2deg = 57.295779513082323\n";
    g << "plot \\\n";
    bool first = true;
    for (const char* ang : {"yaw", "pitch", "roll"}) {
      if (!first) g << ", \\\n";
      first = false;
      g << "  '" << csv_path << "' using (column('t')):(column('" << ang
        << "_true')*rad2deg) with lines lw 2 title '" << ang << " true'";
      for (const auto& ob : obs_names) {
        g << ", \\\n  '" << csv_path << "' using (column('t')):(column('" << ob
          << "_" << ang << "')*rad2deg) with lines dt 2 title '" << ang << " "
          << ob << "'";
      }
    }
    g << "\npause -1\n";
  }
  {
    std::ofstream g(ps.error_script);
    if (!g) throw std::runtime_error("cannot write " + ps.error_script);
    g << "# gnuplot: attitude distance per observer (log scale)\n";
    g << "set datafile separator ','\n";
    g << "set key autotitle columnhead\n";
    g << "set xlabel 't [s]'\n";
    g << "set ylabel 'attitude distance'\n";
    g << "set logscale y\n";
    g << "set format y '%.0e'\n";
    g << "set grid\n";
    g << "plot \\\n";
    bool first = true;
    for (const auto& ob : obs_names) {
      if (!first) g << ", \\\n";
      first = false;
      g << "  '" << csv_path << "' using (column('t')):(column('" << ob
        << "_dist')) with lines title '" << ob << "'";
    }
    g << "\npause -1\n";
  }
  return ps;
}

}  // namespace attobs
