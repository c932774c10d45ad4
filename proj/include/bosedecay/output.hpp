#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bosedecay/config.hpp"
#include "bosedecay/engine.hpp"
#include "bosedecay/error.hpp"
#include "bosedecay/format.hpp"

namespace bosedecay {

inline constexpr std::string_view version = "1.0.0";

inline constexpr std::string_view csv_header =
    "t,na_mean,na_stderr,nb_mean,nb_stderr,nanb_mean,nanb_stderr,pbb,coh_ab_re,coh_ab_im,live_trajectories";

/// One row of the time-series CSV.
struct CsvRow {
  double t = 0.0;
  double na_mean = 0.0;
  double na_stderr = 0.0;
  double nb_mean = 0.0;
  double nb_stderr = 0.0;
  double nanb_mean = 0.0;
  double nanb_stderr = 0.0;
  double pbb = 0.0;
  double coh_ab_re = 0.0;
  double coh_ab_im = 0.0;
  std::uint64_t live_trajectories = 0;
};

inline void emit_csv(std::span<const MomentRecord> records, std::ostream& sink) {
  sink << csv_header << '\n';
  for (const MomentRecord& r : records) {
    sink << format_double(r.t) << ',' << format_double(r.n_a) << ',' << format_double(r.n_a_stderr) << ','
         << format_double(r.n_b) << ',' << format_double(r.n_b_stderr) << ',' << format_double(r.n_a_n_b)
         << ',' << format_double(r.n_a_n_b_stderr) << ',' << format_double(r.p_bb) << ','
         << format_double(r.coh_ab.real()) << ',' << format_double(r.coh_ab.imag()) << ','
         << r.live_count << '\n';
  }
}

inline void emit_csv(const ObservableSeries& series, std::ostream& sink) { emit_csv(series.records, sink); }

inline std::vector<CsvRow> read_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line) || trim(line) != csv_header) throw Error("csv: missing or unexpected header");
  std::vector<CsvRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    std::vector<std::string_view> cells;
    std::string_view rest = line;
    for (;;) {
      const auto comma = rest.find(',');
      cells.push_back(trim(rest.substr(0, comma)));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cells.size() != 11) throw Error("csv line " + std::to_string(line_no) + ": expected 11 fields");
    double v[10];
    for (int k = 0; k < 10; ++k) {
      const auto d = parse_double(cells[k]);
      if (!d) throw Error("csv line " + std::to_string(line_no) + ": bad number '" + std::string(cells[k]) + "'");
      v[k] = *d;
    }
    const auto live = parse_integer<std::uint64_t>(cells[10]);
    if (!live) throw Error("csv line " + std::to_string(line_no) + ": bad trajectory count");
    rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], *live});
  }
  return rows;
}

// Line conventions of the figures: stochastic means solid, mean-field dotted,
// exponential dash-dotted.
enum class LineStyle { Solid, Dashed, Dotted, DashDotted };

enum class PlotQuantity { ExcitedPopulation, Correlation, ExcitedProbability };

struct LabeledSeries {
  std::string label;
  const ObservableSeries* series = nullptr;
  LineStyle style = LineStyle::Solid;
};

struct ReferenceCurve {
  std::string label;
  LineStyle style = LineStyle::Dotted;
  std::vector<double> t;
  std::vector<double> value;
};

struct PlotOptions {
  std::string title;
  PlotQuantity quantity = PlotQuantity::ExcitedPopulation;
  std::string output_png;  // empty: leave the terminal alone
  bool error_bars = false;
};

namespace detail {

inline int dash_type(LineStyle s) {
  switch (s) {
    case LineStyle::Solid: return 1;
    case LineStyle::Dashed: return 2;
    case LineStyle::Dotted: return 3;
    case LineStyle::DashDotted: return 4;
  }
  return 1;
}

inline std::string quoted(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out + "'";
}

inline bool same_grid(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a[k] - b[k]) > 1e-12 * std::max(1.0, std::abs(a[k]))) return false;
  return true;
}

}  // namespace detail

/// Writes a self-contained gnuplot script with inline data blocks.
inline void emit_plot_script(std::span<const LabeledSeries> series, std::span<const ReferenceCurve> references,
                             std::ostream& sink, const PlotOptions& opts = {}) {
  if (series.empty() && references.empty()) throw Error("plot: nothing to plot");
  std::vector<double> grid;
  if (!series.empty()) {
    if (series.front().series == nullptr) throw Error("plot: null series");
    grid = series.front().series->times();
  } else {
    grid = references.front().t;
  }
  for (const auto& s : series)
    if (s.series == nullptr || !detail::same_grid(grid, s.series->times()))
      throw Error("plot: series '" + s.label + "' uses a different time grid");
  for (const auto& r : references) {
    if (r.t.size() != r.value.size()) throw Error("plot: reference '" + r.label + "' is malformed");
    if (!detail::same_grid(grid, r.t)) throw Error("plot: reference '" + r.label + "' uses a different time grid");
  }

  const char* ylabel = opts.quantity == PlotQuantity::ExcitedPopulation ? "N_b"
                       : opts.quantity == PlotQuantity::Correlation     ? "<a^+a b^+b>"
                                                                        : "P_bb";
  sink << "# bosedecay " << version << " plot script (gnuplot)\n";
  if (!opts.output_png.empty())
    sink << "set terminal pngcairo size 900,600\nset output " << detail::quoted(opts.output_png) << '\n';
  if (!opts.title.empty()) sink << "set title " << detail::quoted(opts.title) << '\n';
  sink << "set xlabel 't'\nset ylabel " << detail::quoted(ylabel) << "\nset key top right\n\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    sink << "$series" << i << " << EOD\n";
    for (const auto& r : series[i].series->records) {
      double y = r.n_b;
      double e = r.n_b_stderr;
      if (opts.quantity == PlotQuantity::Correlation) {
        y = r.n_a_n_b;
        e = r.n_a_n_b_stderr;
      } else if (opts.quantity == PlotQuantity::ExcitedProbability) {
        y = r.p_bb;
        e = 0.0;
      }
      sink << format_double(r.t) << ' ' << format_double(y) << ' ' << format_double(e) << '\n';
    }
    sink << "EOD\n";
  }
  for (std::size_t i = 0; i < references.size(); ++i) {
    sink << "$reference" << i << " << EOD\n";
    for (std::size_t k = 0; k < references[i].t.size(); ++k)
      sink << format_double(references[i].t[k]) << ' ' << format_double(references[i].value[k]) << '\n';
    sink << "EOD\n";
  }

  sink << "\nplot ";
  bool first = true;
  auto sep = [&] {
    if (!first) sink << ", \\\n     ";
    first = false;
  };
  for (std::size_t i = 0; i < series.size(); ++i) {
    sep();
    sink << "$series" << i << " using 1:2 with lines dt " << detail::dash_type(series[i].style)
         << " lw 2 title " << detail::quoted(series[i].label);
    if (opts.error_bars) {
      sep();
      sink << "$series" << i << " using 1:2:3 with yerrorbars pt 0 notitle";
    }
  }
  for (std::size_t i = 0; i < references.size(); ++i) {
    sep();
    sink << "$reference" << i << " using 1:2 with lines dt " << detail::dash_type(references[i].style)
         << " lw 2 title " << detail::quoted(references[i].label);
  }
  sink << '\n';
}

/// Everything needed to rerun a simulation bit-exactly.
struct RunManifest {
  SimulationConfig config;
  std::string tool_version{version};
  double wall_seconds = 0.0;
  unsigned threads = 1;
  std::vector<std::uint64_t> divergent;
};

inline std::string manifest_to_json(const RunManifest& m) {
  nlohmann::json j;
  j["tool_version"] = m.tool_version;
  j["seed"] = m.config.seed;
  j["wall_seconds"] = m.wall_seconds;
  j["threads"] = m.threads;
  j["divergent_per_sample"] = m.divergent;
  j["config"] = emit_config(m.config);
  return j.dump(2);
}

inline RunManifest manifest_from_json(std::string_view text) {
  const auto j = nlohmann::json::parse(text);
  RunManifest m;
  m.config = parse_config(j.at("config").get<std::string>());
  m.tool_version = j.at("tool_version").get<std::string>();
  m.wall_seconds = j.at("wall_seconds").get<double>();
  m.threads = j.at("threads").get<unsigned>();
  m.divergent = j.at("divergent_per_sample").get<std::vector<std::uint64_t>>();
  return m;
}

}  // namespace bosedecay
