// Command-line driver: runs an ensemble from a config file and writes the
// series, the reference curves, gnuplot scripts and a run manifest.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bosedecay/bosedecay.hpp"

namespace fs = std::filesystem;
using namespace bosedecay;

namespace {

struct References {
  std::vector<double> t;
  std::vector<double> exact_nb, exact_nanb;  // empty when the oracle is skipped
  std::vector<double> meanfield_nb, exponential_nb;
};

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  if (!in) throw Error("cannot open " + p.string());
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
  if (!out) throw Error("write failed for " + p.string());
}

References compute_references(const SimulationConfig& cfg, bool exact, std::size_t mc_samples) {
  References r;
  r.t = cfg.sample_times();
  const double nb0 = mean_number(cfg.initial_state.excited);
  const double total = nb0 + mean_number(cfg.initial_state.ground);
  for (double t : r.t) {
    r.meanfield_nb.push_back(meanfield_nb(t, total, nb0, cfg.kappa));
    r.exponential_nb.push_back(exponential_reference(t, cfg.kappa, nb0));
  }
  if (exact) {
    RandomStream rng(splitmix64(cfg.seed ^ 0x6f7261636c65ULL));
    const auto d0 = initial_distribution(cfg.initial_state, default_cutoff(cfg.initial_state), mc_samples, rng);
    for (const auto& s : evolve_chain(d0, cfg.kappa, r.t, {.keep_distributions = false})) {
      r.exact_nb.push_back(s.n_b);
      r.exact_nanb.push_back(s.n_a_n_b);
    }
  }
  return r;
}

std::string references_csv(const References& r) {
  std::ostringstream out;
  out << "t,nb_exact,nanb_exact,nb_meanfield,nb_exponential\n";
  const bool exact = !r.exact_nb.empty();
  for (std::size_t k = 0; k < r.t.size(); ++k) {
    out << format_double(r.t[k]) << ',' << (exact ? format_double(r.exact_nb[k]) : "") << ','
        << (exact ? format_double(r.exact_nanb[k]) : "") << ',' << format_double(r.meanfield_nb[k]) << ','
        << format_double(r.exponential_nb[k]) << '\n';
  }
  return out.str();
}

std::string plot_scripts(const ObservableSeries& series, const References& ref, const SimulationConfig& cfg,
                         PlotQuantity quantity, const std::string& png) {
  const std::string label = cfg.representation == Representation::PositiveP ? "positive-P" : "truncated Wigner";
  const std::vector<LabeledSeries> curves{{label, &series, LineStyle::Solid}};
  std::vector<ReferenceCurve> refs;
  if (quantity == PlotQuantity::ExcitedPopulation) {
    if (!ref.exact_nb.empty()) refs.push_back({"exact", LineStyle::Dashed, ref.t, ref.exact_nb});
    refs.push_back({"mean field", LineStyle::Dotted, ref.t, ref.meanfield_nb});
    refs.push_back({"exponential", LineStyle::DashDotted, ref.t, ref.exponential_nb});
  } else if (!ref.exact_nanb.empty()) {
    refs.push_back({"exact", LineStyle::Dashed, ref.t, ref.exact_nanb});
  }
  std::ostringstream out;
  std::ostringstream title;
  title << label << ", kappa = " << format_double(cfg.kappa) << ", " << cfg.trajectories << " trajectories";
  emit_plot_script(curves, refs, out,
                   {.title = title.str(), .quantity = quantity, .output_png = png, .error_bars = true});
  return out.str();
}

int run(const fs::path& config_path, const fs::path& out_dir, unsigned threads, std::optional<std::uint64_t> seed,
        bool exact, std::size_t mc_samples) {
  SimulationConfig cfg = parse_config(read_file(config_path));
  if (seed) cfg.seed = *seed;
  cfg.validate();
  fs::create_directories(out_dir);

  const auto start = std::chrono::steady_clock::now();
  const ObservableSeries series = run_ensemble(cfg, threads);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  std::ostringstream csv;
  emit_csv(series, csv);
  write_file(out_dir / "series.csv", csv.str());

  const References ref = compute_references(cfg, exact, mc_samples);
  write_file(out_dir / "references.csv", references_csv(ref));
  write_file(out_dir / "population.gp", plot_scripts(series, ref, cfg, PlotQuantity::ExcitedPopulation, "population.png"));
  write_file(out_dir / "correlation.gp", plot_scripts(series, ref, cfg, PlotQuantity::Correlation, "correlation.png"));

  RunManifest m;
  m.config = cfg;
  m.wall_seconds = wall;
  m.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
  m.divergent = series.divergent;
  write_file(out_dir / "manifest.json", manifest_to_json(m));

  std::cerr << "wrote " << series.records.size() << " samples to " << out_dir.string() << " in " << wall
            << " s; diverged " << (series.divergent.empty() ? 0 : series.divergent.back()) << " of "
            << cfg.trajectories << '\n';
  return 0;
}

int oracle(const fs::path& config_path, const std::string& out, std::size_t mc_samples) {
  const SimulationConfig cfg = parse_config(read_file(config_path));
  const std::string text = references_csv(compute_references(cfg, true, mc_samples));
  if (out == "-") std::cout << text;
  else write_file(out, text);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic phase-space simulation of bosonic spontaneous emission"};
  app.set_version_flag("--version", std::string(version));
  app.require_subcommand(1);

  fs::path config_path, out_dir;
  unsigned threads = 0;
  std::optional<std::uint64_t> seed;
  bool no_oracle = false;
  std::size_t mc_samples = 200000;

  auto* run_cmd = app.add_subcommand("run", "integrate an ensemble and write results");
  run_cmd->add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out-dir", out_dir, "output directory (created if missing)")->required();
  run_cmd->add_option("--threads", threads, "worker threads, 0 = all cores")->capture_default_str();
  run_cmd->add_option("--seed-override", seed, "replace the seed from the config");
  run_cmd->add_flag("--no-oracle", no_oracle, "skip the exact master-equation reference");
  run_cmd->add_option("--mc-samples", mc_samples, "P-function samples for thermal oracle states")
      ->capture_default_str();

  std::string oracle_out = "-";
  auto* oracle_cmd = app.add_subcommand("oracle", "reference curves only, on the config's sample grid");
  oracle_cmd->add_option("--config", config_path, "run configuration file")->required()->check(CLI::ExistingFile);
  oracle_cmd->add_option("--out", oracle_out, "CSV path, - for stdout")->capture_default_str();
  oracle_cmd->add_option("--mc-samples", mc_samples, "P-function samples for thermal states")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run_cmd) return run(config_path, out_dir, threads, seed, !no_oracle, mc_samples);
    return oracle(config_path, oracle_out, mc_samples);
  } catch (const ConfigError& e) {
    std::cerr << "bosedecay: " << config_path.string() << ": " << e.what() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "bosedecay: " << e.what() << '\n';
  }
  return 1;
}
