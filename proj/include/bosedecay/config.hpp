#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

#include "bosedecay/engine.hpp"
#include "bosedecay/error.hpp"
#include "bosedecay/format.hpp"

namespace bosedecay {

/// Parse or validation failure tied to a key and a line of the input.
class ConfigError : public Error {
 public:
  ConfigError(std::string key, std::size_t line, const std::string& what)
      : Error("line " + std::to_string(line) + ": key '" + key + "': " + what),
        key_(std::move(key)),
        line_(line) {}

  const std::string& key() const { return key_; }
  std::size_t line() const { return line_; }

 private:
  std::string key_;
  std::size_t line_;
};

namespace detail {

struct Entry {
  std::string value;
  std::size_t line = 0;
};

struct Section {
  std::size_t header_line = 0;
  std::map<std::string, Entry, std::less<>> entries;
};

class ConfigReader {
 public:
  ConfigReader(const Section& s, std::size_t end_line) : section_(s), end_line_(end_line) {}

  const Entry* find(std::string_view key) const {
    const auto it = section_.entries.find(key);
    return it == section_.entries.end() ? nullptr : &it->second;
  }

  const Entry& require(std::string_view key) const {
    if (const Entry* e = find(key)) return *e;
    throw ConfigError(std::string(key), std::max(section_.header_line, end_line_), "missing required key");
  }

  double real(std::string_view key, std::optional<double> fallback = std::nullopt) const {
    const Entry* e = fallback ? find(key) : &require(key);
    if (e == nullptr) return *fallback;
    const auto v = parse_double(e->value);
    if (!v || !std::isfinite(*v)) throw ConfigError(std::string(key), e->line, "not a finite number: '" + e->value + "'");
    return *v;
  }

  template <class Int>
  Int integer(std::string_view key, std::optional<Int> fallback = std::nullopt) const {
    const Entry* e = fallback ? find(key) : &require(key);
    if (e == nullptr) return *fallback;
    const auto v = parse_integer<Int>(e->value);
    if (!v) throw ConfigError(std::string(key), e->line, "not a non-negative integer: '" + e->value + "'");
    return *v;
  }

  std::size_t line_of(std::string_view key) const {
    const Entry* e = find(key);
    return e ? e->line : std::max(section_.header_line, end_line_);
  }

 private:
  const Section& section_;
  std::size_t end_line_;
};

inline void check(bool ok, const ConfigReader& r, std::string_view key, const char* what) {
  if (!ok) throw ConfigError(std::string(key), r.line_of(key), what);
}

inline ModeState read_mode(const Section& section, std::size_t end_line) {
  const ConfigReader r(section, end_line);
  const Entry& type = r.require("type");
  auto only = [&](std::initializer_list<std::string_view> allowed) {
    for (const auto& [key, entry] : section.entries) {
      if (key == "type") continue;
      bool ok = false;
      for (auto a : allowed) ok = ok || key == a;
      if (!ok) throw ConfigError(key, entry.line, "not valid for type '" + type.value + "'");
    }
  };
  if (type.value == "coherent") {
    only({"amplitude_re", "amplitude_im"});
    return Coherent{{r.real("amplitude_re", 0.0), r.real("amplitude_im", 0.0)}};
  }
  if (type.value == "fock") {
    only({"n"});
    return Fock{r.integer<unsigned>("n")};
  }
  if (type.value == "thermal") {
    only({"displacement_re", "displacement_im", "nbar"});
    const double nbar = r.real("nbar");
    check(nbar >= 0.0, r, "nbar", "must be >= 0");
    return DisplacedThermal{{r.real("displacement_re", 0.0), r.real("displacement_im", 0.0)}, nbar};
  }
  throw ConfigError("type", type.line, "expected coherent, fock or thermal, got '" + type.value + "'");
}

}  // namespace detail

/// Parses the key = value run description.
///
/// Top-level keys precede any section; the initial state lives in the
/// [initial.ground] and [initial.excited] sections. The ground section may be
/// omitted (vacuum). Lines starting with '#' are comments.
inline SimulationConfig parse_config(std::string_view text) {
  static constexpr std::string_view top_keys[] = {
      "representation", "scheme", "wigner_drift_variant", "kappa", "t_final", "dt",
      "sample_stride", "trajectories", "seed", "divergence_threshold",
      "max_divergent_fraction", "midpoint_iterations"};
  static constexpr std::string_view mode_keys[] = {"type",  "amplitude_re",    "amplitude_im", "n",
                                                   "displacement_re", "displacement_im", "nbar"};

  std::map<std::string, detail::Section, std::less<>> sections;
  sections[""];
  std::string current;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = trim(raw);
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = trim(line.substr(0, hash));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(std::string(line), line_no, "malformed section header");
      current = std::string(trim(line.substr(1, line.size() - 2)));
      if (current != "initial.ground" && current != "initial.excited")
        throw ConfigError(current, line_no, "unknown section");
      if (sections.count(current)) throw ConfigError(current, line_no, "duplicate section");
      sections[current].header_line = line_no;
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(std::string(line), line_no, "expected key = value");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    bool known = false;
    if (current.empty()) {
      for (auto k : top_keys) known = known || k == key;
    } else {
      for (auto k : mode_keys) known = known || k == key;
    }
    if (!known) throw ConfigError(key, line_no, "unknown key");
    auto& entries = sections[current].entries;
    if (entries.count(key)) throw ConfigError(key, line_no, "duplicate key");
    entries[key] = {value, line_no};
  }

  const detail::ConfigReader top(sections[""], line_no);
  SimulationConfig cfg;

  const auto& rep = top.require("representation");
  if (rep.value == "positive_p") cfg.representation = Representation::PositiveP;
  else if (rep.value == "wigner") cfg.representation = Representation::TruncatedWigner;
  else throw ConfigError("representation", rep.line, "expected positive_p or wigner, got '" + rep.value + "'");

  if (const auto* e = top.find("scheme")) {
    if (e->value == "ito") cfg.scheme = Scheme::Ito;
    else if (e->value == "stratonovich") cfg.scheme = Scheme::Stratonovich;
    else throw ConfigError("scheme", e->line, "expected ito or stratonovich, got '" + e->value + "'");
  }
  if (const auto* e = top.find("wigner_drift_variant")) {
    if (e->value == "fpe_consistent") cfg.wigner_drift_variant = WignerDriftVariant::FpeConsistent;
    else if (e->value == "paper_verbatim") cfg.wigner_drift_variant = WignerDriftVariant::PaperVerbatim;
    else throw ConfigError("wigner_drift_variant", e->line, "expected fpe_consistent or paper_verbatim");
  }

  cfg.kappa = top.real("kappa");
  detail::check(cfg.kappa > 0.0, top, "kappa", "must be > 0");
  cfg.t_final = top.real("t_final");
  detail::check(cfg.t_final > 0.0, top, "t_final", "must be > 0");
  cfg.dt = top.real("dt", default_dt(cfg.kappa));
  detail::check(cfg.dt > 0.0, top, "dt", "must be > 0");
  detail::check(cfg.dt <= cfg.t_final, top, "dt", "must not exceed t_final");
  cfg.sample_stride = top.integer<std::size_t>("sample_stride", std::size_t{100});
  detail::check(cfg.sample_stride >= 1, top, "sample_stride", "must be >= 1");
  cfg.trajectories = top.integer<std::uint64_t>("trajectories");
  detail::check(cfg.trajectories >= 1, top, "trajectories", "must be >= 1");
  cfg.seed = top.integer<std::uint64_t>("seed");
  cfg.divergence_threshold = top.real("divergence_threshold", default_divergence_threshold);
  detail::check(cfg.divergence_threshold > 0.0, top, "divergence_threshold", "must be > 0");
  cfg.max_divergent_fraction = top.real("max_divergent_fraction", 1e-3);
  detail::check(cfg.max_divergent_fraction >= 0.0 && cfg.max_divergent_fraction <= 1.0, top,
                "max_divergent_fraction", "must lie in [0, 1]");
  cfg.midpoint_iterations = top.integer<unsigned>("midpoint_iterations", default_midpoint_iterations);
  detail::check(cfg.midpoint_iterations >= 1, top, "midpoint_iterations", "must be >= 1");

  if (const auto it = sections.find("initial.ground"); it != sections.end())
    cfg.initial_state.ground = detail::read_mode(it->second, line_no);
  const auto excited = sections.find("initial.excited");
  if (excited == sections.end()) throw ConfigError("initial.excited", line_no, "missing required section");
  cfg.initial_state.excited = detail::read_mode(excited->second, line_no);

  if (cfg.representation == Representation::TruncatedWigner) {
    for (const char* name : {"initial.ground", "initial.excited"}) {
      const auto it = sections.find(name);
      if (it == sections.end()) continue;
      const detail::ConfigReader r(it->second, line_no);
      if (const auto* t = r.find("type"); t && t->value == "fock")
        throw ConfigError("type", t->line, "fock states are unsupported with representation = wigner");
    }
  }
  return cfg;
}

namespace detail {

inline void emit_mode(std::ostream& out, const char* name, const ModeState& m) {
  out << '[' << name << "]\n";
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Coherent>) {
          out << "type = coherent\namplitude_re = " << format_double(s.amplitude.real())
              << "\namplitude_im = " << format_double(s.amplitude.imag()) << '\n';
        } else if constexpr (std::is_same_v<T, Fock>) {
          out << "type = fock\nn = " << s.n << '\n';
        } else {
          out << "type = thermal\ndisplacement_re = " << format_double(s.displacement.real())
              << "\ndisplacement_im = " << format_double(s.displacement.imag())
              << "\nnbar = " << format_double(s.nbar) << '\n';
        }
      },
      m);
}

}  // namespace detail

/// Writes every field explicitly, so parse_config(emit_config(c)) == c.
inline std::string emit_config(const SimulationConfig& c) {
  std::ostringstream out;
  out << "representation = " << to_string(c.representation) << '\n'
      << "scheme = " << to_string(c.scheme) << '\n'
      << "wigner_drift_variant = " << to_string(c.wigner_drift_variant) << '\n'
      << "kappa = " << format_double(c.kappa) << '\n'
      << "t_final = " << format_double(c.t_final) << '\n'
      << "dt = " << format_double(c.dt) << '\n'
      << "sample_stride = " << c.sample_stride << '\n'
      << "trajectories = " << c.trajectories << '\n'
      << "seed = " << c.seed << '\n'
      << "divergence_threshold = " << format_double(c.divergence_threshold) << '\n'
      << "max_divergent_fraction = " << format_double(c.max_divergent_fraction) << '\n'
      << "midpoint_iterations = " << c.midpoint_iterations << "\n\n";
  detail::emit_mode(out, "initial.ground", c.initial_state.ground);
  out << '\n';
  detail::emit_mode(out, "initial.excited", c.initial_state.excited);
  return out.str();
}

}  // namespace bosedecay
