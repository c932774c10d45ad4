#pragma once

#include <cmath>
#include <numbers>
#include <variant>

#include "bosedecay/error.hpp"
#include "bosedecay/phase_point.hpp"
#include "bosedecay/rng.hpp"

namespace bosedecay {

struct Coherent {
  cplx amplitude{};
};

struct Fock {
  unsigned n = 0;
};

// Chaotic state with a coherent displacement; nbar = 0 is a coherent state.
struct DisplacedThermal {
  cplx displacement{};
  double nbar = 0.0;
};

using ModeState = std::variant<Coherent, Fock, DisplacedThermal>;

struct InitialStateSpec {
  ModeState ground = Coherent{};
  ModeState excited = Coherent{};
};

/// One mode of a PhasePoint: the amplitude and its independent partner.
struct ModePair {
  cplx amplitude{};
  cplx partner{};
};

/// Physical mean occupation ⟨n⟩ of a mode state.
inline double mean_number(const ModeState& s) {
  return std::visit(
      [](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Coherent>) return std::norm(m.amplitude);
        else if constexpr (std::is_same_v<T, Fock>) return static_cast<double>(m.n);
        else return std::norm(m.displacement) + m.nbar;
      },
      s);
}

/// Gamma(shape, 1) variate by the Marsaglia-Tsang squeeze method.
/// Shapes below one are boosted: Gamma(a) = Gamma(a + 1) U^(1/a).
inline double gamma_sample(double shape, RandomStream& rng) {
  if (!(shape > 0.0)) throw Error("gamma_sample: shape must be positive");
  if (shape < 1.0) {
    const double u = rng.uniform();
    return gamma_sample(shape + 1.0, rng) * std::pow(u, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    double x = 0.0;
    double v = 0.0;
    do {
      x = rng.normal();
      v = 1.0 + c * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = rng.uniform();
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) return d * v;
    if (std::log(u) < 0.5 * x2 + d * (1.0 - v + std::log(v))) return d * v;
  }
}

/// Complex Gaussian with E|z|² = total_variance (each quadrature gets half).
inline cplx complex_gaussian(double total_variance, RandomStream& rng) {
  const double s = std::sqrt(0.5 * total_variance);
  const double re = rng.normal();
  const double im = rng.normal();
  return {s * re, s * im};
}

/// Positive-P sample of the Fock state |n⟩.
///
/// In the variables μ = (α − α⁺*)/2, γ = (α + α⁺*)/2 the distribution
/// separates into e^{-|μ|²}/π times a Gamma(n + 1) law for |γ|² with a
/// uniform phase.
inline ModePair sample_fock_pp(unsigned n, RandomStream& rng) {
  const cplx mu = complex_gaussian(1.0, rng);
  const double z = gamma_sample(static_cast<double>(n) + 1.0, rng);
  const double theta = 2.0 * std::numbers::pi * rng.uniform();
  const cplx gamma = std::polar(std::sqrt(z), theta);
  return {mu + gamma, std::conj(gamma) - std::conj(mu)};
}

inline ModePair sample_fock(Representation rep, unsigned n, RandomStream& rng) {
  if (rep == Representation::TruncatedWigner) throw Error("Fock sampling unsupported in Wigner");
  return sample_fock_pp(n, rng);
}

inline ModePair sample_coherent(Representation rep, cplx amplitude, RandomStream& rng) {
  if (rep == Representation::PositiveP) return {amplitude, std::conj(amplitude)};
  const cplx a = amplitude + complex_gaussian(0.5, rng);
  return {a, std::conj(a)};
}

inline ModePair sample_displaced_thermal(Representation rep, cplx displacement, double nbar,
                                         RandomStream& rng) {
  if (!(nbar >= 0.0)) throw Error("displaced thermal state requires nbar >= 0");
  const double width = rep == Representation::PositiveP ? nbar : nbar + 0.5;
  const cplx b = displacement + complex_gaussian(width, rng);
  return {b, std::conj(b)};
}

inline ModePair sample_mode(Representation rep, const ModeState& state, RandomStream& rng) {
  return std::visit(
      [&](const auto& m) -> ModePair {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, Coherent>) return sample_coherent(rep, m.amplitude, rng);
        else if constexpr (std::is_same_v<T, Fock>) return sample_fock(rep, m.n, rng);
        else return sample_displaced_thermal(rep, m.displacement, m.nbar, rng);
      },
      state);
}

inline void validate(const InitialStateSpec& spec, Representation rep) {
  for (const ModeState* s : {&spec.ground, &spec.excited}) {
    if (const auto* t = std::get_if<DisplacedThermal>(s); t && !(t->nbar >= 0.0))
      throw Error("displaced thermal state requires nbar >= 0");
    if (std::holds_alternative<Fock>(*s) && rep == Representation::TruncatedWigner)
      throw Error("Fock sampling unsupported in Wigner");
  }
}

/// Initial point of one trajectory; ground mode is drawn first.
inline PhasePoint sample_initial(Representation rep, const InitialStateSpec& spec, RandomStream& rng) {
  const ModePair g = sample_mode(rep, spec.ground, rng);
  const ModePair e = sample_mode(rep, spec.excited, rng);
  return {g.amplitude, g.partner, e.amplitude, e.partner};
}

}  // namespace bosedecay
