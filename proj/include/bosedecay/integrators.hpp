#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string_view>

#include "bosedecay/phase_point.hpp"

namespace bosedecay {

enum class Scheme { Ito, Stratonovich };

inline std::string_view to_string(Scheme s) { return s == Scheme::Ito ? "ito" : "stratonovich"; }

/// A stochastic model  dx = A(x) dt + B(x) dW  in the doubled phase space.
///
/// `drift` is the Itô drift. `stratonovich_shift` is the amount added to it to
/// obtain the Stratonovich drift, i.e. −½ Σ_{j,k} B_kj ∂_k B_ij.
/// `noise_increment` returns B(x) dW for already scaled Wiener increments.
template <class M>
concept PhaseSpaceModel = requires(const M& m, const PhasePoint& p,
                                   std::span<const double, M::noise_count> dw) {
  { M::noise_count } -> std::convertible_to<std::size_t>;
  { m.drift(p) } -> std::same_as<PhasePoint>;
  { m.stratonovich_shift(p) } -> std::same_as<PhasePoint>;
  { m.noise_increment(p, dw) } -> std::same_as<PhasePoint>;
};

inline constexpr unsigned default_midpoint_iterations = 3;

template <std::size_t N>
std::array<double, N> wiener_increments(std::span<const double, N> normals, double dt) {
  const double sdt = std::sqrt(dt);
  std::array<double, N> dw{};
  for (std::size_t k = 0; k < N; ++k) dw[k] = sdt * normals[k];
  return dw;
}

/// Euler–Maruyama step. `normals` are i.i.d. standard Gaussians.
template <PhaseSpaceModel M>
PhasePoint step_ito(const M& model, const PhasePoint& p, double dt,
                    std::span<const double, M::noise_count> normals) {
  const auto dw = wiener_increments(normals, dt);
  return p + model.drift(p) * dt + model.noise_increment(p, std::span<const double, M::noise_count>(dw));
}

/// Semi-implicit midpoint step for the Stratonovich form of the model.
///
/// The midpoint is found by fixed-point iteration starting from `p`; the
/// result may be non-finite, which the caller treats as divergence. Models
/// whose noise matrix contains square roots can expose them through
/// `roots(x)` and `roots(x, anchor)`; the midpoint then evaluates each root on
/// the branch continuous with its value at `p`, since a sign flip across the
/// principal cut inside one step would bias the scheme.
template <PhaseSpaceModel M>
PhasePoint step_stratonovich(const M& model, const PhasePoint& p, double dt,
                             std::span<const double, M::noise_count> normals,
                             unsigned iterations = default_midpoint_iterations) {
  const auto dw = wiener_increments(normals, dt);
  const std::span<const double, M::noise_count> dws(dw);
  PhasePoint mid = p;
  if constexpr (requires { model.noise_increment(model.roots(p, model.roots(p)), dws); }) {
    const auto anchor = model.roots(p);
    for (unsigned it = 0; it < iterations; ++it) {
      const PhasePoint a = model.drift(mid) + model.stratonovich_shift(mid);
      const auto r = it == 0 ? anchor : model.roots(mid, anchor);
      mid = p + 0.5 * (a * dt + model.noise_increment(r, dws));
      if (!mid.finite()) return mid;
    }
  } else {
    for (unsigned it = 0; it < iterations; ++it) {
      const PhasePoint a = model.drift(mid) + model.stratonovich_shift(mid);
      mid = p + 0.5 * (a * dt + model.noise_increment(mid, dws));
      if (!mid.finite()) return mid;
    }
  }
  return 2.0 * mid - p;
}

template <PhaseSpaceModel M>
PhasePoint step(const M& model, Scheme scheme, const PhasePoint& p, double dt,
                std::span<const double, M::noise_count> normals,
                unsigned iterations = default_midpoint_iterations) {
  return scheme == Scheme::Ito ? step_ito(model, p, dt, normals)
                               : step_stratonovich(model, p, dt, normals, iterations);
}

inline constexpr double default_divergence_threshold = 1e6;

/// True when any component is non-finite or has |x|² above `threshold`.
inline bool divergence_check(const PhasePoint& p, double threshold = default_divergence_threshold) {
  for (std::size_t i = 0; i < PhasePoint::size; ++i) {
    const double n = std::norm(p[i]);
    if (!std::isfinite(n) || n > threshold) return true;
  }
  return false;
}

}  // namespace bosedecay
