#pragma once

#include <array>
#include <cmath>
#include <span>

#include "bosedecay/integrators.hpp"
#include "bosedecay/phase_point.hpp"

namespace bosedecay {

using NoiseMatrixPP = NoiseMatrix<6>;

/// Itô drift of the positive-P equations.
inline PhasePoint pp_drift(const PhasePoint& p, double kappa) {
  const cplx gain = 0.5 * kappa * p.excited_number();
  const cplx loss = -0.5 * kappa * (p.ground_number() + 1.0);
  return {gain * p.alpha, gain * p.alpha_plus, loss * p.beta, loss * p.beta_plus};
}

/// Diffusion matrix D that any valid noise matrix must reproduce as B Bᵀ.
inline DiffusionMatrix pp_diffusion(const PhasePoint& p, double kappa) {
  DiffusionMatrix d{};
  d[0][1] = d[1][0] = kappa * p.excited_number();
  d[0][2] = d[2][0] = -0.5 * kappa * p.alpha * p.beta;
  d[1][3] = d[3][1] = -0.5 * kappa * p.alpha_plus * p.beta_plus;
  return d;
}

/// Noise matrix, columns ordered η₁..η₆. Principal-branch square roots.
inline NoiseMatrixPP pp_noise(const PhasePoint& p, double kappa) {
  const cplx i{0.0, 1.0};
  const double sk = std::sqrt(kappa);
  const cplx s = sk * principal_sqrt(p.alpha * p.beta);
  const cplx sp = sk * principal_sqrt(p.alpha_plus * p.beta_plus);
  const cplx r = sk * principal_sqrt(0.5 * p.excited_number());
  NoiseMatrixPP b{};
  b[0] = {0.5 * i * s, 0.0, -0.5 * s, 0.0, r, i * r};
  b[1] = {0.0, 0.5 * i * sp, 0.0, -0.5 * sp, r, -i * r};
  b[2] = {0.5 * i * s, 0.0, 0.5 * s, 0.0, 0.0, 0.0};
  b[3] = {0.0, 0.5 * i * sp, 0.0, 0.5 * sp, 0.0, 0.0};
  return b;
}

/// Itô → Stratonovich drift shift, −½ Σ_{j,k} B_kj ∂_k B_ij.
///
/// Only the √(αβ) and √(α⁺β⁺) columns contribute: along column 1 the
/// derivative of √(αβ) is (α + β)/(4√(αβ)), along column 3 it is
/// (β − α)/(4√(αβ)); the √(β⁺β/2) columns move α only and that root does
/// not depend on α. Every component picks up +κ x / 8.
inline PhasePoint pp_stratonovich_shift(const PhasePoint& p, double kappa) {
  return p * (0.125 * kappa);
}

struct PositivePModel {
  static constexpr std::size_t noise_count = 6;
  double kappa = 1.0;

  PhasePoint drift(const PhasePoint& p) const { return pp_drift(p, kappa); }
  PhasePoint stratonovich_shift(const PhasePoint& p) const { return pp_stratonovich_shift(p, kappa); }
  NoiseMatrixPP noise_matrix(const PhasePoint& p) const { return pp_noise(p, kappa); }

  // Square roots appearing in the noise matrix, pre-multiplied by √κ.
  struct Roots {
    cplx s, sp, r;
  };

  Roots roots(const PhasePoint& p) const {
    const double sk = std::sqrt(kappa);
    return {0.5 * sk * principal_sqrt(p.alpha * p.beta), 0.5 * sk * principal_sqrt(p.alpha_plus * p.beta_plus),
            sk * principal_sqrt(0.5 * p.excited_number())};
  }

  Roots roots(const PhasePoint& p, const Roots& anchor) const {
    const double sk = std::sqrt(kappa);
    return {0.5 * sk * continued_sqrt(p.alpha * p.beta, anchor.s),
            0.5 * sk * continued_sqrt(p.alpha_plus * p.beta_plus, anchor.sp),
            sk * continued_sqrt(0.5 * p.excited_number(), anchor.r)};
  }

  // Same as pp_noise(p) · dw, without the zero entries.
  PhasePoint noise_increment(const Roots& q, std::span<const double, noise_count> dw) const {
    const cplx ground_a = q.s * cplx(-dw[2], dw[0]);
    const cplx ground_ap = q.sp * cplx(-dw[3], dw[1]);
    return {ground_a + q.r * cplx(dw[4], dw[5]), ground_ap + q.r * cplx(dw[4], -dw[5]),
            q.s * cplx(dw[2], dw[0]), q.sp * cplx(dw[3], dw[1])};
  }

  PhasePoint noise_increment(const PhasePoint& p, std::span<const double, noise_count> dw) const {
    return noise_increment(roots(p), dw);
  }
};

inline PhasePoint pp_step_ito(const PhasePoint& p, double kappa, double dt,
                              std::span<const double, 6> normals) {
  return step_ito(PositivePModel{kappa}, p, dt, normals);
}

inline PhasePoint pp_step_stratonovich(const PhasePoint& p, double kappa, double dt,
                                       std::span<const double, 6> normals,
                                       unsigned iterations = default_midpoint_iterations) {
  return step_stratonovich(PositivePModel{kappa}, p, dt, normals, iterations);
}

}  // namespace bosedecay
