#pragma once

#include <cmath>
#include <span>
#include <string_view>

#include "bosedecay/integrators.hpp"
#include "bosedecay/phase_point.hpp"

namespace bosedecay {

/// Which excited-mode drift to use for the truncated Wigner equations.
///
/// FpeConsistent takes −(κ/2)(α⁺α + 1/2)β from the Fokker–Planck drift and
/// reproduces the exact population flow. PaperVerbatim takes
/// −(κ/2)(α⁺α − 1/2)β as printed alongside the stochastic equations.
enum class WignerDriftVariant { FpeConsistent, PaperVerbatim };

inline std::string_view to_string(WignerDriftVariant v) {
  return v == WignerDriftVariant::FpeConsistent ? "fpe_consistent" : "paper_verbatim";
}

using NoiseMatrixW = NoiseMatrix<8>;

inline PhasePoint w_drift(const PhasePoint& p, double kappa,
                          WignerDriftVariant variant = WignerDriftVariant::FpeConsistent) {
  const cplx gain = 0.5 * kappa * (p.excited_number() - 0.5);
  const double offset = variant == WignerDriftVariant::FpeConsistent ? 0.5 : -0.5;
  const cplx loss = -0.5 * kappa * (p.ground_number() + offset);
  return {gain * p.alpha, gain * p.alpha_plus, loss * p.beta, loss * p.beta_plus};
}

/// Second-order (truncated) diffusion matrix in the doubled space.
inline DiffusionMatrix w_diffusion(const PhasePoint& p, double kappa) {
  DiffusionMatrix d{};
  d[0][1] = d[1][0] = 0.5 * kappa * (p.excited_number() - 0.5);
  d[2][3] = d[3][2] = 0.5 * kappa * (p.ground_number() + 0.5);
  d[0][2] = d[2][0] = -0.5 * kappa * p.alpha * p.beta;
  d[1][3] = d[3][1] = -0.5 * kappa * p.alpha_plus * p.beta_plus;
  return d;
}

/// [Ã | C̃], columns η₁..η₈. The roots are complex: β⁺β − 1/2 is routinely
/// negative or complex in the doubled space.
inline NoiseMatrixW w_noise(const PhasePoint& p, double kappa) {
  const cplx i{0.0, 1.0};
  const cplx a = 0.5 * principal_sqrt(kappa * (p.excited_number() - 0.5));
  const cplx q = 0.5 * principal_sqrt(kappa * (p.ground_number() + 0.5));
  const cplx s = 0.5 * principal_sqrt(kappa * p.alpha * p.beta);
  const cplx sp = 0.5 * principal_sqrt(kappa * p.alpha_plus * p.beta_plus);
  NoiseMatrixW b{};
  b[0] = {a, i * a, 0.0, 0.0, i * s, 0.0, -s, 0.0};
  b[1] = {a, -i * a, 0.0, 0.0, 0.0, i * sp, 0.0, -sp};
  b[2] = {0.0, 0.0, q, i * q, i * s, 0.0, s, 0.0};
  b[3] = {0.0, 0.0, q, -i * q, 0.0, i * sp, 0.0, sp};
  return b;
}

// The Ã columns each move one mode with a root that depends only on the
// other mode, so they add nothing; the C̃ block is the positive-P one.
inline PhasePoint w_stratonovich_shift(const PhasePoint& p, double kappa) {
  return p * (0.125 * kappa);
}

struct WignerModel {
  static constexpr std::size_t noise_count = 8;
  double kappa = 1.0;
  WignerDriftVariant variant = WignerDriftVariant::FpeConsistent;

  PhasePoint drift(const PhasePoint& p) const { return w_drift(p, kappa, variant); }
  PhasePoint stratonovich_shift(const PhasePoint& p) const { return w_stratonovich_shift(p, kappa); }
  NoiseMatrixW noise_matrix(const PhasePoint& p) const { return w_noise(p, kappa); }

  struct Roots {
    cplx a, q, s, sp;
  };

  Roots roots(const PhasePoint& p) const {
    const double sk = 0.5 * std::sqrt(kappa);
    return {sk * principal_sqrt(p.excited_number() - 0.5), sk * principal_sqrt(p.ground_number() + 0.5),
            sk * principal_sqrt(p.alpha * p.beta), sk * principal_sqrt(p.alpha_plus * p.beta_plus)};
  }

  Roots roots(const PhasePoint& p, const Roots& anchor) const {
    const double sk = 0.5 * std::sqrt(kappa);
    return {sk * continued_sqrt(p.excited_number() - 0.5, anchor.a),
            sk * continued_sqrt(p.ground_number() + 0.5, anchor.q),
            sk * continued_sqrt(p.alpha * p.beta, anchor.s),
            sk * continued_sqrt(p.alpha_plus * p.beta_plus, anchor.sp)};
  }

  PhasePoint noise_increment(const Roots& r, std::span<const double, noise_count> dw) const {
    return {r.a * cplx(dw[0], dw[1]) + r.s * cplx(-dw[6], dw[4]),
            r.a * cplx(dw[0], -dw[1]) + r.sp * cplx(-dw[7], dw[5]),
            r.q * cplx(dw[2], dw[3]) + r.s * cplx(dw[6], dw[4]),
            r.q * cplx(dw[2], -dw[3]) + r.sp * cplx(dw[7], dw[5])};
  }

  PhasePoint noise_increment(const PhasePoint& p, std::span<const double, noise_count> dw) const {
    return noise_increment(roots(p), dw);
  }
};

inline PhasePoint w_step_ito(const PhasePoint& p, double kappa, double dt,
                             std::span<const double, 8> normals,
                             WignerDriftVariant variant = WignerDriftVariant::FpeConsistent) {
  return step_ito(WignerModel{kappa, variant}, p, dt, normals);
}

inline PhasePoint w_step_stratonovich(const PhasePoint& p, double kappa, double dt,
                                      std::span<const double, 8> normals,
                                      WignerDriftVariant variant = WignerDriftVariant::FpeConsistent,
                                      unsigned iterations = default_midpoint_iterations) {
  return step_stratonovich(WignerModel{kappa, variant}, p, dt, normals, iterations);
}

}  // namespace bosedecay
