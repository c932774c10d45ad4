#pragma once

#include <cmath>
#include <cstddef>
#include <array>
#include <span>
#include <vector>

#include "bosedecay/phase_point.hpp"
#include "bosedecay/integrators.hpp"
#include "bosedecay/rng.hpp"

namespace bosedecay::testing {

/// Mean and standard error of a plain sample.
struct SampleMean {
  double mean = 0.0;
  double se = 0.0;  // standard error
};

inline SampleMean sample_mean(const std::vector<double>& x) {
  double m = 0.0;
  for (double v : x) m += v;
  m /= double(x.size());
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double var = x.size() > 1 ? ss / double(x.size() - 1) : 0.0;
  return {m, std::sqrt(var / double(x.size()))};
}

inline PhasePoint random_point(RandomStream& rng, double scale = 1.0) {
  auto z = [&] { return cplx(scale * (2.0 * rng.uniform() - 1.0), scale * (2.0 * rng.uniform() - 1.0)); };
  PhasePoint p;
  p.alpha = z();
  p.alpha_plus = z();
  p.beta = z();
  p.beta_plus = z();
  return p;
}

/// −½ Σ_{j,k} B_kj ∂_k B_ij with holomorphic derivatives taken by central
/// differences of the model's noise matrix.
template <class M>
PhasePoint numeric_stratonovich_shift(const M& model, const PhasePoint& p, double h = 1e-6) {
  const auto b = model.noise_matrix(p);
  PhasePoint out;
  for (std::size_t k = 0; k < PhasePoint::size; ++k) {
    PhasePoint up = p, down = p;
    up[k] += h;
    down[k] -= h;
    const auto bu = model.noise_matrix(up);
    const auto bd = model.noise_matrix(down);
    for (std::size_t i = 0; i < PhasePoint::size; ++i)
      for (std::size_t j = 0; j < M::noise_count; ++j)
        out[i] -= 0.5 * b[k][j] * (bu[i][j] - bd[i][j]) / (2.0 * h);
  }
  return out;
}

/// Mean over the ensemble of (Δ(β⁺β)/h − rhs), using one antithetic pair of
/// Itô steps per point so the linear noise term cancels exactly.
template <class M, class Rhs>
SampleMean excited_flow_residual(const M& model, const std::vector<PhasePoint>& points, double h,
                                 RandomStream& rng, Rhs rhs) {
  std::vector<double> y(points.size());
  std::array<double, M::noise_count> xi{}, neg{};
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < M::noise_count; ++k) {
      xi[k] = rng.normal();
      neg[k] = -xi[k];
    }
    const PhasePoint& p = points[i];
    const PhasePoint u = step_ito(model, p, h, std::span<const double, M::noise_count>(xi));
    const PhasePoint d = step_ito(model, p, h, std::span<const double, M::noise_count>(neg));
    const double delta = 0.5 * (u.excited_number() + d.excited_number()).real() - p.excited_number().real();
    y[i] = delta / h - rhs(p);
  }
  return sample_mean(y);
}

}  // namespace bosedecay::testing
