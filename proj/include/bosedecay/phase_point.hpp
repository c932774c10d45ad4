#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <string_view>

#include "bosedecay/error.hpp"

namespace bosedecay {

using cplx = std::complex<double>;

/// State of one trajectory in the doubled phase space.
///
/// `alpha`/`alpha_plus` belong to the ground mode, `beta`/`beta_plus` to the
/// excited mode. The `_plus` variables are independent of the conjugate of
/// their partner; they only coincide for classical (real-P) samples.
struct PhasePoint {
  cplx alpha{};
  cplx alpha_plus{};
  cplx beta{};
  cplx beta_plus{};

  static constexpr std::size_t size = 4;

  cplx& operator[](std::size_t i) {
    switch (i) {
      case 0: return alpha;
      case 1: return alpha_plus;
      case 2: return beta;
      default: return beta_plus;
    }
  }
  const cplx& operator[](std::size_t i) const {
    return const_cast<PhasePoint&>(*this)[i];
  }

  bool finite() const {
    for (std::size_t i = 0; i < size; ++i) {
      const cplx z = (*this)[i];
      if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) return false;
    }
    return true;
  }

  cplx ground_number() const { return alpha_plus * alpha; }
  cplx excited_number() const { return beta_plus * beta; }

  PhasePoint& operator+=(const PhasePoint& o) {
    alpha += o.alpha;
    alpha_plus += o.alpha_plus;
    beta += o.beta;
    beta_plus += o.beta_plus;
    return *this;
  }
  PhasePoint& operator-=(const PhasePoint& o) {
    alpha -= o.alpha;
    alpha_plus -= o.alpha_plus;
    beta -= o.beta;
    beta_plus -= o.beta_plus;
    return *this;
  }
  PhasePoint& operator*=(double s) {
    alpha *= s;
    alpha_plus *= s;
    beta *= s;
    beta_plus *= s;
    return *this;
  }

  friend PhasePoint operator+(PhasePoint a, const PhasePoint& b) { return a += b; }
  friend PhasePoint operator-(PhasePoint a, const PhasePoint& b) { return a -= b; }
  friend PhasePoint operator*(PhasePoint a, double s) { return a *= s; }
  friend PhasePoint operator*(double s, PhasePoint a) { return a *= s; }
  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

/// Principal-branch complex square root, same branch cut as std::sqrt.
/// Several times cheaper than the library csqrt, which dominates a step.
inline cplx principal_sqrt(cplx z) {
  const double x = z.real();
  const double y = z.imag();
  if (x == 0.0 && y == 0.0) return {0.0, y};
  const double r = std::sqrt(x * x + y * y);
  if (!(r > 0.0) || !std::isfinite(r)) return std::sqrt(z);  // under/overflow of |z|²
  const double w = std::sqrt(0.5 * (r + std::abs(x)));
  if (x >= 0.0) return {w, y / (2.0 * w)};
  return {std::abs(y) / (2.0 * w), std::copysign(w, y)};
}

/// The square root of `z` on the branch nearest `ref`. Tracking a root along
/// a short path this way keeps it continuous across the principal cut.
inline cplx continued_sqrt(cplx z, cplx ref) {
  const cplx r = principal_sqrt(z);
  return r.real() * ref.real() + r.imag() * ref.imag() < 0.0 ? -r : r;
}

enum class Representation { PositiveP, TruncatedWigner };

inline std::string_view to_string(Representation r) {
  return r == Representation::PositiveP ? "positive_p" : "wigner";
}

// Rows are (alpha, alpha_plus, beta, beta_plus), one column per real noise.
template <std::size_t Cols>
using NoiseMatrix = std::array<std::array<cplx, Cols>, PhasePoint::size>;

using DiffusionMatrix = std::array<std::array<cplx, PhasePoint::size>, PhasePoint::size>;

/// B Bᵀ with the plain transpose: the doubled phase space is holomorphic, so no
/// conjugation enters the diffusion identity.
template <std::size_t Cols>
DiffusionMatrix times_transpose(const NoiseMatrix<Cols>& b) {
  DiffusionMatrix d{};
  for (std::size_t i = 0; i < PhasePoint::size; ++i)
    for (std::size_t j = 0; j < PhasePoint::size; ++j) {
      cplx acc{};
      for (std::size_t k = 0; k < Cols; ++k) acc += b[i][k] * b[j][k];
      d[i][j] = acc;
    }
  return d;
}

template <std::size_t Cols>
PhasePoint apply_noise(const NoiseMatrix<Cols>& b, std::span<const double, Cols> dw) {
  PhasePoint out;
  for (std::size_t i = 0; i < PhasePoint::size; ++i) {
    cplx acc{};
    for (std::size_t k = 0; k < Cols; ++k) acc += b[i][k] * dw[k];
    out[i] = acc;
  }
  return out;
}

inline double max_abs_difference(const DiffusionMatrix& a, const DiffusionMatrix& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < PhasePoint::size; ++i)
    for (std::size_t j = 0; j < PhasePoint::size; ++j)
      worst = std::max(worst, std::abs(a[i][j] - b[i][j]));
  return worst;
}

}  // namespace bosedecay
