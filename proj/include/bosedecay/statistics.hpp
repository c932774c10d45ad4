#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "bosedecay/error.hpp"
#include "bosedecay/phase_point.hpp"

namespace bosedecay {

/// Raw c-number products tracked per trajectory. Ordering corrections are
/// applied later, in one place (`to_moment_record`).
enum class Channel : std::size_t {
  GroundRe,         // Re α⁺α
  ExcitedRe,        // Re β⁺β
  ProductRe,        // Re α⁺αβ⁺β
  TotalRe,          // Re (α⁺α + β⁺β)
  ProductShifted,   // Re (α⁺αβ⁺β − (α⁺α + β⁺β)/2), symmetric-order helper
  LoweringRe,       // Re α⁺β
  LoweringIm,       // Im α⁺β
  RaisingRe,        // Re β⁺α
  RaisingIm,        // Im β⁺α
  GroundIm,         // Im α⁺α
  ExcitedIm,        // Im β⁺β
  ProductIm,        // Im α⁺αβ⁺β
  Count
};

inline constexpr std::size_t channel_count = static_cast<std::size_t>(Channel::Count);

inline std::array<double, channel_count> raw_channels(const PhasePoint& p) {
  const cplx na = p.ground_number();
  const cplx nb = p.excited_number();
  const cplx nab = na * nb;
  const cplx lower = p.alpha_plus * p.beta;
  const cplx raise = p.beta_plus * p.alpha;
  return {na.real(),   nb.real(),    nab.real(), na.real() + nb.real(),
          nab.real() - 0.5 * (na.real() + nb.real()),
          lower.real(), lower.imag(), raise.real(), raise.imag(),
          na.imag(),   nb.imag(),    nab.imag()};
}

/// Count / mean / M2 for every channel at a single sample time.
struct MomentSums {
  std::uint64_t count = 0;
  std::array<double, channel_count> mean{};
  std::array<double, channel_count> m2{};

  void push(const PhasePoint& p) { push(raw_channels(p)); }

  void push(const std::array<double, channel_count>& x) {
    ++count;
    const double n = static_cast<double>(count);
    for (std::size_t c = 0; c < channel_count; ++c) {
      const double delta = x[c] - mean[c];
      mean[c] += delta / n;
      m2[c] += delta * (x[c] - mean[c]);
    }
  }

  // Pairwise (Chan et al.) combination.
  void merge(const MomentSums& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double na = static_cast<double>(count);
    const double nb = static_cast<double>(o.count);
    const double n = na + nb;
    for (std::size_t c = 0; c < channel_count; ++c) {
      const double delta = o.mean[c] - mean[c];
      mean[c] += delta * (nb / n);
      m2[c] += o.m2[c] + delta * delta * (na * nb / n);
    }
    count += o.count;
  }

  double get(Channel c) const { return mean[static_cast<std::size_t>(c)]; }

  double variance(Channel c) const {
    if (count < 2) return 0.0;
    return std::max(0.0, m2[static_cast<std::size_t>(c)]) / static_cast<double>(count - 1);
  }

  double standard_error(Channel c) const {
    if (count < 2) return 0.0;
    return std::sqrt(variance(c) / static_cast<double>(count));
  }
};

/// Ensemble statistics over a fixed grid of sample times.
class StatAccumulator {
 public:
  StatAccumulator() = default;
  explicit StatAccumulator(std::vector<double> times)
      : times_(std::move(times)), samples_(times_.size()), divergent_(times_.size(), 0) {}

  const std::vector<double>& times() const { return times_; }
  std::size_t size() const { return times_.size(); }

  MomentSums& at(std::size_t k) { return samples_.at(k); }
  const MomentSums& at(std::size_t k) const { return samples_.at(k); }

  // Divergent trajectories (cumulative) as of sample k.
  std::uint64_t divergent_at(std::size_t k) const { return divergent_.at(k); }
  std::uint64_t divergent_total() const { return divergent_.empty() ? 0 : divergent_.back(); }

  // Records a trajectory that left the live set at or before sample `first_missing`.
  void mark_divergent_from(std::size_t first_missing) {
    for (std::size_t k = first_missing; k < divergent_.size(); ++k) ++divergent_[k];
  }

  void merge(const StatAccumulator& other) {
    if (other.times_ != times_) throw Error("cannot merge accumulators with different sample grids");
    for (std::size_t k = 0; k < samples_.size(); ++k) {
      samples_[k].merge(other.samples_[k]);
      divergent_[k] += other.divergent_[k];
    }
  }

 private:
  std::vector<double> times_;
  std::vector<MomentSums> samples_;
  std::vector<std::uint64_t> divergent_;
};

inline StatAccumulator merge_accumulators(StatAccumulator a, const StatAccumulator& b) {
  a.merge(b);
  return a;
}

}  // namespace bosedecay
