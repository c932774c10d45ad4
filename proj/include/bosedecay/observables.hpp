#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <utility>

#include "bosedecay/error.hpp"
#include "bosedecay/phase_point.hpp"
#include "bosedecay/statistics.hpp"

namespace bosedecay {

/// Physical, ordering-corrected expectations at one sample time.
struct MomentRecord {
  double t = 0.0;
  double n_a = 0.0;         // ⟨a†a⟩
  double n_a_stderr = 0.0;
  double n_b = 0.0;         // ⟨b†b⟩
  double n_b_stderr = 0.0;
  double n_a_n_b = 0.0;     // ⟨a†a b†b⟩
  double n_a_n_b_stderr = 0.0;
  double n_total = 0.0;     // ⟨a†a + b†b⟩
  double n_total_stderr = 0.0;
  cplx coh_ba{};            // ⟨a†b⟩, the σ⁻ analogue
  cplx coh_ab{};            // ⟨b†a⟩, the σ⁺ analogue
  double p_aa = std::numeric_limits<double>::quiet_NaN();
  double p_bb = std::numeric_limits<double>::quiet_NaN();
  // Largest |Im| among the number moments; should be statistical noise only.
  double imag_residual = 0.0;
  std::uint64_t live_count = 0;
};

/// Level probabilities normalised by the total population.
inline std::pair<double, double> state_probabilities(double n_a, double n_b) {
  const double total = n_a + n_b;
  if (!(total > 0.0)) throw Error("undefined probabilities (empty field)");
  return {n_a / total, n_b / total};
}

inline MomentRecord to_moment_record(const MomentSums& s, Representation rep, double t) {
  if (s.count == 0) throw Error("empty ensemble");
  MomentRecord r;
  r.t = t;
  r.live_count = s.count;
  r.n_a = s.get(Channel::GroundRe);
  r.n_b = s.get(Channel::ExcitedRe);
  r.n_total = s.get(Channel::TotalRe);
  r.n_a_stderr = s.standard_error(Channel::GroundRe);
  r.n_b_stderr = s.standard_error(Channel::ExcitedRe);
  r.n_total_stderr = s.standard_error(Channel::TotalRe);
  r.coh_ba = {s.get(Channel::LoweringRe), s.get(Channel::LoweringIm)};
  r.coh_ab = {s.get(Channel::RaisingRe), s.get(Channel::RaisingIm)};
  r.imag_residual = std::max({std::abs(s.get(Channel::GroundIm)), std::abs(s.get(Channel::ExcitedIm)),
                              std::abs(s.get(Channel::ProductIm))});

  if (rep == Representation::PositiveP) {
    r.n_a_n_b = s.get(Channel::ProductRe);
    r.n_a_n_b_stderr = s.standard_error(Channel::ProductRe);
  } else {
    // Symmetric → normal order, mode by mode: {a†a}_sym = a†a + 1/2.
    r.n_a -= 0.5;
    r.n_b -= 0.5;
    r.n_total -= 1.0;
    // mean(α⁺αβ⁺β) − (n_a + n_b)/2 − 1/4 == mean(α⁺αβ⁺β − (α⁺α + β⁺β)/2) + 1/4
    r.n_a_n_b = s.get(Channel::ProductShifted) + 0.25;
    r.n_a_n_b_stderr = s.standard_error(Channel::ProductShifted);
  }

  if (r.n_a + r.n_b > 0.0) std::tie(r.p_aa, r.p_bb) = state_probabilities(r.n_a, r.n_b);
  return r;
}

/// Converts a snapshot of trajectories into physical moments.
inline MomentRecord extract_moments(std::span<const PhasePoint> snapshot, Representation rep, double t) {
  if (snapshot.empty()) throw Error("empty ensemble");
  MomentSums sums;
  for (const PhasePoint& p : snapshot) {
    if (!p.finite()) throw Error("diverged point in snapshot");
    sums.push(p);
  }
  return to_moment_record(sums, rep, t);
}

}  // namespace bosedecay
