#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <mutex>
#include <sstream>
#include <thread>
#include <vector>

#include "bosedecay/error.hpp"
#include "bosedecay/integrators.hpp"
#include "bosedecay/observables.hpp"
#include "bosedecay/positive_p.hpp"
#include "bosedecay/rng.hpp"
#include "bosedecay/samplers.hpp"
#include "bosedecay/statistics.hpp"
#include "bosedecay/wigner.hpp"

namespace bosedecay {

inline double default_dt(double kappa) { return 1e-3 / kappa; }

struct SimulationConfig {
  Representation representation = Representation::PositiveP;
  Scheme scheme = Scheme::Stratonovich;
  WignerDriftVariant wigner_drift_variant = WignerDriftVariant::FpeConsistent;
  double kappa = 1.0;
  double t_final = 1.0;
  double dt = 1e-3;
  std::size_t sample_stride = 100;
  std::uint64_t trajectories = 1;
  std::uint64_t seed = 0;
  double divergence_threshold = default_divergence_threshold;
  double max_divergent_fraction = 1e-3;
  unsigned midpoint_iterations = default_midpoint_iterations;
  InitialStateSpec initial_state{};

  void validate() const {
    if (!(kappa > 0.0) || !std::isfinite(kappa)) throw Error("kappa must be positive");
    if (!(t_final > 0.0) || !std::isfinite(t_final)) throw Error("t_final must be positive");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw Error("dt must be positive");
    if (dt > t_final) throw Error("dt exceeds t_final");
    if (sample_stride < 1) throw Error("sample_stride must be at least 1");
    if (trajectories < 1) throw Error("trajectories must be at least 1");
    if (!(divergence_threshold > 0.0)) throw Error("divergence_threshold must be positive");
    if (!(max_divergent_fraction >= 0.0 && max_divergent_fraction <= 1.0))
      throw Error("max_divergent_fraction must lie in [0, 1]");
    if (midpoint_iterations < 1) throw Error("midpoint_iterations must be at least 1");
    bosedecay::validate(initial_state, representation);
  }

  std::size_t step_count() const {
    return static_cast<std::size_t>(std::floor(t_final / dt + 1e-9));
  }

  // Steps up to and including the last sample; later steps are never observed.
  std::size_t last_sample_step() const { return step_count() / sample_stride * sample_stride; }

  std::vector<double> sample_times() const {
    std::vector<double> t;
    for (std::size_t s = 0; s <= last_sample_step(); s += sample_stride) t.push_back(double(s) * dt);
    return t;
  }
};

struct ObservableSeries {
  Representation representation = Representation::PositiveP;
  std::vector<MomentRecord> records;
  std::vector<std::uint64_t> divergent;  // cumulative, per sample time
  std::uint64_t trajectories = 0;

  std::vector<double> times() const {
    std::vector<double> t;
    t.reserve(records.size());
    for (const auto& r : records) t.push_back(r.t);
    return t;
  }
};

namespace detail {

template <PhaseSpaceModel M>
void integrate_trajectory(const M& model, const SimulationConfig& cfg, std::uint64_t index,
                          StatAccumulator& acc) {
  RandomStream rng(cfg.seed, index);
  PhasePoint p = sample_initial(cfg.representation, cfg.initial_state, rng);
  const std::size_t last = cfg.last_sample_step();
  std::array<double, M::noise_count> normals{};
  const std::span<const double, M::noise_count> normal_view(normals);
  std::size_t sample = 0;
  for (std::size_t s = 0;; ++s) {
    if (s % cfg.sample_stride == 0) {
      if (divergence_check(p, cfg.divergence_threshold)) {
        acc.mark_divergent_from(sample);
        return;
      }
      acc.at(sample++).push(p);
      if (s == last) return;
    }
    for (double& z : normals) z = rng.normal();
    p = step(model, cfg.scheme, p, cfg.dt, normal_view, cfg.midpoint_iterations);
    if (divergence_check(p, cfg.divergence_threshold)) {
      // Frozen: excluded from this sample onwards.
      acc.mark_divergent_from(sample);
      return;
    }
  }
}

}  // namespace detail

/// Serial accumulation of trajectories [first, last).
inline StatAccumulator accumulate_trajectories(const SimulationConfig& cfg, std::uint64_t first,
                                               std::uint64_t last) {
  StatAccumulator acc(cfg.sample_times());
  if (cfg.representation == Representation::PositiveP) {
    const PositivePModel model{cfg.kappa};
    for (std::uint64_t i = first; i < last; ++i) detail::integrate_trajectory(model, cfg, i, acc);
  } else {
    const WignerModel model{cfg.kappa, cfg.wigner_drift_variant};
    for (std::uint64_t i = first; i < last; ++i) detail::integrate_trajectory(model, cfg, i, acc);
  }
  return acc;
}

/// Applies the divergence policy and converts raw moments to physical ones.
inline ObservableSeries finalize_series(const SimulationConfig& cfg, const StatAccumulator& acc) {
  const std::uint64_t lost = acc.divergent_total();
  const double fraction = double(lost) / double(cfg.trajectories);
  if (lost > 0 && fraction > cfg.max_divergent_fraction) {
    std::size_t onset = 0;
    while (acc.divergent_at(onset) == 0) ++onset;
    std::ostringstream msg;
    msg << lost << " of " << cfg.trajectories << " trajectories diverged (fraction " << fraction
        << " > " << cfg.max_divergent_fraction << "); onset before t = " << acc.times()[onset];
    throw Error(msg.str());
  }
  ObservableSeries out;
  out.representation = cfg.representation;
  out.trajectories = cfg.trajectories;
  for (std::size_t k = 0; k < acc.size(); ++k) {
    if (acc.at(k).count == 0) throw Error("no surviving trajectories at t = " + std::to_string(acc.times()[k]));
    out.records.push_back(to_moment_record(acc.at(k), cfg.representation, acc.times()[k]));
    out.divergent.push_back(acc.divergent_at(k));
  }
  return out;
}

inline constexpr std::uint64_t trajectory_block_size = 1024;

/// Integrates the whole ensemble on `threads` workers (0 = hardware count).
///
/// Trajectories are grouped in fixed blocks that are merged in index order,
/// so the output depends on (config, seed) only.
inline StatAccumulator accumulate_ensemble(const SimulationConfig& cfg, unsigned threads = 0) {
  cfg.validate();
  const std::uint64_t blocks = (cfg.trajectories + trajectory_block_size - 1) / trajectory_block_size;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::uint64_t>(threads, blocks));

  std::vector<StatAccumulator> partial(blocks);
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;

  auto worker = [&] {
    try {
      for (std::uint64_t b = next++; b < blocks; b = next++) {
        const std::uint64_t first = b * trajectory_block_size;
        const std::uint64_t last = std::min(cfg.trajectories, first + trajectory_block_size);
        partial[b] = accumulate_trajectories(cfg, first, last);
      }
    } catch (...) {
      std::lock_guard lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next = blocks;
    }
  };

  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  StatAccumulator total(cfg.sample_times());
  for (const auto& p : partial) total.merge(p);
  return total;
}

inline ObservableSeries run_ensemble(const SimulationConfig& cfg, unsigned threads = 0) {
  return finalize_series(cfg, accumulate_ensemble(cfg, threads));
}

}  // namespace bosedecay
