#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "bosedecay/error.hpp"
#include "bosedecay/rng.hpp"
#include "bosedecay/samplers.hpp"

namespace bosedecay {

/// Probabilities p(n_a, n_b) over the triangle n_a + n_b <= cutoff.
///
/// Storage is by total-number sector N = n_a + n_b, then by n_b, so each
/// sector is a contiguous block the decay chain never leaves.
class FockDistribution {
 public:
  explicit FockDistribution(unsigned cutoff)
      : cutoff_(cutoff), probs_((cutoff + 1u) * (cutoff + 2u) / 2u, 0.0) {}

  static FockDistribution delta(unsigned cutoff, unsigned n_a, unsigned n_b) {
    if (n_a + n_b > cutoff) throw Error("delta state lies outside the cutoff");
    FockDistribution d(cutoff);
    d(n_a, n_b) = 1.0;
    return d;
  }

  unsigned cutoff() const { return cutoff_; }

  static std::size_t index(unsigned n_a, unsigned n_b) {
    const std::size_t total = n_a + n_b;
    return total * (total + 1) / 2 + n_b;
  }

  double& operator()(unsigned n_a, unsigned n_b) { return probs_.at(index(n_a, n_b)); }
  double operator()(unsigned n_a, unsigned n_b) const { return probs_.at(index(n_a, n_b)); }

  std::span<double> data() { return probs_; }
  std::span<const double> data() const { return probs_; }

  // Initial mass lost to the cutoff (already renormalised away).
  double truncated_mass() const { return truncated_mass_; }
  void set_truncated_mass(double m) { truncated_mass_ = m; }

  double sum() const {
    double s = 0.0;
    for (double p : probs_) s += p;
    return s;
  }

  template <class F>
  double expectation(F&& f) const {
    double acc = 0.0;
    for (unsigned total = 0; total <= cutoff_; ++total)
      for (unsigned nb = 0; nb <= total; ++nb) acc += f(total - nb, nb) * probs_[index(total - nb, nb)];
    return acc;
  }

  double mean_ground() const { return expectation([](unsigned na, unsigned) { return double(na); }); }
  double mean_excited() const { return expectation([](unsigned, unsigned nb) { return double(nb); }); }
  double mean_product() const {
    return expectation([](unsigned na, unsigned nb) { return double(na) * double(nb); });
  }

 private:
  unsigned cutoff_;
  std::vector<double> probs_;
  double truncated_mass_ = 0.0;
};

struct ChainSample {
  double t = 0.0;
  double n_a = 0.0;
  double n_b = 0.0;
  double n_a_n_b = 0.0;
  FockDistribution probs{0};
};

struct ChainOptions {
  // RK4 step is dt_factor / (κ (N_max + 1) N_max).
  double dt_factor = 1e-3;
  bool keep_distributions = true;
};

namespace detail {

// dp/dt for the population chain (n_a, n_b) → (n_a + 1, n_b − 1) at rate
// κ (n_a + 1) n_b.
inline void chain_rhs(unsigned cutoff, double kappa, std::span<const double> p, std::span<double> dp) {
  for (unsigned total = 0; total <= cutoff; ++total) {
    const std::size_t base = std::size_t(total) * (total + 1) / 2;
    for (unsigned nb = 0; nb <= total; ++nb) {
      const unsigned na = total - nb;
      double v = -kappa * double(na + 1) * double(nb) * p[base + nb];
      if (nb < total) v += kappa * double(na) * double(nb + 1) * p[base + nb + 1];
      dp[base + nb] = v;
    }
  }
}

}  // namespace detail

/// Exact population dynamics of the decay master equation.
///
/// The jump operator a†b maps |n_a, n_b⟩⟨n_a, n_b| onto another diagonal
/// projector, and the anticommutator term is diagonal in the Fock basis, so
/// the diagonal of ρ evolves on its own as a birth–death chain.
inline std::vector<ChainSample> evolve_chain(const FockDistribution& dist0, double kappa,
                                             std::span<const double> tgrid, ChainOptions opts = {}) {
  if (tgrid.empty()) throw Error("evolve_chain: empty time grid");
  if (tgrid.front() < 0.0) throw Error("evolve_chain: time grid must start at t >= 0");
  for (std::size_t k = 1; k < tgrid.size(); ++k)
    if (!(tgrid[k] > tgrid[k - 1])) throw Error("evolve_chain: time grid must be strictly ascending");
  if (!(kappa > 0.0)) throw Error("evolve_chain: kappa must be positive");

  const unsigned cutoff = dist0.cutoff();
  const double rate_scale = std::max(1.0, double(cutoff + 1) * double(cutoff));
  const double h_max = opts.dt_factor / (kappa * rate_scale);

  const std::size_t n = dist0.data().size();
  std::vector<double> p(dist0.data().begin(), dist0.data().end());
  std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);

  auto rk4 = [&](double h) {
    detail::chain_rhs(cutoff, kappa, p, k1);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k1[i];
    detail::chain_rhs(cutoff, kappa, tmp, k2);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + 0.5 * h * k2[i];
    detail::chain_rhs(cutoff, kappa, tmp, k3);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = p[i] + h * k3[i];
    detail::chain_rhs(cutoff, kappa, tmp, k4);
    for (std::size_t i = 0; i < n; ++i) p[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  };

  std::vector<ChainSample> out;
  out.reserve(tgrid.size());
  double t = 0.0;
  for (double target : tgrid) {
    const double span = target - t;
    if (span > 0.0) {
      const auto steps = static_cast<std::size_t>(std::ceil(span / h_max - 1e-9));
      const double h = span / double(steps);
      for (std::size_t s = 0; s < steps; ++s) rk4(h);
    }
    t = target;
    FockDistribution snap(cutoff);
    std::copy(p.begin(), p.end(), snap.data().begin());
    snap.set_truncated_mass(dist0.truncated_mass());
    ChainSample sample{target, snap.mean_ground(), snap.mean_excited(), snap.mean_product(), FockDistribution(0)};
    if (opts.keep_distributions) sample.probs = std::move(snap);
    out.push_back(std::move(sample));
  }
  return out;
}

/// Poisson(mean) probabilities for n = 0..nmax.
inline std::vector<double> poisson_distribution(double mean, unsigned nmax) {
  std::vector<double> p(nmax + 1, 0.0);
  if (mean <= 0.0) {
    p[0] = 1.0;
    return p;
  }
  p[0] = std::exp(-mean);
  for (unsigned n = 1; n <= nmax; ++n) p[n] = p[n - 1] * mean / double(n);
  return p;
}

/// Closed-form number distribution of a mode state, n = 0..nmax.
///
/// The displaced thermal law is the Laguerre form
/// p(n) = nbar^n/(1+nbar)^(n+1) exp(−|d|²/(1+nbar)) L_n(−|d|²/(nbar(1+nbar))).
inline std::vector<double> exact_number_distribution(const ModeState& state, unsigned nmax) {
  if (const auto* c = std::get_if<Coherent>(&state)) return poisson_distribution(std::norm(c->amplitude), nmax);
  if (const auto* f = std::get_if<Fock>(&state)) {
    std::vector<double> p(nmax + 1, 0.0);
    if (f->n <= nmax) p[f->n] = 1.0;
    return p;
  }
  const auto& th = std::get<DisplacedThermal>(state);
  const double d2 = std::norm(th.displacement);
  if (th.nbar <= 0.0) return poisson_distribution(d2, nmax);
  const double nb = th.nbar;
  std::vector<double> p(nmax + 1, 0.0);
  const double x = -d2 / (nb * (1.0 + nb));
  // Laguerre by recurrence: (n+1)L_{n+1} = (2n+1−x)L_n − n L_{n−1}.
  double lm1 = 1.0;
  double l = 1.0 - x;
  double weight = std::exp(-d2 / (1.0 + nb)) / (1.0 + nb);
  const double ratio = nb / (1.0 + nb);
  for (unsigned n = 0; n <= nmax; ++n) {
    const double ln = n == 0 ? 1.0 : l;
    p[n] = weight * ln;
    weight *= ratio;
    if (n >= 1) {
      const double next = ((2.0 * n + 1.0 - x) * l - double(n) * lm1) / double(n + 1);
      lm1 = l;
      l = next;
    }
  }
  return p;
}

namespace detail {

inline double triangle_mass(std::span<const double> ground, std::span<const double> excited, unsigned cutoff) {
  double m = 0.0;
  for (unsigned na = 0; na <= cutoff; ++na)
    for (unsigned nb = 0; na + nb <= cutoff; ++nb) m += ground[na] * excited[nb];
  return m;
}

}  // namespace detail

/// Smallest total-number cutoff whose exact truncated mass is below `tail`.
inline unsigned default_cutoff(const InitialStateSpec& spec, double tail = 1e-8, unsigned limit = 400) {
  for (unsigned cutoff = 1; cutoff <= limit; ++cutoff) {
    const auto g = exact_number_distribution(spec.ground, cutoff);
    const auto e = exact_number_distribution(spec.excited, cutoff);
    if (1.0 - detail::triangle_mass(g, e, cutoff) < tail) return cutoff;
  }
  throw Error("no cutoff below the limit captures the initial state");
}

inline constexpr double max_truncated_mass = 1e-6;

namespace detail {

// Mode number distribution as a mixture of Poissonians over the classical
// P-function; exact for coherent and Fock states.
inline std::vector<double> sampled_number_distribution(const ModeState& state, unsigned cutoff,
                                                       std::size_t mc_samples, RandomStream& rng) {
  const auto* th = std::get_if<DisplacedThermal>(&state);
  if (th == nullptr || th->nbar == 0.0) return exact_number_distribution(state, cutoff);
  if (mc_samples == 0) throw Error("initial_distribution: mc_samples must be positive");
  std::vector<double> acc(cutoff + 1, 0.0);
  for (std::size_t s = 0; s < mc_samples; ++s) {
    const ModePair b = sample_displaced_thermal(Representation::PositiveP, th->displacement, th->nbar, rng);
    const auto pn = poisson_distribution(std::norm(b.amplitude), cutoff);
    for (unsigned n = 0; n <= cutoff; ++n) acc[n] += pn[n];
  }
  for (double& v : acc) v /= double(mc_samples);
  return acc;
}

}  // namespace detail

/// Product-state Fock distribution for the chain oracle.
///
/// Thermal components are Monte-Carlo mixtures of Poissonians drawn from the
/// Gaussian P-function. The result is renormalised over the triangle; the
/// removed mass must stay below 1e-6.
inline FockDistribution initial_distribution(const InitialStateSpec& spec, unsigned cutoff,
                                             std::size_t mc_samples, RandomStream& rng) {
  validate(spec, Representation::PositiveP);
  const auto g = detail::sampled_number_distribution(spec.ground, cutoff, mc_samples, rng);
  const auto e = detail::sampled_number_distribution(spec.excited, cutoff, mc_samples, rng);
  const double mass = detail::triangle_mass(g, e, cutoff);
  const double lost = 1.0 - mass;
  if (!(lost < max_truncated_mass)) throw Error("cutoff too small");
  FockDistribution d(cutoff);
  for (unsigned na = 0; na <= cutoff; ++na)
    for (unsigned nb = 0; na + nb <= cutoff; ++nb) d(na, nb) = g[na] * e[nb] / mass;
  d.set_truncated_mass(std::max(0.0, lost));
  return d;
}

/// Mean-field excited population from dN_b/dt = −κ (N_T − N_b + 1) N_b.
inline double meanfield_nb(double t, double n_total, double nb0, double kappa) {
  if (nb0 < 0.0 || n_total < 0.0 || kappa < 0.0) throw Error("meanfield_nb: negative input");
  if (nb0 > n_total) throw Error("meanfield_nb: N_b(0) exceeds N_T");
  const double rate = (n_total + 1.0) * kappa * t;
  // Divide through by e^{rate} so large κt underflows to zero instead of inf/inf.
  const double decay = std::exp(-rate);
  return nb0 * (n_total + 1.0) * decay / (nb0 * decay + (n_total + 1.0 - nb0));
}

inline double exponential_reference(double t, double kappa, double nb0) { return nb0 * std::exp(-kappa * t); }

/// Atomic energy of the collective-emission formula with μ = 1, in units
/// where a ground (excited) atom carries −1/2 (+1/2).
inline double rehler_eberly_energy(double t, double nb0, double kappa) {
  if (nb0 < 0.0) throw Error("rehler_eberly_energy: negative N_b(0)");
  const double e = std::exp((nb0 + 1.0) * kappa * t);
  if (std::isinf(e)) return -0.5 * nb0;
  return -0.5 * nb0 * (e - (nb0 + 2.0)) / (e + nb0);
}

}  // namespace bosedecay
