#include <array>
#include <cmath>
#include <span>
#include <vector>

#include <gtest/gtest.h>

#include "bosedecay/engine.hpp"
#include "bosedecay/wigner.hpp"
#include "support.hpp"

using namespace bosedecay;
using bosedecay::testing::numeric_stratonovich_shift;
using bosedecay::testing::random_point;

namespace {

constexpr auto fpe = WignerDriftVariant::FpeConsistent;
constexpr auto verbatim = WignerDriftVariant::PaperVerbatim;

std::vector<PhasePoint> coherent_samples(std::size_t n, std::uint64_t seed) {
  RandomStream rng(seed);
  std::vector<PhasePoint> pts(n);
  for (auto& p : pts) p = sample_initial(Representation::TruncatedWigner, {Coherent{}, Coherent{{1.0, 0.0}}}, rng);
  return pts;
}

// Ordering-corrected −κ(n_b + n_a n_b) written per trajectory; linear in the
// raw products, so its ensemble mean is the corrected expectation.
double corrected_rhs(const PhasePoint& p, double kappa) {
  const double na = p.ground_number().real();
  const double nb = p.excited_number().real();
  const double nab = (p.ground_number() * p.excited_number()).real();
  return -kappa * ((nb - 0.5) + (nab - 0.5 * (na + nb) + 0.25));
}

}  // namespace

TEST(WDrift, VariantsDifferInExcitedMode) {
  const PhasePoint p{{1, 0}, {1, 0}, {1, 0}, {1, 0}};
  EXPECT_NEAR(std::abs(w_drift(p, 1.0, fpe).beta - cplx(-0.75)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(w_drift(p, 1.0, verbatim).beta - cplx(-0.25)), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(w_drift(p, 1.0, fpe).beta_plus - cplx(-0.75)), 0.0, 1e-15);
  EXPECT_EQ(w_drift(p, 1.0, fpe).alpha, w_drift(p, 1.0, verbatim).alpha);
}

TEST(WDrift, VacuumGroundStillDamps) {
  const PhasePoint p{{}, {}, {0.3, 0.4}, {0.3, -0.4}};
  const PhasePoint d = w_drift(p, 0.8, fpe);
  EXPECT_NEAR(std::abs(d.beta - (-0.2 * p.beta)), 0.0, 1e-15);
}

TEST(WDrift, HalfExcitationFreezesGround) {
  const double h = std::sqrt(0.5);
  const PhasePoint p{{0.3, 0.2}, {0.1, 0.5}, {h, 0}, {h, 0}};
  const PhasePoint d = w_drift(p, 1.0, fpe);
  EXPECT_LT(std::abs(d.alpha), 1e-16);
  EXPECT_LT(std::abs(d.alpha_plus), 1e-16);
}

TEST(WNoise, SymbolicProducts) {
  const PhasePoint ones{{1, 0}, {1, 0}, {1, 0}, {1, 0}};
  const auto d = times_transpose(w_noise(ones, 1.0));
  EXPECT_NEAR(std::abs(d[0][1] - 0.25), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d[2][3] - 0.75), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(d[0][2] + 0.5), 0.0, 1e-15);
}

TEST(WNoise, HalfExcitationSilencesGroundColumns) {
  const PhasePoint p{{0.3, 0.2}, {0.1, 0.5}, {1, 0}, {0.5, 0}};
  const auto b = w_noise(p, 1.0);
  for (std::size_t j = 0; j < 4; ++j) {
    EXPECT_EQ(b[0][j], cplx{});
    EXPECT_EQ(b[1][j], cplx{});
  }
}

TEST(WNoise, DiffusionIdentityAtRandomPoints) {
  RandomStream rng(1);
  for (int i = 0; i < 1000; ++i) {
    const PhasePoint p = random_point(rng, 1.5);
    const double kappa = 0.1 + rng.uniform();
    EXPECT_LT(max_abs_difference(times_transpose(w_noise(p, kappa)), w_diffusion(p, kappa)), 1e-12);
  }
}

TEST(WNoise, IncrementMatchesMatrixProduct) {
  RandomStream rng(2);
  const WignerModel model{0.6, fpe};
  for (int i = 0; i < 200; ++i) {
    const PhasePoint p = random_point(rng, 2.0);
    std::array<double, 8> dw{};
    for (double& v : dw) v = rng.normal();
    const PhasePoint a = model.noise_increment(p, dw);
    const PhasePoint b = apply_noise(w_noise(p, 0.6), std::span<const double, 8>(dw));
    for (std::size_t k = 0; k < 4; ++k) EXPECT_LT(std::abs(a[k] - b[k]), 1e-14);
  }
}

TEST(WStratonovichShift, MatchesFiniteDifferenceCorrection) {
  RandomStream rng(3);
  const WignerModel model{0.8, fpe};
  for (int i = 0; i < 200; ++i) {
    const PhasePoint p = random_point(rng, 1.5);
    const PhasePoint fd = numeric_stratonovich_shift(model, p);
    const PhasePoint an = w_stratonovich_shift(p, 0.8);
    for (std::size_t k = 0; k < 4; ++k) EXPECT_LT(std::abs(fd[k] - an[k]), 1e-6) << i << ' ' << k;
  }
}

TEST(WStepIto, ZeroNoiseIsDriftStep) {
  const PhasePoint p{{0.3, 0.1}, {0.3, -0.1}, {0.9, 0.2}, {0.9, -0.2}};
  const std::array<double, 8> zero{};
  for (auto v : {fpe, verbatim}) {
    const PhasePoint e = w_step_ito(p, 0.4, 1e-3, zero, v);
    const PhasePoint expected = p + w_drift(p, 0.4, v) * 1e-3;
    for (std::size_t k = 0; k < 4; ++k) EXPECT_LT(std::abs(e[k] - expected[k]), 1e-16);
  }
}

TEST(WEnsemble, InitialExcitedFlowIsMinusKappa) {
  const double kappa = 0.2;
  const auto pts = coherent_samples(200000, 4);
  RandomStream rng(5);
  const auto r = bosedecay::testing::excited_flow_residual(WignerModel{kappa, fpe}, pts, 1e-5, rng,
                                                           [&](const PhasePoint&) { return -kappa; });
  EXPECT_NEAR(r.mean, 0.0, 3.0 * r.se + 1e-4);
}

// The literal sign gives +κ/2 instead of −κ at t = 0: it does not follow
// the exact population flow, which is why it is not the default.
TEST(WEnsemble, VerbatimDriftMissesInitialFlow) {
  const double kappa = 0.2;
  const auto pts = coherent_samples(200000, 4);
  RandomStream rng(5);
  const auto r = bosedecay::testing::excited_flow_residual(WignerModel{kappa, verbatim}, pts, 1e-5, rng,
                                                           [&](const PhasePoint&) { return 0.5 * kappa; });
  EXPECT_NEAR(r.mean, 0.0, 3.0 * r.se + 1e-4);
}

TEST(WEnsemble, CorrectedMomentFlowAtSeveralTimes) {
  const double kappa = 0.2, dt = 0.02;
  auto pts = coherent_samples(50000, 6);
  RandomStream noise(7), probe(8);
  std::size_t done = 0;
  for (std::size_t target : {0u, 125u, 250u, 500u}) {
    for (; done < target; ++done)
      for (auto& p : pts) {
        std::array<double, 8> xi{};
        for (double& v : xi) v = noise.normal();
        p = w_step_stratonovich(p, kappa, dt, xi);
      }
    // Same exclusion policy as the engine.
    std::erase_if(pts, [](const PhasePoint& p) { return divergence_check(p); });
    EXPECT_GT(pts.size(), 49900u);
    const auto r = bosedecay::testing::excited_flow_residual(
        WignerModel{kappa, fpe}, pts, 1e-5, probe, [&](const PhasePoint& p) { return corrected_rhs(p, kappa); });
    EXPECT_NEAR(r.mean, 0.0, 3.0 * r.se + 1e-4) << "kappa t = " << kappa * double(target) * dt;
  }
}

TEST(WEnsemble, NoiseFreeEvolutionChangesNumber) {
  // α = 0 and β⁺β = 1.5: the Wigner coherent-sample mean with β₀ = 1.
  const double kappa = 0.2;
  const PhasePoint p{{}, {}, {std::sqrt(1.5), 0}, {std::sqrt(1.5), 0}};
  const PhasePoint d = w_drift(p, kappa, fpe);
  const double rate = 2.0 * (std::conj(p.alpha) * d.alpha).real() + 2.0 * (std::conj(p.beta) * d.beta).real();
  EXPECT_LT(rate, -0.1 * kappa);
}

TEST(WEnsemble, NumberConservedOnAverageWithNoise) {
  SimulationConfig c;
  c.representation = Representation::TruncatedWigner;
  c.kappa = 0.2;
  c.t_final = 10.0;
  c.dt = 0.01;
  c.sample_stride = 25;
  c.trajectories = 20000;
  c.seed = 9;
  c.initial_state = {Coherent{}, Coherent{{1.0, 0.0}}};
  const auto s = run_ensemble(c, 1);
  const double n0 = s.records.front().n_total;
  for (const auto& r : s.records) EXPECT_NEAR(r.n_total, 1.0, 3.0 * r.n_total_stderr) << r.t;
  EXPECT_NEAR(n0, 1.0, 3.0 * s.records.front().n_total_stderr);
}
