#include <algorithm>
#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "bosedecay/observables.hpp"
#include "bosedecay/samplers.hpp"
#include "support.hpp"

using namespace bosedecay;
using bosedecay::testing::sample_mean;

namespace {

// Gamma CDF on a uniform grid by cumulative trapezoid integration of the density.
struct NumericGammaCdf {
  double h;
  std::vector<double> cdf;

  NumericGammaCdf(double shape, double x_max, double step) : h(step) {
    const std::size_t n = std::size_t(x_max / step) + 1;
    const double norm = std::tgamma(shape);
    auto density = [&](double x) { return x <= 0.0 ? (shape == 1.0 ? 1.0 : 0.0) : std::pow(x, shape - 1) * std::exp(-x) / norm; };
    cdf.resize(n);
    cdf[0] = 0.0;
    double prev = density(0.0);
    for (std::size_t i = 1; i < n; ++i) {
      const double cur = density(double(i) * h);
      cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
      prev = cur;
    }
  }

  double operator()(double x) const {
    const double u = x / h;
    const std::size_t i = std::size_t(u);
    if (i + 1 >= cdf.size()) return 1.0;
    const double f = u - double(i);
    return cdf[i] * (1.0 - f) + cdf[i + 1] * f;
  }
};

double ks_statistic(std::vector<double> x, const NumericGammaCdf& cdf) {
  std::sort(x.begin(), x.end());
  const double n = double(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double f = cdf(x[i]);
    d = std::max({d, f - double(i) / n, double(i + 1) / n - f});
  }
  return d;
}

}  // namespace

TEST(GammaSample, UnitShapeMean) {
  RandomStream rng(10);
  double sum = 0.0;
  for (int i = 0; i < 1000000; ++i) sum += gamma_sample(1.0, rng);
  EXPECT_NEAR(sum / 1e6, 1.0, 0.003);
}

TEST(GammaSample, MeanEqualsShape) {
  for (double shape : {0.5, 2.0, 3.0, 4.0}) {
    RandomStream rng(20);
    std::vector<double> x(400000);
    for (double& v : x) v = gamma_sample(shape, rng);
    const auto m = sample_mean(x);
    EXPECT_NEAR(m.mean, shape, 3.0 * m.se) << shape;
  }
}

TEST(GammaSample, KolmogorovSmirnovAgainstNumericCdf) {
  for (double shape : {1.0, 2.0, 4.0}) {
    RandomStream rng(30);
    std::vector<double> x(1000000);
    for (double& v : x) v = gamma_sample(shape, rng);
    const NumericGammaCdf cdf(shape, 80.0, 1e-4);
    EXPECT_LT(ks_statistic(std::move(x), cdf), 0.002) << shape;
  }
}

TEST(GammaSample, RejectsNonPositiveShape) {
  RandomStream rng(1);
  EXPECT_THROW(gamma_sample(0.0, rng), Error);
  EXPECT_THROW(gamma_sample(-1.0, rng), Error);
}

TEST(SampleFock, LowMomentsMatchNumberState) {
  for (unsigned n = 0; n <= 3; ++n) {
    RandomStream rng(40 + n);
    std::vector<double> na(200000), na2(200000), re_a(200000), im_na(200000);
    for (std::size_t i = 0; i < na.size(); ++i) {
      const ModePair m = sample_fock_pp(n, rng);
      const cplx x = m.partner * m.amplitude;
      na[i] = x.real();
      im_na[i] = x.imag();
      na2[i] = (x * x).real();
      re_a[i] = m.amplitude.real();
    }
    const auto m1 = sample_mean(na), m2 = sample_mean(na2), ma = sample_mean(re_a), mi = sample_mean(im_na);
    EXPECT_NEAR(m1.mean, double(n), 3.0 * m1.se) << n;
    EXPECT_NEAR(m2.mean, double(n) * (n - 1.0), 3.0 * m2.se) << n;
    EXPECT_NEAR(ma.mean, 0.0, 3.0 * ma.se) << n;
    EXPECT_NEAR(mi.mean, 0.0, 3.0 * mi.se) << n;
  }
}

TEST(SampleFock, WignerRejected) {
  RandomStream rng(1);
  EXPECT_THROW(sample_fock(Representation::TruncatedWigner, 1, rng), Error);
  EXPECT_THROW(sample_fock(Representation::TruncatedWigner, 0, rng), Error);
  EXPECT_THROW(validate({Coherent{}, Fock{1}}, Representation::TruncatedWigner), Error);
  EXPECT_NO_THROW(validate({Coherent{}, Fock{1}}, Representation::PositiveP));
}

TEST(SampleCoherent, PositivePIsExactPoint) {
  RandomStream rng(1);
  for (int i = 0; i < 10; ++i) {
    const ModePair m = sample_coherent(Representation::PositiveP, {1.0, 0.0}, rng);
    EXPECT_EQ(m.amplitude, cplx(1.0, 0.0));
    EXPECT_EQ(m.partner, cplx(1.0, 0.0));
  }
  const ModePair m = sample_coherent(Representation::PositiveP, {0.3, -0.4}, rng);
  EXPECT_EQ(m.partner, std::conj(m.amplitude));
}

TEST(SampleCoherent, WignerHalfQuantum) {
  for (double amp : {0.0, 1.0}) {
    RandomStream rng(50);
    std::vector<PhasePoint> pts(200000);
    std::vector<double> n(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i) {
      const ModePair m = sample_coherent(Representation::TruncatedWigner, {amp, 0.0}, rng);
      pts[i] = {m.amplitude, m.partner, {}, {}};
      n[i] = (m.partner * m.amplitude).real();
    }
    const auto raw = sample_mean(n);
    EXPECT_NEAR(raw.mean, amp * amp + 0.5, 3.0 * raw.se);
    const auto rec = extract_moments(pts, Representation::TruncatedWigner, 0.0);
    EXPECT_NEAR(rec.n_a, amp * amp, 3.0 * rec.n_a_stderr);
  }
}

TEST(SampleDisplacedThermal, MeansIncludeDisplacement) {
  struct Case {
    Representation rep;
    cplx d;
    double nbar;
    double expected;
  };
  for (const Case c : {Case{Representation::PositiveP, {1.0, 0.0}, 0.1, 1.1},
                       Case{Representation::PositiveP, {0.0, 0.0}, 1.0, 1.0},
                       Case{Representation::TruncatedWigner, {0.0, 0.0}, 0.0, 0.5},
                       Case{Representation::TruncatedWigner, {0.6, 0.8}, 1.0, 2.5}}) {
    RandomStream rng(60);
    std::vector<double> n(200000);
    for (double& v : n) {
      const ModePair m = sample_displaced_thermal(c.rep, c.d, c.nbar, rng);
      EXPECT_EQ(m.partner, std::conj(m.amplitude));
      v = (m.partner * m.amplitude).real();
    }
    const auto s = sample_mean(n);
    EXPECT_NEAR(s.mean, c.expected, 3.0 * s.se) << c.expected;
  }
}

TEST(SampleDisplacedThermal, RejectsNegativeOccupation) {
  RandomStream rng(1);
  EXPECT_THROW(sample_displaced_thermal(Representation::PositiveP, {}, -1.0, rng), Error);
}

TEST(SampleInitial, PhysicalNumbersForEveryFamily) {
  struct Case {
    Representation rep;
    InitialStateSpec spec;
  };
  const std::vector<Case> cases{
      {Representation::PositiveP, {Coherent{{0.5, 0.0}}, Fock{2}}},
      {Representation::PositiveP, {DisplacedThermal{{0.3, 0.0}, 0.5}, Coherent{{1.0, 0.0}}}},
      {Representation::TruncatedWigner, {Coherent{{0.5, 0.5}}, DisplacedThermal{{1.0, 0.0}, 0.4}}},
  };
  for (const auto& c : cases) {
    RandomStream rng(70);
    std::vector<PhasePoint> pts(200000);
    for (auto& p : pts) p = sample_initial(c.rep, c.spec, rng);
    const auto r = extract_moments(pts, c.rep, 0.0);
    EXPECT_NEAR(r.n_a, mean_number(c.spec.ground), 3.0 * r.n_a_stderr);
    EXPECT_NEAR(r.n_b, mean_number(c.spec.excited), 3.0 * r.n_b_stderr);
  }
}

TEST(Samplers, DeterministicGivenStream) {
  const InitialStateSpec spec{DisplacedThermal{{0.1, 0.2}, 0.3}, Fock{3}};
  RandomStream a(99, 7), b(99, 7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(sample_initial(Representation::PositiveP, spec, a),
                                          sample_initial(Representation::PositiveP, spec, b));
}
