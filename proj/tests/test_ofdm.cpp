#include "uavsense/ofdm.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace uavsense;

namespace
{
const double kPi = std::acos(-1.0);

Frame gaussian_frame(std::mt19937_64& gen, int rows, int cols)
{
  std::normal_distribution<double> nd;
  Frame F(rows, cols);
  for (int k = 0; k < rows; ++k)
    for (int l = 0; l < cols; ++l)
      F(k, l) = {nd(gen), nd(gen)};
  return F;
}

double direct_value(const Frame& F, double delay_turns, double doppler_turns)
{
  // delay_turns = tau df, doppler_turns = f_D T_o
  cplx acc{};
  for (int k = 0; k < F.rows(); ++k)
    for (int l = 0; l < F.cols(); ++l)
      acc += F(k, l) * std::exp(cplx(0.0, 2.0 * kPi * (delay_turns * l - doppler_turns * k)));
  return std::norm(acc) / (static_cast<double>(F.rows()) * F.cols());
}

Frame single_reflection(const OfdmParams& p, const ReflectionComponent& r, std::uint64_t data_key)
{
  const Frame tx = synth_tx_frame(p, CounterRng(data_key));
  return remove_data(synth_rx_frame(tx, {r}, p, 0.0, CounterRng(0)), tx);
}
} // namespace

TEST(Params, DerivedFromDefaults)
{
  const ScenarioConfig c;
  const auto p = OfdmParams::from(c);
  EXPECT_DOUBLE_EQ(p.subcarrier_spacing_hz, 200e6 / 64);
  EXPECT_NEAR(p.symbol_duration_s(), 1.0 / 3.125e6 + 2.3e-6, 1e-18);
  EXPECT_NEAR(c.wavelength_m(), 0.0125, 1e-5);
}

TEST(TxFrame, QpskUnitModulusAndSeeded)
{
  const OfdmParams p{16, 64, 1.0, 0.0};
  const Frame a = synth_tx_frame(p, CounterRng(42));
  const Frame b = synth_tx_frame(p, CounterRng(42));
  const Frame c = synth_tx_frame(p, CounterRng(43));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  for (int k = 0; k < 16; ++k)
    for (int l = 0; l < 64; ++l)
    {
      EXPECT_NEAR(std::abs(a(k, l)), 1.0, 1e-15);
      EXPECT_NEAR(std::abs(std::abs(a(k, l).real()) - std::sqrt(0.5)), 0.0, 1e-15);
    }
}

TEST(Periodogram, MatchesDirectDoubleSum)
{
  std::mt19937_64 gen(1);
  for (int t = 0; t < 20; ++t)
  {
    const Frame F = gaussian_frame(gen, 8, 8);
    const auto P = periodogram_grid(F, 16, 16);
    ASSERT_EQ(P.rows(), 16);
    ASSERT_EQ(P.cols(), 16);
    for (int n = 0; n < 16; ++n)
      for (int m = 0; m < 16; ++m)
        EXPECT_NEAR(P(n, m), direct_value(F, m / 16.0, n / 16.0), 1e-9 * P.maxCoeff());
  }
}

TEST(Periodogram, NonSquareAndUnpadded)
{
  std::mt19937_64 gen(2);
  const Frame F = gaussian_frame(gen, 4, 6);
  const auto P = periodogram_grid(F, 5, 9);
  for (int n = 0; n < 5; ++n)
    for (int m = 0; m < 9; ++m)
      EXPECT_NEAR(P(n, m), direct_value(F, m / 9.0, n / 5.0), 1e-10 * P.maxCoeff());
  EXPECT_THROW(periodogram_grid(F, 3, 9), std::invalid_argument);
  EXPECT_THROW(periodogram_grid(F, 5, 5), std::invalid_argument);
}

TEST(Periodogram, Parseval)
{
  std::mt19937_64 gen(3);
  const Frame F = gaussian_frame(gen, 16, 32);
  const auto P = periodogram_grid(F, 16, 32);
  EXPECT_NEAR(P.sum(), F.squaredNorm(), 1e-9 * F.squaredNorm());
}

TEST(Periodogram, PeakLandsOnBin)
{
  const OfdmParams p{8, 8, 2.0e5, 1.0e-6};
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * kPi);
  for (int n_hat = 0; n_hat < 16; ++n_hat)
    for (int m_hat = 0; m_hat < 16; ++m_hat)
    {
      ReflectionComponent r;
      r.amplitude = 0.3;
      r.delay_s = m_hat / 16.0 / p.subcarrier_spacing_hz;
      r.doppler_hz = n_hat / 16.0 / p.symbol_duration_s();
      r.phase = phase(gen);
      const auto P = periodogram_grid(single_reflection(p, r, gen()), 16, 16);
      Eigen::Index n = 0;
      Eigen::Index m = 0;
      P.maxCoeff(&n, &m);
      EXPECT_EQ(n, n_hat);
      EXPECT_EQ(m, m_hat);
      // Peak value of a single reflection is NM b^2.
      EXPECT_NEAR(P(n, m), 64.0 * 0.09, 1e-9);
    }
}

TEST(MatchedPoint, AgreesWithDirectSum)
{
  std::mt19937_64 gen(5);
  const OfdmParams p{6, 10, 1.0e5, 2.0e-6};
  const Frame F = gaussian_frame(gen, 6, 10);
  const double tau = 3.7e-6;
  const double fd = 1234.0;
  EXPECT_NEAR(matched_point_value(F, tau, fd, p),
              direct_value(F, tau * p.subcarrier_spacing_hz, fd * p.symbol_duration_s()), 1e-10);
}

TEST(Dirichlet, MatchesBruteForce)
{
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  std::vector<double> xs{0.0, 1.0, -3.0, 1e-13, 2.0 + 1e-12, 0.5, -0.5};
  for (int i = 0; i < 200; ++i)
    xs.push_back(u(gen));
  for (int count : {1, 7, 16, 64})
    for (double x : xs)
    {
      cplx brute{};
      for (int i = 0; i < count; ++i)
        brute += std::exp(cplx(0.0, -2.0 * kPi * x * i));
      EXPECT_NEAR(std::abs(dirichlet_sum(x, count) - brute), 0.0, 1e-9 * count) << "x=" << x << " count=" << count;
    }
}

TEST(Dirichlet, KernelMatchesFrameCorrelation)
{
  const OfdmParams p{16, 64, 3.125e6, 2.3e-6};
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> tau(0.5e-6, 2e-6);
  std::uniform_real_distribution<double> fd(-3e4, 3e4);
  for (int i = 0; i < 20; ++i)
  {
    ReflectionComponent r;
    r.amplitude = 1.0;
    r.delay_s = tau(gen);
    r.doppler_hz = fd(gen);
    const double mt = tau(gen);
    const double mf = fd(gen);
    const Frame F = single_reflection(p, r, gen());
    const cplx expected = matched_point_sum(F, mt, mf, p);
    const cplx K = matched_kernel(r.delay_s, r.doppler_hz, mt, mf, p);
    EXPECT_NEAR(std::abs(K - expected), 0.0, 1e-9 * std::max(1.0, std::abs(expected)));
  }
}

TEST(Rcs, RoundTripRecoversTarget)
{
  const ScenarioConfig c;
  const auto p = OfdmParams::from(c);
  for (double phase : {0.0, 1.0, 4.0})
  {
    const double d1 = 160.0;
    const double d2 = 190.0;
    ReflectionComponent r;
    r.amplitude = reflection_amplitude(c, c.target_rcs_m2(), d1, d2);
    r.delay_s = (d1 + d2) / speed_of_light;
    r.phase = phase;
    const Frame F = single_reflection(p, r, 99);
    const double sigma = estimate_rcs(matched_point_value(F, r.delay_s, 0.0, p), c, d1, d2);
    EXPECT_NEAR(sigma, 10.0, 1e-6 * 10.0);
  }
  EXPECT_THROW(reflection_amplitude(c, 1.0, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(estimate_rcs(-1.0, c, 1.0, 1.0), std::invalid_argument);
}

TEST(Rcs, AmplitudeFormula)
{
  ScenarioConfig c;
  c.transmit_power_w = 2.0;
  c.transmit_gain = 3.0;
  const double lambda = c.wavelength_m();
  const double b = reflection_amplitude(c, 5.0, 10.0, 20.0);
  EXPECT_NEAR(b * b, 2.0 * 3.0 * 5.0 * lambda * lambda / (std::pow(4.0 * kPi, 3) * 100.0 * 400.0), 1e-24);
}

TEST(Rcs, EstimateInvariantToPowerScale)
{
  ScenarioConfig a;
  ScenarioConfig b;
  b.transmit_power_w = 7.5;
  const auto p = OfdmParams::from(a);
  auto est = [&](const ScenarioConfig& c) {
    ReflectionComponent r;
    r.amplitude = reflection_amplitude(c, 3.0, 120.0, 130.0);
    r.delay_s = 250.0 / speed_of_light;
    return estimate_rcs(matched_point_value(single_reflection(p, r, 5), r.delay_s, 0.0, p), c, 120.0, 130.0);
  };
  EXPECT_NEAR(est(a), est(b), 1e-9 * est(a));
}

TEST(DataRemoval, IndependentOfTransmittedData)
{
  const OfdmParams p{16, 64, 3.125e6, 2.3e-6};
  ReflectionComponent r1{0.2, {0.5, 0.1}, 1.1e-6, 0.0, 0.4};
  ReflectionComponent r2{0.05, {0.2, -0.3}, 1.3e-6, 500.0, 2.2};
  const Frame t1 = synth_tx_frame(p, CounterRng(1));
  const Frame t2 = synth_tx_frame(p, CounterRng(2));
  const Frame F1 = remove_data(synth_rx_frame(t1, {r1, r2}, p, 0.0, CounterRng(0)), t1);
  const Frame F2 = remove_data(synth_rx_frame(t2, {r1, r2}, p, 0.0, CounterRng(0)), t2);
  EXPECT_LT((F1 - F2).norm(), 1e-12 * F1.norm());

  Frame zero = t1;
  zero(3, 3) = 0.0;
  EXPECT_THROW(remove_data(F1, zero), std::domain_error);
  EXPECT_THROW(remove_data(F1, Frame::Ones(2, 2)), std::invalid_argument);
}

TEST(Noise, ComplexNormalPower)
{
  CounterRng rng(2024);
  double power = 0.0;
  double mean_re = 0.0;
  const int draws = 10000;
  for (int i = 0; i < draws; ++i)
  {
    const cplx z = rng.complex_normal(3.0);
    power += std::norm(z);
    mean_re += z.real();
  }
  EXPECT_NEAR(power / draws, 3.0, 0.05 * 3.0);
  EXPECT_NEAR(mean_re / draws, 0.0, 0.05);
}

TEST(Noise, MatchedValueOfNoiseOnlyFrame)
{
  // Data removal leaves the noise power unchanged for unit-modulus symbols; the
  // matched value of pure noise averages to the per-sample variance.
  const OfdmParams p{8, 16, 1.0e6, 1.0e-6};
  const double variance = 2.0;
  double acc = 0.0;
  const int draws = 4000;
  for (int i = 0; i < draws; ++i)
  {
    const Frame tx = synth_tx_frame(p, CounterRng(10'000 + i));
    const Frame F = remove_data(synth_rx_frame(tx, {}, p, variance, CounterRng(i)), tx);
    acc += matched_point_value(F, 0.7e-6, 0.0, p);
  }
  EXPECT_NEAR(acc / draws, variance, 0.05 * variance);
}

TEST(Noise, SingleReflectionMedianUnbiased)
{
  // Estimates over random phases and noise scatter around the true RCS:
  // with high SNR the median lands within a few percent.
  const ScenarioConfig c;
  const auto p = OfdmParams::from(c);
  std::vector<double> est;
  for (int i = 0; i < 501; ++i)
  {
    CounterRng rng(derive_key(77, {static_cast<std::uint64_t>(i)}));
    ReflectionComponent r;
    r.amplitude = reflection_amplitude(c, 1.0, 150.0, 150.0);
    r.delay_s = 300.0 / speed_of_light;
    r.phase = rng.uniform(0.0, 2.0 * kPi);
    const double var = 0.05 * r.amplitude * r.amplitude;
    const Frame tx = synth_tx_frame(p, CounterRng(rng.next_u64()));
    const Frame F = remove_data(synth_rx_frame(tx, {r}, p, var, CounterRng(rng.next_u64())), tx);
    est.push_back(estimate_rcs(matched_point_value(F, r.delay_s, 0.0, p), c, 150.0, 150.0));
  }
  std::nth_element(est.begin(), est.begin() + 250, est.end());
  EXPECT_NEAR(est[250], 1.0, 0.03);
}
