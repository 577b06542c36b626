#pragma once

#include "uavsense/array.hpp"
#include "uavsense/config.hpp"
#include "uavsense/random.hpp"
#include "uavsense/units.hpp"

#include <Eigen/Core>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace uavsense
{

/// Frames are N x M: row k is the OFDM symbol, column l the subcarrier.
using Frame = Eigen::MatrixXcd;

struct OfdmParams
{
  int symbols = 16;      ///< N
  int subcarriers = 64;  ///< M
  double subcarrier_spacing_hz = 0.0;
  double cp_duration_s = 0.0;

  double symbol_duration_s() const { return 1.0 / subcarrier_spacing_hz + cp_duration_s; }

  static OfdmParams from(const ScenarioConfig& config)
  {
    return {config.symbols, config.subcarriers, config.subcarrier_spacing_hz(), config.cp_duration_s};
  }
};

/// One two-hop reflection as seen after the receive beamformer.
struct ReflectionComponent
{
  double amplitude = 0.0;  ///< b
  cplx beam_gain{1.0, 0.0}; ///< chi = w^H g(AoA)
  double delay_s = 0.0;    ///< tau
  double doppler_hz = 0.0; ///< f_D
  double phase = 0.0;      ///< zeta in [0, 2 pi)

  cplx coefficient() const { return amplitude * beam_gain * std::polar(1.0, -phase); }
};

using ReflectionSet = std::vector<ReflectionComponent>;

/// Unit-modulus QPSK data frame, deterministic in the stream.
inline Frame synth_tx_frame(const OfdmParams& params, CounterRng rng)
{
  const double a = 1.0 / std::sqrt(2.0);
  Frame frame(params.symbols, params.subcarriers);
  for (int k = 0; k < params.symbols; ++k)
    for (int l = 0; l < params.subcarriers; ++l)
    {
      const std::uint64_t bits = rng.next_u64() >> 62;
      frame(k, l) = {(bits & 1U) ? -a : a, (bits & 2U) ? -a : a};
    }
  return frame;
}

/// Two-hop amplitude b = sqrt(P_T G_T sigma lambda^2 / ((4 pi)^3 d1^2 d2^2)).
inline double reflection_amplitude(const ScenarioConfig& config, double rcs_m2, double d1, double d2)
{
  if (!(d1 > 0.0) || !(d2 > 0.0))
    throw std::invalid_argument("reflection_amplitude: distances must be positive");
  const double lambda = config.wavelength_m();
  const double four_pi_cubed = std::pow(4.0 * pi, 3);
  return std::sqrt(config.transmit_power_w * config.transmit_gain * rcs_m2 * lambda * lambda /
                   (four_pi_cubed * d1 * d1 * d2 * d2));
}

namespace detail
{
/// exp(sign * j 2 pi x i) for i = 0..count-1.
inline Eigen::VectorXcd phase_ramp(double x, int count, double sign)
{
  Eigen::VectorXcd ramp(count);
  for (int i = 0; i < count; ++i)
    ramp(i) = std::polar(1.0, sign * two_pi * x * i);
  return ramp;
}
} // namespace detail

/// Received frame:
///   c_rx(k, l) = sum_r b chi c_tx(k, l) e^{j 2 pi f_D T_o k} e^{-j 2 pi tau df l} e^{-j zeta} + z(k, l),
/// z circularly-symmetric Gaussian with E|z|^2 = noise_variance. No noise is drawn when the variance is 0.
inline Frame synth_rx_frame(const Frame& tx, const ReflectionSet& reflections, const OfdmParams& params,
                            double noise_variance, CounterRng noise)
{
  const int N = params.symbols;
  const int M = params.subcarriers;
  if (tx.rows() != N || tx.cols() != M)
    throw std::invalid_argument("synth_rx_frame: TX frame shape does not match OFDM parameters");
  const double To = params.symbol_duration_s();
  const double df = params.subcarrier_spacing_hz;
  const auto R = static_cast<Eigen::Index>(reflections.size());

  // Channel H = D diag(a) E^T: Doppler ramps along k, delay ramps along l.
  Eigen::MatrixXcd doppler(N, R);
  Eigen::MatrixXcd delay(R, M);
  for (Eigen::Index r = 0; r < R; ++r)
  {
    const auto& refl = reflections[static_cast<std::size_t>(r)];
    doppler.col(r) = refl.coefficient() * detail::phase_ramp(refl.doppler_hz * To, N, +1.0);
    delay.row(r) = detail::phase_ramp(refl.delay_s * df, M, -1.0).transpose();
  }
  Frame rx = R > 0 ? Frame((doppler * delay).cwiseProduct(tx)) : Frame(Frame::Zero(N, M));
  if (noise_variance > 0.0)
    for (int k = 0; k < N; ++k)
      for (int l = 0; l < M; ++l)
        rx(k, l) += noise.complex_normal(noise_variance);
  return rx;
}

/// Element-wise division F = F_rx / F_tx.
inline Frame remove_data(const Frame& rx, const Frame& tx)
{
  if (rx.rows() != tx.rows() || rx.cols() != tx.cols())
    throw std::invalid_argument("remove_data: frame shapes differ");
  if ((tx.array().abs() == 0.0).any())
    throw std::domain_error("remove_data: zero TX symbol");
  return rx.cwiseQuotient(tx);
}

/// Zero-padded periodogram on the N' x M' delay-Doppler grid:
///   P(n, m) = 1/(NM) |sum_k sum_l c(k, l) e^{+j 2 pi l m / M'} e^{-j 2 pi k n / N'}|^2,
/// an FFT over symbols followed by an (unscaled) IFFT over subcarriers.
/// Row n is the Doppler bin, column m the delay bin.
inline Eigen::MatrixXd periodogram_grid(const Frame& F, int padded_symbols, int padded_subcarriers)
{
  const auto N = static_cast<int>(F.rows());
  const auto M = static_cast<int>(F.cols());
  if (padded_symbols < N || padded_subcarriers < M)
    throw std::invalid_argument("periodogram_grid: padded lengths must be >= frame lengths");

  Eigen::FFT<double> fft;
  fft.SetFlag(Eigen::FFT<double>::Unscaled);

  // Inverse transform along subcarriers, one symbol at a time.
  Eigen::MatrixXcd delay_domain = Eigen::MatrixXcd::Zero(padded_symbols, padded_subcarriers);
  std::vector<cplx> in(static_cast<std::size_t>(padded_subcarriers));
  std::vector<cplx> out;
  for (int k = 0; k < N; ++k)
  {
    std::fill(in.begin(), in.end(), cplx{});
    for (int l = 0; l < M; ++l)
      in[static_cast<std::size_t>(l)] = F(k, l);
    fft.inv(out, in);
    for (int m = 0; m < padded_subcarriers; ++m)
      delay_domain(k, m) = out[static_cast<std::size_t>(m)];
  }

  // Forward transform along symbols for every delay bin.
  Eigen::MatrixXd power(padded_symbols, padded_subcarriers);
  std::vector<cplx> column(static_cast<std::size_t>(padded_symbols));
  const double scale = 1.0 / (static_cast<double>(N) * M);
  for (int m = 0; m < padded_subcarriers; ++m)
  {
    for (int k = 0; k < padded_symbols; ++k)
      column[static_cast<std::size_t>(k)] = delay_domain(k, m);
    fft.fwd(out, column);
    for (int n = 0; n < padded_symbols; ++n)
      power(n, m) = scale * std::norm(out[static_cast<std::size_t>(n)]);
  }
  return power;
}

/// Un-normalised correlation of F with the phase ramps of (tau, f_D):
///   sum_k sum_l c(k, l) e^{+j 2 pi tau df l} e^{-j 2 pi f_D T_o k}.
inline cplx matched_point_sum(const Frame& F, double delay_s, double doppler_hz, const OfdmParams& params)
{
  const auto doppler = detail::phase_ramp(doppler_hz * params.symbol_duration_s(), static_cast<int>(F.rows()), -1.0);
  const auto delay = detail::phase_ramp(delay_s * params.subcarrier_spacing_hz, static_cast<int>(F.cols()), +1.0);
  return (doppler.transpose() * F * delay)(0, 0);
}

/// Periodogram value at the exact continuous delay-Doppler point.
inline double matched_point_value(const Frame& F, double delay_s, double doppler_hz, const OfdmParams& params)
{
  return std::norm(matched_point_sum(F, delay_s, doppler_hz, params)) / (static_cast<double>(F.rows()) * F.cols());
}

/// sigma_hat = (1/(NM)) P (4 pi)^3 d1^2 d2^2 / (P_T G_T lambda^2).
inline double estimate_rcs(double peak_value, const ScenarioConfig& config, double d1, double d2)
{
  if (peak_value < 0.0)
    throw std::invalid_argument("estimate_rcs: peak value must be >= 0");
  const double lambda = config.wavelength_m();
  const double nm = static_cast<double>(config.symbols) * config.subcarriers;
  return peak_value * std::pow(4.0 * pi, 3) * d1 * d1 * d2 * d2 /
         (nm * config.transmit_power_w * config.transmit_gain * lambda * lambda);
}

/// sum_{i<count} e^{-j 2 pi x i} in closed form. The sum is 1-periodic in x,
/// so only the offset from the nearest integer enters.
inline cplx dirichlet_sum(double x, int count)
{
  const double eps = x - std::round(x);
  const double ratio = eps == 0.0 ? static_cast<double>(count) : std::sin(pi * count * eps) / std::sin(pi * eps);
  return std::polar(ratio, -pi * eps * (count - 1));
}

/// Cross-kernel between a reflection's ramps and the matched ramps of (tau_p, f_p):
///   K = sum_k e^{j 2 pi (f_r - f_p) T_o k} * sum_l e^{-j 2 pi (tau_r - tau_p) df l}.
inline cplx matched_kernel(double delay_s, double doppler_hz, double matched_delay_s, double matched_doppler_hz,
                           const OfdmParams& params)
{
  const cplx doppler = std::conj(
      dirichlet_sum((doppler_hz - matched_doppler_hz) * params.symbol_duration_s(), params.symbols));
  const cplx delay = dirichlet_sum((delay_s - matched_delay_s) * params.subcarrier_spacing_hz, params.subcarriers);
  return doppler * delay;
}

} // namespace uavsense
