#pragma once

#include "uavsense/config.hpp"
#include "uavsense/geometry.hpp"
#include "uavsense/units.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace uavsense
{

using cplx = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using ComplexMatrix = Eigen::MatrixXcd;

/// Steering vector of the downward n x n UPA (half-wavelength spacing).
/// Element (i, j) sits at flat index i * n + j:
///   g_ij = exp(-j pi i sin(theta) sin(phi)) * exp(-j pi j sin(theta) cos(phi)).
inline ComplexVector steering_vector(const AoA& angle, int n)
{
  if (n < 1)
    throw std::invalid_argument("steering_vector: array side must be >= 1");
  const double s = std::sin(angle.elevation);
  const double step_i = -pi * s * std::sin(angle.azimuth);
  const double step_j = -pi * s * std::cos(angle.azimuth);
  ComplexVector g(n * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      g(i * n + j) = std::polar(1.0, step_i * i + step_j * j);
  return g;
}

/// n^2 x H matrix whose column h is steering_vector(angles[h]).
inline ComplexMatrix steering_matrix(const std::vector<AoA>& angles, int n)
{
  ComplexMatrix G(n * n, static_cast<Eigen::Index>(angles.size()));
  for (std::size_t h = 0; h < angles.size(); ++h)
    G.col(static_cast<Eigen::Index>(h)) = steering_vector(angles[h], n);
  return G;
}

struct BeamformerWeights
{
  ComplexVector weights;
  beamformer_kind kind = beamformer_kind::capon;
  AoA intended;
};

/// Receive gain w^H g at every column of G.
inline ComplexVector beam_pattern(const ComplexMatrix& G, const ComplexVector& w)
{
  if (G.rows() != w.size())
    throw std::invalid_argument("beam_pattern: steering matrix rows must match weight length");
  return G.transpose() * w.conjugate();
}

inline cplx beam_gain(const ComplexVector& w, const ComplexVector& g) { return w.dot(g); }

/// Mesh of n elevations x 4n azimuths anchored at the intended AoA.
/// Mesh point (i, j) is stored at index i * 4n + j; wrap-around duplicates are kept.
struct AoAMesh
{
  std::vector<double> elevations;
  std::vector<double> azimuths;
  std::vector<AoA> points;
  /// Desired response: one at (0, 0), zero elsewhere.
  Eigen::VectorXd desired;
};

inline AoAMesh aoa_mesh(const AoA& intended, int n)
{
  if (n < 2)
    throw std::invalid_argument("aoa_mesh: array side must be >= 2");
  AoAMesh mesh;
  for (int i = 0; i < n; ++i)
    mesh.elevations.push_back(std::fmod(intended.elevation + i * pi / (2.0 * (n - 1)), pi / 2.0));
  for (int j = 0; j < 4 * n; ++j)
    mesh.azimuths.push_back(std::fmod(intended.azimuth + j * two_pi / (4.0 * n - 1.0), two_pi));
  for (double theta : mesh.elevations)
    for (double phi : mesh.azimuths)
      mesh.points.push_back({theta, phi});
  mesh.desired = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(mesh.points.size()));
  mesh.desired(0) = 1.0;
  return mesh;
}

/// sum_h |w^H g_h - v_h|^2 evaluated explicitly over the mesh.
inline double ls_residual(const ComplexMatrix& G, const Eigen::VectorXd& desired, const ComplexVector& w)
{
  return (beam_pattern(G, w) - desired.cast<cplx>()).squaredNorm();
}

struct LsOptions
{
  int max_iterations = 10;
  double tolerance = 1e-10;
};

namespace detail
{
/// Cholesky of a Hermitian PSD matrix, loading the diagonal by 1e-9 if it is not numerically PD.
inline Eigen::LLT<ComplexMatrix> factor_spd(const ComplexMatrix& A)
{
  Eigen::LLT<ComplexMatrix> llt(A);
  if (llt.info() == Eigen::Success)
    return llt;
  ComplexMatrix loaded = A;
  loaded.diagonal().array() += 1e-9;
  llt.compute(loaded);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("Cholesky factorization failed after diagonal loading");
  return llt;
}
} // namespace detail

/// Least-squares beamformer fitting the desired mesh response.
///
/// Solves the normal equations (G G^H) w = G v by Cholesky, refines the
/// solution by residual correction (a step is kept only if the fit residual
/// does not grow), then rescales to unit Euclidean norm.
inline BeamformerWeights ls_beamformer(const AoAMesh& mesh, int n, const LsOptions& options = {})
{
  const ComplexMatrix G = steering_matrix(mesh.points, n);
  const ComplexVector v = mesh.desired.cast<cplx>();
  const ComplexMatrix normal = G * G.adjoint();
  const ComplexVector rhs = G * v;
  const auto llt = detail::factor_spd(normal);

  const double v_energy = v.squaredNorm();
  auto residual = [&](const ComplexVector& w) {
    // |G^H w - v|^2 expanded through the normal matrix.
    return std::max(0.0, (w.dot(normal * w)).real() - 2.0 * w.dot(rhs).real() + v_energy);
  };

  ComplexVector w = llt.solve(rhs);
  double current = residual(w);
  for (int it = 0; it < options.max_iterations; ++it)
  {
    const ComplexVector candidate = w + llt.solve(rhs - normal * w);
    const double next = residual(candidate);
    if (next > current)
      break;
    const double change = current - next;
    w = candidate;
    current = next;
    if (change <= options.tolerance * std::max(current, 1e-300))
      break;
  }

  const double len = w.norm();
  if (!(len > 0.0))
    throw std::runtime_error("ls_beamformer: degenerate zero solution");
  return {w / len, beamformer_kind::ls, mesh.points.front()};
}

inline BeamformerWeights ls_beamformer(const AoA& intended, int n, const LsOptions& options = {})
{
  return ls_beamformer(aoa_mesh(intended, n), n, options);
}

/// Capon (MVDR) beamformer for the covariance model R = g g^H + alpha I:
///   w = R^-1 g / (g^H R^-1 g).
inline BeamformerWeights capon_beamformer(const AoA& intended, int n, double loading)
{
  if (!(loading > 0.0))
    throw std::invalid_argument("capon_beamformer: loading must be > 0");
  const ComplexVector g = steering_vector(intended, n);
  ComplexMatrix R = g * g.adjoint();
  R.diagonal().array() += loading;
  const ComplexVector r_inv_g = detail::factor_spd(R).solve(g);
  const cplx denom = g.dot(r_inv_g); // g^H R^-1 g
  return {r_inv_g / denom, beamformer_kind::capon, intended};
}

inline BeamformerWeights design_beamformer(const AoA& intended, const ScenarioConfig& config)
{
  if (config.beamformer == beamformer_kind::ls)
    return ls_beamformer(intended, config.array_side, LsOptions{config.ls_iterations, 1e-10});
  return capon_beamformer(intended, config.array_side, config.capon_loading);
}

} // namespace uavsense
