#include "otasched/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace otasched {

using std::numbers::pi;

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

ChannelRealization sample_iid_gaussian(int num_antennas, int num_devices,
                                       Rng& rng) {
  if (num_antennas < 1 || num_devices < 1)
    throw std::invalid_argument("sample_iid_gaussian: dimensions must be >= 1");
  ChannelRealization h(num_antennas, num_devices);
  for (int k = 0; k < num_devices; ++k)
    for (int n = 0; n < num_antennas; ++n) h(n, k) = complex_normal(rng);
  return h;
}

ComplexVector array_response(double theta, int num_antennas, double spacing) {
  if (num_antennas < 1)
    throw std::invalid_argument("array_response: num_antennas must be >= 1");
  ComplexVector g(num_antennas);
  const double phase = 2.0 * pi * spacing * std::sin(theta);
  for (int n = 0; n < num_antennas; ++n) g(n) = std::polar(1.0, phase * n);
  return g;
}

ComplexMatrix spatial_covariance(double theta, double angular_std,
                                 int num_antennas, double spacing) {
  if (num_antennas < 1)
    throw std::invalid_argument("spatial_covariance: num_antennas must be >= 1");
  if (angular_std < 0.0)
    throw std::invalid_argument("spatial_covariance: negative angular spread");
  const double phase = 2.0 * pi * spacing * std::sin(theta);
  const double c = pi * spacing * std::cos(theta);
  ComplexMatrix r(num_antennas, num_antennas);
  for (int n = 0; n < num_antennas; ++n) {
    r(n, n) = 1.0;
    for (int m = 0; m < n; ++m) {
      const double diff = n - m;
      const double spread =
          std::exp(-2.0 * angular_std * angular_std * (c * diff) * (c * diff));
      r(n, m) = std::polar(spread, phase * diff);
      r(m, n) = std::conj(r(n, m));
    }
  }
  return r;
}

double path_loss(double distance, double exponent, double reference_loss,
                 double reference_distance) {
  if (!(distance > 0.0) || !(reference_distance > 0.0))
    throw std::invalid_argument("path_loss: distances must be positive");
  return reference_loss * std::pow(distance / reference_distance, -exponent);
}

NetworkGeometry sample_geometry(int num_devices, double inner_radius,
                                double outer_radius, Rng& rng) {
  if (!(inner_radius > 0.0) || !(inner_radius < outer_radius))
    throw std::invalid_argument("sample_geometry: need 0 < R_in < R_out");
  NetworkGeometry geo;
  geo.inner_radius = inner_radius;
  geo.outer_radius = outer_radius;
  geo.distances.resize(num_devices);
  geo.angles.resize(num_devices);
  const double rin2 = inner_radius * inner_radius;
  const double span = outer_radius * outer_radius - rin2;
  for (int k = 0; k < num_devices; ++k) {
    const double u = uniform(rng, 0.0, 1.0);
    const double r = std::sqrt(u * span + rin2);
    geo.distances[k] = std::clamp(r, inner_radius, outer_radius);
    geo.angles[k] = uniform(rng, 0.0, 2.0 * pi);
  }
  return geo;
}

ChannelRealization sample_rician(const NetworkGeometry& geometry,
                                 const RicianParams& params, Rng& rng) {
  const int num_devices = geometry.num_devices();
  const int n = params.num_antennas;
  if (n < 1 || num_devices < 1 ||
      static_cast<int>(geometry.angles.size()) != num_devices ||
      static_cast<int>(params.rician_factors.size()) != num_devices ||
      static_cast<int>(params.angular_std.size()) != num_devices)
    throw std::invalid_argument("sample_rician: inconsistent dimensions");

  ChannelRealization h(n, num_devices);
  for (int k = 0; k < num_devices; ++k) {
    const double kappa = params.rician_factors[k];
    if (kappa < 0.0)
      throw std::invalid_argument("sample_rician: negative Rician factor");
    const double theta = geometry.angles[k];
    const ComplexVector los = array_response(theta, n, params.spacing);
    const ComplexMatrix sqrt_r = hermitian_sqrt(
        spatial_covariance(theta, params.angular_std[k], n, params.spacing));
    const ComplexVector nlos = sqrt_r * complex_normal_vector(n, rng);
    const double gain =
        std::sqrt(path_loss(geometry.distances[k], params.path_loss_exponent,
                            params.reference_loss, params.reference_distance));
    h.col(k) = gain * (std::sqrt(kappa / (1.0 + kappa)) * los +
                       std::sqrt(1.0 / (1.0 + kappa)) * nlos);
  }
  return h;
}

ChannelRealization sample_rician_network(int num_antennas, int num_devices,
                                         const RicianScenario& scenario,
                                         Rng& rng) {
  NetworkGeometry geo = sample_geometry(num_devices, scenario.inner_radius,
                                        scenario.outer_radius, rng);
  RicianParams params;
  params.num_antennas = num_antennas;
  params.spacing = scenario.spacing;
  params.path_loss_exponent = scenario.path_loss_exponent;
  params.reference_loss = 1.0;
  params.reference_distance =
      *std::min_element(geo.distances.begin(), geo.distances.end());
  params.rician_factors.assign(num_devices,
                               db_to_linear(scenario.rician_factor_db));
  params.angular_std.resize(num_devices);
  for (int k = 0; k < num_devices; ++k)
    params.angular_std[k] =
        uniform(rng, scenario.angular_std_min_deg, scenario.angular_std_max_deg) *
        pi / 180.0;
  return sample_rician(geo, params, rng);
}

}  // namespace otasched
