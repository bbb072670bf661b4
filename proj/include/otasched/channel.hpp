#pragma once

// Channel realizations: i.i.d. Rayleigh and the geometric Rician/ULA model
// (path loss, LoS array response, Gaussian angular-spread covariance).

#include <vector>

#include "otasched/numerics.hpp"
#include "otasched/random.hpp"

namespace otasched {

/// N x K matrix whose column k is the uplink channel of device k.
using ChannelRealization = ComplexMatrix;

struct NetworkGeometry {
  std::vector<double> distances;  // meters
  std::vector<double> angles;     // azimuth AoA in [0, 2*pi)
  double inner_radius = 0.0;
  double outer_radius = 0.0;

  int num_devices() const { return static_cast<int>(distances.size()); }
};

struct RicianParams {
  int num_antennas = 1;
  double spacing = 0.5;                // antenna spacing per wavelength
  std::vector<double> rician_factors;  // linear kappa_k
  std::vector<double> angular_std;     // radians
  double path_loss_exponent = 3.0;
  double reference_loss = 1.0;
  double reference_distance = 1.0;  // meters
};

ChannelRealization sample_iid_gaussian(int num_antennas, int num_devices,
                                       Rng& rng);

/// [1, u, u^2, ..., u^{N-1}] with u = exp(j 2 pi d sin(theta)).
ComplexVector array_response(double theta, int num_antennas, double spacing);

ComplexMatrix spatial_covariance(double theta, double angular_std,
                                 int num_antennas, double spacing);

double path_loss(double distance, double exponent, double reference_loss,
                 double reference_distance);

/// Area-uniform placement in the annulus R_in <= r <= R_out.
NetworkGeometry sample_geometry(int num_devices, double inner_radius,
                                double outer_radius, Rng& rng);

ChannelRealization sample_rician(const NetworkGeometry& geometry,
                                 const RicianParams& params, Rng& rng);

// Network-level defaults of the ring scenario: R_in = 10 m, R_out = 100 m,
// kappa = 3 dB, d = 0.5, alpha = 3, angular spread uniform in [12, 15] degrees.
struct RicianScenario {
  double inner_radius = 10.0;
  double outer_radius = 100.0;
  double rician_factor_db = 3.0;
  double spacing = 0.5;
  double path_loss_exponent = 3.0;
  double angular_std_min_deg = 12.0;
  double angular_std_max_deg = 15.0;
};

/// Draws geometry and per-device spreads, sets l0 to the closest device and
/// PL0 = 1, then samples one channel matrix.
ChannelRealization sample_rician_network(int num_antennas, int num_devices,
                                         const RicianScenario& scenario,
                                         Rng& rng);

double db_to_linear(double db);

}  // namespace otasched
