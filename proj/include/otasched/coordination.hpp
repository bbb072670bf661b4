#pragma once

// Zero-forcing AirComp coordination: power factor, transmit weights, the
// resulting computation error, and a simulated symbol interval.

#include <complex>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "otasched/channel.hpp"
#include "otasched/numerics.hpp"

namespace otasched {

using DeviceSet = std::vector<int>;

struct SystemParams {
  double power = 1.0;        // per-device budget P
  double noise_var = 1.0;    // sigma^2
  std::vector<double> phi;   // aggregation weights, one per device
  double gamma = 1.0;        // P * epsilon / sigma^2
};

struct Schedule {
  DeviceSet active;
  ComplexVector receiver;                  // unit norm
  double power_factor = 0.0;               // eta
  std::vector<std::complex<double>> psi;   // aligned with `active`
};

class OrthogonalChannelError : public std::domain_error {
 public:
  OrthogonalChannelError(const std::string& what, int device)
      : std::domain_error(what), device_(device) {}
  int device() const { return device_; }

 private:
  int device_;
};

double gamma_from_db(double db);

// eta_ZF = P min_{k in S} |h_k^H c|^2 / phi_k^2
double zf_power_factor(const ChannelRealization& h, const ComplexVector& c,
                       std::span<const int> active, std::span<const double> phi,
                       double power);

// psi_k = sqrt(eta) phi_k h_k^H c / |h_k^H c|^2, in the order of `active`.
std::vector<std::complex<double>> zf_transmit_weights(
    const ChannelRealization& h, const ComplexVector& c,
    std::span<const int> active, std::span<const double> phi, double eta);

Schedule make_zf_schedule(const ChannelRealization& h, ComplexVector c,
                          DeviceSet active, std::span<const double> phi,
                          double power);

// (sigma^2 / P) max_{k in S} phi_k^2 ||c||^2 / |h_k^H c|^2
double computation_error(const ChannelRealization& h, const ComplexVector& c,
                         std::span<const int> active,
                         std::span<const double> phi, double noise_var,
                         double power);

/// One AirComp symbol: y = sum_k psi_k theta_k h_k + xi, estimate c^H y /
/// sqrt(eta). `local_values` is indexed by device (length K).
std::complex<double> aircomp_round(const ChannelRealization& h,
                                   const Schedule& schedule,
                                   std::span<const double> local_values,
                                   double noise_var, Rng& rng);

/// Target of one round: sum_{k in S} phi_k theta_k.
double aggregation_target(std::span<const int> active,
                          std::span<const double> phi,
                          std::span<const double> local_values);

}  // namespace otasched
