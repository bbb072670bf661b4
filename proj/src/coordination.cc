#include "otasched/coordination.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace otasched {
namespace {

std::complex<double> projection(const ChannelRealization& h, int k,
                                const ComplexVector& c) {
  // h_k^H c
  return h.col(k).dot(c);
}

double checked_gain(const ChannelRealization& h, int k, const ComplexVector& c) {
  if (k < 0 || k >= h.cols())
    throw std::out_of_range("device index out of range");
  const double g = std::norm(projection(h, k, c));
  if (!(g > 0.0)) {
    std::ostringstream msg;
    msg << "device " << k << " channel is orthogonal to the receiver";
    throw OrthogonalChannelError(msg.str(), k);
  }
  return g;
}

void require_nonempty(std::span<const int> active, const char* who) {
  if (active.empty())
    throw std::invalid_argument(std::string(who) + ": empty device set");
}

}  // namespace

double gamma_from_db(double db) { return std::pow(10.0, db / 10.0); }

double zf_power_factor(const ChannelRealization& h, const ComplexVector& c,
                       std::span<const int> active, std::span<const double> phi,
                       double power) {
  require_nonempty(active, "zf_power_factor");
  double best = std::numeric_limits<double>::infinity();
  for (int k : active) {
    const double g = checked_gain(h, k, c);
    best = std::min(best, g / (phi[k] * phi[k]));
  }
  return power * best;
}

std::vector<std::complex<double>> zf_transmit_weights(
    const ChannelRealization& h, const ComplexVector& c,
    std::span<const int> active, std::span<const double> phi, double eta) {
  std::vector<std::complex<double>> psi;
  psi.reserve(active.size());
  const double root = std::sqrt(eta);
  for (int k : active) {
    const double g = checked_gain(h, k, c);
    psi.push_back(root * phi[k] * projection(h, k, c) / g);
  }
  return psi;
}

Schedule make_zf_schedule(const ChannelRealization& h, ComplexVector c,
                          DeviceSet active, std::span<const double> phi,
                          double power) {
  Schedule s;
  s.power_factor = zf_power_factor(h, c, active, phi, power);
  s.psi = zf_transmit_weights(h, c, active, phi, s.power_factor);
  s.receiver = std::move(c);
  s.active = std::move(active);
  return s;
}

double computation_error(const ChannelRealization& h, const ComplexVector& c,
                         std::span<const int> active,
                         std::span<const double> phi, double noise_var,
                         double power) {
  require_nonempty(active, "computation_error");
  const double c2 = c.squaredNorm();
  double worst = 0.0;
  for (int k : active) {
    const double g = checked_gain(h, k, c);
    worst = std::max(worst, phi[k] * phi[k] * c2 / g);
  }
  return noise_var / power * worst;
}

std::complex<double> aircomp_round(const ChannelRealization& h,
                                   const Schedule& schedule,
                                   std::span<const double> local_values,
                                   double noise_var, Rng& rng) {
  const Eigen::Index n = h.rows();
  ComplexVector y = ComplexVector::Zero(n);
  for (std::size_t i = 0; i < schedule.active.size(); ++i) {
    const int k = schedule.active[i];
    y += (schedule.psi[i] * local_values[k]) * h.col(k);
  }
  const double sd = std::sqrt(noise_var);
  for (Eigen::Index i = 0; i < n; ++i) y(i) += sd * complex_normal(rng);
  return schedule.receiver.dot(y) / std::sqrt(schedule.power_factor);
}

double aggregation_target(std::span<const int> active,
                          std::span<const double> phi,
                          std::span<const double> local_values) {
  double sum = 0.0;
  for (int k : active) sum += phi[k] * local_values[k];
  return sum;
}

}  // namespace otasched
