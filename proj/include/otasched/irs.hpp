#pragma once

// Joint scheduling and phase tuning for IRS-aided uplinks.
//
// End-to-end channel of device k: h_k(mu) = h0_k + T diag(g_k) mu, with mu on
// the unit torus. The outer loop is the matching-pursuit elimination; inside
// each iteration the receiver and the phases are alternated: c is the leading
// left singular vector of H(mu) sqrt(W), mu maximizes sum_k w_k |h_k(mu)^H c|^2
// by block coordinate ascent on the unit circle.

#include <functional>
#include <vector>

#include "otasched/channel.hpp"
#include "otasched/scheduler.hpp"

namespace otasched {

struct IrsChannelModel {
  ComplexMatrix direct;   // N x K, column k = h0_k
  ComplexMatrix reflect;  // N x M, PS <- IRS (columns t_m)
  ComplexMatrix cascade;  // M x K, column k = diagonal of G_k

  int num_antennas() const { return static_cast<int>(direct.rows()); }
  int num_devices() const { return static_cast<int>(direct.cols()); }
  int num_elements() const { return static_cast<int>(reflect.cols()); }
  void validate() const;
};

/// Complex vector with every entry on the unit circle.
class PhaseVector {
 public:
  PhaseVector() = default;
  /// Throws if some entry is off the unit circle by more than 1e-10.
  explicit PhaseVector(ComplexVector values);

  static PhaseVector ones(int m);
  static PhaseVector from_angles(const std::vector<double>& angles);

  const ComplexVector& values() const { return values_; }
  int size() const { return static_cast<int>(values_.size()); }
  std::complex<double> operator[](int m) const { return values_(m); }

 private:
  ComplexVector values_;
};

/// mu^H Q mu + 2 Re{mu^H a}
struct QuadraticForm {
  ComplexMatrix q;
  ComplexVector a;

  double evaluate(const ComplexVector& mu) const;
};

ChannelRealization effective_channel(const IrsChannelModel& model,
                                     const PhaseVector& mu);

/// Q, a such that mu^H Q mu + 2 Re{mu^H a} + sum_k w_k |h0_k^H c|^2 equals
/// sum_k w_k |h_k(mu)^H c|^2.
QuadraticForm build_quadratic(const ComplexVector& c,
                              const std::vector<double>& weights,
                              const IrsChannelModel& model);

/// Cyclic coordinate ascent on the unit circle, ascending element order.
PhaseVector bcd_phase_update(const QuadraticForm& form, const PhaseVector& mu,
                             int sweeps);

/// Same update; `observer` receives the objective after every coordinate.
PhaseVector bcd_phase_update(const QuadraticForm& form, const PhaseVector& mu,
                             int sweeps,
                             const std::function<void(double)>& observer);

struct TuningOptions {
  int max_alternations = 50;
  int bcd_sweeps = 3;
  double relative_tol = 1e-8;
  bool record_trace = false;
  PowerIterationOptions power;
  // Called with the alternating objective c^H(Phi I - gamma H W H^H)c after
  // each (c, mu) pair. Test hook.
  std::function<void(int iteration, double objective)> on_alternation;
};

struct TunedOutcome {
  ScheduleOutcome schedule;
  PhaseVector phases;
};

TunedOutcome schedule_mp_tuned(const IrsChannelModel& model,
                               std::span<const double> phi, double gamma,
                               const WeightPolicy& policy,
                               const PhaseVector& initial,
                               const TuningOptions& options = {});

struct IrsScenario {
  int num_elements = 8;
  double reflect_var = 1.0;   // variance of the PS <- IRS entries
  double cascade_var = 1.0;   // variance of the device -> IRS gains
};

/// Direct links from `direct`, i.i.d. CN(0, var) reflect and cascade entries.
IrsChannelModel sample_irs_model(ComplexMatrix direct,
                                 const IrsScenario& scenario, Rng& rng);

}  // namespace otasched
