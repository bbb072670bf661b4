#pragma once

// Greedy matching-pursuit device scheduling for AirComp aggregation.
//
// Starting from the full device set, each iteration re-optimizes the receiver
// as the leading left singular vector of H sqrt(W), evaluates the constraint
// indicators F_k = phi_k^2 - gamma |h_k^H c|^2 and, while some indicator is
// positive, drops the device with the largest one. W is diagonal; the
// subset-cutting policy assigns delta to violating devices and 1 - delta to
// satisfied ones.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "otasched/coordination.hpp"
#include "otasched/numerics.hpp"
#include "otasched/random.hpp"

namespace otasched {

/// Feasibility slack on the constraint indicators.
inline constexpr double kFeasibilityTol = 1e-9;

struct WeightPolicy {
  double delta = 0.05;

  explicit WeightPolicy(double d = 0.05);
  double operator()(double indicator) const {
    return indicator > 0.0 ? delta : 1.0 - delta;
  }
};

enum class ScheduleStatus { kFeasible, kEmpty };

struct IterationRecord {
  int iteration = 0;
  int removed = -1;      // device dropped at the start of this iteration
  int reinserted = 0;    // bidirectional mode only
  double max_indicator = 0.0;
  int active_count = 0;
};

struct ScheduleOutcome {
  DeviceSet active;
  ComplexVector receiver;
  int iterations = 0;
  ScheduleStatus status = ScheduleStatus::kEmpty;
  std::vector<IterationRecord> trace;

  bool empty() const { return active.empty(); }
  int size() const { return static_cast<int>(active.size()); }
};

struct SchedulerOptions {
  bool record_trace = false;
  PowerIterationOptions power;
};

/// phi_k^2 - gamma |h_k^H c|^2 for every device.
std::vector<double> constraint_indicators(const ChannelRealization& h,
                                          std::span<const double> phi,
                                          double gamma, const ComplexVector& c);

/// argmax_{k in S} F_k, ties toward the smallest device index.
int next_removal_index(std::span<const double> indicators,
                       std::span<const int> active);

/// True when max_{k in S} F_k <= tol (an empty set is feasible).
bool satisfies_certificate(const ChannelRealization& h,
                           std::span<const double> phi, double gamma,
                           std::span<const int> active, const ComplexVector& c,
                           double tol = kFeasibilityTol);

ScheduleOutcome schedule_mp(const ChannelRealization& h,
                            std::span<const double> phi, double gamma,
                            const WeightPolicy& policy,
                            const SchedulerOptions& options = {});

/// Matching pursuit with a forward step per iteration: removed devices whose
/// indicator at the current receiver is not positive are put back.
ScheduleOutcome schedule_mp_bidirectional(const ChannelRealization& h,
                                          std::span<const double> phi,
                                          double gamma,
                                          const WeightPolicy& policy,
                                          const SchedulerOptions& options = {});

/// Same loop with the removal index drawn uniformly from the active set.
ScheduleOutcome schedule_random(const ChannelRealization& h,
                                std::span<const double> phi, double gamma,
                                Rng& rng, const WeightPolicy& policy = WeightPolicy(),
                                const SchedulerOptions& options = {});

/// Largest subset certified feasible by some receiver in a candidate pool.
/// Subsets are visited by decreasing size. The pool holds, per subset, the
/// leading singular vectors of H_S diag(sqrt(w)) for `candidates` random
/// positive weightings; globally, `candidates` random unit vectors, the
/// receivers of schedule_mp and schedule_mp_bidirectional, and any
/// `extra_receivers`. Requires K <= 12.
ScheduleOutcome exhaustive_oracle(const ChannelRealization& h,
                                  std::span<const double> phi, double gamma,
                                  int candidates, Rng& rng,
                                  std::span<const ComplexVector> extra_receivers = {},
                                  const WeightPolicy& policy = WeightPolicy());

inline constexpr int kOracleMaxDevices = 12;

namespace detail {

// Receiver step of one outer iteration: given per-device weights (zero for
// inactive devices) returns the receiver together with the channel it was
// computed for.
struct ReceiverUpdate {
  ComplexVector receiver;
  ChannelRealization channel;
};
using ReceiverStep = std::function<ReceiverUpdate(const std::vector<double>&)>;
using RemovalRule =
    std::function<int(std::span<const double>, std::span<const int>)>;

// Shared outer loop of every matching-pursuit variant.
ScheduleOutcome run_elimination(int num_devices, std::span<const double> phi,
                                double gamma, const WeightPolicy& policy,
                                const ReceiverStep& receiver_step,
                                const RemovalRule& removal, bool bidirectional,
                                bool record_trace);

ComplexVector weighted_leading_vector(const ChannelRealization& h,
                                      const std::vector<double>& weights,
                                      const PowerIterationOptions& options);

}  // namespace detail

}  // namespace otasched
