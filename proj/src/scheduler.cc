#include "otasched/scheduler.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace otasched {

WeightPolicy::WeightPolicy(double d) : delta(d) {
  if (!(d > 0.0 && d < 1.0))
    throw std::invalid_argument("WeightPolicy: delta must lie in (0, 1)");
}

std::vector<double> constraint_indicators(const ChannelRealization& h,
                                          std::span<const double> phi,
                                          double gamma, const ComplexVector& c) {
  std::vector<double> f(h.cols());
  for (Eigen::Index k = 0; k < h.cols(); ++k) {
    const double g = std::norm(h.col(k).dot(c));
    // gamma may be +inf; treat 0 * inf as an unsatisfied constraint.
    f[k] = g > 0.0 ? phi[k] * phi[k] - gamma * g : phi[k] * phi[k];
  }
  return f;
}

int next_removal_index(std::span<const double> indicators,
                       std::span<const int> active) {
  if (active.empty())
    throw std::invalid_argument("next_removal_index: empty active set");
  int best = active.front();
  for (int k : active) {
    const double fk = indicators[k];
    const double fb = indicators[best];
    if (fk > fb || (fk == fb && k < best)) best = k;
  }
  return best;
}

bool satisfies_certificate(const ChannelRealization& h,
                           std::span<const double> phi, double gamma,
                           std::span<const int> active, const ComplexVector& c,
                           double tol) {
  if (active.empty()) return true;
  if (std::abs(c.norm() - 1.0) > 1e-9) return false;
  const auto f = constraint_indicators(h, phi, gamma, c);
  for (int k : active)
    if (!(f[k] <= tol)) return false;
  return true;
}

namespace detail {

ComplexVector weighted_leading_vector(const ChannelRealization& h,
                                      const std::vector<double>& weights,
                                      const PowerIterationOptions& options) {
  ComplexMatrix scaled = h;
  for (Eigen::Index k = 0; k < h.cols(); ++k)
    scaled.col(k) *= std::sqrt(weights[k]);
  return leading_left_singular_pair(scaled, options).vector;
}

ScheduleOutcome run_elimination(int num_devices, std::span<const double> phi,
                                double gamma, const WeightPolicy& policy,
                                const ReceiverStep& receiver_step,
                                const RemovalRule& removal, bool bidirectional,
                                bool record_trace) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (static_cast<int>(phi.size()) != num_devices)
    throw std::invalid_argument("phi must have one entry per device");
  for (double p : phi)
    if (!(p > 0.0)) throw std::invalid_argument("phi must be positive");

  ScheduleOutcome out;
  std::vector<char> in_set(num_devices, 1);
  std::vector<double> indicator(num_devices, 1.0);
  std::vector<double> weight(num_devices, 0.0);
  std::vector<int> removed;
  int pending = -1;
  const int guard = bidirectional ? 4 * num_devices : num_devices + 1;

  auto active_list = [&] {
    DeviceSet s;
    for (int k = 0; k < num_devices; ++k)
      if (in_set[k]) s.push_back(k);
    return s;
  };

  for (int t = 1;; ++t) {
    IterationRecord rec;
    rec.iteration = t;
    if (pending >= 0) {
      in_set[pending] = 0;
      weight[pending] = 0.0;
      removed.push_back(pending);
      rec.removed = pending;
    }
    DeviceSet active = active_list();
    out.iterations = t;
    if (active.empty()) {
      rec.max_indicator = -std::numeric_limits<double>::infinity();
      if (record_trace) out.trace.push_back(rec);
      out.active.clear();
      out.status = ScheduleStatus::kEmpty;
      return out;
    }
    for (int k : active) weight[k] = policy(indicator[k]);

    ReceiverUpdate upd = receiver_step(weight);
    const auto f = constraint_indicators(upd.channel, phi, gamma, upd.receiver);
    for (int k : active) indicator[k] = f[k];

    if (bidirectional) {
      std::vector<int> kept;
      for (int j : removed) {
        if (f[j] <= kFeasibilityTol) {
          in_set[j] = 1;
          indicator[j] = f[j];
          weight[j] = policy(f[j]);
          ++rec.reinserted;
        } else {
          kept.push_back(j);
        }
      }
      removed.swap(kept);
      if (rec.reinserted > 0) active = active_list();
    }

    double worst = -std::numeric_limits<double>::infinity();
    for (int k : active) worst = std::max(worst, indicator[k]);
    rec.max_indicator = worst;
    rec.active_count = static_cast<int>(active.size());
    if (record_trace) out.trace.push_back(rec);
    out.receiver = upd.receiver;

    if (worst <= kFeasibilityTol) {
      out.active = std::move(active);
      out.status = ScheduleStatus::kFeasible;
      return out;
    }
    if (t >= guard) {
      // Keep the devices already satisfied by the current receiver; this is
      // a valid certificate for the returned (S, c).
      DeviceSet ok;
      for (int k : active)
        if (indicator[k] <= kFeasibilityTol) ok.push_back(k);
      out.active = std::move(ok);
      out.status =
          out.active.empty() ? ScheduleStatus::kEmpty : ScheduleStatus::kFeasible;
      return out;
    }
    pending = removal(indicator, active);
  }
}

}  // namespace detail

namespace {

detail::ReceiverStep plain_step(const ChannelRealization& h,
                                const PowerIterationOptions& power) {
  return [&h, power](const std::vector<double>& w) {
    return detail::ReceiverUpdate{detail::weighted_leading_vector(h, w, power),
                                  h};
  };
}

void check_channel(const ChannelRealization& h) {
  if (h.rows() < 1 || h.cols() < 1)
    throw std::invalid_argument("channel matrix must be non-empty");
  for (Eigen::Index k = 0; k < h.cols(); ++k)
    if (h.col(k).squaredNorm() == 0.0)
      throw DegenerateInputError("channel matrix has a zero column");
}

}  // namespace

ScheduleOutcome schedule_mp(const ChannelRealization& h,
                            std::span<const double> phi, double gamma,
                            const WeightPolicy& policy,
                            const SchedulerOptions& options) {
  check_channel(h);
  return detail::run_elimination(static_cast<int>(h.cols()), phi, gamma, policy,
                                 plain_step(h, options.power),
                                 next_removal_index, false,
                                 options.record_trace);
}

ScheduleOutcome schedule_mp_bidirectional(const ChannelRealization& h,
                                          std::span<const double> phi,
                                          double gamma,
                                          const WeightPolicy& policy,
                                          const SchedulerOptions& options) {
  check_channel(h);
  return detail::run_elimination(static_cast<int>(h.cols()), phi, gamma, policy,
                                 plain_step(h, options.power),
                                 next_removal_index, true,
                                 options.record_trace);
}

ScheduleOutcome schedule_random(const ChannelRealization& h,
                                std::span<const double> phi, double gamma,
                                Rng& rng, const WeightPolicy& policy,
                                const SchedulerOptions& options) {
  check_channel(h);
  auto pick = [&rng](std::span<const double>, std::span<const int> active) {
    std::uniform_int_distribution<std::size_t> u(0, active.size() - 1);
    return active[u(rng)];
  };
  return detail::run_elimination(static_cast<int>(h.cols()), phi, gamma, policy,
                                 plain_step(h, options.power), pick, false,
                                 options.record_trace);
}

ScheduleOutcome exhaustive_oracle(const ChannelRealization& h,
                                  std::span<const double> phi, double gamma,
                                  int candidates, Rng& rng,
                                  std::span<const ComplexVector> extra_receivers,
                                  const WeightPolicy& policy) {
  check_channel(h);
  const int num_devices = static_cast<int>(h.cols());
  if (num_devices > kOracleMaxDevices)
    throw std::invalid_argument("exhaustive_oracle: at most 12 devices");
  if (candidates < 0)
    throw std::invalid_argument("exhaustive_oracle: negative candidate count");

  using Mask = unsigned;
  auto feasible_mask = [&](const ComplexVector& c) {
    const auto f = constraint_indicators(h, phi, gamma, c);
    Mask m = 0;
    for (int k = 0; k < num_devices; ++k)
      if (f[k] <= kFeasibilityTol) m |= Mask{1} << k;
    return m;
  };

  std::vector<ComplexVector> pool;
  for (int i = 0; i < candidates; ++i)
    pool.push_back(random_unit_vector(h.rows(), rng));
  for (const ScheduleOutcome& o : {schedule_mp(h, phi, gamma, policy),
                                   schedule_mp_bidirectional(h, phi, gamma,
                                                             policy)})
    if (o.receiver.size() == h.rows()) pool.push_back(o.receiver);
  for (const ComplexVector& c : extra_receivers)
    if (c.size() == h.rows() && c.norm() > 0.0) pool.push_back(c.normalized());

  std::vector<Mask> pool_masks;
  pool_masks.reserve(pool.size());
  for (const auto& c : pool) pool_masks.push_back(feasible_mask(c));

  std::vector<Mask> subsets;
  for (Mask s = 1; s < (Mask{1} << num_devices); ++s) subsets.push_back(s);
  std::stable_sort(subsets.begin(), subsets.end(), [](Mask a, Mask b) {
    return std::popcount(a) > std::popcount(b);
  });

  std::uniform_real_distribution<double> positive(1e-3, 1.0);
  ScheduleOutcome out;
  for (Mask s : subsets) {
    int found = -1;
    for (std::size_t i = 0; i < pool_masks.size(); ++i)
      if ((pool_masks[i] & s) == s) {
        found = static_cast<int>(i);
        break;
      }
    ComplexVector certificate;
    if (found >= 0) {
      certificate = pool[found];
    } else {
      std::vector<double> w(num_devices, 0.0);
      for (int i = 0; i < candidates && certificate.size() == 0; ++i) {
        for (int k = 0; k < num_devices; ++k)
          w[k] = (s >> k) & 1 ? positive(rng) : 0.0;
        ComplexVector c = detail::weighted_leading_vector(h, w, {});
        if ((feasible_mask(c) & s) == s) certificate = std::move(c);
      }
    }
    if (certificate.size() > 0) {
      for (int k = 0; k < num_devices; ++k)
        if ((s >> k) & 1) out.active.push_back(k);
      out.receiver = std::move(certificate);
      out.status = ScheduleStatus::kFeasible;
      return out;
    }
  }
  out.status = ScheduleStatus::kEmpty;
  return out;
}

}  // namespace otasched
