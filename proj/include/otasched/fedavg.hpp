#pragma once

// Linear least-squares federated averaging run over simulated AirComp uplinks.

#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "otasched/coordination.hpp"
#include "otasched/scheduler.hpp"

namespace otasched {

struct LinearDataset {
  Eigen::MatrixXd features;  // one row per sample
  Eigen::VectorXd targets;

  int size() const { return static_cast<int>(targets.size()); }
  int dim() const { return static_cast<int>(features.cols()); }
};

/// beta = theta_star^T a + noise, a ~ N(0, I).
LinearDataset make_linear_dataset(const Eigen::VectorXd& theta_star, int count,
                                  double noise_std, Rng& rng);

struct Partition {
  std::vector<std::vector<int>> indices;  // per device, disjoint
  std::vector<double> draws;              // the uniform draws before top-up
  std::vector<char> high_group;

  std::vector<int> sizes() const;
  int num_devices() const { return static_cast<int>(indices.size()); }
};

/// Quantity-skewed split: ceil(K/2) random devices draw from [L/K, L/K + e1],
/// the rest from [e0, e1]; every device is then topped up by
/// floor((L - sum)/K) samples.
Partition partition_heterogeneous(int total, int num_devices, double eps0,
                                  double eps1, Rng& rng);

/// Ridge-stabilized local least squares on the given rows.
Eigen::VectorXd local_ls_fit(const LinearDataset& data,
                             std::span<const int> rows, double ridge);

Eigen::VectorXd federated_average(const std::vector<Eigen::VectorXd>& local,
                                  std::span<const double> phi,
                                  std::span<const int> active);

/// Per-coordinate AirComp aggregation of the scheduled local models; the
/// imaginary part of each estimate is discarded.
Eigen::VectorXd ota_fl_round(const std::vector<Eigen::VectorXd>& local,
                             const ChannelRealization& h,
                             const Schedule& schedule, double noise_var,
                             Rng& rng);

/// Mean squared prediction error.
double test_loss(const LinearDataset& data, const Eigen::VectorXd& theta);

/// loss_fl / loss_ota.
double ota_efficiency(double loss_ota, double loss_fl);

enum class SchedulerKind { kMatchingPursuit, kBidirectional, kRandom, kFull };

struct OtaFlConfig {
  int rounds = 6;
  double noise_var = 1.0;
  double power = 1.0;
  double gamma = 1.0;  // +inf schedules everyone
  double delta = 0.05;
  double ridge = 1e-8;
  SchedulerKind scheduler = SchedulerKind::kMatchingPursuit;
  std::function<ChannelRealization(Rng&)> channel;
};

struct RoundRecord {
  int round = 0;
  int active_count = 0;
  double test_loss = 0.0;
  bool empty_schedule = false;
};

struct LearningTrace {
  std::vector<RoundRecord> rounds;
  std::vector<Eigen::VectorXd> models;  // global model after each round

  double final_loss() const { return rounds.back().test_loss; }
  double mean_active() const;
};

/// Per round: fresh channel, scheduling with phi_k = L_k / L, local fits,
/// AirComp aggregation with phi renormalized over the scheduled set, noiseless
/// broadcast. An empty schedule keeps the previous global model.
LearningTrace run_ota_fl(const OtaFlConfig& config, const LinearDataset& train,
                         const LinearDataset& test, const Partition& partition,
                         Rng& rng);

/// Noiseless full-participation baseline with phi_k = L_k / L.
LearningTrace run_perfect_fl(int rounds, const LinearDataset& train,
                             const LinearDataset& test,
                             const Partition& partition, double ridge);

}  // namespace otasched
