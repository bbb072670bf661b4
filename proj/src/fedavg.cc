#include "otasched/fedavg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/QR>

namespace otasched {

LinearDataset make_linear_dataset(const Eigen::VectorXd& theta_star, int count,
                                  double noise_std, Rng& rng) {
  const Eigen::Index d = theta_star.size();
  if (d < 1 || count < 1)
    throw std::invalid_argument("make_linear_dataset: empty dimensions");
  std::normal_distribution<double> normal(0.0, 1.0);
  LinearDataset data;
  data.features.resize(count, d);
  data.targets.resize(count);
  for (int i = 0; i < count; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) data.features(i, j) = normal(rng);
    data.targets(i) =
        data.features.row(i).dot(theta_star) + noise_std * normal(rng);
  }
  return data;
}

std::vector<int> Partition::sizes() const {
  std::vector<int> s;
  for (const auto& idx : indices) s.push_back(static_cast<int>(idx.size()));
  return s;
}

Partition partition_heterogeneous(int total, int num_devices, double eps0,
                                  double eps1, Rng& rng) {
  if (num_devices < 1 || total < 1)
    throw std::invalid_argument("partition_heterogeneous: empty problem");
  if (!(eps0 >= 0.0) || !(eps0 < eps1))
    throw std::invalid_argument("partition_heterogeneous: need 0 <= eps0 < eps1");

  Partition part;
  part.high_group.assign(num_devices, 0);
  std::vector<int> order(num_devices);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  const int high = (num_devices + 1) / 2;
  for (int i = 0; i < high; ++i) part.high_group[order[i]] = 1;

  const double base = static_cast<double>(total) / num_devices;
  part.draws.resize(num_devices);
  std::vector<long> counts(num_devices);
  long drawn = 0;
  for (int k = 0; k < num_devices; ++k) {
    part.draws[k] = part.high_group[k] ? uniform(rng, base, base + eps1)
                                       : uniform(rng, eps0, eps1);
    counts[k] = static_cast<long>(std::floor(part.draws[k]));
    drawn += counts[k];
  }
  if (drawn > total)
    throw std::invalid_argument(
        "partition_heterogeneous: drawn sizes exceed the dataset");
  const long top_up = (total - drawn) / num_devices;

  std::vector<int> pool(total);
  std::iota(pool.begin(), pool.end(), 0);
  std::shuffle(pool.begin(), pool.end(), rng);
  part.indices.resize(num_devices);
  std::size_t next = 0;
  for (int k = 0; k < num_devices; ++k) {
    const long n = counts[k] + top_up;
    part.indices[k].assign(pool.begin() + next, pool.begin() + next + n);
    next += n;
  }
  return part;
}

Eigen::VectorXd local_ls_fit(const LinearDataset& data,
                             std::span<const int> rows, double ridge) {
  if (rows.empty()) throw std::invalid_argument("local_ls_fit: no samples");
  const int d = data.dim();
  Eigen::MatrixXd a(rows.size(), d);
  Eigen::VectorXd b(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    a.row(i) = data.features.row(rows[i]);
    b(i) = data.targets(rows[i]);
  }
  if (ridge == 0.0) return a.colPivHouseholderQr().solve(b);
  Eigen::MatrixXd gram = a.transpose() * a;
  gram.diagonal().array() += ridge;
  return gram.ldlt().solve(a.transpose() * b);
}

Eigen::VectorXd federated_average(const std::vector<Eigen::VectorXd>& local,
                                  std::span<const double> phi,
                                  std::span<const int> active) {
  if (active.empty())
    throw std::invalid_argument("federated_average: no devices to aggregate");
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(local[active.front()].size());
  for (int k : active) {
    if (!(phi[k] > 0.0))
      throw std::invalid_argument("federated_average: phi must be positive");
    sum += phi[k] * local[k];
  }
  return sum;
}

Eigen::VectorXd ota_fl_round(const std::vector<Eigen::VectorXd>& local,
                             const ChannelRealization& h,
                             const Schedule& schedule, double noise_var,
                             Rng& rng) {
  const Eigen::Index d = local.front().size();
  Eigen::VectorXd out(d);
  std::vector<double> column(local.size(), 0.0);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (int k : schedule.active) column[k] = local[k](j);
    out(j) = aircomp_round(h, schedule, column, noise_var, rng).real();
  }
  return out;
}

double test_loss(const LinearDataset& data, const Eigen::VectorXd& theta) {
  return (data.targets - data.features * theta).squaredNorm() / data.size();
}

double ota_efficiency(double loss_ota, double loss_fl) {
  if (!(loss_ota > 0.0) || !(loss_fl > 0.0))
    throw std::invalid_argument("ota_efficiency: losses must be positive");
  return loss_fl / loss_ota;
}

double LearningTrace::mean_active() const {
  if (rounds.empty()) return 0.0;
  double s = 0.0;
  for (const auto& r : rounds) s += r.active_count;
  return s / rounds.size();
}

namespace {

std::vector<Eigen::VectorXd> fit_all(const LinearDataset& train,
                                     const Partition& partition, double ridge) {
  std::vector<Eigen::VectorXd> local;
  for (const auto& rows : partition.indices)
    local.push_back(local_ls_fit(train, rows, ridge));
  return local;
}

std::vector<double> size_weights(const Partition& partition) {
  const auto sizes = partition.sizes();
  const double total = std::accumulate(sizes.begin(), sizes.end(), 0.0);
  std::vector<double> phi;
  for (int s : sizes) phi.push_back(s / total);
  return phi;
}

ScheduleOutcome run_scheduler(SchedulerKind kind, const ChannelRealization& h,
                              std::span<const double> phi, double gamma,
                              double delta, Rng& rng) {
  const WeightPolicy policy(delta);
  switch (kind) {
    case SchedulerKind::kMatchingPursuit:
      return schedule_mp(h, phi, gamma, policy);
    case SchedulerKind::kBidirectional:
      return schedule_mp_bidirectional(h, phi, gamma, policy);
    case SchedulerKind::kRandom:
      return schedule_random(h, phi, gamma, rng, policy);
    case SchedulerKind::kFull: {
      ScheduleOutcome all;
      for (int k = 0; k < h.cols(); ++k) all.active.push_back(k);
      all.receiver = leading_left_singular_pair(h).vector;
      all.iterations = 1;
      all.status = ScheduleStatus::kFeasible;
      return all;
    }
  }
  throw std::logic_error("unknown scheduler kind");
}

}  // namespace

LearningTrace run_ota_fl(const OtaFlConfig& config, const LinearDataset& train,
                         const LinearDataset& test, const Partition& partition,
                         Rng& rng) {
  if (!config.channel) throw std::invalid_argument("run_ota_fl: no channel sampler");
  if (config.rounds < 1) throw std::invalid_argument("run_ota_fl: rounds must be >= 1");
  const int num_devices = partition.num_devices();
  const auto local = fit_all(train, partition, config.ridge);
  const auto phi = size_weights(partition);
  const auto sizes = partition.sizes();

  LearningTrace trace;
  Eigen::VectorXd global = Eigen::VectorXd::Zero(train.dim());
  for (int t = 1; t <= config.rounds; ++t) {
    const ChannelRealization h = config.channel(rng);
    if (h.cols() != num_devices)
      throw std::invalid_argument("run_ota_fl: channel has wrong device count");
    const ScheduleOutcome sched =
        run_scheduler(config.scheduler, h, phi, config.gamma, config.delta, rng);
    RoundRecord rec;
    rec.round = t;
    rec.active_count = sched.size();
    if (sched.empty()) {
      rec.empty_schedule = true;
    } else {
      double scheduled = 0.0;
      for (int k : sched.active) scheduled += sizes[k];
      std::vector<double> renorm(num_devices, 0.0);
      for (int k : sched.active) renorm[k] = sizes[k] / scheduled;
      const Schedule zf = make_zf_schedule(h, sched.receiver, sched.active,
                                           renorm, config.power);
      global = ota_fl_round(local, h, zf, config.noise_var, rng);
    }
    rec.test_loss = test_loss(test, global);
    trace.rounds.push_back(rec);
    trace.models.push_back(global);
  }
  return trace;
}

LearningTrace run_perfect_fl(int rounds, const LinearDataset& train,
                             const LinearDataset& test,
                             const Partition& partition, double ridge) {
  const auto local = fit_all(train, partition, ridge);
  const auto phi = size_weights(partition);
  std::vector<int> all(partition.num_devices());
  std::iota(all.begin(), all.end(), 0);
  LearningTrace trace;
  const Eigen::VectorXd global = federated_average(local, phi, all);
  for (int t = 1; t <= rounds; ++t) {
    trace.rounds.push_back({t, partition.num_devices(), test_loss(test, global),
                            false});
    trace.models.push_back(global);
  }
  return trace;
}

}  // namespace otasched
