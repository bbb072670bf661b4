#include "otasched/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include <yaml-cpp/yaml.h>

#include "otasched/coordination.hpp"
#include "otasched/fedavg.hpp"
#include "otasched/scheduler.hpp"

namespace otasched {
namespace {

const std::map<std::string, ExperimentKind>& kind_table() {
  static const std::map<std::string, ExperimentKind> table{
      {"delta-sweep", ExperimentKind::kDeltaSweep},
      {"gamma-sweep", ExperimentKind::kGammaSweep},
      {"rician-gamma-sweep", ExperimentKind::kRicianGammaSweep},
      {"runtime-scaling", ExperimentKind::kRuntimeScaling},
      {"oracle-compare", ExperimentKind::kOracleCompare},
      {"ota-fl", ExperimentKind::kOtaFl},
  };
  return table;
}

std::set<std::string> allowed_variants(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::kOracleCompare:
      return {"mp", "bidirectional", "random", "oracle"};
    case ExperimentKind::kRuntimeScaling:
      return {"mp", "bidirectional", "random"};
    case ExperimentKind::kOtaFl:
      return {"mp", "bidirectional", "random", "full"};
    default:
      return {"mp", "bidirectional", "random", "tuned", "frozen"};
  }
}

std::string join(const std::vector<std::string>& items) {
  std::string s;
  for (const auto& i : items) s += (s.empty() ? "" : "; ") + i;
  return s;
}

// --- YAML ------------------------------------------------------------------

template <typename T>
std::vector<T> as_list(const YAML::Node& node) {
  if (node.IsSequence()) return node.as<std::vector<T>>();
  return {node.as<T>()};
}

void check_keys(const YAML::Node& node, const std::set<std::string>& known,
                const std::string& prefix, std::vector<std::string>& problems) {
  for (const auto& kv : node) {
    const auto key = kv.first.as<std::string>();
    if (!known.count(key)) problems.push_back("unknown key '" + prefix + key + "'");
  }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out,
          const std::string& prefix, std::vector<std::string>& problems) {
  if (!node[key]) return;
  try {
    out = node[key].as<T>();
  } catch (const YAML::Exception&) {
    problems.push_back("malformed value for '" + prefix + key + "'");
  }
}

template <typename T>
void read_list(const YAML::Node& node, const char* key, std::vector<T>& out,
               std::vector<std::string>& problems) {
  if (!node[key]) return;
  try {
    out = as_list<T>(node[key]);
  } catch (const YAML::Exception&) {
    problems.push_back(std::string("malformed value for '") + key + "'");
  }
}

ExperimentSpec spec_from_node(const YAML::Node& root) {
  std::vector<std::string> problems;
  if (!root.IsMap()) throw ValidationError({"spec must be a mapping"});
  check_keys(root,
             {"experiment", "kind", "channel", "devices", "antennas",
              "irs_elements", "gamma_db", "delta", "trials", "seed", "variants",
              "output", "threads", "plot", "warmup", "oracle_candidates",
              "rician", "irs", "fl"},
             "", problems);
  ExperimentSpec spec;
  read(root, "experiment", spec.id, "", problems);
  if (root["kind"]) {
    const auto name = root["kind"].as<std::string>();
    if (kind_table().count(name))
      spec.kind = kind_table().at(name);
    else
      problems.push_back("unknown kind '" + name + "'");
  } else {
    problems.push_back("missing key 'kind'");
  }
  if (root["channel"]) {
    const auto name = root["channel"].as<std::string>();
    if (name == "iid")
      spec.channel = ChannelKind::kIid;
    else if (name == "rician")
      spec.channel = ChannelKind::kRician;
    else
      problems.push_back("unknown channel '" + name + "'");
  } else if (spec.kind == ExperimentKind::kRicianGammaSweep) {
    spec.channel = ChannelKind::kRician;
  }
  read_list(root, "devices", spec.devices, problems);
  read_list(root, "antennas", spec.antennas, problems);
  read(root, "irs_elements", spec.irs_elements, "", problems);
  read_list(root, "gamma_db", spec.gamma_db, problems);
  read_list(root, "delta", spec.delta, problems);
  read(root, "trials", spec.trials, "", problems);
  read(root, "seed", spec.seed, "", problems);
  read_list(root, "variants", spec.variants, problems);
  read(root, "output", spec.output_dir, "", problems);
  read(root, "threads", spec.threads, "", problems);
  read(root, "plot", spec.plot, "", problems);
  read(root, "warmup", spec.warmup, "", problems);
  read(root, "oracle_candidates", spec.oracle_candidates, "", problems);
  if (const auto r = root["rician"]) {
    check_keys(r,
               {"inner_radius", "outer_radius", "rician_factor_db", "spacing",
                "path_loss_exponent", "angular_std_min_deg",
                "angular_std_max_deg"},
               "rician.", problems);
    auto& s = spec.rician;
    read(r, "inner_radius", s.inner_radius, "rician.", problems);
    read(r, "outer_radius", s.outer_radius, "rician.", problems);
    read(r, "rician_factor_db", s.rician_factor_db, "rician.", problems);
    read(r, "spacing", s.spacing, "rician.", problems);
    read(r, "path_loss_exponent", s.path_loss_exponent, "rician.", problems);
    read(r, "angular_std_min_deg", s.angular_std_min_deg, "rician.", problems);
    read(r, "angular_std_max_deg", s.angular_std_max_deg, "rician.", problems);
  }
  if (const auto r = root["irs"]) {
    check_keys(r, {"reflect_var", "cascade_var"}, "irs.", problems);
    read(r, "reflect_var", spec.irs.reflect_var, "irs.", problems);
    read(r, "cascade_var", spec.irs.cascade_var, "irs.", problems);
  }
  if (const auto r = root["fl"]) {
    check_keys(r,
               {"rounds", "dim", "train_size", "test_size", "label_noise",
                "eps0", "eps1", "noise_var", "power", "ridge"},
               "fl.", problems);
    auto& f = spec.fl;
    read(r, "rounds", f.rounds, "fl.", problems);
    read(r, "dim", f.dim, "fl.", problems);
    read(r, "train_size", f.train_size, "fl.", problems);
    read(r, "test_size", f.test_size, "fl.", problems);
    read(r, "label_noise", f.label_noise, "fl.", problems);
    read(r, "eps0", f.eps0, "fl.", problems);
    read(r, "eps1", f.eps1, "fl.", problems);
    read(r, "noise_var", f.noise_var, "fl.", problems);
    read(r, "power", f.power, "fl.", problems);
    read(r, "ridge", f.ridge, "fl.", problems);
  }
  spec.irs.num_elements = spec.irs_elements;
  if (!problems.empty()) throw ValidationError(problems);
  return spec;
}

// --- execution ---------------------------------------------------------------

struct GridPoint {
  int devices;
  int antennas;
  double gamma_db;
  double delta;
};

std::vector<GridPoint> make_grid(const ExperimentSpec& spec) {
  std::vector<GridPoint> grid;
  for (int k : spec.devices)
    for (int n : spec.antennas)
      for (double g : spec.gamma_db)
        for (double d : spec.delta) grid.push_back({k, n, g, d});
  return grid;
}

struct TrialResult {
  double size = 0.0;
  double runtime = 0.0;
  std::optional<double> extra1;
  std::optional<double> extra2;
  std::vector<RoundRecord> rounds;  // learning runs only
  double reference_loss = 0.0;      // perfect-FL loss of the same task
};

// One entry per requested variant, in request order.
using TrialResults = std::vector<TrialResult>;

constexpr std::uint64_t kVariantStream = 0x7a11a47ULL;
constexpr std::uint64_t kDataStream = 0xda7aULL;
constexpr std::uint64_t kRoundStream = 0xf1ULL;

ChannelRealization sample_channel(const ExperimentSpec& spec,
                                  const GridPoint& p, Rng& rng) {
  if (spec.channel == ChannelKind::kRician)
    return sample_rician_network(p.antennas, p.devices, spec.rician, rng);
  return sample_iid_gaussian(p.antennas, p.devices, rng);
}

template <typename F>
TrialResult timed(F&& run) {
  const auto start = std::chrono::steady_clock::now();
  ScheduleOutcome out = run();
  const auto stop = std::chrono::steady_clock::now();
  TrialResult r;
  r.size = out.size();
  r.runtime = std::chrono::duration<double>(stop - start).count();
  return r;
}

TrialResults run_scheduling_trial(const ExperimentSpec& spec,
                                  const GridPoint& p, std::size_t grid_index,
                                  int trial) {
  Rng rng = derive_stream(spec.seed, grid_index, trial);
  Rng variant_rng = derive_stream(spec.seed ^ kVariantStream, grid_index, trial);
  const ChannelRealization h = sample_channel(spec, p, rng);
  std::optional<IrsChannelModel> irs;
  if (spec.irs_elements > 0) irs = sample_irs_model(h, spec.irs, rng);
  const std::vector<double> phi(p.devices, 1.0);
  const double gamma = gamma_from_db(p.gamma_db);
  const WeightPolicy policy(p.delta);

  TrialResults results;
  for (const auto& v : spec.variants) {
    if (v == "mp") {
      results.push_back(timed([&] { return schedule_mp(h, phi, gamma, policy); }));
    } else if (v == "bidirectional") {
      results.push_back(timed(
          [&] { return schedule_mp_bidirectional(h, phi, gamma, policy); }));
    } else if (v == "random") {
      results.push_back(timed(
          [&] { return schedule_random(h, phi, gamma, variant_rng, policy); }));
    } else if (v == "tuned" || v == "frozen") {
      IrsChannelModel model =
          irs ? *irs
              : IrsChannelModel{h, ComplexMatrix(h.rows(), 0),
                                ComplexMatrix(0, h.cols())};
      const PhaseVector mu0 = PhaseVector::ones(model.num_elements());
      if (v == "tuned") {
        results.push_back(timed([&] {
          return schedule_mp_tuned(model, phi, gamma, policy, mu0).schedule;
        }));
      } else {
        const ChannelRealization frozen = effective_channel(model, mu0);
        results.push_back(
            timed([&] { return schedule_mp(frozen, phi, gamma, policy); }));
      }
    }
  }
  return results;
}

TrialResults run_oracle_trial(const ExperimentSpec& spec, const GridPoint& p,
                              std::size_t grid_index, int trial) {
  Rng rng = derive_stream(spec.seed, grid_index, trial);
  Rng variant_rng = derive_stream(spec.seed ^ kVariantStream, grid_index, trial);
  const ChannelRealization h = sample_channel(spec, p, rng);
  const std::vector<double> phi(p.devices, 1.0);
  const double gamma = gamma_from_db(p.gamma_db);
  const WeightPolicy policy(p.delta);

  std::map<std::string, ScheduleOutcome> outcomes;
  std::map<std::string, double> runtimes;
  auto run = [&](const std::string& name, auto&& f) {
    const auto start = std::chrono::steady_clock::now();
    outcomes[name] = f();
    runtimes[name] = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
  };
  run("mp", [&] { return schedule_mp(h, phi, gamma, policy); });
  run("bidirectional",
      [&] { return schedule_mp_bidirectional(h, phi, gamma, policy); });
  run("random",
      [&] { return schedule_random(h, phi, gamma, variant_rng, policy); });
  std::vector<ComplexVector> extra;
  for (const auto& [name, o] : outcomes)
    if (o.receiver.size() > 0) extra.push_back(o.receiver);
  run("oracle", [&] {
    return exhaustive_oracle(h, phi, gamma, spec.oracle_candidates,
                             variant_rng, extra, policy);
  });

  const int best = outcomes["oracle"].size();
  TrialResults results;
  for (const auto& v : spec.variants) {
    const ScheduleOutcome& o = outcomes.at(v);
    if (!satisfies_certificate(h, phi, gamma, o.active, o.receiver))
      throw std::logic_error("feasibility certificate violated by " + v);
    TrialResult r;
    r.size = o.size();
    r.runtime = runtimes[v];
    r.extra1 = best;
    r.extra2 = o.size() == best ? 1.0 : 0.0;
    results.push_back(r);
  }
  return results;
}

SchedulerKind scheduler_kind(const std::string& v) {
  if (v == "bidirectional") return SchedulerKind::kBidirectional;
  if (v == "random") return SchedulerKind::kRandom;
  if (v == "full") return SchedulerKind::kFull;
  return SchedulerKind::kMatchingPursuit;
}

double mean_loss(const LearningTrace& trace) {
  double s = 0.0;
  for (const auto& r : trace.rounds) s += r.test_loss;
  return s / trace.rounds.size();
}

TrialResults run_fl_trial(const ExperimentSpec& spec, const GridPoint& p,
                          int trial) {
  const FlSettings& fl = spec.fl;
  // Data depends on the trial only, so every grid point sees the same tasks.
  Rng data_rng = derive_stream(spec.seed, kDataStream, trial);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd theta_star(fl.dim);
  for (int j = 0; j < fl.dim; ++j) theta_star(j) = normal(data_rng);
  const LinearDataset train =
      make_linear_dataset(theta_star, fl.train_size, fl.label_noise, data_rng);
  const LinearDataset test =
      make_linear_dataset(theta_star, fl.test_size, fl.label_noise, data_rng);
  const Partition part = partition_heterogeneous(fl.train_size, p.devices,
                                                 fl.eps0, fl.eps1, data_rng);
  const double loss_fl = mean_loss(
      run_perfect_fl(fl.rounds, train, test, part, fl.ridge));

  TrialResults results;
  for (const auto& v : spec.variants) {
    OtaFlConfig cfg;
    cfg.rounds = fl.rounds;
    cfg.noise_var = fl.noise_var;
    cfg.power = fl.power;
    cfg.gamma = gamma_from_db(p.gamma_db);
    cfg.delta = p.delta;
    cfg.ridge = fl.ridge;
    cfg.scheduler = scheduler_kind(v);
    cfg.channel = [&spec, &p](Rng& r) { return sample_channel(spec, p, r); };
    // Channels depend on the trial only: every grid point and variant sees the
    // same fading sequence.
    Rng rng = derive_stream(spec.seed, kRoundStream, trial);
    const auto start = std::chrono::steady_clock::now();
    const LearningTrace trace = run_ota_fl(cfg, train, test, part, rng);
    TrialResult r;
    r.runtime = std::chrono::duration<double>(
                    std::chrono::steady_clock::now() - start)
                    .count();
    r.size = trace.mean_active();
    const double loss = mean_loss(trace);
    r.extra1 = loss;
    r.extra2 = ota_efficiency(loss, loss_fl);
    r.rounds = trace.rounds;
    r.reference_loss = loss_fl;
    results.push_back(r);
  }
  return results;
}

// Runs fn(grid_index, trial) for every task on `threads` workers. Results are
// stored by index, so the output is independent of scheduling order.
template <typename Fn>
std::vector<TrialResults> run_tasks(std::size_t grid_size, int trials,
                                    int threads, Fn fn) {
  const std::size_t total = grid_size * static_cast<std::size_t>(trials);
  std::vector<TrialResults> results(total);
  std::vector<std::exception_ptr> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      try {
        results[i] = fn(i / trials, static_cast<int>(i % trials));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, static_cast<int>(total)));
  std::vector<std::thread> pool;
  for (int t = 1; t < n; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return results;
}

ResultRow base_row(const ExperimentSpec& spec, const std::string& variant,
                   const GridPoint& p) {
  ResultRow row;
  row.experiment = spec.id;
  row.variant = variant;
  row.gamma_db = p.gamma_db;
  row.delta = p.delta;
  row.devices = p.devices;
  row.antennas = p.antennas;
  row.irs_elements = spec.irs_elements;
  return row;
}

double mean_of(const std::vector<double>& v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / v.size();
}

double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / (v.size() - 1));
}

double median_of(std::vector<double> v) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<ResultRow> tabulate(const ExperimentSpec& spec,
                                const std::vector<GridPoint>& grid,
                                const std::vector<TrialResults>& results,
                                int timing_skip) {
  std::vector<ResultRow> rows;
  for (std::size_t g = 0; g < grid.size(); ++g) {
    for (std::size_t v = 0; v < spec.variants.size(); ++v) {
      std::vector<double> sizes, runtimes, e1, e2;
      for (int t = 0; t < spec.trials; ++t) {
        const TrialResult& r = results[g * spec.trials + t][v];
        ResultRow row = base_row(spec, spec.variants[v], grid[g]);
        row.trial = t;
        row.mean_s = r.size;
        row.runtime_s = r.runtime;
        row.extra1 = r.extra1;
        row.extra2 = r.extra2;
        rows.push_back(row);
        sizes.push_back(r.size);
        if (t >= timing_skip) runtimes.push_back(r.runtime);
        if (r.extra1) e1.push_back(*r.extra1);
        if (r.extra2) e2.push_back(*r.extra2);
      }
      ResultRow agg = base_row(spec, spec.variants[v], grid[g]);
      agg.trial = kAggregateTrial;
      agg.mean_s = mean_of(sizes);
      agg.std_s = std_of(sizes);
      agg.runtime_s = mean_of(runtimes);
      if (spec.kind == ExperimentKind::kRuntimeScaling) {
        agg.extra1 = median_of(runtimes);
        agg.extra2 = static_cast<double>(runtimes.size());
      } else {
        if (!e1.empty()) agg.extra1 = mean_of(e1);
        if (!e2.empty()) agg.extra2 = mean_of(e2);
      }
      rows.push_back(agg);
    }
  }
  return rows;
}

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(ch);
    }
  }
  out.push_back(cur);
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<std::string> problems)
    : std::invalid_argument("invalid experiment spec: " + join(problems)),
      problems_(std::move(problems)) {}

ExperimentKind parse_kind(const std::string& name) {
  const auto it = kind_table().find(name);
  if (it == kind_table().end())
    throw ValidationError({"unknown kind '" + name + "'"});
  return it->second;
}

std::string kind_name(ExperimentKind kind) {
  for (const auto& [name, k] : kind_table())
    if (k == kind) return name;
  return "unknown";
}

std::vector<std::string> ExperimentSpec::validate() const {
  std::vector<std::string> p;
  if (id.empty() || id.find_first_of(",\n/") != std::string::npos)
    p.push_back("experiment: id must be non-empty without ',', '/' or newlines");
  if (trials < 1) p.push_back("trials: must be >= 1");
  if (devices.empty()) p.push_back("devices: grid is empty");
  if (antennas.empty()) p.push_back("antennas: grid is empty");
  if (gamma_db.empty()) p.push_back("gamma_db: grid is empty");
  if (delta.empty()) p.push_back("delta: grid is empty");
  if (variants.empty()) p.push_back("variants: none requested");
  for (int k : devices)
    if (k < 1) p.push_back("devices: entries must be >= 1");
  for (int n : antennas)
    if (n < 1) p.push_back("antennas: entries must be >= 1");
  for (double d : delta)
    if (!(d > 0.0 && d < 1.0)) p.push_back("delta: entries must lie in (0, 1)");
  for (double g : gamma_db)
    if (!std::isfinite(g)) p.push_back("gamma_db: entries must be finite");
  if (irs_elements < 0) p.push_back("irs_elements: must be >= 0");
  const auto allowed = allowed_variants(kind);
  std::set<std::string> seen;
  for (const auto& v : variants) {
    if (!allowed.count(v))
      p.push_back("variants: '" + v + "' not available for " + kind_name(kind));
    if (!seen.insert(v).second) p.push_back("variants: duplicate '" + v + "'");
  }
  if (kind == ExperimentKind::kOracleCompare)
    for (int k : devices)
      if (k > kOracleMaxDevices) p.push_back("devices: oracle needs K <= 12");
  if (kind == ExperimentKind::kOracleCompare && oracle_candidates < 1)
    p.push_back("oracle_candidates: must be >= 1");
  if (kind == ExperimentKind::kRuntimeScaling && warmup < 0)
    p.push_back("warmup: must be >= 0");
  if (kind == ExperimentKind::kRicianGammaSweep && channel != ChannelKind::kRician)
    p.push_back("channel: rician-gamma-sweep requires the rician model");
  if (channel == ChannelKind::kRician &&
      !(rician.inner_radius > 0.0 && rician.inner_radius < rician.outer_radius))
    p.push_back("rician: need 0 < inner_radius < outer_radius");
  if (irs_elements > 0 && !(irs.reflect_var >= 0.0 && irs.cascade_var >= 0.0))
    p.push_back("irs: variances must be non-negative");
  if (kind == ExperimentKind::kOtaFl) {
    if (fl.rounds < 1) p.push_back("fl.rounds: must be >= 1");
    if (fl.dim < 1) p.push_back("fl.dim: must be >= 1");
    if (fl.train_size < 1 || fl.test_size < 1)
      p.push_back("fl.train_size/test_size: must be >= 1");
    if (!(fl.eps0 >= 0.0 && fl.eps0 < fl.eps1))
      p.push_back("fl.eps0/eps1: need 0 <= eps0 < eps1");
    if (!(fl.noise_var >= 0.0)) p.push_back("fl.noise_var: must be >= 0");
    if (!(fl.power > 0.0)) p.push_back("fl.power: must be > 0");
    if (!(fl.ridge >= 0.0)) p.push_back("fl.ridge: must be >= 0");
  }
  return p;
}

ExperimentSpec parse_spec(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ValidationError({std::string("YAML parse error: ") + e.what()});
  }
  return spec_from_node(root);
}

ExperimentSpec load_spec(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read spec file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_spec(buf.str());
}

int resolve_threads(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("OTASCHED_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      std::vector<TraceRow>* traces) {
  if (auto problems = spec.validate(); !problems.empty())
    throw ValidationError(problems);
  if (spec.kind == ExperimentKind::kRuntimeScaling)
    return run_runtime_scaling(spec);
  const auto grid = make_grid(spec);
  const int threads = resolve_threads(spec.threads);
  auto fn = [&](std::size_t g, int t) -> TrialResults {
    switch (spec.kind) {
      case ExperimentKind::kOracleCompare:
        return run_oracle_trial(spec, grid[g], g, t);
      case ExperimentKind::kOtaFl:
        return run_fl_trial(spec, grid[g], t);
      default:
        return run_scheduling_trial(spec, grid[g], g, t);
    }
  };
  const auto results = run_tasks(grid.size(), spec.trials, threads, fn);
  if (traces && spec.kind == ExperimentKind::kOtaFl) {
    traces->clear();
    for (std::size_t g = 0; g < grid.size(); ++g)
      for (std::size_t v = 0; v < spec.variants.size(); ++v)
        for (int t = 0; t < spec.trials; ++t) {
          const TrialResult& r = results[g * spec.trials + t][v];
          for (const auto& rec : r.rounds)
            traces->push_back({spec.id, spec.variants[v], grid[g].gamma_db,
                               grid[g].delta, grid[g].devices,
                               grid[g].antennas, t, rec.round,
                               rec.active_count, rec.test_loss,
                               ota_efficiency(rec.test_loss, r.reference_loss)});
        }
  }
  return tabulate(spec, grid, results, 0);
}

std::vector<ResultRow> run_runtime_scaling(const ExperimentSpec& spec) {
  if (spec.kind != ExperimentKind::kRuntimeScaling)
    throw ValidationError({"kind: run_runtime_scaling needs runtime-scaling"});
  if (auto problems = spec.validate(); !problems.empty())
    throw ValidationError(problems);
  const auto grid = make_grid(spec);
  const int threads = resolve_threads(spec.threads);
  const auto results =
      run_tasks(grid.size(), spec.trials, threads, [&](std::size_t g, int t) {
        return run_scheduling_trial(spec, grid[g], g, t);
      });
  return tabulate(spec, grid, results, spec.warmup);
}

std::string format_csv_row(const ResultRow& r) {
  std::ostringstream out;
  out << r.experiment << ',' << r.variant << ',' << format_number(r.gamma_db)
      << ',' << format_number(r.delta) << ',' << r.devices << ',' << r.antennas
      << ',' << r.irs_elements << ',' << r.trial << ','
      << format_number(r.mean_s) << ',' << format_number(r.std_s) << ','
      << format_number(r.runtime_s) << ','
      << (r.extra1 ? format_number(*r.extra1) : "") << ','
      << (r.extra2 ? format_number(*r.extra2) : "");
  return out.str();
}

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_csv: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_csv_row(r) << '\n';
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

void emit_trace_csv(const std::vector<TraceRow>& rows, const std::string& path) {
  if (rows.empty()) throw std::invalid_argument("emit_trace_csv: no rows");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << kTraceCsvHeader << '\n';
  for (const auto& r : rows)
    out << r.experiment << ',' << r.variant << ',' << format_number(r.gamma_db)
        << ',' << format_number(r.delta) << ',' << r.devices << ','
        << r.antennas << ',' << r.trial << ',' << r.round << ',' << r.active
        << ',' << format_number(r.test_loss) << ',' << format_number(r.zeta)
        << '\n';
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

std::vector<ResultRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read '" + path + "'");
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader)
    throw IoError("'" + path + "' does not start with the expected header");
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 13) throw IoError("malformed row in '" + path + "'");
    ResultRow r;
    r.experiment = f[0];
    r.variant = f[1];
    r.gamma_db = std::stod(f[2]);
    r.delta = std::stod(f[3]);
    r.devices = std::stoi(f[4]);
    r.antennas = std::stoi(f[5]);
    r.irs_elements = std::stoi(f[6]);
    r.trial = std::stoi(f[7]);
    r.mean_s = std::stod(f[8]);
    r.std_s = std::stod(f[9]);
    r.runtime_s = std::stod(f[10]);
    if (!f[11].empty()) r.extra1 = std::stod(f[11]);
    if (!f[12].empty()) r.extra2 = std::stod(f[12]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace otasched
