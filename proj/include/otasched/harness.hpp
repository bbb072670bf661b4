#pragma once

// Declarative Monte-Carlo experiments: spec parsing, deterministic parallel
// execution, CSV and SVG emission.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "otasched/channel.hpp"
#include "otasched/irs.hpp"

namespace otasched {

enum class ExperimentKind {
  kDeltaSweep,
  kGammaSweep,
  kRicianGammaSweep,
  kRuntimeScaling,
  kOracleCompare,
  kOtaFl,
};

enum class ChannelKind { kIid, kRician };

struct FlSettings {
  int rounds = 6;
  int dim = 20;
  int train_size = 2000;
  int test_size = 2000;
  double label_noise = 1.0;
  double eps0 = 30.0;
  double eps1 = 50.0;
  double noise_var = 1.0;
  double power = 1.0;
  double ridge = 1e-8;
};

struct ExperimentSpec {
  std::string id = "experiment";
  ExperimentKind kind = ExperimentKind::kGammaSweep;
  ChannelKind channel = ChannelKind::kIid;
  std::vector<int> devices{20};
  std::vector<int> antennas{6};
  int irs_elements = 0;
  std::vector<double> gamma_db{0.0};
  std::vector<double> delta{0.05};
  int trials = 100;
  std::uint64_t seed = 1;
  std::vector<std::string> variants{"mp"};
  std::string output_dir = ".";
  int threads = 0;  // 0: hardware concurrency
  bool plot = false;
  int warmup = 3;
  int oracle_candidates = 64;
  RicianScenario rician;
  IrsScenario irs;
  FlSettings fl;

  /// Human-readable problems; empty when the spec is runnable.
  std::vector<std::string> validate() const;
};

class ValidationError : public std::invalid_argument {
 public:
  explicit ValidationError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const { return problems_; }

 private:
  std::vector<std::string> problems_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentKind parse_kind(const std::string& name);
std::string kind_name(ExperimentKind kind);

/// Parses a YAML experiment description. Throws ValidationError on unknown
/// keys or malformed values, IoError when the file cannot be read.
ExperimentSpec load_spec(const std::string& path);
ExperimentSpec parse_spec(const std::string& yaml_text);

inline constexpr int kAggregateTrial = -1;

struct ResultRow {
  std::string experiment;
  std::string variant;
  double gamma_db = 0.0;
  double delta = 0.0;
  int devices = 0;
  int antennas = 0;
  int irs_elements = 0;
  int trial = kAggregateTrial;
  double mean_s = 0.0;
  double std_s = 0.0;
  double runtime_s = 0.0;
  std::optional<double> extra1;
  std::optional<double> extra2;
};

inline constexpr const char* kCsvHeader =
    "experiment,variant,gamma_db,delta,K,N,M,trial,mean_S,std_S,runtime_s,"
    "extra1,extra2";

/// One learning round of an ota-fl run; zeta is the round's efficiency against
/// perfect federated averaging on the same task.
struct TraceRow {
  std::string experiment;
  std::string variant;
  double gamma_db = 0.0;
  double delta = 0.0;
  int devices = 0;
  int antennas = 0;
  int trial = 0;
  int round = 0;
  int active = 0;
  double test_loss = 0.0;
  double zeta = 0.0;
};

inline constexpr const char* kTraceCsvHeader =
    "experiment,variant,gamma_db,delta,K,N,trial,round,active,test_loss,zeta";

/// Per-trial rows followed by one aggregate row (trial = -1) per grid point
/// and variant. Streams are derived from (seed, grid index, trial index).
/// For ota-fl specs, `traces` (if given) receives the per-round records.
std::vector<ResultRow> run_experiment(const ExperimentSpec& spec,
                                      std::vector<TraceRow>* traces = nullptr);

/// Runtime grid over K x N x gamma. The first `warmup` trials of each cell are
/// excluded from timing. Aggregate rows: runtime_s = mean, extra1 = median,
/// extra2 = number of timed samples.
std::vector<ResultRow> run_runtime_scaling(const ExperimentSpec& spec);

void emit_csv(const std::vector<ResultRow>& rows, const std::string& path);
std::vector<ResultRow> read_csv(const std::string& path);
void emit_trace_csv(const std::vector<TraceRow>& rows, const std::string& path);
std::string format_csv_row(const ResultRow& row);

/// Mean metric against the swept parameter, one polyline per series. Returns
/// false and fills `warning` instead of throwing.
bool emit_plot(const std::vector<ResultRow>& rows, const std::string& path,
               std::string* warning = nullptr);

/// Worker count: explicit value, else OTASCHED_THREADS, else hardware.
int resolve_threads(int requested);

}  // namespace otasched
