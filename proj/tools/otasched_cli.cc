#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "otasched/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monte-Carlo experiments for over-the-air device scheduling"};
  std::string spec_path;
  std::uint64_t seed = 0;
  std::string out_dir;
  int threads = 0;
  std::vector<std::string> variants;
  bool plot = false;
  app.add_option("--spec", spec_path, "YAML experiment description")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed");
  auto* out_opt = app.add_option("--out", out_dir, "output directory");
  auto* threads_opt = app.add_option("--threads", threads, "worker threads");
  app.add_option("--variant", variants, "scheduler variant (repeatable)");
  app.add_flag("--plot", plot, "also write an SVG of the aggregate curves");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    otasched::ExperimentSpec spec = otasched::load_spec(spec_path);
    if (*seed_opt) spec.seed = seed;
    if (*out_opt) spec.output_dir = out_dir;
    if (*threads_opt) spec.threads = threads;
    if (!variants.empty()) spec.variants = variants;
    if (plot) spec.plot = true;
    if (auto problems = spec.validate(); !problems.empty())
      throw otasched::ValidationError(problems);

    std::error_code ec;
    std::filesystem::create_directories(spec.output_dir, ec);
    if (ec)
      throw otasched::IoError("cannot create '" + spec.output_dir + "': " +
                              ec.message());
    std::vector<otasched::TraceRow> traces;
    const auto rows = otasched::run_experiment(spec, &traces);
    const auto base = std::filesystem::path(spec.output_dir) / spec.id;
    otasched::emit_csv(rows, base.string() + ".csv");
    std::cout << "wrote " << base.string() << ".csv (" << rows.size()
              << " rows)\n";
    if (!traces.empty()) {
      otasched::emit_trace_csv(traces, base.string() + "_trace.csv");
      std::cout << "wrote " << base.string() << "_trace.csv\n";
    }
    if (spec.plot) {
      std::string warning;
      if (otasched::emit_plot(rows, base.string() + ".svg", &warning))
        std::cout << "wrote " << base.string() << ".svg\n";
      else
        std::cerr << "warning: " << warning << '\n';
    }
  } catch (const otasched::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const otasched::IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
