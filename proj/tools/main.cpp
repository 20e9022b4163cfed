#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "runner.hpp"
#include "svlab/field_io.hpp"

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace svlab::runner;

  CLI::App app{"Stochastic variational experiments on the flat torus"};
  std::string experiment;
  std::string config_path;
  std::uint64_t seed = 0;
  int threads = 0;
  bool save_paths = false;
  std::string out_dir;
  bool check_only = false;
  app.add_option("experiment", experiment, "Experiment to run")
      ->required()
      ->check(CLI::IsMember(experiment_names()));
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Master seed");
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--save-paths", save_paths, "Write raw ensembles under <out>/paths");
  app.add_option("--out", out_dir, "Output directory (default: $SVLAB_OUTPUT_DIR or ./svlab_out)");
  app.add_flag("--validate", check_only, "Validate the config and exit");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    ExperimentConfig config;
    if (!config_path.empty()) config = config_from_json(svlab::read_text_file(config_path));
    config.experiment = experiment;
    if (seed_opt->count()) config.seed = seed;
    if (threads_opt->count()) config.threads = threads;
    if (save_paths) config.save_paths = true;
    if (!out_dir.empty()) {
      config.output_dir = out_dir;
    } else if (config.output_dir.empty()) {
      const char* env = std::getenv("SVLAB_OUTPUT_DIR");
      config.output_dir = env && *env ? env : "svlab_out";
    }

    bool invalid = false;
    for (const auto& v : validate(config)) {
      const bool error = v.level == Violation::Level::error;
      invalid = invalid || error;
      std::cerr << (error ? "error: " : "warning: ") << v.message << "\n";
    }
    if (invalid) return 1;
    if (check_only) return 0;

    const Report report = run(config);
    const std::filesystem::path dir = config.output_dir;
    write_report(report, dir, utc_timestamp());
    emit_plots(report, dir);
    for (const auto& v : report.verdicts) std::cout << (v.pass ? "PASS " : "FAIL ") << v.name << "\n";
    std::cout << "report: " << (dir / "report.json").string() << "\n";
    return exit_status(report);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
