#pragma once

// Config-driven experiment runner behind the `svlab` command.

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace svlab::runner {

inline const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"fields-check", "ns-solve",  "simulate", "action",
                                                 "criticality",  "minimality", "bridge",   "measure-preservation"};
  return names;
}

struct ExperimentConfig {
  std::string experiment = "fields-check";
  double nu = 0.1;
  double T = 1.0;
  long long N = 20000;
  long long M = 1000;
  int K = 8;
  std::uint64_t seed = 42;
  double beta = 3.0;
  std::string drift = "taylor-green";  // taylor-green | zero | corrupted:<a> | spectral-file:<path>
  std::string output_dir;
  int threads = 1;
  bool save_paths = false;
  bool negative_control = false;  // criticality: expect the corrupted drift to be flagged
  int members = 20;               // minimality: class-G competitors
  bool finite_difference = false; // criticality: also run the perturbation-flow estimator
};

/// Reads a JSON object; unknown keys and wrong types throw std::invalid_argument.
ExperimentConfig config_from_json(const std::string& text, ExperimentConfig base = {});
std::string config_to_json(const ExperimentConfig& config);

struct Violation {
  enum class Level { error, warning };
  Level level = Level::error;
  std::string message;
};

std::vector<Violation> validate(const ExperimentConfig& config);

struct ReportEstimate {
  std::string name;
  double value = 0.0;
  double se = 0.0;
  std::size_t n = 0;
};

struct ReportVerdict {
  std::string name;
  bool pass = false;
};

/// Two-column series written as a gnuplot data file.
struct Series {
  std::string name;
  std::string x_label;
  std::string y_label;
  std::vector<std::pair<double, double>> points;
};

struct Table {
  std::string name;
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

struct Report {
  std::string experiment;
  std::uint64_t seed = 0;
  double nu = 0.0;
  double T = 0.0;
  long long N = 0;
  long long M = 0;
  std::vector<ReportEstimate> estimates;
  std::vector<ReportVerdict> verdicts;
  std::vector<Series> series;
  std::vector<Table> tables;
  std::vector<std::string> warnings;

  bool passed() const;
  bool empty() const { return estimates.empty() && verdicts.empty() && series.empty() && tables.empty(); }
};

/// Runs the experiment. Ensembles go to <output_dir>/paths when save_paths is set.
Report run(const ExperimentConfig& config);

/// report.json with keys in schema order; timestamp is the only run-dependent field.
std::string report_json(const Report& report, const std::string& timestamp);
std::string table_csv(const Table& table);

/// Writes report.json and tables/*.csv; returns the files written.
std::vector<std::filesystem::path> write_report(const Report& report, const std::filesystem::path& dir,
                                                const std::string& timestamp);

/// Writes plots/<series>.dat for every series; an empty report writes nothing.
std::vector<std::filesystem::path> emit_plots(const Report& report, const std::filesystem::path& dir);

/// 0 when every verdict passes, 2 otherwise.
int exit_status(const Report& report);

}  // namespace svlab::runner
