#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tcsf/optimizer.hpp"

namespace tcsf {

// Objective factory by identifier: "rastrigin", "rosenbrock", "quadratic",
// "double-well" (all at their benchmark dimensions). Throws
// std::invalid_argument on unknown names.
ObjectiveSpec make_objective(const std::string& id);

// One benchmark experiment: a single objective/noise pair, several
// estimators, n_runs runs each with paired initial points.
struct ExperimentConfig {
  std::string objective;
  NoiseModel noise = NoiseModel::none();
  std::vector<EstimatorKind> estimators;
  ScheduleConfig schedule;
  std::string schedule_label;  // "diminishing", "constant", ... (report tag)
  int n_runs = 100;
  Vec init_lo, init_hi;  // defaults to the objective's box when empty
  std::uint64_t master_seed = 1;
  int jobs = 1;
};

// Summary of one completed run, sufficient to reproduce the tables and to
// serialize one JSON line.
struct RunSummary {
  std::uint64_t seed = 0;
  long iterations_used = 0;
  StopReason stop_reason = StopReason::HorizonReached;
  double final_f_true = 0.0;
  Vec final_x;
};

// Aggregates for one estimator within one experiment. Excluded runs are those
// that ended in NumericError or a non-finite final value; they are counted
// but not averaged.
struct CellStats {
  std::string estimator;
  double mean_final_f = 0.0;
  double se_final_f = 0.0;
  double mean_abs_err = 0.0;  // |final_f_true - known minimum|
  double se_abs_err = 0.0;
  double mean_iterations = 0.0;
  double se_iterations = 0.0;
  int n_ok = 0;
  int n_excluded = 0;
  std::vector<std::uint64_t> seeds;
  std::vector<RunSummary> runs;
};

struct ExperimentReport {
  std::string objective;
  std::string noise;
  std::string schedule_label;
  long horizon = 0;
  int n_runs = 0;
  std::uint64_t master_seed = 0;
  double known_min_value = 0.0;
  std::vector<CellStats> cells;  // one per estimator, config order
};

// Run the experiment. Initial points are drawn once per run index and shared
// across estimators (paired comparisons); per-run streams are derived
// deterministically from (master_seed, estimator index, run index).
// Aggregation folds results in index order, so the report is identical for
// any --jobs value. Throws std::invalid_argument on config errors, with the
// offending field named.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

enum class TableFormat { Text, Csv, Json };

// Render reports deterministically (row order = report order x estimator
// order; scientific notation, 4 significant digits). CSV includes a header
// row; JSON carries a schema_version field.
std::string emit_tables(const std::vector<ExperimentReport>& reports, TableFormat format);

// One RunRecord-equivalent JSON line per run, in deterministic order.
std::string emit_runs_jsonl(const std::vector<ExperimentReport>& reports);

// Named verification suites aggregating the statistical property checks.
struct VerifyEntry {
  std::string name;
  double measured = 0.0;
  double bound = 0.0;  // threshold the measured value is compared against
  bool pass = false;
  std::string detail;  // human-readable margin / inputs
};

struct VerifySuiteReport {
  std::vector<VerifyEntry> entries;
  bool all_pass = true;
};

// which: one of "moments", "bias", "amse", "trap", "rates", "all".
// Pinned internal seeds; jobs parallelizes the run-heavy suites.
VerifySuiteReport verify_suite(const std::string& which, std::uint64_t seed = 20240901,
                               int jobs = 1);

std::string render_verify(const VerifySuiteReport& report, TableFormat format);

}  // namespace tcsf
