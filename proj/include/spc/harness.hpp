#pragma once

#include "spc/constraints.hpp"
#include "spc/distribution.hpp"
#include "spc/framework.hpp"
#include "spc/instance.hpp"

#include <json.hpp>

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace spc {

/// Produces the assignment (location id per point) of one trial.
using DrawFn = std::function<std::vector<LocationId>(std::uint64_t draw_index)>;

struct GroupReport {
  std::size_t size = 0;
  double psi = 0.0;
  /// psi |P|.
  double budget = 0.0;
  /// 2 psi |P|.
  double spc_bound = 0.0;
  /// Mean number of separated pairs per trial.
  double expected_separations = 0.0;
  double standard_error = 0.0;
  bool violated = false;
};

struct EvaluationReport {
  int trials = 0;
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  std::string objective;
  std::vector<PointPair> pairs;
  std::vector<double> pair_frequency;
  std::vector<GroupReport> groups;
  int violated = 0;
  double violation_percent = 0.0;
  /// center/supplier: mean over trials of the largest service distance;
  /// median/means: (mean over trials of sum_j d^p)^(1/p).
  double objective_value = 0.0;
  std::optional<double> cost_of_fairness;
  std::map<std::string, double> timing_seconds;

  nlohmann::json to_json() const;
};

struct EvaluateOptions {
  int trials = 5000;
  double epsilon = 0.0;
  /// 0 uses the hardware concurrency.
  int threads = 0;
};

/// Monte Carlo evaluation of `draw` over trials 0..trials-1. A group is
/// violated when its mean separations exceed (psi + epsilon) |P|, which for
/// single-pair groups is frequency > psi + epsilon. Results do not depend on
/// the thread count.
EvaluationReport evaluate_draws(const MetricInstance& inst, const Objective& objective, const ConstraintFamily& family,
                                const DrawFn& draw, const EvaluateOptions& options, std::uint64_t seed = 0);

/// Evaluates the distribution's own draws.
EvaluationReport evaluate(const MetricInstance& inst, const AssignmentDistribution& dist,
                          const ConstraintFamily& family, const EvaluateOptions& options);

/// Draws every point independently from its own column of x (|S| x |C|).
DrawFn independent_sampling_baseline(std::vector<LocationId> open_set, MatrixXd x, std::uint64_t seed);

/// fair_cost / baseline_cost; throws InputError unless baseline_cost > 0.
double cost_of_fairness(double fair_cost, double baseline_cost);

// Experiments ----------------------------------------------------------------

struct ExperimentConfig {
  std::string dataset;
  std::vector<std::string> columns;
  std::optional<int> n;
  std::vector<int> ks;
  std::string metric;  // f1, f2, f3
  int m = 20;
  std::vector<std::string> algorithms;  // alg1-means, alg2-center, baseline-if
  int trials = 5000;
  std::optional<double> epsilon;
  std::uint64_t seed = 0;
  int threads = 0;
  nlohmann::json raw;

  /// Parses and validates; throws InputError naming the offending field.
  /// Relative dataset paths resolve against `base_dir`.
  static ExperimentConfig from_json(const nlohmann::json& doc, const std::string& base_dir = "");
  static ExperimentConfig load(const std::string& path);
};

struct ExperimentRow {
  std::string algorithm;
  int k = 0;
  std::string metric;
  int n = 0;
  std::uint64_t seed = 0;
  int trials = 0;
  double epsilon = 0.0;
  int groups = 0;
  double violation_percent = 0.0;
  double objective_value = 0.0;
  double baseline_cost = 0.0;
  double cost_of_fairness = 0.0;
  EvaluationReport report;
};

/// Ingestion, constraint generation, solve and evaluation for every k and
/// algorithm. Writes report_<algorithm>_k<k>.json per grid point and
/// comparison.csv into `out_dir` unless it is empty.
std::vector<ExperimentRow> run_experiment(const ExperimentConfig& config, const std::string& out_dir);

/// Gaussian blobs with per-cluster spread, as a CSV with columns f0..f{d-1}.
void write_synthetic_dataset(const std::string& path, int rows, int dims, int clusters, std::uint64_t seed);

}  // namespace spc
