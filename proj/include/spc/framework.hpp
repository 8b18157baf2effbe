#pragma once

#include "spc/assign_lp.hpp"
#include "spc/constraints.hpp"
#include "spc/distribution.hpp"
#include "spc/instance.hpp"
#include "spc/rounding.hpp"
#include "spc/vanilla.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spc {

struct SolveOptions {
  LpSolveOptions lp;
  /// Seeds and knobs for the step-one baseline; its seed is overridden by
  /// the solve seed.
  BaselineOptions baseline;
  /// Apply centroid reassignment to every draw (unrestricted or
  /// cardinality locations, coincident instances).
  bool reassign_centroid = false;
};

/// Wall-clock split of one solve.
struct SolveTrace {
  double baseline_seconds = 0.0;
  double lp_build_seconds = 0.0;
  double lp_solve_seconds = 0.0;
  int lp_solves = 0;
  std::int64_t pivots = 0;
  int cuts = 0;
};

/// General SPC solver: baseline open set, then the assignment LP (radius
/// guesses by binary search for center/supplier, cost objective for
/// median/means), wrapped as a rounding distribution.
AssignmentDistribution solve_spc(const MetricInstance& inst, const Objective& objective,
                                 const LocationConstraint& location, const ConstraintFamily& family,
                                 std::uint64_t seed, const SolveOptions& options = {}, SolveTrace* trace = nullptr);

/// k-center with SPC and the centroid constraint: smallest radius guess at
/// which threshold k-center succeeds and the LP with limit 3 * guess and
/// centroid rows is feasible.
AssignmentDistribution solve_kcenter_spc_cc(const MetricInstance& inst, int k, const ConstraintFamily& family,
                                            std::uint64_t seed, const SolveOptions& options = {},
                                            SolveTrace* trace = nullptr);

struct Reassignment {
  std::vector<LocationId> open_set;
  std::vector<LocationId> assignment;
};

/// Moves every cluster whose location i does not serve itself to the member
/// closest to i, so that every open location serves itself. Clusters are
/// kept intact; service distances at most double.
Reassignment reassign_centroid(const MetricInstance& inst, std::span<const LocationId> open_set,
                               std::span<const LocationId> assignment);

/// Draw `draw_index` of `dist` as location ids, reassigned to centroids when
/// the distribution asks for it (then `inst` is required).
std::vector<LocationId> draw_assignment(const AssignmentDistribution& dist, std::uint64_t draw_index,
                                        const MetricInstance* inst);

struct MlSolution {
  std::vector<LocationId> open_set;
  std::vector<LocationId> assignment;
  double radius = 0.0;
  /// Accepted guess for the optimal radius.
  double guess = 0.0;
};

/// Must-link greedy over clique neighbourhoods for center/supplier with
/// cardinality or knapsack locations. Every clique lands on one location.
MlSolution solve_ml(const MetricInstance& inst, const Objective& objective, const LocationConstraint& location,
                    const CliquePartition& partition);

/// Deterministic distribution that always returns `sol`.
AssignmentDistribution ml_distribution(const MetricInstance& inst, const Objective& objective,
                                       const LocationConstraint& location, const MlSolution& sol,
                                       const ConstraintFamily& family, std::uint64_t seed);

nlohmann::json guarantee_to_json(const GuaranteeRecord& g);
GuaranteeRecord guarantee_from_json(const nlohmann::json& j);

/// Solution document: open set, sparse x triples (location id, point id,
/// value), z per pair, sparse z(e, i), master seed, guarantee record and an
/// optional description of the instance it was solved on.
nlohmann::json solution_to_json(const AssignmentDistribution& dist, const nlohmann::json& instance = {});
AssignmentDistribution solution_from_json(const nlohmann::json& doc);

void write_solution(const AssignmentDistribution& dist, const std::string& path, const nlohmann::json& instance = {});

struct LoadedSolution {
  AssignmentDistribution distribution;
  nlohmann::json instance;
};
LoadedSolution read_solution(const std::string& path);

}  // namespace spc
