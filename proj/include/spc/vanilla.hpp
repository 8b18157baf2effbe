#pragma once

#include "spc/common.hpp"
#include "spc/instance.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace spc {

/// Output of an unconstrained clustering baseline.
struct VanillaSolution {
  std::vector<LocationId> open_set;   // sorted, distinct
  std::vector<LocationId> assignment;  // per point
  double objective_value = 0.0;
  /// Threshold at which a radius baseline succeeded, when one was used.
  double threshold = 0.0;
};

/// Objective of a fixed (open set, assignment): the largest service
/// distance for radius objectives, (sum_j d^p)^(1/p) for median/means.
double assignment_objective(const MetricInstance& inst, const Objective& objective,
                            std::span<const LocationId> assignment);

/// Solution that opens `open` and sends every point to its nearest open
/// location (ties to the lowest id).
VanillaSolution nearest_solution(const MetricInstance& inst, const Objective& objective,
                                 std::vector<LocationId> open);

/// Greedy threshold k-center: scan points by id, open each uncovered point
/// and cover everything within 2 * tau. nullopt when more than k centers
/// are needed, which certifies that no radius-tau solution exists.
std::optional<VanillaSolution> threshold_k_center(const MetricInstance& inst, int k, double tau);

/// Farthest-point traversal from `start`.
VanillaSolution gonzalez_k_center(const MetricInstance& inst, int k, PointId start);
/// Farthest-point traversal from a start point drawn with `seed`.
VanillaSolution gonzalez_k_center_seeded(const MetricInstance& inst, int k, std::uint64_t seed);

/// Threshold k-supplier (3-approximation): greedily pick uncovered points
/// 2 * tau apart and open each one's nearest location.
std::optional<VanillaSolution> k_supplier(const MetricInstance& inst, int k, double tau);

/// Threshold knapsack center/supplier: like k_supplier, but opens the
/// cheapest location within tau of each picked point and checks the budget.
std::optional<VanillaSolution> knapsack_center(const MetricInstance& inst, std::span<const double> weights,
                                               double budget, double tau);

/// Lloyd iterations on the instance features; centroids snap to their
/// nearest location.
VanillaSolution lloyd_k_means(const MetricInstance& inst, int k, std::uint64_t seed, int max_iters = 100);

/// Single-swap local search for k-median.
VanillaSolution local_search_k_median(const MetricInstance& inst, int k, double epsilon = 0.01);

/// Smallest radius in sorted `candidates` at which `feasible` succeeds, by
/// binary search. Keeps the invariant that the lower end failed and the
/// upper end succeeded, so for monotone predicates it is the first success
/// and otherwise a success whose predecessor failed. Throws InfeasibleError
/// when the largest candidate fails.
double binary_search_radius(std::span<const double> candidates, const std::function<bool(double)>& feasible);

/// Convenience form searching candidate_radii(inst).
double binary_search_radius(const MetricInstance& inst, const std::function<bool(double)>& feasible);

/// The rho-approximation used as step one of the SPC framework.
///   unrestricted: open every location, nearest assignment
///   center / supplier with k: threshold baseline + binary search
///   knapsack radius objectives: knapsack threshold + binary search
///   means with k: Lloyd; median with k: local search
struct BaselineOptions {
  std::uint64_t seed = 0;
  int lloyd_max_iters = 100;
  double local_search_epsilon = 0.01;
};
VanillaSolution run_baseline(const MetricInstance& inst, const Objective& objective, const LocationConstraint& location,
                             const BaselineOptions& options = {});

}  // namespace spc
