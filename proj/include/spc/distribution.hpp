#pragma once

#include "spc/assign_lp.hpp"
#include "spc/common.hpp"
#include "spc/instance.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace spc {

class KtRounder;

/// What the solver claims about the distribution it returns.
struct GuaranteeRecord {
  std::string algorithm;  // "alg1", "alg2", "ml-greedy"
  Objective objective;
  std::string location;
  /// Objective value of the step-one baseline.
  double baseline_value = 0.0;
  /// Accepted guess for the optimal radius (radius objectives).
  double guess = 0.0;
  /// Elimination limit installed in the LP (radius objectives).
  double radius_limit = 0.0;
  /// Bound on the objective in terms of the guess/baseline: the radius
  /// limit for radius objectives, the normalized LP cost otherwise.
  double objective_bound = 0.0;
  /// Largest service distance carrying positive mass (radius objectives)
  /// or the normalized LP cost (median/means).
  double achieved = 0.0;
  /// 2 psi_q |P_q| per group.
  std::vector<double> spc_bounds;
  bool centroid = false;
  /// Apply centroid reassignment to every draw.
  bool reassign_per_draw = false;
  /// Feasibility-mode LPs return the first feasible point found.
  std::string feasibility_point = "first-feasible";
};

/// A sampleable distribution over assignments C -> S, realized by
/// randomized rounding of a fractional assignment.
class AssignmentDistribution {
 public:
  AssignmentDistribution() = default;
  AssignmentDistribution(std::vector<LocationId> open_set, FractionalAssignment fractional, std::uint64_t master_seed,
                         GuaranteeRecord guarantee);

  const std::vector<LocationId>& open_set() const { return open_set_; }
  const FractionalAssignment& fractional() const { return fractional_; }
  std::uint64_t master_seed() const { return master_seed_; }
  const GuaranteeRecord& guarantee() const { return guarantee_; }
  GuaranteeRecord& guarantee() { return guarantee_; }
  int num_points() const { return static_cast<int>(fractional_.x.cols()); }

  const KtRounder& rounder() const { return *rounder_; }

 private:
  std::vector<LocationId> open_set_;
  FractionalAssignment fractional_;
  std::uint64_t master_seed_ = 0;
  GuaranteeRecord guarantee_;
  std::shared_ptr<const KtRounder> rounder_;
};

}  // namespace spc
