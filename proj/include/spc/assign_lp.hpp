#pragma once

#include "spc/common.hpp"
#include "spc/constraints.hpp"
#include "spc/instance.hpp"
#include "spc/simplex.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace spc {

/// Radius mode eliminates every x(i, j) with d(i, j) > limit; cost mode
/// minimizes sum x(i, j) d(i, j)^p.
struct LpMode {
  enum class Kind { kRadius, kCost };
  Kind kind = Kind::kCost;
  double limit = 0.0;
  int exponent = 1;

  static LpMode radius(double limit) { return {Kind::kRadius, limit, 0}; }
  static LpMode cost(int p) { return {Kind::kCost, 0.0, p}; }
  bool is_radius() const { return kind == Kind::kRadius; }
};

/// Assignment LP over a fixed open set S.
///
/// Variables, in index order: x(s, j) for s in S, j in C (row-major in s);
/// then for every distinct constrained pair e: z(e, s) for s in S followed
/// by z(e). Rows:
///   sum_s x(s, j) = 1                        for every point j
///   z(e, s) >= x(s, j) - x(s, j'), and the mirrored row
///   z(e) = 1/2 sum_s z(e, s)
///   sum_{e in P_q} z(e) <= psi_q |P_q|       for every group q
///   x(s, S[s]) = 1                           centroid rows, optional
/// Radius mode removes eliminated x(s, j) from every row instead of adding
/// rows for them. Centroid mode also eliminates x(s', S[s]) for s' != s.
class AssignmentLp {
 public:
  AssignmentLp() = default;

  const std::vector<LocationId>& open_set() const { return open_set_; }
  int num_open() const { return static_cast<int>(open_set_.size()); }
  int num_points() const { return num_points_; }
  const std::vector<PointPair>& pairs() const { return pairs_; }
  /// Pair indices (into pairs()) of each group.
  const std::vector<std::vector<int>>& group_pairs() const { return group_pairs_; }
  const std::vector<double>& group_budgets() const { return group_budgets_; }
  const LpMode& mode() const { return mode_; }
  bool centroid() const { return centroid_; }
  /// |S| x |C| service distances.
  const MatrixXd& service() const { return service_; }
  /// Whether x(s, j) survives radius elimination.
  bool allowed(int s, PointId j) const { return allowed_(s, j); }
  /// Point sharing the site of open location s (centroid mode only).
  PointId centroid_point(int s) const { return centroid_points_[s]; }

  int num_variables() const;
  int num_active_x() const;
  int x_index(int s, PointId j) const { return s * num_points_ + j; }
  int z_pair_index(int e, int s) const;
  int z_index(int e) const;

  /// Cost coefficient of x(s, j); zero in radius mode.
  double x_cost(int s, PointId j) const;

  /// Some point has every x(s, j) eliminated, so no solution exists.
  bool infeasible_at_build() const { return infeasible_at_build_; }

  /// The explicit row form described above.
  LinearProgram explicit_form() const;

  /// Free-format MPS dump of the explicit form, with [0, 1] bounds and
  /// eliminated variables fixed at zero.
  void write_mps(std::ostream& out, const std::string& name = "ASSIGNLP") const;

 private:
  friend AssignmentLp build_lp(const MetricInstance&, const std::vector<LocationId>&, const ConstraintFamily&,
                               const LpMode&, bool);

  std::vector<LocationId> open_set_;
  int num_points_ = 0;
  std::vector<PointPair> pairs_;
  std::vector<std::vector<int>> group_pairs_;
  std::vector<double> group_budgets_;
  LpMode mode_;
  bool centroid_ = false;
  std::vector<PointId> centroid_points_;
  MatrixXd service_;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> allowed_;
  bool infeasible_at_build_ = false;
};

/// Builds the assignment LP. Throws InputError on an empty open set, on
/// centroid mode without coincident points/locations, and on a family that
/// references unknown points.
AssignmentLp build_lp(const MetricInstance& inst, const std::vector<LocationId>& open_set,
                      const ConstraintFamily& family, const LpMode& mode, bool centroid);

/// Fractional solution (x, z) of an AssignmentLp.
struct FractionalAssignment {
  MatrixXd x;       // |S| x |C|
  MatrixXd z_pair;  // |P'| x |S|
  VectorXd z;       // |P'|
  std::vector<PointPair> pairs;
  /// sum x(s, j) d(s, j)^p in cost mode.
  std::optional<double> objective_value;

  /// Recomputes z(e, s) = |x(s, j) - x(s, j')| and z(e) = 1/2 sum_s z(e, s),
  /// the smallest z compatible with x.
  void tighten_z();
};

/// Lists every violated invariant of `sol` against `lp` (empty when valid).
std::vector<std::string> check_fractional(const AssignmentLp& lp, const FractionalAssignment& sol,
                                          double tolerance = kFeasibilityTolerance);

enum class LpStrategy {
  kAuto,
  /// Two-phase primal simplex on explicit_form().
  kExplicit,
  /// Dual simplex over x only, separating the group rows as
  /// sum_e sum_{s in A_e} (x(s, j) - x(s, j')) <= budget cuts.
  kCuttingPlane,
};

struct LpSolveOptions {
  LpStrategy strategy = LpStrategy::kAuto;
  SimplexOptions simplex;
  /// kAuto uses the explicit form when its tableau has at most this many
  /// entries.
  double explicit_entry_limit = 2.0e6;
  int max_cut_rounds = 20000;
};

struct LpSolveStats {
  LpStrategy strategy = LpStrategy::kAuto;
  std::int64_t pivots = 0;
  int cut_rounds = 0;
  int cuts = 0;
};

/// Solves the LP. nullopt when it is infeasible; throws NumericalError when
/// the pivot cap or cut-round cap is hit.
std::optional<FractionalAssignment> solve_lp(const AssignmentLp& lp, const LpSolveOptions& options = {},
                                             LpSolveStats* stats = nullptr);

}  // namespace spc
