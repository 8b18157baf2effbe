#pragma once

#include "spc/common.hpp"

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace spc {

class MetricInstance;

/// One stochastic pairwise constraint: in expectation at most
/// psi * |pairs| of the pairs may be separated.
struct ConstraintGroup {
  std::vector<PointPair> pairs;
  double psi = 0.0;

  double budget() const { return psi * static_cast<double>(pairs.size()); }

  friend bool operator==(const ConstraintGroup&, const ConstraintGroup&) = default;
};

/// A family of SPC groups over the points of one instance.
class ConstraintFamily {
 public:
  ConstraintFamily() = default;
  explicit ConstraintFamily(std::vector<ConstraintGroup> groups);

  /// Adds a group; pairs are normalized and deduplicated.
  void add_group(std::vector<PointPair> pairs, double psi);

  const std::vector<ConstraintGroup>& groups() const { return groups_; }
  std::size_t size() const { return groups_.size(); }
  bool empty() const { return groups_.empty(); }

  /// Every group is a single pair (probabilistic bounded separation).
  bool is_pbs() const;
  /// Every group is a single pair with psi = 0 (must-link).
  bool is_ml() const;

  /// Union of all pairs, sorted and deduplicated.
  std::vector<PointPair> distinct_pairs() const;

  /// Throws InputError unless every pair holds two distinct ids below
  /// `num_points` and every psi lies in [0, 1].
  void validate(int num_points) const;

  friend bool operator==(const ConstraintFamily&, const ConstraintFamily&) = default;

 private:
  std::vector<ConstraintGroup> groups_;
};

/// Disjoint cliques covering the point set.
class CliquePartition {
 public:
  CliquePartition() = default;
  explicit CliquePartition(std::vector<std::vector<PointId>> cliques, int num_points);

  const std::vector<std::vector<PointId>>& cliques() const { return cliques_; }
  std::size_t size() const { return cliques_.size(); }
  int clique_of(PointId j) const { return owner_[j]; }
  int num_points() const { return static_cast<int>(owner_.size()); }

  /// ML family holding every within-clique pair.
  ConstraintFamily to_ml_family() const;

  friend bool operator==(const CliquePartition&, const CliquePartition&) = default;

 private:
  std::vector<std::vector<PointId>> cliques_;
  std::vector<int> owner_;
};

/// Transitive closure of the must-link pairs over points [0, num_points).
/// Cliques are ordered by smallest member; members ascend.
CliquePartition extract_cliques(const ConstraintFamily& family, int num_points);

/// Supplies the baseline radius used to scale F1 separation bounds.
using RadiusProvider = std::function<double(const MetricInstance&, int k)>;

/// Radius of the threshold k-center 2-approximation found by binary search.
double threshold_baseline_radius(const MetricInstance& inst, int k);

/// F1: each pair within the baseline radius R gets psi = d / R.
ConstraintFamily gen_f1(const MetricInstance& inst, int k, const RadiusProvider& baseline = threshold_baseline_radius);

/// F1 with an explicit baseline radius.
ConstraintFamily gen_f1_with_radius(const MetricInstance& inst, double radius);

/// F2: each point and its m nearest neighbours (ties at the m-th distance
/// included), psi = d / D_max with D_max the largest emitted distance.
ConstraintFamily gen_f2(const MetricInstance& inst, int m);

/// F3: each point j and every j' within r_j, the smallest radius holding
/// at least |C| / k points, psi = d / r_j. Duplicates keep the smaller psi.
ConstraintFamily gen_f3(const MetricInstance& inst, int k);

/// One group per community with all of its internal pairs.
ConstraintFamily gen_community(const std::vector<std::vector<PointId>>& groups, std::span<const double> psis);

/// Canonical JSON form: {"groups": [{"psi": p, "pairs": [[a, b], ...]}, ...]}.
std::string family_to_json(const ConstraintFamily& family);
ConstraintFamily family_from_json(const std::string& text);
void write_family(const ConstraintFamily& family, const std::string& path);
ConstraintFamily read_family(const std::string& path);

}  // namespace spc
