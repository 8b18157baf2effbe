#pragma once

#include "spc/common.hpp"
#include "spc/distribution.hpp"
#include "spc/rng.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace spc {

/// One sampled assignment.
struct IntegralAssignment {
  std::vector<int> assignment;  // label (or location id) per element
  std::uint64_t seed_trace = 0;
  std::uint64_t draw_index = 0;
};

class RoundingError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Uniform-labeling rounding over a column-stochastic |L| x |V| matrix.
///
/// Each phase draws a label l and a threshold a in (0, 1] uniformly and
/// assigns every still-unassigned v with x(l, v) >= a to l. Every element
/// is then assigned to l with probability exactly x(l, v), and a pair is
/// separated with probability at most sum_l |x(l, v) - x(l, w)|.
class KtRounder {
 public:
  /// Columns are clamped to [0, 1] and renormalized.
  explicit KtRounder(const MatrixXd& x);

  int num_labels() const { return num_labels_; }
  int num_elements() const { return num_elements_; }
  /// Phases allowed before failing: 64 |V| |L|.
  std::int64_t phase_cap() const { return phase_cap_; }

  /// Label index per element. Throws RoundingError past the phase cap.
  std::vector<int> draw(CounterRng& rng) const;

 private:
  int num_labels_ = 0;
  int num_elements_ = 0;
  std::int64_t phase_cap_ = 0;
  // Per label: (mass, element) sorted by descending mass, zero mass dropped.
  std::vector<std::vector<std::pair<double, int>>> by_label_;
};

/// Throws InputError unless (x, z) satisfies the rounding LP: columns of x
/// sum to one, z(e, l) >= |x(l, v) - x(l, w)|, z(e) = 1/2 sum_l z(e, l),
/// every value in [0, 1], all within `tolerance`.
void validate_rounding_input(const MatrixXd& x, std::span<const PointPair> pairs, const MatrixXd& z_pair,
                             const VectorXd& z, double tolerance = kFeasibilityTolerance);

/// Validates (x, z) and draws one labeling of elements [0, |V|) with
/// labels [0, |L|).
IntegralAssignment kt_round(const MatrixXd& x, std::span<const PointPair> pairs, const MatrixXd& z_pair,
                            const VectorXd& z, CounterRng& rng);

/// Draw `draw_index` of the distribution, on the stream derived from its
/// master seed; labels are location ids.
IntegralAssignment sample_assignment(const AssignmentDistribution& dist, std::uint64_t draw_index);

}  // namespace spc
