#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace spc {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using MatrixXd = Matrix<double>;
using VectorXd = Vector<double>;

/// Dense point id in [0, num_points).
using PointId = int;
/// Dense location id in [0, num_locations).
using LocationId = int;

// Numerical tolerances shared by the LP, rounding and validation layers.
inline constexpr double kMetricTolerance = 1e-9;
inline constexpr double kFeasibilityTolerance = 1e-7;
inline constexpr double kPivotTolerance = 1e-9;

/// Malformed input: bad files, violated preconditions, schema errors.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The instance admits no solution under the requested parameters.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A solver exceeded its iteration budget or lost numerical footing.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unordered pair of distinct point ids, stored with first < second.
struct PointPair {
  PointId first = 0;
  PointId second = 0;

  PointPair() = default;
  PointPair(PointId a, PointId b) : first(a < b ? a : b), second(a < b ? b : a) {}

  friend bool operator==(const PointPair&, const PointPair&) = default;
  friend auto operator<=>(const PointPair&, const PointPair&) = default;
};

}  // namespace spc
