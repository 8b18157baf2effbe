#pragma once

#include "spc/common.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace spc {

class ConstraintFamily;

enum class ObjectiveKind { kCenter, kSupplier, kMedian, kMeans };

/// Clustering objective. Radius objectives (center, supplier) bound the
/// largest service distance; cost objectives (median, means) minimize
/// (sum_j E[d(phi(j), j)^p])^(1/p).
struct Objective {
  ObjectiveKind kind = ObjectiveKind::kCenter;

  static Objective center() { return {ObjectiveKind::kCenter}; }
  static Objective supplier() { return {ObjectiveKind::kSupplier}; }
  static Objective median() { return {ObjectiveKind::kMedian}; }
  static Objective means() { return {ObjectiveKind::kMeans}; }

  bool is_radius() const { return kind == ObjectiveKind::kCenter || kind == ObjectiveKind::kSupplier; }
  /// 1 for median, 2 for means, 0 for radius objectives.
  int exponent() const;
  /// Radius-slack multiplier: 1 for center, 2 for supplier, 0 otherwise.
  int alpha() const;

  std::string name() const;
  static Objective parse(const std::string& name);

  friend bool operator==(const Objective&, const Objective&) = default;
};

enum class LocationKind { kUnrestricted, kCardinality, kKnapsack };

/// Allowed configurations of open locations.
struct LocationConstraint {
  LocationKind kind = LocationKind::kUnrestricted;
  int k = 0;
  std::vector<double> weights;
  double budget = 0.0;

  static LocationConstraint unrestricted() { return {}; }
  static LocationConstraint cardinality(int k);
  static LocationConstraint knapsack(std::vector<double> weights, double budget);

  /// Throws InputError when the constraint cannot apply to `num_locations`
  /// locations (k out of range, weight vector mis-sized, no affordable
  /// location).
  void validate(int num_locations) const;
  bool admits(std::span<const LocationId> open) const;
  double total_weight(std::span<const LocationId> open) const;

  std::string name() const;
};

/// Points, locations and the metric between them.
///
/// Points and locations live on a common set of sites; in the coincident
/// setting location i is the same site as point i. Geometry is either a
/// feature matrix (one row per site, Euclidean distance) or an explicit
/// symmetric distance matrix over the sites. Immutable after construction:
/// the distance cache is filled eagerly, so instances are safe to share
/// between threads.
class MetricInstance {
 public:
  /// Coincident instance over the rows of `features`.
  static MetricInstance from_features(MatrixXd features, std::vector<std::string> labels = {});

  /// Coincident instance over an explicit matrix. Validates metric axioms.
  static MetricInstance from_distances(MatrixXd distances, std::vector<std::string> labels = {});

  /// General instance over an explicit matrix; `point_sites` and
  /// `location_sites` index rows of `distances`. Validates metric axioms.
  static MetricInstance from_distances(MatrixXd distances, std::vector<int> point_sites,
                                       std::vector<int> location_sites,
                                       std::vector<std::string> labels = {});

  int num_points() const { return static_cast<int>(point_sites_.size()); }
  int num_locations() const { return static_cast<int>(location_sites_.size()); }
  int num_sites() const { return num_sites_; }
  bool coincident() const { return coincident_; }
  bool has_features() const { return features_.size() > 0; }

  /// Feature rows, one per site. Empty for matrix-backed instances.
  const MatrixXd& features() const { return features_; }

  int point_site(PointId j) const { return point_sites_[j]; }
  int location_site(LocationId i) const { return location_sites_[i]; }
  const std::vector<std::string>& site_labels() const { return labels_; }

  double site_distance(int a, int b) const;
  /// d(i, j) between location i and point j.
  double distance(LocationId i, PointId j) const { return site_distance(location_sites_[i], point_sites_[j]); }
  double point_distance(PointId a, PointId b) const { return site_distance(point_sites_[a], point_sites_[b]); }
  double location_distance(LocationId a, LocationId b) const {
    return site_distance(location_sites_[a], location_sites_[b]);
  }

  /// |open| x |C| matrix of service distances d(open[s], j).
  MatrixXd service_distances(std::span<const LocationId> open) const;

  /// Full site-by-site distance matrix.
  MatrixXd site_distance_matrix() const;

  /// Sites above this count are served from features on demand.
  static constexpr int kCacheLimit = 4096;

 private:
  MetricInstance() = default;
  void fill_cache();

  int num_sites_ = 0;
  bool coincident_ = false;
  MatrixXd features_;
  MatrixXd cache_;
  std::vector<int> point_sites_;
  std::vector<int> location_sites_;
  std::vector<std::string> labels_;
};

/// Throws InputError unless `d` is square, symmetric, has a zero diagonal,
/// is nonnegative and satisfies the triangle inequality within `tolerance`.
void validate_metric(const MatrixXd& d, double tolerance = kMetricTolerance);

void validate_objective(const MetricInstance& inst, const Objective& objective);

// Dataset ingestion ---------------------------------------------------------

class MissingColumnError : public InputError {
 public:
  using InputError::InputError;
};
class NonNumericCellError : public InputError {
 public:
  using InputError::InputError;
};
class SampleSizeError : public InputError {
 public:
  using InputError::InputError;
};

/// Parsed comma-separated table: header plus raw cells.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  int column_index(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

/// Standardizes each column to zero mean and unit (population) variance.
/// Zero-variance columns become all zeros.
void standardize_columns(MatrixXd& data);

/// Loads the named numeric columns of a CSV file, optionally samples
/// `sample_n` rows uniformly without replacement, standardizes the result
/// and returns the coincident Euclidean instance over it. Empty `columns`
/// selects every column.
MetricInstance load_dataset(const std::string& path, const std::vector<std::string>& columns,
                            std::optional<int> sample_n, std::uint64_t seed);

/// Reads an explicit distance matrix: header `id[,kind],<site ids...>`, one
/// row per site. The optional kind column holds point, location or both;
/// without it every site is both.
MetricInstance load_distance_matrix(const std::string& path);

/// Writes an instance in the format read by load_distance_matrix.
void write_distance_matrix(const MetricInstance& inst, const std::string& path);

/// Sorted, deduplicated {d(i, j) : i in F, j in C} together with 0.
std::vector<double> candidate_radii(const MetricInstance& inst);

// k-cut reduction gadget ----------------------------------------------------

struct Graph {
  std::vector<std::string> nodes;
  std::vector<std::pair<int, int>> edges;

  int node_index(const std::string& name) const;
};

/// Edge-list text: one `u v` pair per line; a line with a single token
/// declares an isolated node. Blank lines and `#` comments are skipped.
Graph read_edge_list(const std::string& path);

struct Gadget {
  MetricInstance instance;
  std::vector<PointId> node_points;        // point of each graph node
  std::vector<LocationId> terminal_sites;  // location of each terminal
  /// Number of terminals; the center variant needs it as a cardinality
  /// limit.
  int k = 0;
  /// Objective value of every solution that keeps each terminal point at
  /// its own location: 1 for center/supplier, |V|-k for median,
  /// sqrt(|V|-k) for means.
  double target_value = 0.0;
};

/// Builds the k-cut reduction instance and its single SPC group
/// (one pair per edge, psi = gamma / |E|).
std::pair<Gadget, ConstraintFamily> generate_kcut_gadget(const Graph& graph, const std::vector<int>& terminals,
                                                         int gamma, const Objective& objective);

}  // namespace spc
