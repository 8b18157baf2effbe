#include "spc/instance.hpp"

#include "spc/constraints.hpp"
#include "spc/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <set>
#include <sstream>
#include <unordered_map>

namespace spc {

// Objective ---------------------------------------------------------------

int Objective::exponent() const {
  switch (kind) {
    case ObjectiveKind::kMedian: return 1;
    case ObjectiveKind::kMeans: return 2;
    default: return 0;
  }
}

int Objective::alpha() const {
  switch (kind) {
    case ObjectiveKind::kCenter: return 1;
    case ObjectiveKind::kSupplier: return 2;
    default: return 0;
  }
}

std::string Objective::name() const {
  switch (kind) {
    case ObjectiveKind::kCenter: return "center";
    case ObjectiveKind::kSupplier: return "supplier";
    case ObjectiveKind::kMedian: return "median";
    case ObjectiveKind::kMeans: return "means";
  }
  return "unknown";
}

Objective Objective::parse(const std::string& name) {
  if (name == "center") return center();
  if (name == "supplier") return supplier();
  if (name == "median") return median();
  if (name == "means") return means();
  throw InputError("unknown objective '" + name + "' (expected center, supplier, median or means)");
}

// LocationConstraint --------------------------------------------------------

LocationConstraint LocationConstraint::cardinality(int k) {
  LocationConstraint c;
  c.kind = LocationKind::kCardinality;
  c.k = k;
  return c;
}

LocationConstraint LocationConstraint::knapsack(std::vector<double> weights, double budget) {
  LocationConstraint c;
  c.kind = LocationKind::kKnapsack;
  c.weights = std::move(weights);
  c.budget = budget;
  return c;
}

void LocationConstraint::validate(int num_locations) const {
  switch (kind) {
    case LocationKind::kUnrestricted: return;
    case LocationKind::kCardinality:
      if (k < 1 || k > num_locations)
        throw InputError("cardinality k=" + std::to_string(k) + " outside [1, " + std::to_string(num_locations) + "]");
      return;
    case LocationKind::kKnapsack: {
      if (static_cast<int>(weights.size()) != num_locations)
        throw InputError("knapsack weights: expected " + std::to_string(num_locations) + " values, got " +
                         std::to_string(weights.size()));
      for (double w : weights)
        if (!(w >= 0.0) || !std::isfinite(w)) throw InputError("knapsack weights must be finite and nonnegative");
      if (!(budget >= 0.0)) throw InputError("knapsack budget must be nonnegative");
      if (*std::min_element(weights.begin(), weights.end()) > budget)
        throw InputError("knapsack budget is below every location weight");
      return;
    }
  }
}

double LocationConstraint::total_weight(std::span<const LocationId> open) const {
  double total = 0.0;
  for (LocationId i : open) total += weights.empty() ? 0.0 : weights[i];
  return total;
}

bool LocationConstraint::admits(std::span<const LocationId> open) const {
  switch (kind) {
    case LocationKind::kUnrestricted: return true;
    case LocationKind::kCardinality: return static_cast<int>(open.size()) <= k;
    case LocationKind::kKnapsack: return total_weight(open) <= budget + 1e-9;
  }
  return false;
}

std::string LocationConstraint::name() const {
  switch (kind) {
    case LocationKind::kUnrestricted: return "unrestricted";
    case LocationKind::kCardinality: return "k=" + std::to_string(k);
    case LocationKind::kKnapsack: {
      std::ostringstream os;
      os << "knapsack(W=" << budget << ")";
      return os.str();
    }
  }
  return "unknown";
}

// MetricInstance ------------------------------------------------------------

namespace {

std::vector<std::string> default_labels(int n, std::vector<std::string> labels) {
  if (labels.empty()) {
    labels.resize(n);
    for (int i = 0; i < n; ++i) labels[i] = std::to_string(i);
  }
  if (static_cast<int>(labels.size()) != n) throw InputError("label count does not match site count");
  return labels;
}

std::vector<int> iota_ids(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

MetricInstance MetricInstance::from_features(MatrixXd features, std::vector<std::string> labels) {
  if (!features.allFinite()) throw InputError("feature matrix holds non-finite values");
  MetricInstance inst;
  inst.num_sites_ = static_cast<int>(features.rows());
  inst.coincident_ = true;
  inst.features_ = std::move(features);
  inst.point_sites_ = iota_ids(inst.num_sites_);
  inst.location_sites_ = inst.point_sites_;
  inst.labels_ = default_labels(inst.num_sites_, std::move(labels));
  inst.fill_cache();
  return inst;
}

MetricInstance MetricInstance::from_distances(MatrixXd distances, std::vector<std::string> labels) {
  const int n = static_cast<int>(distances.rows());
  return from_distances(std::move(distances), iota_ids(n), iota_ids(n), std::move(labels));
}

MetricInstance MetricInstance::from_distances(MatrixXd distances, std::vector<int> point_sites,
                                              std::vector<int> location_sites, std::vector<std::string> labels) {
  validate_metric(distances);
  const int n = static_cast<int>(distances.rows());
  for (int s : point_sites)
    if (s < 0 || s >= n) throw InputError("point site out of range");
  for (int s : location_sites)
    if (s < 0 || s >= n) throw InputError("location site out of range");
  MetricInstance inst;
  inst.num_sites_ = n;
  inst.cache_ = std::move(distances);
  // Symmetrize so that cached lookups never depend on argument order.
  inst.cache_ = (0.5 * (inst.cache_ + inst.cache_.transpose())).eval();
  inst.cache_.diagonal().setZero();
  inst.coincident_ = point_sites == location_sites;
  inst.point_sites_ = std::move(point_sites);
  inst.location_sites_ = std::move(location_sites);
  inst.labels_ = default_labels(n, std::move(labels));
  return inst;
}

void MetricInstance::fill_cache() {
  if (num_sites_ > kCacheLimit || features_.size() == 0) return;
  const int n = num_sites_;
  cache_.resize(n, n);
  for (int a = 0; a < n; ++a) {
    cache_(a, a) = 0.0;
    for (int b = a + 1; b < n; ++b) {
      const double d = (features_.row(a) - features_.row(b)).norm();
      cache_(a, b) = d;
      cache_(b, a) = d;
    }
  }
}

double MetricInstance::site_distance(int a, int b) const {
  if (cache_.size() > 0) return cache_(a, b);
  if (a == b) return 0.0;
  return (features_.row(a) - features_.row(b)).norm();
}

MatrixXd MetricInstance::service_distances(std::span<const LocationId> open) const {
  MatrixXd d(static_cast<Eigen::Index>(open.size()), num_points());
  for (std::size_t s = 0; s < open.size(); ++s)
    for (PointId j = 0; j < num_points(); ++j) d(static_cast<Eigen::Index>(s), j) = distance(open[s], j);
  return d;
}

MatrixXd MetricInstance::site_distance_matrix() const {
  if (cache_.size() > 0) return cache_;
  MatrixXd d(num_sites_, num_sites_);
  for (int a = 0; a < num_sites_; ++a)
    for (int b = 0; b < num_sites_; ++b) d(a, b) = site_distance(a, b);
  return d;
}

void validate_metric(const MatrixXd& d, double tolerance) {
  if (d.rows() != d.cols()) throw InputError("distance matrix is not square");
  const Eigen::Index n = d.rows();
  if (!d.allFinite()) throw InputError("distance matrix holds non-finite values");
  for (Eigen::Index a = 0; a < n; ++a) {
    if (std::abs(d(a, a)) > tolerance) throw InputError("distance matrix has a nonzero diagonal at " + std::to_string(a));
    for (Eigen::Index b = 0; b < n; ++b) {
      if (d(a, b) < -tolerance) throw InputError("negative distance at (" + std::to_string(a) + ", " + std::to_string(b) + ")");
      if (std::abs(d(a, b) - d(b, a)) > tolerance)
        throw InputError("distance matrix is not symmetric at (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
  }
  for (Eigen::Index a = 0; a < n; ++a)
    for (Eigen::Index b = a + 1; b < n; ++b) {
      const double shortest = (d.row(a).transpose() + d.col(b)).minCoeff();
      if (d(a, b) > shortest + tolerance)
        throw InputError("triangle inequality fails for (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    }
}

void validate_objective(const MetricInstance& inst, const Objective& objective) {
  if (objective.kind == ObjectiveKind::kCenter && !inst.coincident())
    throw InputError("the center objective requires points and locations to coincide");
  if (inst.num_points() == 0) throw InputError("instance has no points");
  if (inst.num_locations() == 0) throw InputError("instance has no locations");
}

// CSV ingestion -------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::vector<std::string>> parse_csv(std::istream& in) {
  std::vector<std::vector<std::string>> records;
  std::vector<std::string> record;
  std::string field;
  bool quoted = false;
  bool any = false;
  char c;
  auto end_record = [&] {
    record.push_back(field);
    field.clear();
    const bool blank = record.size() == 1 && trim(record[0]).empty();
    if (!blank) records.push_back(std::move(record));
    record.clear();
    any = false;
  };
  while (in.get(c)) {
    any = true;
    if (quoted) {
      if (c == '"') {
        if (in.peek() == '"') {
          in.get(c);
          field.push_back('"');
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      record.push_back(field);
      field.clear();
    } else if (c == '\n') {
      end_record();
    } else if (c != '\r') {
      field.push_back(c);
    }
  }
  if (quoted) throw InputError("unterminated quoted field");
  if (any) end_record();
  return records;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  const std::string t = trim(cell);
  double v = 0.0;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (!t.empty() && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (t.empty() || ec != std::errc() || ptr != last || !std::isfinite(v))
    throw NonNumericCellError("row " + std::to_string(row + 1) + ", column '" + column + "': '" + cell +
                              "' is not a real number");
  return v;
}

}  // namespace

int CsvTable::column_index(const std::string& name) const {
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == name) return static_cast<int>(c);
  return -1;
}

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open '" + path + "'");
  auto records = parse_csv(in);
  if (records.empty()) throw InputError("'" + path + "' has no header row");
  CsvTable table;
  table.header = std::move(records.front());
  for (auto& h : table.header) h = trim(h);
  if (!table.header.empty() && table.header[0].rfind("\xEF\xBB\xBF", 0) == 0) table.header[0].erase(0, 3);
  for (std::size_t r = 1; r < records.size(); ++r) {
    if (records[r].size() != table.header.size())
      throw InputError("'" + path + "' row " + std::to_string(r) + " has " + std::to_string(records[r].size()) +
                       " cells, header has " + std::to_string(table.header.size()));
    table.rows.push_back(std::move(records[r]));
  }
  return table;
}

void standardize_columns(MatrixXd& data) {
  if (data.rows() == 0) return;
  for (Eigen::Index c = 0; c < data.cols(); ++c) {
    auto col = data.col(c);
    const double mean = col.mean();
    col.array() -= mean;
    const double var = col.squaredNorm() / static_cast<double>(data.rows());
    if (var < 1e-12)
      col.setZero();
    else
      col /= std::sqrt(var);
  }
}

MetricInstance load_dataset(const std::string& path, const std::vector<std::string>& columns,
                            std::optional<int> sample_n, std::uint64_t seed) {
  const CsvTable table = read_csv(path);
  const std::vector<std::string> names = columns.empty() ? table.header : columns;
  std::vector<int> idx;
  for (const auto& name : names) {
    const int c = table.column_index(name);
    if (c < 0) throw MissingColumnError("column '" + name + "' not found in '" + path + "'");
    idx.push_back(c);
  }
  const int total = static_cast<int>(table.rows.size());
  std::vector<int> rows(total);
  std::iota(rows.begin(), rows.end(), 0);
  if (sample_n) {
    if (*sample_n < 1) throw SampleSizeError("sample size must be positive");
    if (*sample_n > total)
      throw SampleSizeError("sample size " + std::to_string(*sample_n) + " exceeds the " + std::to_string(total) +
                            " rows of '" + path + "'");
    CounterRng rng(seed, 0);
    for (int i = 0; i < *sample_n; ++i) {
      const int j = i + static_cast<int>(rng.below(static_cast<std::uint64_t>(total - i)));
      std::swap(rows[i], rows[j]);
    }
    rows.resize(*sample_n);
    std::sort(rows.begin(), rows.end());
  }
  MatrixXd data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(idx.size()));
  std::vector<std::string> labels;
  labels.reserve(rows.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (std::size_t c = 0; c < idx.size(); ++c)
      data(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          parse_number(table.rows[rows[r]][idx[c]], rows[r], names[c]);
    labels.push_back(std::to_string(rows[r]));
  }
  standardize_columns(data);
  return MetricInstance::from_features(std::move(data), std::move(labels));
}

MetricInstance load_distance_matrix(const std::string& path) {
  const CsvTable table = read_csv(path);
  if (table.header.empty() || table.header[0] != "id") throw InputError("'" + path + "': first column must be 'id'");
  const bool has_kind = table.header.size() > 1 && table.header[1] == "kind";
  const std::size_t first = has_kind ? 2 : 1;
  const std::size_t n = table.header.size() - first;
  if (table.rows.size() != n)
    throw InputError("'" + path + "': " + std::to_string(n) + " site columns but " + std::to_string(table.rows.size()) +
                     " rows");
  MatrixXd d(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  std::vector<std::string> labels;
  std::vector<int> point_sites, location_sites;
  for (std::size_t r = 0; r < n; ++r) {
    const auto& row = table.rows[r];
    const std::string id = trim(row[0]);
    if (id != table.header[first + r])
      throw InputError("'" + path + "': row " + std::to_string(r + 1) + " id '" + id + "' does not match column '" +
                       table.header[first + r] + "'");
    labels.push_back(id);
    const std::string kind = has_kind ? trim(row[1]) : "both";
    if (kind == "point" || kind == "both") point_sites.push_back(static_cast<int>(r));
    if (kind == "location" || kind == "both") location_sites.push_back(static_cast<int>(r));
    if (kind != "point" && kind != "location" && kind != "both")
      throw InputError("'" + path + "': kind '" + kind + "' must be point, location or both");
    for (std::size_t c = 0; c < n; ++c)
      d(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = parse_number(row[first + c], r, table.header[first + c]);
  }
  return MetricInstance::from_distances(std::move(d), std::move(point_sites), std::move(location_sites),
                                        std::move(labels));
}

void write_distance_matrix(const MetricInstance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  const int n = inst.num_sites();
  std::vector<bool> is_point(n, false), is_location(n, false);
  for (PointId j = 0; j < inst.num_points(); ++j) is_point[inst.point_site(j)] = true;
  for (LocationId i = 0; i < inst.num_locations(); ++i) is_location[inst.location_site(i)] = true;
  const auto& labels = inst.site_labels();
  out << "id,kind";
  for (int s = 0; s < n; ++s) out << ',' << labels[s];
  out << '\n' << std::setprecision(17);
  for (int a = 0; a < n; ++a) {
    out << labels[a] << ',' << (is_point[a] && is_location[a] ? "both" : is_point[a] ? "point" : "location");
    for (int b = 0; b < n; ++b) out << ',' << inst.site_distance(a, b);
    out << '\n';
  }
}

std::vector<double> candidate_radii(const MetricInstance& inst) {
  std::vector<double> r;
  r.reserve(static_cast<std::size_t>(inst.num_points()) * inst.num_locations() + 1);
  r.push_back(0.0);
  for (LocationId i = 0; i < inst.num_locations(); ++i)
    for (PointId j = 0; j < inst.num_points(); ++j) r.push_back(inst.distance(i, j));
  std::sort(r.begin(), r.end());
  r.erase(std::unique(r.begin(), r.end()), r.end());
  return r;
}

// k-cut gadget --------------------------------------------------------------

int Graph::node_index(const std::string& name) const {
  for (std::size_t i = 0; i < nodes.size(); ++i)
    if (nodes[i] == name) return static_cast<int>(i);
  return -1;
}

Graph read_edge_list(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  Graph g;
  std::unordered_map<std::string, int> index;
  auto node = [&](const std::string& name) {
    auto [it, inserted] = index.emplace(name, static_cast<int>(g.nodes.size()));
    if (inserted) g.nodes.push_back(name);
    return it->second;
  };
  std::set<std::pair<int, int>> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<std::string> tokens;
    for (std::string t; ls >> t;) tokens.push_back(t);
    if (tokens.empty()) continue;
    if (tokens.size() == 1) {
      node(tokens[0]);
      continue;
    }
    if (tokens.size() != 2) throw InputError("'" + path + "' line " + std::to_string(lineno) + ": expected 'u v'");
    const int u = node(tokens[0]);
    const int v = node(tokens[1]);
    if (u == v) throw InputError("'" + path + "' line " + std::to_string(lineno) + ": self-loop");
    if (seen.emplace(std::min(u, v), std::max(u, v)).second) g.edges.emplace_back(u, v);
  }
  return g;
}

std::pair<Gadget, ConstraintFamily> generate_kcut_gadget(const Graph& graph, const std::vector<int>& terminals,
                                                         int gamma, const Objective& objective) {
  const int n = static_cast<int>(graph.nodes.size());
  const int k = static_cast<int>(terminals.size());
  const int m = static_cast<int>(graph.edges.size());
  if (k < 2) throw InputError("the k-cut gadget needs at least two terminals");
  if (gamma < 0) throw InputError("gamma must be nonnegative");
  if (gamma > m) throw InputError("gamma exceeds the number of edges");
  std::vector<int> terminal_of(n, -1);
  for (int f = 0; f < k; ++f) {
    const int u = terminals[f];
    if (u < 0 || u >= n) throw InputError("terminal " + std::to_string(u) + " is not a graph node");
    if (terminal_of[u] >= 0) throw InputError("terminals must be distinct");
    terminal_of[u] = f;
  }

  Gadget gadget{MetricInstance::from_distances(MatrixXd::Zero(1, 1)), {}, {}, k, 0.0};
  gadget.node_points.resize(n);
  std::iota(gadget.node_points.begin(), gadget.node_points.end(), 0);
  std::vector<std::string> labels;

  if (objective.kind == ObjectiveKind::kCenter) {
    // Sites: node points, then one h point per terminal; every site is a
    // point and a location.
    const int sites = n + k;
    MatrixXd d = MatrixXd::Zero(sites, sites);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        const bool ta = terminal_of[a] >= 0, tb = terminal_of[b] >= 0;
        d(a, b) = ta && tb ? 2.0 : (ta || tb ? 1.0 : 0.0);
      }
    for (int f = 0; f < k; ++f) {
      const int h = n + f;
      for (int u = 0; u < n; ++u) d(h, u) = d(u, h) = u == terminals[f] ? 1.0 : 2.0;
      for (int g = 0; g < k; ++g)
        if (g != f) d(h, n + g) = 2.0;
    }
    for (int u = 0; u < n; ++u) labels.push_back(graph.nodes[u]);
    for (int f = 0; f < k; ++f) labels.push_back("h:" + graph.nodes[terminals[f]]);
    gadget.instance = MetricInstance::from_distances(std::move(d), std::move(labels));
    for (int f = 0; f < k; ++f) gadget.terminal_sites.push_back(terminals[f]);
  } else {
    // Sites: k locations, then the node points.
    const int sites = k + n;
    MatrixXd d = MatrixXd::Zero(sites, sites);
    auto loc_point = [&](int f, int u) {
      const int t = terminal_of[u];
      return t < 0 ? 1.0 : (t == f ? 0.0 : 2.0);
    };
    for (int f = 0; f < k; ++f)
      for (int g = 0; g < k; ++g)
        if (f != g) d(f, g) = 2.0;
    for (int f = 0; f < k; ++f)
      for (int u = 0; u < n; ++u) d(f, k + u) = d(k + u, f) = loc_point(f, u);
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) {
        if (a == b) continue;
        const bool ta = terminal_of[a] >= 0, tb = terminal_of[b] >= 0;
        d(k + a, k + b) = ta && tb ? 2.0 : (ta || tb ? 1.0 : 0.0);
      }
    std::vector<int> point_sites(n), location_sites(k);
    std::iota(location_sites.begin(), location_sites.end(), 0);
    std::iota(point_sites.begin(), point_sites.end(), k);
    for (int f = 0; f < k; ++f) labels.push_back("loc:" + graph.nodes[terminals[f]]);
    for (int u = 0; u < n; ++u) labels.push_back(graph.nodes[u]);
    gadget.instance = MetricInstance::from_distances(std::move(d), std::move(point_sites), std::move(location_sites),
                                                     std::move(labels));
    for (int f = 0; f < k; ++f) gadget.terminal_sites.push_back(f);
  }

  switch (objective.kind) {
    case ObjectiveKind::kCenter:
    case ObjectiveKind::kSupplier: gadget.target_value = 1.0; break;
    case ObjectiveKind::kMedian: gadget.target_value = n - k; break;
    case ObjectiveKind::kMeans: gadget.target_value = std::sqrt(static_cast<double>(n - k)); break;
  }

  std::vector<PointPair> pairs;
  for (auto [u, v] : graph.edges) pairs.emplace_back(u, v);
  ConstraintFamily family;
  family.add_group(std::move(pairs), m == 0 ? 0.0 : static_cast<double>(gamma) / m);
  return {std::move(gadget), std::move(family)};
}

}  // namespace spc
