#include "spc/constraints.hpp"

#include "spc/instance.hpp"
#include "spc/vanilla.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

namespace spc {

using nlohmann::json;

ConstraintFamily::ConstraintFamily(std::vector<ConstraintGroup> groups) {
  for (auto& g : groups) add_group(std::move(g.pairs), g.psi);
}

void ConstraintFamily::add_group(std::vector<PointPair> pairs, double psi) {
  if (!(psi >= 0.0 && psi <= 1.0)) throw InputError("psi must lie in [0, 1]");
  for (const auto& p : pairs)
    if (p.first == p.second) throw InputError("pair {" + std::to_string(p.first) + ", " + std::to_string(p.second) + "} repeats a point");
  std::sort(pairs.begin(), pairs.end());
  pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
  groups_.push_back({std::move(pairs), psi});
}

bool ConstraintFamily::is_pbs() const {
  return std::all_of(groups_.begin(), groups_.end(), [](const ConstraintGroup& g) { return g.pairs.size() == 1; });
}

bool ConstraintFamily::is_ml() const {
  return std::all_of(groups_.begin(), groups_.end(),
                     [](const ConstraintGroup& g) { return g.pairs.size() == 1 && g.psi == 0.0; });
}

std::vector<PointPair> ConstraintFamily::distinct_pairs() const {
  std::vector<PointPair> all;
  for (const auto& g : groups_) all.insert(all.end(), g.pairs.begin(), g.pairs.end());
  std::sort(all.begin(), all.end());
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

void ConstraintFamily::validate(int num_points) const {
  for (std::size_t q = 0; q < groups_.size(); ++q) {
    const auto& g = groups_[q];
    if (!(g.psi >= 0.0 && g.psi <= 1.0)) throw InputError("group " + std::to_string(q) + ": psi outside [0, 1]");
    for (const auto& p : g.pairs) {
      if (p.first == p.second || p.first < 0 || p.second >= num_points)
        throw InputError("group " + std::to_string(q) + ": pair {" + std::to_string(p.first) + ", " +
                         std::to_string(p.second) + "} is not a pair of distinct points below " +
                         std::to_string(num_points));
    }
  }
}

// Cliques -------------------------------------------------------------------

CliquePartition::CliquePartition(std::vector<std::vector<PointId>> cliques, int num_points)
    : cliques_(std::move(cliques)), owner_(num_points, -1) {
  for (std::size_t q = 0; q < cliques_.size(); ++q) {
    if (cliques_[q].empty()) throw InputError("empty clique");
    std::sort(cliques_[q].begin(), cliques_[q].end());
    for (PointId j : cliques_[q]) {
      if (j < 0 || j >= num_points) throw InputError("clique member " + std::to_string(j) + " out of range");
      if (owner_[j] >= 0) throw InputError("point " + std::to_string(j) + " lies in two cliques");
      owner_[j] = static_cast<int>(q);
    }
  }
  for (int j = 0; j < num_points; ++j)
    if (owner_[j] < 0) throw InputError("point " + std::to_string(j) + " is in no clique");
}

ConstraintFamily CliquePartition::to_ml_family() const {
  ConstraintFamily family;
  for (const auto& c : cliques_)
    for (std::size_t a = 0; a < c.size(); ++a)
      for (std::size_t b = a + 1; b < c.size(); ++b) family.add_group({PointPair(c[a], c[b])}, 0.0);
  return family;
}

namespace {

struct DisjointSets {
  std::vector<int> parent;
  explicit DisjointSets(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int a) {
    while (parent[a] != a) a = parent[a] = parent[parent[a]];
    return a;
  }
  void unite(int a, int b) {
    a = find(a), b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

}  // namespace

CliquePartition extract_cliques(const ConstraintFamily& family, int num_points) {
  if (!family.is_ml()) throw InputError("clique extraction needs a must-link family (single pairs, psi = 0)");
  family.validate(num_points);
  DisjointSets sets(num_points);
  for (const auto& g : family.groups()) sets.unite(g.pairs[0].first, g.pairs[0].second);
  // Roots are the smallest members, so scanning ids in order emits cliques
  // by smallest member.
  std::vector<int> index(num_points, -1);
  std::vector<std::vector<PointId>> cliques;
  for (int j = 0; j < num_points; ++j) {
    const int r = sets.find(j);
    if (index[r] < 0) {
      index[r] = static_cast<int>(cliques.size());
      cliques.emplace_back();
    }
    cliques[index[r]].push_back(j);
  }
  return CliquePartition(std::move(cliques), num_points);
}

// Generators ----------------------------------------------------------------

namespace {

void require_coincident(const MetricInstance& inst, const char* what) {
  if (!inst.coincident()) throw InputError(std::string(what) + " requires points and locations to coincide");
}

ConstraintFamily singleton_family(const std::map<PointPair, double>& psi) {
  ConstraintFamily family;
  for (const auto& [pair, p] : psi) family.add_group({pair}, std::clamp(p, 0.0, 1.0));
  return family;
}

}  // namespace

double threshold_baseline_radius(const MetricInstance& inst, int k) {
  const double tau =
      binary_search_radius(inst, [&](double t) { return threshold_k_center(inst, k, t).has_value(); });
  return threshold_k_center(inst, k, tau)->objective_value;
}

ConstraintFamily gen_f1_with_radius(const MetricInstance& inst, double radius) {
  require_coincident(inst, "F1");
  const int n = inst.num_points();
  std::map<PointPair, double> psi;
  bool any_positive = false;
  for (PointId a = 0; a < n; ++a)
    for (PointId b = a + 1; b < n; ++b) {
      const double d = inst.point_distance(a, b);
      any_positive |= d > 0.0;
      if (radius <= 0.0) {
        if (d == 0.0) psi[{a, b}] = 0.0;
      } else if (d <= radius * (1.0 + 1e-12)) {
        psi[{a, b}] = d / radius;
      }
    }
  if (radius <= 0.0 && any_positive)
    throw InputError("F1 baseline radius is zero while some distances are positive");
  return singleton_family(psi);
}

ConstraintFamily gen_f1(const MetricInstance& inst, int k, const RadiusProvider& baseline) {
  require_coincident(inst, "F1");
  return gen_f1_with_radius(inst, baseline(inst, k));
}

ConstraintFamily gen_f2(const MetricInstance& inst, int m) {
  require_coincident(inst, "F2");
  const int n = inst.num_points();
  if (m < 1) throw InputError("F2 needs m >= 1");
  m = std::min(m, n - 1);
  std::map<PointPair, double> dist;
  std::vector<std::pair<double, PointId>> order;
  for (PointId j = 0; j < n && m > 0; ++j) {
    order.clear();
    for (PointId o = 0; o < n; ++o)
      if (o != j) order.emplace_back(inst.point_distance(j, o), o);
    std::nth_element(order.begin(), order.begin() + (m - 1), order.end());
    const double cutoff = order[m - 1].first;
    for (auto [d, o] : order)
      if (d <= cutoff) dist[{j, o}] = d;
  }
  double d_max = 0.0;
  for (const auto& [pair, d] : dist) d_max = std::max(d_max, d);
  for (auto& [pair, d] : dist) d = d_max > 0.0 ? d / d_max : 0.0;
  return singleton_family(dist);
}

ConstraintFamily gen_f3(const MetricInstance& inst, int k) {
  require_coincident(inst, "F3");
  const int n = inst.num_points();
  if (k < 1) throw InputError("F3 needs k >= 1");
  const int need = (n + k - 1) / k;
  std::map<PointPair, double> psi;
  std::vector<double> row(n);
  for (PointId j = 0; j < n; ++j) {
    for (PointId o = 0; o < n; ++o) row[o] = inst.point_distance(j, o);
    std::vector<double> sorted = row;
    std::nth_element(sorted.begin(), sorted.begin() + (need - 1), sorted.end());
    const double r = sorted[need - 1];
    for (PointId o = 0; o < n; ++o) {
      if (o == j || row[o] > r) continue;
      const double p = r > 0.0 ? row[o] / r : 0.0;
      auto [it, inserted] = psi.emplace(PointPair(j, o), p);
      if (!inserted) it->second = std::min(it->second, p);
    }
  }
  return singleton_family(psi);
}

ConstraintFamily gen_community(const std::vector<std::vector<PointId>>& groups, std::span<const double> psis) {
  if (groups.size() != psis.size()) throw InputError("community generator: one psi per group required");
  ConstraintFamily family;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::vector<PointId> members = groups[g];
    std::sort(members.begin(), members.end());
    members.erase(std::unique(members.begin(), members.end()), members.end());
    if (members.size() < 2) throw InputError("community " + std::to_string(g) + " has fewer than two points");
    std::vector<PointPair> pairs;
    for (std::size_t a = 0; a < members.size(); ++a)
      for (std::size_t b = a + 1; b < members.size(); ++b) pairs.emplace_back(members[a], members[b]);
    family.add_group(std::move(pairs), psis[g]);
  }
  return family;
}

// Serialization -------------------------------------------------------------

std::string family_to_json(const ConstraintFamily& family) {
  json groups = json::array();
  for (const auto& g : family.groups()) {
    json pairs = json::array();
    for (const auto& p : g.pairs) pairs.push_back({p.first, p.second});
    groups.push_back({{"psi", g.psi}, {"pairs", std::move(pairs)}});
  }
  return json{{"groups", std::move(groups)}}.dump();
}

ConstraintFamily family_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("constraint file is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("groups") || !doc["groups"].is_array())
    throw InputError("constraint file: top-level 'groups' array missing");
  ConstraintFamily family;
  const auto& groups = doc["groups"];
  for (std::size_t q = 0; q < groups.size(); ++q) {
    const auto& g = groups[q];
    const std::string where = "groups[" + std::to_string(q) + "]";
    if (!g.is_object() || !g.contains("psi") || !g["psi"].is_number())
      throw InputError(where + ".psi: expected a number");
    if (!g.contains("pairs") || !g["pairs"].is_array()) throw InputError(where + ".pairs: expected an array");
    std::vector<PointPair> pairs;
    for (std::size_t e = 0; e < g["pairs"].size(); ++e) {
      const auto& p = g["pairs"][e];
      if (!p.is_array() || p.size() != 2 || !p[0].is_number_integer() || !p[1].is_number_integer())
        throw InputError(where + ".pairs[" + std::to_string(e) + "]: expected [id, id]");
      const int a = p[0].get<int>(), b = p[1].get<int>();
      if (a == b || a < 0 || b < 0) throw InputError(where + ".pairs[" + std::to_string(e) + "]: ids must be distinct and nonnegative");
      pairs.emplace_back(a, b);
    }
    const double psi = g["psi"].get<double>();
    if (!(psi >= 0.0 && psi <= 1.0)) throw InputError(where + ".psi: must lie in [0, 1]");
    family.add_group(std::move(pairs), psi);
  }
  return family;
}

void write_family(const ConstraintFamily& family, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << family_to_json(family) << '\n';
}

ConstraintFamily read_family(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return family_from_json(ss.str());
}

}  // namespace spc
