#include "spc/framework.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>

namespace spc {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::vector<double> spc_bounds(const ConstraintFamily& family) {
  std::vector<double> b;
  for (const auto& g : family.groups()) b.push_back(2.0 * g.budget());
  return b;
}

// Largest service distance carrying positive mass.
double support_radius(const MatrixXd& service, const MatrixXd& x) {
  double r = 0.0;
  for (Eigen::Index s = 0; s < x.rows(); ++s)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      if (x(s, j) > 0.0) r = std::max(r, service(s, j));
  return r;
}

struct LpRunner {
  const MetricInstance& inst;
  const ConstraintFamily& family;
  const SolveOptions& options;
  SolveTrace* trace;

  std::optional<FractionalAssignment> operator()(const std::vector<LocationId>& open, const LpMode& mode,
                                                 bool centroid, MatrixXd* service = nullptr) const {
    auto t0 = Clock::now();
    const AssignmentLp lp = build_lp(inst, open, family, mode, centroid);
    if (trace) trace->lp_build_seconds += seconds_since(t0);
    t0 = Clock::now();
    LpSolveStats stats;
    auto sol = solve_lp(lp, options.lp, &stats);
    if (trace) {
      trace->lp_solve_seconds += seconds_since(t0);
      trace->lp_solves += 1;
      trace->pivots += stats.pivots;
      trace->cuts += stats.cuts;
    }
    if (service) *service = lp.service();
    return sol;
  }
};

void require_reassignable(const MetricInstance& inst, const LocationConstraint& location) {
  if (!inst.coincident()) throw InputError("centroid reassignment requires points and locations to coincide");
  if (location.kind == LocationKind::kKnapsack)
    throw InputError(
        "centroid reassignment keeps its guarantee only for unrestricted or cardinality locations; knapsack is "
        "not supported");
}

}  // namespace

AssignmentDistribution solve_spc(const MetricInstance& inst, const Objective& objective,
                                 const LocationConstraint& location, const ConstraintFamily& family,
                                 std::uint64_t seed, const SolveOptions& options, SolveTrace* trace) {
  validate_objective(inst, objective);
  location.validate(inst.num_locations());
  family.validate(inst.num_points());
  if (options.reassign_centroid) require_reassignable(inst, location);

  auto t0 = Clock::now();
  BaselineOptions bopts = options.baseline;
  bopts.seed = seed;
  const VanillaSolution base = run_baseline(inst, objective, location, bopts);
  if (trace) trace->baseline_seconds += seconds_since(t0);

  const LpRunner run{inst, family, options, trace};
  GuaranteeRecord g;
  g.algorithm = "alg1";
  g.objective = objective;
  g.location = location.name();
  g.baseline_value = base.objective_value;
  g.spc_bounds = spc_bounds(family);
  g.reassign_per_draw = options.reassign_centroid;

  if (objective.is_radius()) {
    const bool unrestricted = location.kind == LocationKind::kUnrestricted;
    auto limit_of = [&](double guess) {
      return unrestricted ? guess : base.objective_value + objective.alpha() * guess;
    };
    std::map<double, FractionalAssignment> solved;
    const auto radii = candidate_radii(inst);
    const double guess = binary_search_radius(radii, [&](double t) {
      auto sol = run(base.open_set, LpMode::radius(limit_of(t)), false);
      if (sol) solved.emplace(t, std::move(*sol));
      return solved.count(t) > 0;
    });
    FractionalAssignment frac = std::move(solved.at(guess));
    g.guess = guess;
    g.radius_limit = limit_of(guess);
    g.objective_bound = g.radius_limit;
    g.achieved = support_radius(inst.service_distances(base.open_set), frac.x);
    g.feasibility_point = "first-feasible";
    return AssignmentDistribution(base.open_set, std::move(frac), seed, std::move(g));
  }

  auto sol = run(base.open_set, LpMode::cost(objective.exponent()), false);
  if (!sol) throw InfeasibleError("cost-mode assignment LP is infeasible");
  const double raw = sol->objective_value.value_or(0.0);
  g.achieved = objective.exponent() == 2 ? std::sqrt(raw) : raw;
  g.objective_bound = g.achieved;
  g.feasibility_point = "optimal";
  return AssignmentDistribution(base.open_set, std::move(*sol), seed, std::move(g));
}

AssignmentDistribution solve_kcenter_spc_cc(const MetricInstance& inst, int k, const ConstraintFamily& family,
                                            std::uint64_t seed, const SolveOptions& options, SolveTrace* trace) {
  validate_objective(inst, Objective::center());
  LocationConstraint::cardinality(k).validate(inst.num_locations());
  family.validate(inst.num_points());

  const LpRunner run{inst, family, options, trace};
  struct Accepted {
    VanillaSolution base;
    FractionalAssignment frac;
  };
  std::map<double, Accepted> solved;
  const auto radii = candidate_radii(inst);
  const double guess = binary_search_radius(radii, [&](double t) {
    auto t0 = Clock::now();
    auto base = threshold_k_center(inst, k, t);
    if (trace) trace->baseline_seconds += seconds_since(t0);
    if (!base) return false;
    auto sol = run(base->open_set, LpMode::radius(3.0 * t), true);
    if (!sol) return false;
    solved.emplace(t, Accepted{std::move(*base), std::move(*sol)});
    return true;
  });
  Accepted acc = std::move(solved.at(guess));
  GuaranteeRecord g;
  g.algorithm = "alg2";
  g.objective = Objective::center();
  g.location = LocationConstraint::cardinality(k).name();
  g.baseline_value = acc.base.objective_value;
  g.guess = guess;
  g.radius_limit = 3.0 * guess;
  g.objective_bound = g.radius_limit;
  g.achieved = support_radius(inst.service_distances(acc.base.open_set), acc.frac.x);
  g.spc_bounds = spc_bounds(family);
  g.centroid = true;
  g.feasibility_point = "first-feasible";
  return AssignmentDistribution(acc.base.open_set, std::move(acc.frac), seed, std::move(g));
}

Reassignment reassign_centroid(const MetricInstance& inst, std::span<const LocationId> open_set,
                               std::span<const LocationId> assignment) {
  if (!inst.coincident()) throw InputError("centroid reassignment requires points and locations to coincide");
  const int n = inst.num_points();
  if (static_cast<int>(assignment.size()) != n) throw InputError("assignment must cover every point");
  for (LocationId a : assignment)
    if (std::find(open_set.begin(), open_set.end(), a) == open_set.end())
      throw InputError("assignment uses a location outside the open set");
  // Each cluster moves to its member closest to the old location; the old
  // location keeps the cluster when it belongs to it. Clusters are disjoint,
  // so the new centres are distinct.
  std::map<LocationId, PointId> centre;
  for (PointId j = 0; j < n; ++j) {
    const LocationId i = assignment[j];
    auto [it, fresh] = centre.try_emplace(i, j);
    const PointId cur = it->second;
    if (fresh || cur == i) continue;
    if (j == i || inst.point_distance(i, j) < inst.point_distance(i, cur)) it->second = j;
  }
  Reassignment out;
  out.assignment.resize(n);
  for (PointId j = 0; j < n; ++j) out.assignment[j] = centre.at(assignment[j]);
  for (const auto& [i, c] : centre) out.open_set.push_back(c);
  std::sort(out.open_set.begin(), out.open_set.end());
  return out;
}

std::vector<LocationId> draw_assignment(const AssignmentDistribution& dist, std::uint64_t draw_index,
                                        const MetricInstance* inst) {
  auto a = sample_assignment(dist, draw_index).assignment;
  if (!dist.guarantee().reassign_per_draw) return a;
  if (!inst) throw InputError("this distribution reassigns centroids per draw and needs its instance");
  return reassign_centroid(*inst, dist.open_set(), a).assignment;
}

// Must-link greedy ----------------------------------------------------------

namespace {

struct MlAttempt {
  std::vector<LocationId> open;
  std::vector<LocationId> phi;
};

std::optional<MlAttempt> ml_attempt(const MetricInstance& inst, const Objective& objective,
                                    const LocationConstraint& location, const CliquePartition& partition,
                                    const std::vector<std::vector<bool>>& neighboring, double guess,
                                    bool restrict_candidates) {
  const int t = static_cast<int>(partition.size());
  const int n = inst.num_points();
  const auto& cliques = partition.cliques();
  const bool knapsack = location.kind == LocationKind::kKnapsack;
  const bool centroid = objective.kind == ObjectiveKind::kCenter;
  const double slack = objective.kind == ObjectiveKind::kCenter && !knapsack ? 2.0 : 3.0;

  std::vector<int> owner(t, -1);  // index into open
  MlAttempt out;
  out.phi.assign(n, -1);
  for (int q = 0; q < t; ++q) {
    if (owner[q] >= 0) continue;
    const PointId jq = cliques[q].front();
    LocationId iq = -1;
    if (!knapsack && objective.kind == ObjectiveKind::kCenter) {
      iq = jq;
    } else if (!knapsack) {
      iq = 0;
      for (LocationId i = 1; i < inst.num_locations(); ++i)
        if (inst.distance(i, jq) < inst.distance(iq, jq)) iq = i;
      if (inst.distance(iq, jq) > guess) return std::nullopt;
    } else {
      for (LocationId i = 0; i < inst.num_locations(); ++i) {
        if (inst.distance(i, jq) > guess) continue;
        if (restrict_candidates && !neighboring[q][partition.clique_of(i)]) continue;
        if (iq < 0 || location.weights[i] < location.weights[iq]) iq = i;
      }
      if (iq < 0) return std::nullopt;
    }
    const int slot = static_cast<int>(out.open.size());
    out.open.push_back(iq);
    owner[q] = slot;
    for (int p = 0; p < t; ++p)
      if (owner[p] < 0 && neighboring[q][p]) owner[p] = slot;
  }
  if (!location.admits(out.open)) return std::nullopt;
  for (int q = 0; q < t; ++q)
    for (PointId j : cliques[q]) out.phi[j] = out.open[owner[q]];

  if (centroid) {
    // Each open location must serve itself, so its clique follows it.
    std::vector<int> holder(t, -1);
    for (LocationId i : out.open) {
      const int q = partition.clique_of(i);
      if (holder[q] >= 0 && holder[q] != i) return std::nullopt;
      holder[q] = i;
    }
    for (int q = 0; q < t; ++q)
      if (holder[q] >= 0)
        for (PointId j : cliques[q]) out.phi[j] = holder[q];
  }
  for (PointId j = 0; j < n; ++j)
    if (inst.distance(out.phi[j], j) > slack * guess + kMetricTolerance) return std::nullopt;
  // Drop locations left without points by the repair.
  std::vector<LocationId> used(out.phi.begin(), out.phi.end());
  std::sort(used.begin(), used.end());
  used.erase(std::unique(used.begin(), used.end()), used.end());
  out.open = std::move(used);
  return out;
}

}  // namespace

MlSolution solve_ml(const MetricInstance& inst, const Objective& objective, const LocationConstraint& location,
                    const CliquePartition& partition) {
  validate_objective(inst, objective);
  if (!objective.is_radius()) throw InputError("the must-link greedy handles center and supplier objectives only");
  if (location.kind == LocationKind::kUnrestricted)
    throw InputError("the must-link greedy needs a cardinality or knapsack location constraint");
  location.validate(inst.num_locations());
  if (partition.num_points() != inst.num_points()) throw InputError("clique partition does not cover the instance");

  const int t = static_cast<int>(partition.size());
  const auto& cliques = partition.cliques();
  // Largest cross distance between every two cliques.
  MatrixXd spread = MatrixXd::Zero(t, t);
  for (int a = 0; a < t; ++a)
    for (int b = a; b < t; ++b) {
      double worst = 0.0;
      for (PointId u : cliques[a])
        for (PointId v : cliques[b]) worst = std::max(worst, inst.point_distance(u, v));
      spread(a, b) = spread(b, a) = worst;
    }

  for (double guess : candidate_radii(inst)) {
    std::vector<std::vector<bool>> neighboring(t, std::vector<bool>(t));
    for (int a = 0; a < t; ++a)
      for (int b = 0; b < t; ++b) neighboring[a][b] = spread(a, b) <= 2.0 * guess + kMetricTolerance;
    auto attempt = ml_attempt(inst, objective, location, partition, neighboring, guess, false);
    if (!attempt && location.kind == LocationKind::kKnapsack && objective.kind == ObjectiveKind::kCenter)
      attempt = ml_attempt(inst, objective, location, partition, neighboring, guess, true);
    if (!attempt) continue;
    MlSolution sol;
    sol.open_set = std::move(attempt->open);
    sol.assignment = std::move(attempt->phi);
    sol.guess = guess;
    sol.radius = assignment_objective(inst, objective, sol.assignment);
    return sol;
  }
  throw InfeasibleError("no radius guess admits a must-link solution under the location constraint");
}

AssignmentDistribution ml_distribution(const MetricInstance& inst, const Objective& objective,
                                       const LocationConstraint& location, const MlSolution& sol,
                                       const ConstraintFamily& family, std::uint64_t seed) {
  FractionalAssignment frac;
  frac.x = MatrixXd::Zero(static_cast<Eigen::Index>(sol.open_set.size()), inst.num_points());
  for (PointId j = 0; j < inst.num_points(); ++j) {
    const auto it = std::lower_bound(sol.open_set.begin(), sol.open_set.end(), sol.assignment[j]);
    frac.x(it - sol.open_set.begin(), j) = 1.0;
  }
  frac.pairs = family.distinct_pairs();
  frac.tighten_z();
  GuaranteeRecord g;
  g.algorithm = "ml-greedy";
  g.objective = objective;
  g.location = location.name();
  g.guess = sol.guess;
  const double slack = objective.kind == ObjectiveKind::kCenter && location.kind == LocationKind::kCardinality ? 2.0 : 3.0;
  g.radius_limit = slack * sol.guess;
  g.objective_bound = g.radius_limit;
  g.achieved = sol.radius;
  g.spc_bounds = spc_bounds(family);
  g.centroid = objective.kind == ObjectiveKind::kCenter;
  g.feasibility_point = "integral";
  return AssignmentDistribution(sol.open_set, std::move(frac), seed, std::move(g));
}

// Serialization -------------------------------------------------------------

json guarantee_to_json(const GuaranteeRecord& g) {
  return json{{"algorithm", g.algorithm},
              {"objective", g.objective.name()},
              {"location", g.location},
              {"baseline_value", g.baseline_value},
              {"guess", g.guess},
              {"radius_limit", g.radius_limit},
              {"objective_bound", g.objective_bound},
              {"achieved", g.achieved},
              {"spc_bounds", g.spc_bounds},
              {"centroid", g.centroid},
              {"reassign_per_draw", g.reassign_per_draw},
              {"feasibility_point", g.feasibility_point}};
}

GuaranteeRecord guarantee_from_json(const json& j) {
  GuaranteeRecord g;
  try {
    g.algorithm = j.at("algorithm").get<std::string>();
    g.objective = Objective::parse(j.at("objective").get<std::string>());
    g.location = j.at("location").get<std::string>();
    g.baseline_value = j.at("baseline_value").get<double>();
    g.guess = j.at("guess").get<double>();
    g.radius_limit = j.at("radius_limit").get<double>();
    g.objective_bound = j.at("objective_bound").get<double>();
    g.achieved = j.at("achieved").get<double>();
    g.spc_bounds = j.at("spc_bounds").get<std::vector<double>>();
    g.centroid = j.at("centroid").get<bool>();
    g.reassign_per_draw = j.at("reassign_per_draw").get<bool>();
    g.feasibility_point = j.at("feasibility_point").get<std::string>();
  } catch (const json::exception& e) {
    throw InputError(std::string("solution guarantee record: ") + e.what());
  }
  return g;
}

json solution_to_json(const AssignmentDistribution& dist, const json& instance) {
  const auto& f = dist.fractional();
  const auto& open = dist.open_set();
  json x = json::array();
  for (Eigen::Index s = 0; s < f.x.rows(); ++s)
    for (Eigen::Index j = 0; j < f.x.cols(); ++j)
      if (f.x(s, j) != 0.0) x.push_back({open[s], j, f.x(s, j)});
  json pairs = json::array();
  for (const auto& p : f.pairs) pairs.push_back({p.first, p.second});
  json zp = json::array();
  for (Eigen::Index e = 0; e < f.z_pair.rows(); ++e)
    for (Eigen::Index s = 0; s < f.z_pair.cols(); ++s)
      if (f.z_pair(e, s) != 0.0) zp.push_back({e, open[s], f.z_pair(e, s)});
  json doc{{"open_set", open},
           {"num_points", f.x.cols()},
           {"x", std::move(x)},
           {"pairs", std::move(pairs)},
           {"z", std::vector<double>(f.z.data(), f.z.data() + f.z.size())},
           {"z_pair", std::move(zp)},
           {"master_seed", dist.master_seed()},
           {"guarantee", guarantee_to_json(dist.guarantee())}};
  if (f.objective_value) doc["objective_value"] = *f.objective_value;
  if (!instance.is_null()) doc["instance"] = instance;
  return doc;
}

AssignmentDistribution solution_from_json(const json& doc) {
  try {
    const auto open = doc.at("open_set").get<std::vector<LocationId>>();
    const int n = doc.at("num_points").get<int>();
    std::map<LocationId, int> slot;
    for (std::size_t s = 0; s < open.size(); ++s) slot[open[s]] = static_cast<int>(s);
    if (slot.size() != open.size() || open.empty() || n < 0) throw InputError("solution: malformed open set");
    auto slot_of = [&](LocationId i) {
      const auto it = slot.find(i);
      if (it == slot.end()) throw InputError("solution: location " + std::to_string(i) + " is not open");
      return it->second;
    };
    FractionalAssignment f;
    f.x = MatrixXd::Zero(static_cast<Eigen::Index>(open.size()), n);
    for (const auto& t : doc.at("x")) {
      const int j = t.at(1).get<int>();
      if (j < 0 || j >= n) throw InputError("solution: point id out of range");
      f.x(slot_of(t.at(0).get<LocationId>()), j) = t.at(2).get<double>();
    }
    for (const auto& p : doc.at("pairs")) f.pairs.emplace_back(p.at(0).get<int>(), p.at(1).get<int>());
    const auto z = doc.at("z").get<std::vector<double>>();
    if (z.size() != f.pairs.size()) throw InputError("solution: one z value per pair required");
    f.z = Eigen::Map<const VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
    f.z_pair = MatrixXd::Zero(static_cast<Eigen::Index>(f.pairs.size()), static_cast<Eigen::Index>(open.size()));
    for (const auto& t : doc.at("z_pair")) {
      const int e = t.at(0).get<int>();
      if (e < 0 || e >= static_cast<int>(f.pairs.size())) throw InputError("solution: pair index out of range");
      f.z_pair(e, slot_of(t.at(1).get<LocationId>())) = t.at(2).get<double>();
    }
    if (doc.contains("objective_value")) f.objective_value = doc["objective_value"].get<double>();
    validate_rounding_input(f.x, f.pairs, f.z_pair, f.z);
    return AssignmentDistribution(open, std::move(f), doc.at("master_seed").get<std::uint64_t>(),
                                  guarantee_from_json(doc.at("guarantee")));
  } catch (const json::exception& e) {
    throw InputError(std::string("solution file: ") + e.what());
  }
}

void write_solution(const AssignmentDistribution& dist, const std::string& path, const json& instance) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << solution_to_json(dist, instance).dump(1) << '\n';
}

LoadedSolution read_solution(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("solution file is not valid JSON: ") + e.what());
  }
  LoadedSolution out{solution_from_json(doc), doc.value("instance", json())};
  return out;
}

}  // namespace spc
