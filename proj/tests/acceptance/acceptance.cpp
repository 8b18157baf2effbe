// Acceptance battery: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Reference values come from the brute-force oracles.

#include "../oracles.hpp"

#include "spc/framework.hpp"
#include "spc/harness.hpp"
#include "spc/rounding.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>

#include <unistd.h>

using namespace spc;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;
};

class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (ok) return;
    if (failures_ < 3) first_ += (first_.empty() ? "" : "; ") + what;
    ++failures_;
  }
  Outcome done(const std::string& summary) const {
    if (failures_ == 0) return {true, summary};
    return {false, std::to_string(failures_) + " failures: " + first_};
  }

 private:
  int failures_ = 0;
  std::string first_;
};

std::string fmt(double v) {
  std::ostringstream s;
  s.precision(4);
  s << v;
  return s.str();
}

std::vector<double> weights_for(int n, std::mt19937_64& gen) {
  std::vector<double> w(n);
  for (auto& x : w) x = 1.0 + static_cast<double>(gen() % 3);
  return w;
}

double max_service(const MetricInstance& inst, const std::vector<LocationId>& phi) {
  double r = 0.0;
  for (PointId j = 0; j < inst.num_points(); ++j) r = std::max(r, inst.distance(phi[j], j));
  return r;
}

/// Group sums against 2 psi |P| + 3 sigma.
void check_spc(Check& c, const EvaluationReport& rep, const std::string& tag) {
  for (std::size_t q = 0; q < rep.groups.size(); ++q) {
    const auto& g = rep.groups[q];
    c.expect(g.expected_separations <= g.spc_bound + 3.0 * g.standard_error + 1e-12,
             tag + " group " + std::to_string(q) + " sep " + fmt(g.expected_separations) + " > " + fmt(g.spc_bound));
  }
}

// 1 and 2 ------------------------------------------------------------------

struct RoundingStats {
  double marginal = 0.0;
  double separation = -1.0;  // worst excess over 2 z
};

RoundingStats rounding_battery() {
  std::mt19937_64 gen(1001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RoundingStats st;
  st.separation = -std::numeric_limits<double>::infinity();
  for (int f = 0; f < 20; ++f) {
    const int nl = 1 + static_cast<int>(gen() % 4);
    const int nv = 2 + static_cast<int>(gen() % 9);
    MatrixXd x(nl, nv);
    for (int v = 0; v < nv; ++v) {
      for (int l = 0; l < nl; ++l) x(l, v) = gen() % 4 == 0 ? 0.0 : u(gen);
      if (x.col(v).sum() == 0.0) x(gen() % nl, v) = 1.0;
      x.col(v) /= x.col(v).sum();
    }
    // Some columns share a profile so that z = 0 pairs occur.
    if (nv > 3) x.col(nv - 1) = x.col(0);
    std::vector<PointPair> pairs;
    for (int a = 0; a < nv; ++a)
      for (int b = a + 1; b < nv; ++b) pairs.emplace_back(a, b);
    MatrixXd zp(pairs.size(), nl);
    VectorXd z(pairs.size());
    for (std::size_t e = 0; e < pairs.size(); ++e) {
      zp.row(e) = (x.col(pairs[e].first) - x.col(pairs[e].second)).cwiseAbs().transpose();
      z(e) = 0.5 * zp.row(e).sum();
    }
    validate_rounding_input(x, pairs, zp, z);
    const KtRounder r(x);
    const int draws = 100000;
    MatrixXd hits = MatrixXd::Zero(nl, nv);
    std::vector<double> sep(pairs.size(), 0.0);
    for (int d = 0; d < draws; ++d) {
      CounterRng rng(5000 + f, static_cast<std::uint64_t>(d));
      const auto lab = r.draw(rng);
      for (int v = 0; v < nv; ++v) hits(lab[v], v) += 1;
      for (std::size_t e = 0; e < pairs.size(); ++e) sep[e] += lab[pairs[e].first] != lab[pairs[e].second];
    }
    st.marginal = std::max(st.marginal, (hits / draws - x).cwiseAbs().maxCoeff());
    for (std::size_t e = 0; e < pairs.size(); ++e) st.separation = std::max(st.separation, sep[e] / draws - 2.0 * z(e));
  }
  return st;
}

// 3 ------------------------------------------------------------------------

Outcome criterion3() {
  std::mt19937_64 gen(3003);
  Check c;
  EvaluateOptions eo;
  eo.trials = 10000;
  int runs = 0;
  for (int t = 0; t < 20; ++t) {
    const auto co = oracle::random_plane(10, gen);
    const auto sup = oracle::random_supplier(30, 10, gen);
    const auto fco = oracle::random_family(10, 6, gen);
    const auto fsup = oracle::random_family(30, 8, gen);
    const auto wco = weights_for(10, gen);
    const auto wsup = weights_for(10, gen);
    struct Case {
      const MetricInstance* inst;
      const ConstraintFamily* fam;
      Objective obj;
      LocationConstraint loc;
    };
    std::vector<Case> cases{
        {&co, &fco, Objective::center(), LocationConstraint::unrestricted()},
        {&co, &fco, Objective::center(), LocationConstraint::cardinality(3)},
        {&co, &fco, Objective::center(), LocationConstraint::knapsack(wco, 4.0)},
        {&sup, &fsup, Objective::supplier(), LocationConstraint::unrestricted()},
        {&sup, &fsup, Objective::supplier(), LocationConstraint::cardinality(3)},
        {&sup, &fsup, Objective::supplier(), LocationConstraint::knapsack(wsup, 4.0)},
        {&sup, &fsup, Objective::median(), LocationConstraint::unrestricted()},
        {&sup, &fsup, Objective::median(), LocationConstraint::cardinality(3)},
        {&sup, &fsup, Objective::means(), LocationConstraint::unrestricted()},
        {&sup, &fsup, Objective::means(), LocationConstraint::cardinality(3)},
    };
    for (const auto& cs : cases) {
      const auto d = solve_spc(*cs.inst, cs.obj, cs.loc, *cs.fam, static_cast<std::uint64_t>(t));
      const auto rep = evaluate(*cs.inst, d, *cs.fam, eo);
      check_spc(c, rep, "instance " + std::to_string(t) + " " + cs.obj.name() + "/" + cs.loc.name());
      ++runs;
    }
  }
  return c.done(std::to_string(runs) + " solves, every group within 2 psi |P| + 3 sigma");
}

// 4 ------------------------------------------------------------------------

Outcome criterion4() {
  std::mt19937_64 gen(4004);
  Check c;
  int runs = 0;
  double worst = -std::numeric_limits<double>::infinity();
  for (int t = 0; t < 24; ++t) {
    const int kind = t % 4;
    const Objective obj = kind == 0 ? Objective::center()
                          : kind == 1 ? Objective::supplier()
                          : kind == 2 ? Objective::median()
                                      : Objective::means();
    const int n = 4 + t % 3;
    const auto inst = kind == 0 ? oracle::random_plane(n, gen) : oracle::random_supplier(n, 3, gen);
    const auto fam = oracle::random_family(n, 3, gen);
    std::vector<int> all_locs(inst.num_locations());
    std::iota(all_locs.begin(), all_locs.end(), 0);
    std::vector<std::vector<int>> all;
    oracle::for_each_assignment(n, all_locs, [&](const std::vector<int>& phi) { all.push_back(phi); });

    double opt;
    if (obj.is_radius()) {
      opt = oracle::mixture_radius(inst, fam, all, oracle::all_distances(inst));
    } else {
      const int p = obj.exponent();
      std::vector<double> cost;
      for (const auto& phi : all) {
        double s = 0.0;
        for (PointId j = 0; j < n; ++j) s += std::pow(inst.distance(phi[j], j), p);
        cost.push_back(s);
      }
      const auto m = oracle::best_mixture(fam, all, cost);
      opt = m ? std::pow(static_cast<double>(*m), 1.0 / p) : std::numeric_limits<double>::infinity();
    }
    const auto d = solve_spc(inst, obj, LocationConstraint::unrestricted(), fam, static_cast<std::uint64_t>(t));
    const double got = d.guarantee().achieved;
    worst = std::max(worst, got - opt);
    c.expect(got <= opt + 1e-6, obj.name() + " instance " + std::to_string(t) + ": " + fmt(got) + " > " + fmt(opt));
    ++runs;
  }
  return c.done(std::to_string(runs) + " instances, worst recorded - optimum " + fmt(worst));
}

// 5 ------------------------------------------------------------------------

/// Optimal k-center radius over distributions whose draws open at most k
/// centers, each serving itself, subject to the SPC budgets.
double centroid_optimum(const MetricInstance& inst, const ConstraintFamily& fam, int k) {
  const int n = inst.num_points();
  std::vector<std::vector<int>> all;
  oracle::for_each_subset(n, k, [&](const std::vector<int>& s) {
    std::vector<int> rest;
    for (int j = 0; j < n; ++j)
      if (std::find(s.begin(), s.end(), j) == s.end()) rest.push_back(j);
    std::vector<int> phi(n);
    for (int i : s) phi[i] = i;
    oracle::for_each_assignment(static_cast<int>(rest.size()), s, [&](const std::vector<int>& part) {
      for (std::size_t r = 0; r < rest.size(); ++r) phi[rest[r]] = part[r];
      all.push_back(phi);
    });
  });
  auto radii = oracle::all_distances(inst);
  std::vector<double> worst;
  for (const auto& phi : all) {
    double r = 0.0;
    for (int j = 0; j < n; ++j) r = std::max(r, inst.distance(phi[j], j));
    worst.push_back(r);
  }
  auto feasible = [&](double r) {
    std::vector<std::vector<int>> keep;
    for (std::size_t t = 0; t < all.size(); ++t)
      if (worst[t] <= r + 1e-12) keep.push_back(all[t]);
    return oracle::best_mixture(fam, keep, std::vector<double>(keep.size(), 0.0)).has_value();
  };
  std::size_t lo = 0, hi = radii.size() - 1;
  if (!feasible(radii[hi])) return std::numeric_limits<double>::infinity();
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (feasible(radii[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return radii[lo];
}

Outcome criterion5() {
  std::mt19937_64 gen(5005);
  Check c;
  EvaluateOptions eo;
  eo.trials = 10000;
  double worst_ratio = 0.0;
  int runs = 0;
  for (int t = 0; t < 15; ++t) {
    const int n = 5 + t % 5;
    const int k = 1 + t % 3;
    const auto inst = oracle::random_plane(n, gen);
    const auto fam = oracle::random_family(n, 3, gen);
    const double opt = centroid_optimum(inst, fam, k);
    const auto d = solve_kcenter_spc_cc(inst, k, fam, static_cast<std::uint64_t>(t));
    const double got = d.guarantee().achieved;
    const std::string tag = "instance " + std::to_string(t);
    c.expect(got <= 3.0 * opt + 1e-9, tag + ": radius " + fmt(got) + " > 3 * " + fmt(opt));
    if (opt > 0) worst_ratio = std::max(worst_ratio, got / opt);
    c.expect(static_cast<int>(d.open_set().size()) <= k, tag + ": too many centres");
    for (std::uint64_t s = 0; s < 2000; ++s) {
      const auto phi = draw_assignment(d, s, &inst);
      bool self = true;
      for (LocationId i : d.open_set()) self = self && phi[i] == i;
      c.expect(self, tag + ": draw " + std::to_string(s) + " moves a centre");
      c.expect(max_service(inst, phi) <= got + 1e-12, tag + ": draw exceeds recorded radius");
    }
    check_spc(c, evaluate(inst, d, fam, eo), tag);
    ++runs;
  }
  return c.done(std::to_string(runs) + " instances, worst radius / optimum " + fmt(worst_ratio));
}

// 6 ------------------------------------------------------------------------

Outcome criterion6() {
  std::mt19937_64 gen(6006);
  Check c;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 8 + t % 8;
    const int k = 2 + t % 3;
    const auto inst = oracle::random_plane(n, gen);
    const auto fam = oracle::random_family(n, 5, gen);
    const auto d = solve_spc(inst, Objective::center(), LocationConstraint::cardinality(k), fam,
                             static_cast<std::uint64_t>(t));
    const auto phi = draw_assignment(d, static_cast<std::uint64_t>(t), &inst);
    const auto r = reassign_centroid(inst, d.open_set(), phi);
    const std::string tag = "output " + std::to_string(t);
    c.expect(static_cast<int>(r.open_set.size()) <= k, tag + ": open set grew");
    for (LocationId i : r.open_set) c.expect(r.assignment[i] == i, tag + ": centre not self-assigned");
    for (PointId a = 0; a < n; ++a) {
      for (PointId b = a + 1; b < n; ++b)
        c.expect((phi[a] == phi[b]) == (r.assignment[a] == r.assignment[b]), tag + ": co-assignment changed");
      const double before = inst.distance(phi[a], a), after = inst.distance(r.assignment[a], a);
      c.expect(after <= 2.0 * before + 1e-9, tag + ": inflation above 2");
      if (before > 0) worst = std::max(worst, after / before);
    }
  }
  return c.done("100 reassignments, worst inflation " + fmt(worst));
}

// 7 ------------------------------------------------------------------------

std::vector<std::vector<PointId>> random_cliques(int n, std::mt19937_64& gen) {
  const int labels = 2 + static_cast<int>(gen() % static_cast<std::uint64_t>(n - 1));
  std::vector<std::vector<PointId>> by(labels);
  for (int j = 0; j < n; ++j) by[gen() % labels].push_back(j);
  std::vector<std::vector<PointId>> out;
  for (auto& c : by)
    if (!c.empty()) out.push_back(c);
  std::sort(out.begin(), out.end());
  return out;
}

Outcome criterion7() {
  std::mt19937_64 gen(7007);
  Check c;
  double worst[4] = {0, 0, 0, 0};
  const char* names[4] = {"k-center", "k-supplier", "knapsack-center", "knapsack-supplier"};
  for (int t = 0; t < 48; ++t) {
    const int variant = t % 4;
    const bool center = variant == 0 || variant == 2;
    const bool knapsack = variant >= 2;
    const int n = center ? (knapsack ? 6 + t % 5 : 6 + t % 7) : 6 + t % 7;
    const auto inst = center ? oracle::random_plane(n, gen) : oracle::random_supplier(n, 6, gen);
    const auto cliques = random_cliques(n, gen);
    const CliquePartition part(cliques, n);
    const int k = 2 + t % 2;
    const auto w = weights_for(inst.num_locations(), gen);
    const double budget = 4.0;
    const auto loc = knapsack ? LocationConstraint::knapsack(w, budget) : LocationConstraint::cardinality(k);
    const auto admits = [&](const std::vector<int>& s) {
      if (!knapsack) return true;
      double total = 0.0;
      for (int i : s) total += w[i];
      return total <= budget + 1e-12;
    };
    const double opt = oracle::ml_radius(inst, cliques, admits, knapsack ? inst.num_locations() : k);
    const Objective obj = center ? Objective::center() : Objective::supplier();
    const auto s = solve_ml(inst, obj, loc, part);
    const double bound = variant == 0 ? 2.0 : 3.0;
    const std::string tag = std::string(names[variant]) + " instance " + std::to_string(t);
    c.expect(s.radius <= bound * opt + 1e-9, tag + ": radius " + fmt(s.radius) + " > " + fmt(bound) + " * " + fmt(opt));
    if (opt > 0) worst[variant] = std::max(worst[variant], s.radius / opt);
    c.expect(loc.admits(s.open_set), tag + ": location constraint");
    for (const auto& q : cliques)
      for (PointId j : q) c.expect(s.assignment[j] == s.assignment[q.front()], tag + ": clique split");
    if (center)
      for (LocationId i : s.open_set) c.expect(s.assignment[i] == i, tag + ": centre not self-assigned");
  }
  return c.done("worst ratios " + fmt(worst[0]) + " / " + fmt(worst[1]) + " / " + fmt(worst[2]) + " / " +
                fmt(worst[3]));
}

// 8 ------------------------------------------------------------------------

Outcome criterion8() {
  std::mt19937_64 gen(8008);
  Check c;
  const int shapes[][2] = {{2, 12}, {3, 7}, {4, 6}, {5, 5}, {6, 4}, {2, 10}};
  int runs = 0;
  for (int t = 0; t < 30; ++t) {
    const int ns = shapes[t % 6][0], n = shapes[t % 6][1];
    const auto inst = oracle::random_supplier(n, ns + 1, gen);
    const auto fam = oracle::random_family(n, 4, gen);
    std::vector<LocationId> open(ns);
    std::iota(open.begin(), open.end(), 0);
    double best[3] = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
    oracle::for_each_assignment(n, open, [&](const std::vector<int>& phi) {
      const auto sep = oracle::separations(fam, phi);
      for (std::size_t q = 0; q < sep.size(); ++q)
        if (sep[q] > fam.groups()[q].budget() + 1e-12) return;
      double c1 = 0, c2 = 0, r = 0;
      for (PointId j = 0; j < n; ++j) {
        const double d = inst.distance(phi[j], j);
        c1 += d, c2 += d * d, r = std::max(r, d);
      }
      best[0] = std::min(best[0], r);
      best[1] = std::min(best[1], c1);
      best[2] = std::min(best[2], c2);
    });
    if (!std::isfinite(best[0])) continue;
    for (auto strategy : {LpStrategy::kExplicit, LpStrategy::kCuttingPlane}) {
      LpSolveOptions o;
      o.strategy = strategy;
      const std::string tag = "instance " + std::to_string(t) + (strategy == LpStrategy::kExplicit ? " explicit" : " cutting");
      for (int p : {1, 2}) {
        const auto sol = solve_lp(build_lp(inst, open, fam, LpMode::cost(p), false), o);
        c.expect(sol.has_value(), tag + ": cost LP infeasible");
        if (sol)
          c.expect(*sol->objective_value <= best[p] + 1e-7,
                   tag + " p=" + std::to_string(p) + ": " + fmt(*sol->objective_value) + " > " + fmt(best[p]));
      }
      c.expect(solve_lp(build_lp(inst, open, fam, LpMode::radius(best[0]), false), o).has_value(),
               tag + ": radius LP infeasible at an integral radius");
    }
    ++runs;
  }
  return c.done(std::to_string(runs) + " instances, both LP routes");
}

// 9 ------------------------------------------------------------------------

Outcome criterion9() {
  Check c;
  const auto dir = std::filesystem::temp_directory_path() / ("spc_accept_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  double alg_sum = 0, if_sum = 0, worst_cof = 0;
  int runs = 0;
  for (int seed = 0; seed < 5; ++seed) {
    const auto data = (dir / ("blobs" + std::to_string(seed) + ".csv")).string();
    // More blobs than clusters, so every k splits some natural group.
    write_synthetic_dataset(data, 1000, 4, 12, 900 + static_cast<std::uint64_t>(seed));
    for (const char* metric : {"f2", "f3"}) {
      nlohmann::json cfg{{"dataset", data},  {"n", 200},          {"k", {4, 6}},
                         {"metric", metric}, {"epsilon", 0.05},   {"seed", seed},
                         {"trials", 5000},   {"algorithms", {"alg1-means", "baseline-if"}}};
      const auto rows = run_experiment(ExperimentConfig::from_json(cfg), "");
      for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
        const auto& a = rows[i];
        const auto& b = rows[i + 1];
        const std::string tag = std::string(metric) + " seed " + std::to_string(seed) + " k " + std::to_string(a.k);
        c.expect(a.algorithm == "alg1-means" && b.algorithm == "baseline-if", tag + ": unexpected row order");
        c.expect(a.violation_percent < b.violation_percent,
                 tag + ": violation " + fmt(a.violation_percent) + " vs " + fmt(b.violation_percent));
        const double rel = std::abs(a.cost_of_fairness / b.cost_of_fairness - 1.0);
        worst_cof = std::max(worst_cof, rel);
        c.expect(rel <= 0.25, tag + ": cost of fairness " + fmt(a.cost_of_fairness) + " vs " + fmt(b.cost_of_fairness));
        alg_sum += a.violation_percent;
        if_sum += b.violation_percent;
        ++runs;
      }
    }
  }
  std::filesystem::remove_all(dir);
  return c.done(std::to_string(runs) + " runs, mean violation% " + fmt(alg_sum / runs) + " vs " + fmt(if_sum / runs) +
                ", worst cost-of-fairness gap " + fmt(100 * worst_cof) + "%");
}

// 10 -----------------------------------------------------------------------

/// Whether some distribution over gadget solutions meets the budget at the
/// target objective value.
bool gadget_feasible(const Gadget& g, const ConstraintFamily& fam, const Objective& obj) {
  const auto& inst = g.instance;
  const int n = inst.num_points();
  if (obj.is_radius()) {
    std::set<std::vector<int>> seen;
    auto collect = [&](const std::vector<int>& s) {
      std::vector<std::vector<int>> allowed(n);
      for (PointId j = 0; j < n; ++j)
        for (int i : s)
          if (inst.distance(i, j) <= g.target_value + 1e-12) allowed[j].push_back(i);
      std::vector<int> phi(n);
      std::function<void(int)> rec = [&](int j) {
        if (j == n) {
          seen.insert(phi);
          return;
        }
        for (int i : allowed[j]) {
          phi[j] = i;
          rec(j + 1);
        }
      };
      rec(0);
    };
    if (obj.kind == ObjectiveKind::kCenter) {
      oracle::for_each_subset(inst.num_locations(), g.k, collect);
    } else {
      std::vector<int> all(inst.num_locations());
      std::iota(all.begin(), all.end(), 0);
      collect(all);
    }
    const std::vector<std::vector<int>> list(seen.begin(), seen.end());
    return oracle::best_mixture(fam, list, std::vector<double>(list.size(), 0.0)).has_value();
  }
  std::vector<int> locs(inst.num_locations());
  std::iota(locs.begin(), locs.end(), 0);
  std::vector<std::vector<int>> all;
  std::vector<double> cost;
  const int p = obj.exponent();
  oracle::for_each_assignment(n, locs, [&](const std::vector<int>& phi) {
    double s = 0.0;
    for (PointId j = 0; j < n; ++j) s += std::pow(inst.distance(phi[j], j), p);
    all.push_back(phi);
    cost.push_back(s);
  });
  const auto m = oracle::best_mixture(fam, all, cost);
  return m && static_cast<double>(*m) <= std::pow(g.target_value, p) + 1e-9;
}

Outcome criterion10() {
  std::mt19937_64 gen(10010);
  Check c;
  int yes = 0, no = 0;
  for (int t = 0; t < 10; ++t) {
    Graph graph;
    const int n = 4 + t % 3;
    for (int v = 0; v < n; ++v) graph.nodes.push_back("v" + std::to_string(v));
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (gen() % 2 == 0) graph.edges.emplace_back(a, b);
    const int k = 2 + t % 2;
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), gen);
    const std::vector<int> terminals(order.begin(), order.begin() + k);
    const int cut = oracle::min_kcut(n, graph.edges, terminals);
    const int gamma = t % 2 == 0 || cut == 0 ? cut : cut - 1;
    const bool expect = cut <= gamma;
    (expect ? yes : no) += 1;
    for (auto obj : {Objective::center(), Objective::supplier(), Objective::median(), Objective::means()}) {
      const auto [gadget, fam] = generate_kcut_gadget(graph, terminals, gamma, obj);
      const bool got = gadget_feasible(gadget, fam, obj);
      c.expect(got == expect, "graph " + std::to_string(t) + " " + obj.name() + ": cut " + std::to_string(cut) +
                                  " gamma " + std::to_string(gamma) + " solver says " + (got ? "yes" : "no"));
    }
  }
  return c.done("10 graphs x 4 objectives (" + std::to_string(yes) + " yes, " + std::to_string(no) + " no instances)");
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;
  int failed = 0;
  auto report = [&](int id, const std::string& name, const Outcome& o, double secs) {
    std::printf("criterion %2d %-32s %s  (%.1fs) %s\n", id, name.c_str(), o.pass ? "PASS" : "FAIL", secs,
                o.detail.c_str());
    std::fflush(stdout);
    failed += !o.pass;
  };
  auto timed = [&](int id, const std::string& name, auto&& fn) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    report(id, name, o, std::chrono::duration<double>(Clock::now() - t0).count());
  };

  const auto t0 = Clock::now();
  RoundingStats rs;
  std::string rounding_error;
  try {
    rs = rounding_battery();
  } catch (const std::exception& e) {
    rounding_error = e.what();
  }
  const double rsecs = std::chrono::duration<double>(Clock::now() - t0).count();
  if (!rounding_error.empty()) {
    report(1, "rounding marginals", {false, "threw: " + rounding_error}, rsecs);
    report(2, "rounding separation", {false, "threw: " + rounding_error}, 0.0);
  } else {
    report(1, "rounding marginals", {rs.marginal <= 0.01 && rsecs < 60.0, "max error " + fmt(rs.marginal)}, rsecs);
    report(2, "rounding separation", {rs.separation <= 0.01, "worst excess over 2z " + fmt(rs.separation)}, 0.0);
  }
  timed(3, "end-to-end SPC bound", criterion3);
  timed(4, "unrestricted tightness", [] {
    const auto s = Clock::now();
    auto o = criterion4();
    if (std::chrono::duration<double>(Clock::now() - s).count() >= 300.0) o = {false, "over 5 minutes; " + o.detail};
    return o;
  });
  timed(5, "k-center SPC with centroids", criterion5);
  timed(6, "centroid reassignment", criterion6);
  timed(7, "must-link ratios", criterion7);
  timed(8, "LP relaxation validity", criterion8);
  timed(9, "experimental ordering", criterion9);
  timed(10, "gadget soundness", [] {
    const auto s = Clock::now();
    auto o = criterion10();
    if (std::chrono::duration<double>(Clock::now() - s).count() >= 120.0) o = {false, "over 2 minutes; " + o.detail};
    return o;
  });
  std::printf("%d of 10 criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
