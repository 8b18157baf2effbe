#include "spc/vanilla.hpp"

#include "spc/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace spc {

namespace {

double raise(double d, int p) { return p == 2 ? d * d : d; }

std::vector<LocationId> normalized_open(std::vector<LocationId> open) {
  std::sort(open.begin(), open.end());
  open.erase(std::unique(open.begin(), open.end()), open.end());
  return open;
}

void require_k(int k) {
  if (k < 1) throw InputError("k must be at least 1");
}

void require_tau(double tau) {
  if (!(tau >= 0.0)) throw InputError("radius threshold must be nonnegative");
}

// Cost-objective value sum_j min_{i in open} d(i, j)^p.
double open_set_cost(const MetricInstance& inst, std::span<const LocationId> open, int p) {
  double total = 0.0;
  for (PointId j = 0; j < inst.num_points(); ++j) {
    double best = std::numeric_limits<double>::infinity();
    for (LocationId i : open) best = std::min(best, inst.distance(i, j));
    total += raise(best, p);
  }
  return total;
}

VanillaSolution local_search(const MetricInstance& inst, const Objective& objective, int k, double epsilon) {
  require_k(k);
  const int p = objective.exponent();
  const int m = inst.num_locations();
  k = std::min(k, m);
  // Greedy start: repeatedly add the location that lowers the cost most.
  std::vector<LocationId> open;
  std::vector<bool> is_open(m, false);
  while (static_cast<int>(open.size()) < k) {
    LocationId pick = -1;
    double best = std::numeric_limits<double>::infinity();
    for (LocationId i = 0; i < m; ++i) {
      if (is_open[i]) continue;
      open.push_back(i);
      const double c = open_set_cost(inst, open, p);
      open.pop_back();
      if (c < best) best = c, pick = i;
    }
    open.push_back(pick);
    is_open[pick] = true;
  }
  double cost = open_set_cost(inst, open, p);
  const double factor = 1.0 - epsilon / k;
  bool improved = true;
  while (improved && cost > 0.0) {
    improved = false;
    for (std::size_t s = 0; s < open.size() && !improved; ++s) {
      for (LocationId cand = 0; cand < m && !improved; ++cand) {
        if (is_open[cand]) continue;
        const LocationId old = open[s];
        open[s] = cand;
        const double c = open_set_cost(inst, open, p);
        if (c < factor * cost) {
          is_open[old] = false;
          is_open[cand] = true;
          cost = c;
          improved = true;
        } else {
          open[s] = old;
        }
      }
    }
  }
  return nearest_solution(inst, objective, open);
}

template <typename Picker>
std::optional<VanillaSolution> threshold_supplier(const MetricInstance& inst, double tau, Picker pick_location,
                                                  const Objective& objective) {
  require_tau(tau);
  const int n = inst.num_points();
  std::vector<bool> covered(n, false);
  std::vector<LocationId> open;
  for (PointId j = 0; j < n; ++j) {
    if (covered[j]) continue;
    const LocationId i = pick_location(j);
    if (i < 0) return std::nullopt;
    open.push_back(i);
    for (PointId o = 0; o < n; ++o)
      if (inst.point_distance(j, o) <= 2.0 * tau) covered[o] = true;
  }
  auto sol = nearest_solution(inst, objective, open);
  sol.threshold = tau;
  return sol;
}

}  // namespace

double assignment_objective(const MetricInstance& inst, const Objective& objective,
                            std::span<const LocationId> assignment) {
  if (objective.is_radius()) {
    double r = 0.0;
    for (PointId j = 0; j < inst.num_points(); ++j) r = std::max(r, inst.distance(assignment[j], j));
    return r;
  }
  const int p = objective.exponent();
  double total = 0.0;
  for (PointId j = 0; j < inst.num_points(); ++j) total += raise(inst.distance(assignment[j], j), p);
  return p == 2 ? std::sqrt(total) : total;
}

VanillaSolution nearest_solution(const MetricInstance& inst, const Objective& objective, std::vector<LocationId> open) {
  VanillaSolution sol;
  sol.open_set = normalized_open(std::move(open));
  if (sol.open_set.empty()) throw InputError("open set is empty");
  sol.assignment.resize(inst.num_points());
  for (PointId j = 0; j < inst.num_points(); ++j) {
    LocationId best = sol.open_set.front();
    for (LocationId i : sol.open_set)
      if (inst.distance(i, j) < inst.distance(best, j)) best = i;
    sol.assignment[j] = best;
  }
  sol.objective_value = assignment_objective(inst, objective, sol.assignment);
  return sol;
}

std::optional<VanillaSolution> threshold_k_center(const MetricInstance& inst, int k, double tau) {
  require_k(k);
  if (!inst.coincident()) throw InputError("threshold k-center requires points and locations to coincide");
  int opened = 0;
  auto sol = threshold_supplier(
      inst, tau, [&](PointId j) { return ++opened > k ? -1 : j; }, Objective::center());
  return sol;
}

VanillaSolution gonzalez_k_center(const MetricInstance& inst, int k, PointId start) {
  require_k(k);
  if (!inst.coincident()) throw InputError("farthest-point traversal requires points and locations to coincide");
  const int n = inst.num_points();
  if (start < 0 || start >= n) throw InputError("start point out of range");
  std::vector<LocationId> open{start};
  std::vector<double> dist(n);
  for (PointId j = 0; j < n; ++j) dist[j] = inst.point_distance(start, j);
  while (static_cast<int>(open.size()) < k) {
    const auto far = std::max_element(dist.begin(), dist.end());
    if (*far <= 0.0) break;
    const PointId c = static_cast<PointId>(far - dist.begin());
    open.push_back(c);
    for (PointId j = 0; j < n; ++j) dist[j] = std::min(dist[j], inst.point_distance(c, j));
  }
  return nearest_solution(inst, Objective::center(), open);
}

VanillaSolution gonzalez_k_center_seeded(const MetricInstance& inst, int k, std::uint64_t seed) {
  CounterRng rng(seed, 0);
  return gonzalez_k_center(inst, k, static_cast<PointId>(rng.below(static_cast<std::uint64_t>(inst.num_points()))));
}

std::optional<VanillaSolution> k_supplier(const MetricInstance& inst, int k, double tau) {
  require_k(k);
  int opened = 0;
  return threshold_supplier(
      inst, tau,
      [&](PointId j) -> LocationId {
        if (++opened > k) return -1;
        LocationId best = 0;
        for (LocationId i = 1; i < inst.num_locations(); ++i)
          if (inst.distance(i, j) < inst.distance(best, j)) best = i;
        return inst.distance(best, j) <= tau ? best : -1;
      },
      Objective::supplier());
}

std::optional<VanillaSolution> knapsack_center(const MetricInstance& inst, std::span<const double> weights,
                                               double budget, double tau) {
  if (static_cast<int>(weights.size()) != inst.num_locations())
    throw InputError("knapsack weights must hold one value per location");
  double spent = 0.0;
  const Objective objective = inst.coincident() ? Objective::center() : Objective::supplier();
  return threshold_supplier(
      inst, tau,
      [&](PointId j) -> LocationId {
        LocationId best = -1;
        for (LocationId i = 0; i < inst.num_locations(); ++i)
          if (inst.distance(i, j) <= tau && (best < 0 || weights[i] < weights[best])) best = i;
        if (best < 0) return -1;
        spent += weights[best];
        return spent <= budget + 1e-9 ? best : -1;
      },
      objective);
}

VanillaSolution lloyd_k_means(const MetricInstance& inst, int k, std::uint64_t seed, int max_iters) {
  require_k(k);
  if (!inst.has_features()) throw InputError("Lloyd's algorithm needs a feature-backed instance");
  const int n = inst.num_points();
  k = std::min(k, n);
  const MatrixXd& f = inst.features();
  MatrixXd x(n, f.cols());
  for (PointId j = 0; j < n; ++j) x.row(j) = f.row(inst.point_site(j));

  // k-means++ seeding.
  CounterRng rng(seed, 0);
  MatrixXd centers(k, x.cols());
  centers.row(0) = x.row(static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n))));
  VectorXd d2 = (x.rowwise() - centers.row(0)).rowwise().squaredNorm();
  for (int c = 1; c < k; ++c) {
    const double total = d2.sum();
    Eigen::Index pick = 0;
    if (total > 0.0) {
      double u = rng.uniform() * total;
      for (pick = 0; pick < n - 1; ++pick) {
        u -= d2(pick);
        if (u < 0.0) break;
      }
    }
    centers.row(c) = x.row(pick);
    d2 = d2.cwiseMin((x.rowwise() - centers.row(c)).rowwise().squaredNorm());
  }

  std::vector<int> label(n, -1);
  for (int iter = 0; iter < max_iters; ++iter) {
    bool changed = false;
    for (PointId j = 0; j < n; ++j) {
      Eigen::Index best;
      (centers.rowwise() - x.row(j)).rowwise().squaredNorm().minCoeff(&best);
      if (label[j] != best) label[j] = static_cast<int>(best), changed = true;
    }
    if (!changed && iter > 0) break;
    MatrixXd sums = MatrixXd::Zero(k, x.cols());
    std::vector<int> count(k, 0);
    for (PointId j = 0; j < n; ++j) {
      sums.row(label[j]) += x.row(j);
      ++count[label[j]];
    }
    for (int c = 0; c < k; ++c) {
      if (count[c] > 0) {
        centers.row(c) = sums.row(c) / count[c];
        continue;
      }
      // Empty cluster: move its center to the point farthest from its own.
      Eigen::Index far = 0;
      double worst = -1.0;
      for (PointId j = 0; j < n; ++j) {
        const double d = (x.row(j) - centers.row(label[j])).squaredNorm();
        if (d > worst) worst = d, far = j;
      }
      centers.row(c) = x.row(far);
      label[far] = c;
    }
  }

  std::vector<LocationId> open;
  for (int c = 0; c < k; ++c) {
    LocationId best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (LocationId i = 0; i < inst.num_locations(); ++i) {
      const double d = (f.row(inst.location_site(i)) - centers.row(c)).squaredNorm();
      if (d < best_d) best_d = d, best = i;
    }
    open.push_back(best);
  }
  return nearest_solution(inst, Objective::means(), open);
}

VanillaSolution local_search_k_median(const MetricInstance& inst, int k, double epsilon) {
  return local_search(inst, Objective::median(), k, epsilon);
}

double binary_search_radius(std::span<const double> candidates, const std::function<bool(double)>& feasible) {
  if (candidates.empty()) throw InputError("no candidate radii");
  if (!feasible(candidates.back())) throw InfeasibleError("no candidate radius is feasible");
  if (feasible(candidates.front())) return candidates.front();
  std::size_t lo = 0, hi = candidates.size() - 1;
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (feasible(candidates[mid]))
      hi = mid;
    else
      lo = mid;
  }
  return candidates[hi];
}

double binary_search_radius(const MetricInstance& inst, const std::function<bool(double)>& feasible) {
  const auto radii = candidate_radii(inst);
  return binary_search_radius(radii, feasible);
}

VanillaSolution run_baseline(const MetricInstance& inst, const Objective& objective, const LocationConstraint& location,
                             const BaselineOptions& options) {
  validate_objective(inst, objective);
  location.validate(inst.num_locations());
  if (location.kind == LocationKind::kUnrestricted) {
    std::vector<LocationId> all(inst.num_locations());
    for (LocationId i = 0; i < inst.num_locations(); ++i) all[i] = i;
    return nearest_solution(inst, objective, std::move(all));
  }

  auto searched = [&](auto attempt) {
    const double tau = binary_search_radius(inst, [&](double t) { return attempt(t).has_value(); });
    return *attempt(tau);
  };

  if (location.kind == LocationKind::kKnapsack) {
    if (!objective.is_radius())
      throw InputError("knapsack locations are supported for center and supplier objectives only");
    return searched([&](double t) { return knapsack_center(inst, location.weights, location.budget, t); });
  }

  const int k = location.k;
  switch (objective.kind) {
    case ObjectiveKind::kCenter: return searched([&](double t) { return threshold_k_center(inst, k, t); });
    case ObjectiveKind::kSupplier: return searched([&](double t) { return k_supplier(inst, k, t); });
    case ObjectiveKind::kMeans:
      if (inst.has_features()) return lloyd_k_means(inst, k, options.seed, options.lloyd_max_iters);
      return local_search(inst, objective, k, options.local_search_epsilon);
    case ObjectiveKind::kMedian: return local_search_k_median(inst, k, options.local_search_epsilon);
  }
  throw InputError("unsupported objective");
}

}  // namespace spc
