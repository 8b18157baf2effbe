#include "oracles.hpp"

#include "spc/vanilla.hpp"

#include <doctest.h>

#include <random>

using namespace spc;

namespace {

/// Points at `ps`, locations at `ls`, on a line.
MetricInstance split_line(const std::vector<double>& ps, const std::vector<double>& ls) {
  std::vector<double> all = ps;
  all.insert(all.end(), ls.begin(), ls.end());
  const int n = static_cast<int>(all.size());
  MatrixXd d(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) d(a, b) = std::abs(all[a] - all[b]);
  std::vector<int> pi(ps.size()), li(ls.size());
  std::iota(pi.begin(), pi.end(), 0);
  std::iota(li.begin(), li.end(), static_cast<int>(ps.size()));
  return MetricInstance::from_distances(d, pi, li);
}

void check_consistent(const MetricInstance& inst, const Objective& obj, const VanillaSolution& s) {
  REQUIRE(static_cast<int>(s.assignment.size()) == inst.num_points());
  CHECK(std::is_sorted(s.open_set.begin(), s.open_set.end()));
  for (LocationId a : s.assignment) CHECK(std::binary_search(s.open_set.begin(), s.open_set.end(), a));
  CHECK(std::abs(assignment_objective(inst, obj, s.assignment) - s.objective_value) <= 1e-9);
}

}  // namespace

TEST_CASE("threshold k-center examples") {
  const auto same = oracle::line({2, 2, 2});
  const auto s0 = threshold_k_center(same, 1, 0.0);
  REQUIRE(s0);
  CHECK(s0->open_set == std::vector<LocationId>{0});
  CHECK(s0->objective_value == 0.0);

  const auto l = oracle::line({0, 1, 10, 11});
  const auto s = threshold_k_center(l, 2, 1.0);
  REQUIRE(s);
  CHECK(s->open_set == std::vector<LocationId>{0, 2});
  CHECK(s->objective_value <= 2.0);
  CHECK_FALSE(threshold_k_center(l, 1, 1.0));
  CHECK(oracle::k_radius(l, 1) == doctest::Approx(10.0));
  CHECK_THROWS_AS(threshold_k_center(l, 1, -1.0), InputError);
}

TEST_CASE("threshold k-center never fails at the optimum and separates centers") {
  std::mt19937_64 gen(31);
  for (int t = 0; t < 30; ++t) {
    const auto inst = oracle::random_plane(4 + static_cast<int>(gen() % 9), gen);
    for (int k = 1; k <= 3; ++k) {
      const double opt = oracle::k_radius(inst, k);
      const auto s = threshold_k_center(inst, k, opt);
      REQUIRE(s);
      CHECK(s->objective_value <= 2.0 * opt + 1e-9);
      CHECK(static_cast<int>(s->open_set.size()) <= k);
      check_consistent(inst, Objective::center(), *s);
      for (double tau : candidate_radii(inst)) {
        const auto r = threshold_k_center(inst, k, tau);
        if (!r) continue;
        for (std::size_t a = 0; a < r->open_set.size(); ++a)
          for (std::size_t b = a + 1; b < r->open_set.size(); ++b)
            CHECK(inst.point_distance(r->open_set[a], r->open_set[b]) > 2.0 * tau);
      }
    }
  }
}

TEST_CASE("farthest-point traversal") {
  const auto l = oracle::line({0, 1, 10, 11});
  const auto s = gonzalez_k_center(l, 2, 0);
  CHECK(s.open_set == std::vector<LocationId>{0, 3});
  CHECK(s.objective_value == doctest::Approx(1.0));
  CHECK(gonzalez_k_center(l, 4, 1).objective_value == 0.0);

  std::mt19937_64 gen(5);
  for (int t = 0; t < 10; ++t) {
    const auto inst = oracle::random_plane(20, gen);
    for (int k = 1; k <= 4; ++k) {
      const auto g = gonzalez_k_center_seeded(inst, k, t);
      CHECK(g.objective_value <= 2.0 * oracle::k_radius(inst, k) + 1e-9);
      check_consistent(inst, Objective::center(), g);
    }
  }
}

TEST_CASE("k-supplier examples") {
  const auto same = oracle::line({1, 1});
  const auto s = k_supplier(same, 1, 0.0);
  REQUIRE(s);
  CHECK(s->objective_value == 0.0);

  const auto two = split_line({0, 10}, {1, 9});
  const auto t = k_supplier(two, 2, 1.0);
  REQUIRE(t);
  CHECK(t->open_set == std::vector<LocationId>{0, 1});
  CHECK(t->objective_value == doctest::Approx(1.0));

  CHECK_FALSE(k_supplier(split_line({0, 10}, {5}), 1, 1.0));

  std::mt19937_64 gen(6);
  for (int i = 0; i < 20; ++i) {
    const auto inst = oracle::random_supplier(8, 5, gen);
    for (int k = 1; k <= 3; ++k) {
      const double opt = oracle::k_radius(inst, k);
      const auto r = k_supplier(inst, k, opt);
      REQUIRE(r);
      CHECK(r->objective_value <= 3.0 * opt + 1e-9);
      check_consistent(inst, Objective::supplier(), *r);
    }
  }
}

TEST_CASE("knapsack center examples") {
  const auto one = split_line({0}, {0});
  const std::vector<double> w1{2.0};
  const auto s = knapsack_center(one, w1, 3.0, 0.0);
  REQUIRE(s);
  CHECK(s->objective_value == 0.0);
  CHECK_FALSE(knapsack_center(one, w1, 1.0, 0.0));

  // Two far clusters, each with a cheap and an expensive location.
  const auto two = split_line({0, 1, 100, 101}, {0.5, 0.6, 100.5, 100.6});
  const std::vector<double> w{5, 1, 5, 1};
  const auto k = knapsack_center(two, w, 2.0, 1.0);
  REQUIRE(k);
  CHECK(k->open_set == std::vector<LocationId>{1, 3});
  CHECK(k->objective_value <= 3.0);

  std::mt19937_64 gen(14);
  std::uniform_real_distribution<double> u(1.0, 4.0);
  for (int i = 0; i < 20; ++i) {
    const auto inst = oracle::random_supplier(7, 5, gen);
    std::vector<double> wt(5);
    for (auto& x : wt) x = u(gen);
    const double budget = 6.0;
    const double opt = oracle::ml_radius(
        inst, [&] {
          std::vector<std::vector<PointId>> c;
          for (int j = 0; j < 7; ++j) c.push_back({j});
          return c;
        }(),
        [&](const std::vector<int>& s) {
          double total = 0;
          for (int x : s) total += wt[x];
          return total <= budget;
        },
        5);
    if (!std::isfinite(opt)) continue;
    const auto r = knapsack_center(inst, wt, budget, opt);
    REQUIRE(r);
    double spent = 0;
    for (int x : r->open_set) spent += wt[x];
    CHECK(spent <= budget + 1e-12);
    CHECK(r->objective_value <= 3.0 * opt + 1e-9);
  }
}

TEST_CASE("Lloyd k-means") {
  std::mt19937_64 gen(41);
  std::normal_distribution<double> g(0.0, 0.3);
  MatrixXd f(40, 2);
  for (int r = 0; r < 40; ++r) {
    const double cx = r < 20 ? 0.0 : 20.0;
    f(r, 0) = cx + g(gen);
    f(r, 1) = g(gen);
  }
  const auto inst = MetricInstance::from_features(f);

  const auto one = lloyd_k_means(inst, 1, 3);
  REQUIRE(one.open_set.size() == 1);
  const MatrixXd& x = inst.features();
  const Eigen::RowVectorXd mean = x.colwise().mean();
  int nearest = 0;
  for (int r = 1; r < 40; ++r)
    if ((x.row(r) - mean).norm() < (x.row(nearest) - mean).norm()) nearest = r;
  CHECK(one.open_set[0] == nearest);

  const auto two = lloyd_k_means(inst, 2, 3);
  REQUIRE(two.open_set.size() == 2);
  CHECK(two.open_set[0] < 20);
  CHECK(two.open_set[1] >= 20);
  check_consistent(inst, Objective::means(), two);
  CHECK(two.objective_value <= 1.5 * oracle::k_median_cost(inst, 2, 2));

  const auto again = lloyd_k_means(inst, 2, 3);
  CHECK(again.open_set == two.open_set);
  CHECK(again.assignment == two.assignment);
}

TEST_CASE("local search k-median") {
  std::mt19937_64 gen(51);
  const auto inst = oracle::random_plane(10, gen);
  const auto all = local_search_k_median(inst, 10);
  CHECK(all.objective_value == doctest::Approx(0.0));

  const auto sup = oracle::random_supplier(10, 4, gen);
  const auto full = local_search_k_median(sup, 4);
  double nearest = 0.0;
  for (int j = 0; j < 10; ++j) {
    double m = 1e300;
    for (int i = 0; i < 4; ++i) m = std::min(m, sup.distance(i, j));
    nearest += m;
  }
  CHECK(full.objective_value == doctest::Approx(nearest));

  for (int t = 0; t < 20; ++t) {
    const auto x = oracle::random_plane(10, gen);
    const auto s = local_search_k_median(x, 2);
    check_consistent(x, Objective::median(), s);
    CHECK(s.objective_value <= 5.0 * oracle::k_median_cost(x, 2, 1) + 1e-9);
  }
}

TEST_CASE("local search ends swap-stable") {
  std::mt19937_64 gen(61);
  for (int t = 0; t < 10; ++t) {
    const auto inst = oracle::random_plane(9, gen);
    const int k = 3;
    const auto s = local_search_k_median(inst, k, 1e-12);
    auto cost = [&](const std::vector<int>& open) {
      double c = 0;
      for (int j = 0; j < 9; ++j) {
        double m = 1e300;
        for (int i : open) m = std::min(m, inst.distance(i, j));
        c += m;
      }
      return c;
    };
    const double base = cost(s.open_set);
    CHECK(base == doctest::Approx(s.objective_value));
    for (std::size_t out = 0; out < s.open_set.size(); ++out)
      for (int in = 0; in < 9; ++in) {
        if (std::find(s.open_set.begin(), s.open_set.end(), in) != s.open_set.end()) continue;
        auto swapped = s.open_set;
        swapped[out] = in;
        CHECK(cost(swapped) >= base * (1.0 - 1e-9));
      }
  }
}

TEST_CASE("radius binary search") {
  const std::vector<double> c{0, 1, 2, 3};
  CHECK(binary_search_radius(c, [](double) { return true; }) == 0.0);
  const std::vector<double> zero{0.0};
  CHECK(binary_search_radius(zero, [](double) { return true; }) == 0.0);
  CHECK_THROWS_AS(binary_search_radius(c, [](double) { return false; }), InfeasibleError);
  const auto l = oracle::line({0, 1, 10, 11});
  CHECK(binary_search_radius(l, [&](double t) { return threshold_k_center(l, 2, t).has_value(); }) == 1.0);
}

TEST_CASE("baselines respect the location constraint") {
  std::mt19937_64 gen(71);
  for (int t = 0; t < 10; ++t) {
    const auto inst = oracle::random_plane(15, gen);
    for (auto obj : {Objective::center(), Objective::supplier(), Objective::median(), Objective::means()}) {
      for (const auto& loc : {LocationConstraint::unrestricted(), LocationConstraint::cardinality(3)}) {
        const auto s = run_baseline(inst, obj, loc, {static_cast<std::uint64_t>(t)});
        check_consistent(inst, obj, s);
        CHECK(loc.admits(s.open_set));
      }
    }
    std::vector<double> w(15);
    for (auto& x : w) x = 1.0 + static_cast<double>(gen() % 4);
    const auto ks = LocationConstraint::knapsack(w, 6.0);
    const auto s = run_baseline(inst, Objective::center(), ks);
    check_consistent(inst, Objective::center(), s);
    CHECK(ks.admits(s.open_set));
    CHECK_THROWS_AS(run_baseline(inst, Objective::median(), ks), InputError);
  }
}
