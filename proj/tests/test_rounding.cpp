#include "oracles.hpp"

#include "spc/rounding.hpp"

#include <doctest.h>

#include <random>

using namespace spc;

namespace {

struct Rounded {
  MatrixXd x;
  std::vector<PointPair> pairs;
  MatrixXd z_pair;
  VectorXd z;
};

Rounded with_pairs(MatrixXd x, std::vector<PointPair> pairs) {
  Rounded r{std::move(x), std::move(pairs), {}, {}};
  r.z_pair.resize(static_cast<Eigen::Index>(r.pairs.size()), r.x.rows());
  r.z.resize(static_cast<Eigen::Index>(r.pairs.size()));
  for (std::size_t e = 0; e < r.pairs.size(); ++e) {
    const auto [a, b] = r.pairs[e];
    r.z_pair.row(static_cast<Eigen::Index>(e)) = (r.x.col(a) - r.x.col(b)).cwiseAbs().transpose();
    r.z(static_cast<Eigen::Index>(e)) = 0.5 * r.z_pair.row(static_cast<Eigen::Index>(e)).sum();
  }
  return r;
}

MatrixXd random_stochastic(int labels, int elements, std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  MatrixXd x(labels, elements);
  for (int v = 0; v < elements; ++v) {
    for (int l = 0; l < labels; ++l) x(l, v) = gen() % 3 == 0 ? 0.0 : u(gen);
    if (x.col(v).sum() == 0.0) x(0, v) = 1.0;
    x.col(v) /= x.col(v).sum();
  }
  return x;
}

}  // namespace

TEST_CASE("a single label assigns everything to it") {
  const KtRounder r(MatrixXd::Ones(1, 5));
  CounterRng rng(1);
  CHECK(r.draw(rng) == std::vector<int>(5, 0));
}

TEST_CASE("integral input is returned unchanged") {
  MatrixXd x = MatrixXd::Zero(3, 4);
  x(2, 0) = x(0, 1) = x(1, 2) = x(2, 3) = 1.0;
  const KtRounder r(x);
  for (std::uint64_t d = 0; d < 50; ++d) {
    CounterRng rng(9, d);
    CHECK(r.draw(rng) == std::vector<int>{2, 0, 1, 2});
  }
}

TEST_CASE("identical columns are never separated") {
  MatrixXd x(2, 2);
  x << 0.5, 0.5, 0.5, 0.5;
  const KtRounder r(x);
  int first = 0;
  for (std::uint64_t d = 0; d < 4000; ++d) {
    CounterRng rng(3, d);
    const auto l = r.draw(rng);
    CHECK(l[0] == l[1]);
    first += l[0] == 0;
  }
  CHECK(first / 4000.0 == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("disjoint columns are always separated") {
  MatrixXd x(2, 2);
  x << 1.0, 0.0, 0.0, 1.0;
  const KtRounder r(x);
  for (std::uint64_t d = 0; d < 200; ++d) {
    CounterRng rng(4, d);
    CHECK(r.draw(rng) == std::vector<int>{0, 1});
  }
}

TEST_CASE("marginals and separation bounds hold empirically") {
  std::mt19937_64 gen(77);
  for (int t = 0; t < 5; ++t) {
    const int nl = 2 + static_cast<int>(gen() % 3), nv = 3 + static_cast<int>(gen() % 5);
    const MatrixXd x = random_stochastic(nl, nv, gen);
    const KtRounder r(x);
    const int draws = 40000;
    MatrixXd hits = MatrixXd::Zero(nl, nv);
    MatrixXd sep = MatrixXd::Zero(nv, nv);
    for (int d = 0; d < draws; ++d) {
      CounterRng rng(100 + t, static_cast<std::uint64_t>(d));
      const auto l = r.draw(rng);
      for (int v = 0; v < nv; ++v) {
        hits(l[v], v) += 1;
        for (int w = v + 1; w < nv; ++w) sep(v, w) += l[v] != l[w];
      }
    }
    hits /= draws;
    sep /= draws;
    CHECK((hits - x).cwiseAbs().maxCoeff() <= 0.01);
    for (int v = 0; v < nv; ++v)
      for (int w = v + 1; w < nv; ++w) CHECK(sep(v, w) <= (x.col(v) - x.col(w)).cwiseAbs().sum() + 0.01);
  }
}

TEST_CASE("draws are a pure function of seed and index") {
  std::mt19937_64 gen(8);
  const KtRounder r(random_stochastic(4, 30, gen));
  for (std::uint64_t d = 0; d < 20; ++d) {
    CounterRng a(55, d), b(55, d);
    CHECK(r.draw(a) == r.draw(b));
  }
  bool differs = false;
  for (std::uint64_t d = 1; d < 20 && !differs; ++d) {
    CounterRng a(55, 0), b(55, d);
    differs = r.draw(a) != r.draw(b);
  }
  CHECK(differs);
}

TEST_CASE("phase cap") {
  const KtRounder r(MatrixXd::Constant(4, 6, 0.25));
  CHECK(r.phase_cap() == 64 * 6 * 4);
  CHECK(std::is_base_of_v<NumericalError, RoundingError>);
}

TEST_CASE("malformed rounding input is rejected") {
  MatrixXd x(2, 2);
  x << 0.7, 0.2, 0.3, 0.8;
  auto ok = with_pairs(x, {PointPair(0, 1)});
  CounterRng rng(1);
  CHECK_NOTHROW(validate_rounding_input(ok.x, ok.pairs, ok.z_pair, ok.z));
  CHECK(kt_round(ok.x, ok.pairs, ok.z_pair, ok.z, rng).assignment.size() == 2);

  auto bad_sum = ok;
  bad_sum.x(0, 0) = 0.9;
  CHECK_THROWS_AS(validate_rounding_input(bad_sum.x, bad_sum.pairs, bad_sum.z_pair, bad_sum.z), InputError);

  auto low_z = ok;
  low_z.z_pair(0, 0) = 0.1;
  CHECK_THROWS_AS(validate_rounding_input(low_z.x, low_z.pairs, low_z.z_pair, low_z.z), InputError);

  auto half = ok;
  half.z(0) += 0.2;
  CHECK_THROWS_AS(validate_rounding_input(half.x, half.pairs, half.z_pair, half.z), InputError);

  auto shape = ok;
  shape.z.resize(2);
  CHECK_THROWS_AS(validate_rounding_input(shape.x, shape.pairs, shape.z_pair, shape.z), InputError);

  auto range = ok;
  range.pairs = {PointPair(0, 5)};
  CHECK_THROWS_AS(validate_rounding_input(range.x, range.pairs, range.z_pair, range.z), InputError);

  CHECK_THROWS_AS(KtRounder(MatrixXd::Zero(2, 1)), InputError);
  CHECK_THROWS_AS(KtRounder(MatrixXd(0, 3)), InputError);
  CHECK_THROWS_AS(kt_round(bad_sum.x, bad_sum.pairs, bad_sum.z_pair, bad_sum.z, rng), InputError);
}
