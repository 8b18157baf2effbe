#include "spc/assign_lp.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <sstream>

namespace spc {

AssignmentLp build_lp(const MetricInstance& inst, const std::vector<LocationId>& open_set,
                      const ConstraintFamily& family, const LpMode& mode, bool centroid) {
  if (open_set.empty()) throw InputError("assignment LP needs a nonempty open set");
  std::vector<LocationId> sorted = open_set;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw InputError("open set repeats a location");
  for (LocationId i : open_set)
    if (i < 0 || i >= inst.num_locations()) throw InputError("open location " + std::to_string(i) + " out of range");
  family.validate(inst.num_points());
  if (mode.is_radius() && !(mode.limit >= 0.0)) throw InputError("radius limit must be nonnegative");
  if (!mode.is_radius() && mode.exponent != 1 && mode.exponent != 2) throw InputError("cost exponent must be 1 or 2");

  AssignmentLp lp;
  lp.open_set_ = open_set;
  lp.num_points_ = inst.num_points();
  lp.mode_ = mode;
  lp.centroid_ = centroid;
  lp.pairs_ = family.distinct_pairs();
  for (const auto& g : family.groups()) {
    std::vector<int> idx;
    for (const auto& p : g.pairs)
      idx.push_back(static_cast<int>(std::lower_bound(lp.pairs_.begin(), lp.pairs_.end(), p) - lp.pairs_.begin()));
    lp.group_pairs_.push_back(std::move(idx));
    lp.group_budgets_.push_back(g.budget());
  }
  lp.service_ = inst.service_distances(open_set);

  const int ns = lp.num_open();
  const int n = lp.num_points_;
  lp.allowed_.setConstant(ns, n, true);
  if (mode.is_radius()) lp.allowed_ = lp.service_.array() <= mode.limit + kMetricTolerance;

  if (centroid) {
    for (int s = 0; s < ns; ++s) {
      const int site = inst.location_site(open_set[s]);
      PointId match = -1;
      for (PointId j = 0; j < n && match < 0; ++j)
        if (inst.point_site(j) == site) match = j;
      if (match < 0)
        throw InputError("centroid rows need every open location to be a point; location " +
                         std::to_string(open_set[s]) + " is not");
      lp.centroid_points_.push_back(match);
    }
    for (int s = 0; s < ns; ++s) {
      const PointId c = lp.centroid_points_[s];
      const bool keep = lp.allowed_(s, c);
      lp.allowed_.col(c).setConstant(false);
      lp.allowed_(s, c) = keep;
    }
  }
  for (PointId j = 0; j < n; ++j)
    if (!lp.allowed_.col(j).any()) lp.infeasible_at_build_ = true;
  return lp;
}

int AssignmentLp::num_variables() const {
  const int ns = num_open();
  return ns * num_points_ + static_cast<int>(pairs_.size()) * (ns + 1);
}

int AssignmentLp::num_active_x() const { return static_cast<int>(allowed_.count()); }

int AssignmentLp::z_pair_index(int e, int s) const {
  return num_open() * num_points_ + e * (num_open() + 1) + s;
}

int AssignmentLp::z_index(int e) const { return num_open() * num_points_ + e * (num_open() + 1) + num_open(); }

double AssignmentLp::x_cost(int s, PointId j) const {
  if (mode_.is_radius()) return 0.0;
  const double d = service_(s, j);
  return mode_.exponent == 2 ? d * d : d;
}

namespace {

LinearProgram explicit_rows(const AssignmentLp& lp, std::vector<std::string>* names) {
  const int ns = lp.num_open();
  const int n = lp.num_points();
  LinearProgram out;
  out.num_vars = lp.num_variables();
  out.cost.assign(out.num_vars, 0.0);
  auto name = [&](std::string s) {
    if (names) names->push_back(std::move(s));
  };
  for (int s = 0; s < ns; ++s)
    for (PointId j = 0; j < n; ++j)
      if (lp.allowed(s, j)) out.cost[lp.x_index(s, j)] = lp.x_cost(s, j);

  for (PointId j = 0; j < n; ++j) {
    std::vector<std::pair<int, double>> t;
    for (int s = 0; s < ns; ++s)
      if (lp.allowed(s, j)) t.emplace_back(lp.x_index(s, j), 1.0);
    out.add_row(std::move(t), RowSense::kEqual, 1.0);
    name("A" + std::to_string(j));
  }
  const auto& pairs = lp.pairs();
  for (int e = 0; e < static_cast<int>(pairs.size()); ++e) {
    const auto [a, b] = pairs[e];
    for (int s = 0; s < ns; ++s) {
      // z(e, s) >= x(s, a) - x(s, b) and z(e, s) >= x(s, b) - x(s, a).
      for (int dir = 0; dir < 2; ++dir) {
        const PointId plus = dir == 0 ? a : b;
        const PointId minus = dir == 0 ? b : a;
        if (!lp.allowed(s, plus)) continue;
        std::vector<std::pair<int, double>> t{{lp.z_pair_index(e, s), 1.0}, {lp.x_index(s, plus), -1.0}};
        if (lp.allowed(s, minus)) t.emplace_back(lp.x_index(s, minus), 1.0);
        out.add_row(std::move(t), RowSense::kGreaterEqual, 0.0);
        name((dir == 0 ? "P" : "M") + std::to_string(e) + "_" + std::to_string(s));
      }
    }
    std::vector<std::pair<int, double>> t{{lp.z_index(e), 1.0}};
    for (int s = 0; s < ns; ++s) t.emplace_back(lp.z_pair_index(e, s), -0.5);
    out.add_row(std::move(t), RowSense::kEqual, 0.0);
    name("Z" + std::to_string(e));
  }
  for (std::size_t q = 0; q < lp.group_pairs().size(); ++q) {
    std::vector<std::pair<int, double>> t;
    for (int e : lp.group_pairs()[q]) t.emplace_back(lp.z_index(e), 1.0);
    out.add_row(std::move(t), RowSense::kLessEqual, lp.group_budgets()[q]);
    name("G" + std::to_string(q));
  }
  if (lp.centroid()) {
    for (int s = 0; s < ns; ++s) {
      const PointId c = lp.centroid_point(s);
      if (!lp.allowed(s, c)) continue;
      out.add_row({{lp.x_index(s, c), 1.0}}, RowSense::kEqual, 1.0);
      name("C" + std::to_string(s));
    }
  }
  return out;
}

std::string var_name(const AssignmentLp& lp, int v) {
  const int nx = lp.num_open() * lp.num_points();
  if (v < nx) return "x" + std::to_string(v / lp.num_points()) + "_" + std::to_string(v % lp.num_points());
  const int e = (v - nx) / (lp.num_open() + 1);
  const int s = (v - nx) % (lp.num_open() + 1);
  if (s == lp.num_open()) return "z" + std::to_string(e);
  return "w" + std::to_string(e) + "_" + std::to_string(s);
}

}  // namespace

LinearProgram AssignmentLp::explicit_form() const { return explicit_rows(*this, nullptr); }

void AssignmentLp::write_mps(std::ostream& out, const std::string& name) const {
  std::vector<std::string> names;
  const LinearProgram lp = explicit_rows(*this, &names);
  std::vector<std::vector<std::pair<int, double>>> columns(lp.num_vars);
  for (int r = 0; r < static_cast<int>(lp.rows.size()); ++r)
    for (auto [c, v] : lp.rows[r].terms) columns[c].emplace_back(r, v);

  out << "NAME " << name << "\nROWS\n N COST\n";
  for (int r = 0; r < static_cast<int>(lp.rows.size()); ++r) {
    const char sense = lp.rows[r].sense == RowSense::kEqual ? 'E' : lp.rows[r].sense == RowSense::kLessEqual ? 'L' : 'G';
    out << ' ' << sense << ' ' << names[r] << '\n';
  }
  out << "COLUMNS\n";
  out.precision(17);
  for (int c = 0; c < lp.num_vars; ++c) {
    const std::string v = var_name(*this, c);
    if (lp.cost[c] != 0.0) out << "    " << v << " COST " << lp.cost[c] << '\n';
    for (auto [r, coef] : columns[c]) out << "    " << v << ' ' << names[r] << ' ' << coef << '\n';
    if (lp.cost[c] == 0.0 && columns[c].empty()) out << "    " << v << " COST 0\n";
  }
  out << "RHS\n";
  for (int r = 0; r < static_cast<int>(lp.rows.size()); ++r)
    if (lp.rows[r].rhs != 0.0) out << "    RHS " << names[r] << ' ' << lp.rows[r].rhs << '\n';
  out << "BOUNDS\n";
  for (int c = 0; c < lp.num_vars; ++c) {
    const bool eliminated = c < num_open() * num_points() && !allowed(c / num_points(), c % num_points());
    out << (eliminated ? " FX BND " : " UP BND ") << var_name(*this, c) << (eliminated ? " 0\n" : " 1\n");
  }
  out << "ENDATA\n";
}

void FractionalAssignment::tighten_z() {
  const int ns = static_cast<int>(x.rows());
  z_pair.resize(static_cast<Eigen::Index>(pairs.size()), ns);
  z.resize(static_cast<Eigen::Index>(pairs.size()));
  for (std::size_t e = 0; e < pairs.size(); ++e) {
    const auto row = static_cast<Eigen::Index>(e);
    z_pair.row(row) = (x.col(pairs[e].first) - x.col(pairs[e].second)).cwiseAbs().transpose();
    z(row) = 0.5 * z_pair.row(row).sum();
  }
}

std::vector<std::string> check_fractional(const AssignmentLp& lp, const FractionalAssignment& sol, double tol) {
  std::vector<std::string> bad;
  auto fail = [&](const std::string& m) {
    if (bad.size() < 20) bad.push_back(m);
  };
  const int ns = lp.num_open();
  const int n = lp.num_points();
  const int np = static_cast<int>(lp.pairs().size());
  if (sol.x.rows() != ns || sol.x.cols() != n || sol.z_pair.rows() != np || sol.z_pair.cols() != ns ||
      sol.z.size() != np || sol.pairs != lp.pairs()) {
    fail("shape mismatch");
    return bad;
  }
  for (PointId j = 0; j < n; ++j)
    if (std::abs(sol.x.col(j).sum() - 1.0) > tol) fail("column " + std::to_string(j) + " does not sum to 1");
  auto in_unit = [&](double v) { return v >= -1e-9 && v <= 1.0 + 1e-9; };
  for (int s = 0; s < ns; ++s)
    for (PointId j = 0; j < n; ++j) {
      if (!in_unit(sol.x(s, j))) fail("x out of [0, 1]");
      if (!lp.allowed(s, j) && sol.x(s, j) != 0.0) fail("eliminated x(" + std::to_string(s) + ", " + std::to_string(j) + ") is nonzero");
    }
  for (int e = 0; e < np; ++e) {
    const auto [a, b] = lp.pairs()[e];
    for (int s = 0; s < ns; ++s) {
      if (!in_unit(sol.z_pair(e, s))) fail("z(e, i) out of [0, 1]");
      if (sol.z_pair(e, s) < std::abs(sol.x(s, a) - sol.x(s, b)) - tol) fail("z(e, i) below |x difference| for pair " + std::to_string(e));
    }
    if (!in_unit(sol.z(e))) fail("z(e) out of [0, 1]");
    if (std::abs(sol.z(e) - 0.5 * sol.z_pair.row(e).sum()) > tol) fail("z(e) != half the sum of z(e, i) for pair " + std::to_string(e));
  }
  for (std::size_t q = 0; q < lp.group_pairs().size(); ++q) {
    double total = 0.0;
    for (int e : lp.group_pairs()[q]) total += sol.z(e);
    if (total > lp.group_budgets()[q] + tol) fail("group " + std::to_string(q) + " exceeds its budget");
  }
  if (lp.centroid())
    for (int s = 0; s < ns; ++s)
      if (std::abs(sol.x(s, lp.centroid_point(s)) - 1.0) > tol) fail("centroid row " + std::to_string(s) + " violated");
  return bad;
}

namespace {

FractionalAssignment finish(const AssignmentLp& lp, MatrixXd x) {
  // Clean round-off so eliminated entries stay structural zeros and columns
  // are exactly stochastic.
  x = x.cwiseMax(0.0).cwiseMin(1.0);
  for (PointId j = 0; j < lp.num_points(); ++j) {
    for (int s = 0; s < lp.num_open(); ++s)
      if (!lp.allowed(s, j) || x(s, j) < 1e-13) x(s, j) = 0.0;
    const double sum = x.col(j).sum();
    if (sum > 0.0) x.col(j) /= sum;
  }
  FractionalAssignment sol;
  sol.x = std::move(x);
  sol.pairs = lp.pairs();
  sol.tighten_z();
  if (!lp.mode().is_radius()) {
    double c = 0.0;
    for (int s = 0; s < lp.num_open(); ++s)
      for (PointId j = 0; j < lp.num_points(); ++j) c += sol.x(s, j) * lp.x_cost(s, j);
    sol.objective_value = c;
  }
  return sol;
}

std::optional<FractionalAssignment> solve_explicit(const AssignmentLp& lp, const LpSolveOptions& options,
                                                   LpSolveStats& stats) {
  const LpResult r = solve_two_phase<double>(lp.explicit_form(), options.simplex);
  stats.pivots += r.pivots;
  if (r.status == LpStatus::kInfeasible) return std::nullopt;
  if (r.status != LpStatus::kOptimal) throw NumericalError("assignment LP: simplex stopped (" + to_string(r.status) + ")");
  MatrixXd x(lp.num_open(), lp.num_points());
  for (int s = 0; s < lp.num_open(); ++s)
    for (PointId j = 0; j < lp.num_points(); ++j) x(s, j) = r.x[lp.x_index(s, j)];
  return finish(lp, std::move(x));
}

std::optional<FractionalAssignment> solve_cutting(const AssignmentLp& lp, const LpSolveOptions& options,
                                                  LpSolveStats& stats) {
  using Tab = Tableau<double>;
  const int ns = lp.num_open();
  const int n = lp.num_points();
  // Active x columns only.
  std::vector<int> col(static_cast<std::size_t>(ns) * n, -1);
  std::vector<std::pair<int, PointId>> var;
  for (PointId j = 0; j < n; ++j)
    for (int s = 0; s < ns; ++s)
      if (lp.allowed(s, j)) {
        col[static_cast<std::size_t>(s) * n + j] = static_cast<int>(var.size());
        var.emplace_back(s, j);
      }
  const int nv = static_cast<int>(var.size());
  Tab::RowMatrix a = Tab::RowMatrix::Zero(n, nv);
  Tab::Vec b = Tab::Vec::Ones(n);
  Tab::Vec c(nv);
  std::vector<int> basis(n, -1);
  for (int v = 0; v < nv; ++v) {
    const auto [s, j] = var[v];
    a(j, v) = 1.0;
    c(v) = lp.x_cost(s, j);
    if (basis[j] < 0 || c(v) < c(basis[j])) basis[j] = v;
  }
  Tab tab(options.simplex);
  tab.load(std::move(a), std::move(b), std::move(c), std::move(basis));
  // The nearest assignment is optimal for the assignment rows alone.
  LpStatus status = tab.primal_simplex();

  MatrixXd x(ns, n);
  auto read_x = [&] {
    const std::vector<double> p = tab.primal(nv);
    x.setZero();
    for (int v = 0; v < nv; ++v) x(var[v].first, var[v].second) = p[v];
  };
  const auto& pairs = lp.pairs();
  const double cut_tol = 1e-9;
  // Per cut (slack column nv + k): its group and rounds spent slack.
  std::vector<int> cut_group, cut_idle;
  std::vector<int> retired(lp.group_pairs().size(), 0);
  for (int round = 0;; ++round) {
    if (status == LpStatus::kPivotLimit) throw NumericalError("assignment LP: pivot cap reached");
    if (status == LpStatus::kInfeasible) return std::nullopt;
    if (status != LpStatus::kOptimal) throw NumericalError("assignment LP: simplex stopped (" + to_string(status) + ")");
    if (round >= options.max_cut_rounds) throw NumericalError("assignment LP: cut-round cap reached");
    read_x();
    int added = 0;
    for (std::size_t q = 0; q < lp.group_pairs().size(); ++q) {
      double total = 0.0;
      for (int e : lp.group_pairs()[q]) total += 0.5 * (x.col(pairs[e].first) - x.col(pairs[e].second)).cwiseAbs().sum();
      if (total <= lp.group_budgets()[q] + cut_tol) continue;
      std::vector<std::pair<int, double>> terms;
      for (int e : lp.group_pairs()[q]) {
        const auto [p, o] = pairs[e];
        for (int s = 0; s < ns; ++s) {
          // Positive part only: it equals z(e) at the current x.
          if (x(s, p) - x(s, o) <= 1e-12) continue;
          const int ch = col[static_cast<std::size_t>(s) * n + p];
          const int cl = col[static_cast<std::size_t>(s) * n + o];
          if (ch >= 0) terms.emplace_back(ch, 1.0);
          if (cl >= 0) terms.emplace_back(cl, -1.0);
        }
      }
      tab.add_le_row(terms, lp.group_budgets()[q]);
      cut_group.push_back(static_cast<int>(q));
      cut_idle.push_back(0);
      ++added;
    }
    stats.cut_rounds = round;
    if (added == 0) break;
    stats.cuts += added;
    status = tab.dual_simplex();
    if (status == LpStatus::kOptimal) status = tab.primal_simplex();
    if (status != LpStatus::kOptimal) continue;
    // Retire cuts that stayed slack for a while; a group is retired at most
    // twice so the loop cannot cycle.
    const std::vector<double> values = tab.primal(tab.cols());
    for (std::size_t k = 0; k < cut_group.size(); ++k) cut_idle[k] = values[nv + k] > 1e-9 ? cut_idle[k] + 1 : 0;
    const auto remap = tab.drop_inactive(nv, 1e-9, [&](int c) {
      const int g = cut_group[c - nv];
      if (cut_idle[c - nv] < 3 || retired[g] >= 2) return false;
      ++retired[g];
      return true;
    });
    if (remap.empty()) continue;
    std::vector<int> group2, idle2;
    for (std::size_t k = 0; k < cut_group.size(); ++k)
      if (remap[nv + k] >= 0) group2.push_back(cut_group[k]), idle2.push_back(cut_idle[k]);
    cut_group.swap(group2);
    cut_idle.swap(idle2);
  }
  stats.pivots += tab.pivots();
  return finish(lp, std::move(x));
}

}  // namespace

std::optional<FractionalAssignment> solve_lp(const AssignmentLp& lp, const LpSolveOptions& options,
                                             LpSolveStats* stats) {
  LpSolveStats local;
  LpSolveStats& st = stats ? *stats : local;
  st = {};
  if (lp.infeasible_at_build()) return std::nullopt;
  LpStrategy strategy = options.strategy;
  if (strategy == LpStrategy::kAuto) {
    const double ns = lp.num_open();
    const double np = static_cast<double>(lp.pairs().size());
    const double rows = lp.num_points() + np * (2.0 * ns + 1.0) + static_cast<double>(lp.group_pairs().size());
    const double cols = lp.num_variables() + rows;
    strategy = rows * cols <= options.explicit_entry_limit ? LpStrategy::kExplicit : LpStrategy::kCuttingPlane;
  }
  st.strategy = strategy;
  auto sol = strategy == LpStrategy::kExplicit ? solve_explicit(lp, options, st) : solve_cutting(lp, options, st);
  if (sol) {
    const auto bad = check_fractional(lp, *sol);
    if (!bad.empty()) throw NumericalError("assignment LP solution fails its invariants: " + bad.front());
  }
  return sol;
}

}  // namespace spc
