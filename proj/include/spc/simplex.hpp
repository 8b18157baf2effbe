#pragma once

#include "spc/common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace spc {

enum class RowSense { kLessEqual, kEqual, kGreaterEqual };

struct LpRow {
  std::vector<std::pair<int, double>> terms;
  RowSense sense = RowSense::kEqual;
  double rhs = 0.0;
};

/// min cost . x subject to rows, x >= 0.
struct LinearProgram {
  int num_vars = 0;
  std::vector<double> cost;  // empty means the zero objective
  std::vector<LpRow> rows;

  int add_row(std::vector<std::pair<int, double>> terms, RowSense sense, double rhs) {
    rows.push_back({std::move(terms), sense, rhs});
    return static_cast<int>(rows.size()) - 1;
  }
};

enum class LpStatus { kOptimal, kInfeasible, kUnbounded, kPivotLimit };

inline std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::kOptimal: return "optimal";
    case LpStatus::kInfeasible: return "infeasible";
    case LpStatus::kUnbounded: return "unbounded";
    case LpStatus::kPivotLimit: return "pivot-limit";
  }
  return "unknown";
}

struct LpResult {
  LpStatus status = LpStatus::kInfeasible;
  std::vector<double> x;
  double objective = 0.0;
  std::int64_t pivots = 0;
};

struct SimplexOptions {
  double pivot_tolerance = kPivotTolerance;
  double feasibility_tolerance = kFeasibilityTolerance;
  double optimality_tolerance = 1e-9;
  std::int64_t max_pivots = 1'000'000;
  /// Consecutive degenerate pivots before switching to Bland's rule.
  int bland_after = 1000;
};

/// Dense simplex tableau in canonical form with respect to its basis.
///
/// Rows hold B^-1 A and B^-1 b, `reduced` holds c - c_B B^-1 A. Supports
/// primal simplex, dual simplex and appending <= rows to an optimal
/// tableau, which is what a cutting-plane loop needs.
template <typename Scalar = double>
class Tableau {
 public:
  using RowMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  explicit Tableau(SimplexOptions options = {}) : options_(options) {}

  /// Installs a tableau that is already canonical: column basis[r] is the
  /// r-th unit vector of `rows`.
  void load(RowMatrix rows, Vec rhs, Vec cost, std::vector<int> basis) {
    rows_ = static_cast<int>(rows.rows());
    cols_ = static_cast<int>(rows.cols());
    a_ = std::move(rows);
    b_ = std::move(rhs);
    cost_ = std::move(cost);
    basis_ = std::move(basis);
    blocked_.assign(cols_, false);
    recompute_reduced_costs();
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  const std::vector<int>& basis() const { return basis_; }
  std::int64_t pivots() const { return pivots_; }

  void block_column(int c) { blocked_[c] = true; }
  void set_cost(Vec cost) {
    cost_ = std::move(cost);
    recompute_reduced_costs();
  }

  Scalar objective() const {
    Scalar v = 0;
    for (int r = 0; r < rows_; ++r) v += cost_(basis_[r]) * b_(r);
    return v;
  }

  /// Primal values of the first `n` columns.
  std::vector<double> primal(int n) const {
    std::vector<double> x(n, 0.0);
    for (int r = 0; r < rows_; ++r)
      if (basis_[r] < n) x[basis_[r]] = static_cast<double>(std::max<Scalar>(b_(r), 0));
    return x;
  }

  Scalar rhs(int r) const { return b_(r); }

  /// Appends sum(terms) + s = rhs with a new basic slack s, expressed in
  /// the current basis. Returns the slack column.
  int add_le_row(const std::vector<std::pair<int, double>>& terms, double rhs) {
    const int slack = cols_;
    ensure_capacity(rows_ + 1, cols_ + 1);
    cols_ += 1;
    a_.row(rows_).setZero();
    Scalar value = rhs;
    for (auto [c, v] : terms) a_(rows_, c) += v;
    a_(rows_, slack) = 1;
    // Eliminate basic columns from the new row.
    for (int r = 0; r < rows_; ++r) {
      const Scalar f = a_(rows_, basis_[r]);
      if (f != 0) {
        a_.row(rows_).head(cols_) -= f * a_.row(r).head(cols_);
        value -= f * b_(r);
      }
    }
    b_(rows_) = value;
    cost_.conservativeResize(cols_);
    cost_(slack) = 0;
    reduced_.conservativeResize(cols_);
    reduced_(slack) = 0;
    blocked_.push_back(false);
    basis_.push_back(slack);
    rows_ += 1;
    return slack;
  }

  /// Primal simplex from a primal feasible basis.
  LpStatus primal_simplex() {
    int degenerate = 0;
    bool bland = false;
    while (true) {
      if (pivots_ >= options_.max_pivots) return LpStatus::kPivotLimit;
      int enter = -1;
      Scalar best = -static_cast<Scalar>(options_.optimality_tolerance);
      for (int c = 0; c < cols_; ++c) {
        if (blocked_[c] || reduced_(c) >= best) continue;
        enter = c;
        if (bland) break;
        best = reduced_(c);
      }
      if (enter < 0) return LpStatus::kOptimal;
      int leave = -1;
      Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
      Scalar best_pivot = 0;
      for (int r = 0; r < rows_; ++r) {
        const Scalar p = a_(r, enter);
        if (p <= options_.pivot_tolerance) continue;
        const Scalar ratio = std::max<Scalar>(b_(r), 0) / p;
        const Scalar gap = ratio - best_ratio;
        if (leave < 0 || gap < -1e-12) {
          leave = r, best_ratio = ratio, best_pivot = p;
        } else if (gap <= 1e-12) {
          const bool take = bland ? basis_[r] < basis_[leave] : p > best_pivot;
          if (take) leave = r, best_ratio = ratio, best_pivot = p;
        }
      }
      if (leave < 0) return LpStatus::kUnbounded;
      degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
      if (degenerate >= options_.bland_after) bland = true;
      pivot(leave, enter);
    }
  }

  /// Dual simplex from a dual feasible basis (nonnegative reduced costs).
  LpStatus dual_simplex() {
    int degenerate = 0;
    bool bland = false;
    const Scalar feas = options_.feasibility_tolerance * 1e-2;
    while (true) {
      if (pivots_ >= options_.max_pivots) return LpStatus::kPivotLimit;
      int leave = -1;
      Scalar worst = -feas;
      for (int r = 0; r < rows_; ++r) {
        if (b_(r) >= worst) continue;
        if (bland && leave >= 0 && basis_[r] > basis_[leave]) continue;
        leave = r;
        if (!bland) worst = b_(r);
      }
      if (leave < 0) return LpStatus::kOptimal;
      int enter = -1;
      Scalar best_ratio = std::numeric_limits<Scalar>::infinity();
      Scalar best_pivot = 0;
      for (int c = 0; c < cols_; ++c) {
        if (blocked_[c]) continue;
        const Scalar p = a_(leave, c);
        if (p >= -options_.pivot_tolerance) continue;
        const Scalar ratio = std::max<Scalar>(reduced_(c), 0) / -p;
        const Scalar gap = ratio - best_ratio;
        if (enter < 0 || gap < -1e-12) {
          enter = c, best_ratio = ratio, best_pivot = -p;
        } else if (gap <= 1e-12 && !bland && -p > best_pivot) {
          enter = c, best_ratio = ratio, best_pivot = -p;
        }
      }
      if (enter < 0) return LpStatus::kInfeasible;
      degenerate = best_ratio <= 1e-12 ? degenerate + 1 : 0;
      if (degenerate >= options_.bland_after) bland = true;
      pivot(leave, enter);
    }
  }

  void pivot(int r, int c) {
    const int n = cols_;
    const Scalar inv = Scalar(1) / a_(r, c);
    a_.row(r).head(n) *= inv;
    b_(r) *= inv;
    a_(r, c) = 1;
    for (int i = 0; i < rows_; ++i) {
      if (i == r) continue;
      const Scalar f = a_(i, c);
      if (f == 0) continue;
      a_.row(i).head(n) -= f * a_.row(r).head(n);
      a_(i, c) = 0;
      b_(i) -= f * b_(r);
    }
    const Scalar f = reduced_(c);
    if (f != 0) {
      reduced_.head(n) -= f * a_.row(r).head(n).transpose();
      reduced_(c) = 0;
    }
    basis_[r] = c;
    ++pivots_;
  }

  /// Removes row r (used for redundant rows whose basic column cannot be
  /// replaced).
  void drop_row(int r) {
    for (int i = r; i + 1 < rows_; ++i) {
      a_.row(i).head(cols_) = a_.row(i + 1).head(cols_);
      b_(i) = b_(i + 1);
    }
    basis_.erase(basis_.begin() + r);
    rows_ -= 1;
  }

  /// Drops inequalities whose slack column (index >= first_slack) is basic
  /// with value above `tol` and accepted by `may_drop`, removing that row and
  /// that column. The remaining tableau stays canonical. Returns the old to
  /// new column map (-1 for dropped), or an empty vector if nothing changed.
  template <typename Pred>
  std::vector<int> drop_inactive(int first_slack, Scalar tol, Pred&& may_drop) {
    std::vector<bool> drop_row(rows_, false), drop_col(cols_, false);
    int dropped = 0;
    for (int r = 0; r < rows_; ++r)
      if (basis_[r] >= first_slack && b_(r) > tol && may_drop(basis_[r])) {
        drop_row[r] = true;
        drop_col[basis_[r]] = true;
        ++dropped;
      }
    if (dropped == 0) return {};
    std::vector<int> remap(cols_, -1);
    int nc = 0;
    for (int c = 0; c < cols_; ++c)
      if (!drop_col[c]) remap[c] = nc++;
    int nr = 0;
    for (int r = 0; r < rows_; ++r) {
      if (drop_row[r]) continue;
      for (int c = 0; c < cols_; ++c)
        if (remap[c] >= 0) a_(nr, remap[c]) = a_(r, c);
      b_(nr) = b_(r);
      basis_[nr] = remap[basis_[r]];
      ++nr;
    }
    for (int c = 0; c < cols_; ++c)
      if (remap[c] >= 0) {
        cost_(remap[c]) = cost_(c);
        reduced_(remap[c]) = reduced_(c);
        blocked_[remap[c]] = blocked_[c];
      }
    // add_le_row relies on unused columns of live rows being zero.
    a_.block(0, nc, nr, cols_ - nc).setZero();
    rows_ = nr;
    cols_ = nc;
    basis_.resize(nr);
    blocked_.resize(nc);
    cost_.conservativeResize(nc);
    reduced_.conservativeResize(nc);
    return remap;
  }

  Scalar entry(int r, int c) const { return a_(r, c); }

  void recompute_reduced_costs() {
    reduced_ = cost_;
    for (int r = 0; r < rows_; ++r) {
      const Scalar cb = cost_(basis_[r]);
      if (cb != 0) reduced_ -= cb * a_.row(r).head(cols_).transpose();
    }
  }

 private:
  void ensure_capacity(int rows, int cols) {
    if (rows <= a_.rows() && cols <= a_.cols()) return;
    const int new_rows = std::max<int>(rows, static_cast<int>(a_.rows() + a_.rows() / 2 + 8));
    const int new_cols = std::max<int>(cols, static_cast<int>(a_.cols() + a_.cols() / 2 + 8));
    RowMatrix grown = RowMatrix::Zero(new_rows, new_cols);
    grown.topLeftCorner(rows_, cols_) = a_.topLeftCorner(rows_, cols_);
    a_.swap(grown);
    b_.conservativeResize(new_rows);
  }

  SimplexOptions options_;
  int rows_ = 0;
  int cols_ = 0;
  RowMatrix a_;
  Vec b_;
  Vec cost_;
  Vec reduced_;
  std::vector<int> basis_;
  std::vector<bool> blocked_;
  std::int64_t pivots_ = 0;
};

/// Two-phase primal simplex on the explicit row form of `lp`.
template <typename Scalar = double>
LpResult solve_two_phase(const LinearProgram& lp, const SimplexOptions& options = {}) {
  using RowMatrix = typename Tableau<Scalar>::RowMatrix;
  using Vec = typename Tableau<Scalar>::Vec;

  const int n = lp.num_vars;
  const int m = static_cast<int>(lp.rows.size());

  // Column layout: structural | slack or surplus per inequality | artificial.
  int num_slack = 0;
  for (const auto& row : lp.rows) num_slack += row.sense != RowSense::kEqual;
  std::vector<bool> flip(m, false);
  std::vector<bool> needs_artificial(m, false);
  int num_art = 0;
  for (int r = 0; r < m; ++r) {
    const auto& row = lp.rows[r];
    flip[r] = row.rhs < 0;
    RowSense sense = row.sense;
    if (flip[r] && sense != RowSense::kEqual)
      sense = sense == RowSense::kLessEqual ? RowSense::kGreaterEqual : RowSense::kLessEqual;
    needs_artificial[r] = sense != RowSense::kLessEqual;
    num_art += needs_artificial[r];
  }
  const int cols = n + num_slack + num_art;
  RowMatrix a = RowMatrix::Zero(m, cols);
  Vec b(m);
  std::vector<int> basis(m);
  int slack_col = n;
  int art_col = n + num_slack;
  for (int r = 0; r < m; ++r) {
    const auto& row = lp.rows[r];
    const Scalar sign = flip[r] ? -1 : 1;
    for (auto [c, v] : row.terms) a(r, c) += sign * static_cast<Scalar>(v);
    b(r) = sign * static_cast<Scalar>(row.rhs);
    if (row.sense != RowSense::kEqual) {
      const Scalar s = (row.sense == RowSense::kLessEqual ? 1 : -1) * sign;
      a(r, slack_col) = s;
      if (!needs_artificial[r]) basis[r] = slack_col;
      ++slack_col;
    }
    if (needs_artificial[r]) {
      a(r, art_col) = 1;
      basis[r] = art_col++;
    }
  }

  Tableau<Scalar> tab(options);
  Vec phase1 = Vec::Zero(cols);
  phase1.tail(num_art).setOnes();
  tab.load(std::move(a), std::move(b), phase1, basis);

  LpResult result;
  if (num_art > 0) {
    const LpStatus s = tab.primal_simplex();
    if (s == LpStatus::kPivotLimit) {
      result.status = s;
      result.pivots = tab.pivots();
      return result;
    }
    if (tab.objective() > options.feasibility_tolerance) {
      result.status = LpStatus::kInfeasible;
      result.pivots = tab.pivots();
      return result;
    }
    // Drive remaining artificial columns out of the basis.
    for (int r = tab.rows() - 1; r >= 0; --r) {
      if (tab.basis()[r] < n + num_slack) continue;
      int replacement = -1;
      double best = options.pivot_tolerance;
      for (int c = 0; c < n + num_slack; ++c) {
        const double v = std::abs(static_cast<double>(tab.entry(r, c)));
        if (v > best) best = v, replacement = c;
      }
      if (replacement >= 0)
        tab.pivot(r, replacement);
      else
        tab.drop_row(r);
    }
    for (int c = n + num_slack; c < cols; ++c) tab.block_column(c);
  }

  Vec cost = Vec::Zero(cols);
  for (int c = 0; c < std::min<int>(n, static_cast<int>(lp.cost.size())); ++c) cost(c) = lp.cost[c];
  tab.set_cost(cost);
  result.status = tab.primal_simplex();
  result.pivots = tab.pivots();
  if (result.status == LpStatus::kOptimal) {
    result.x = tab.primal(n);
    result.objective = 0.0;
    for (int c = 0; c < std::min<int>(n, static_cast<int>(lp.cost.size())); ++c) result.objective += lp.cost[c] * result.x[c];
  }
  return result;
}

}  // namespace spc
