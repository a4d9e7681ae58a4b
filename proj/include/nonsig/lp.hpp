#pragma once

// Dense two-phase simplex over doubles. Pivoting is deterministic: Dantzig
// entering switches to Bland's rule after a run of degenerate steps, which
// rules out cycling; ties in the ratio test break on the smallest basic
// column. Duals are read off the final tableau (slack columns for
// inequalities, artificial columns for equalities), so primal and dual come
// from the same basis. A solved instance can be re-optimised for a new
// inequality right-hand side via the dual simplex without a fresh phase 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nonsig {

enum class LpStatus { optimal, infeasible, unbounded };

enum class Sense { minimize, maximize };

struct LinearProgram {
  std::vector<double> objective;            // maximize objective . x
  std::vector<std::vector<double>> ineq_a;  // a . x <= b
  std::vector<double> ineq_b;
  std::vector<std::vector<double>> eq_a;    // e . x = g
  std::vector<double> eq_b;
  std::vector<std::uint8_t> nonneg;         // 0 marks a free variable
};

struct LpSolution {
  LpStatus status = LpStatus::infeasible;
  std::vector<double> primal;
  double objective_value = 0.0;
  std::vector<double> duals_ineq;  // >= 0, one per inequality row
  std::vector<double> duals_eq;    // sign free, one per equality row
};

class LpSolver {
 public:
  explicit LpSolver(LinearProgram lp, double feas_tol = 1e-9, double gap_tol = 1e-8)
      : lp_(std::move(lp)), feas_tol_(feas_tol), gap_tol_(gap_tol) {
    check_shapes();
    build();
  }

  const LpSolution& solve() {
    if (!solved_) run();
    return solution_;
  }

  // Re-optimise after changing the inequality right-hand sides only. Keeps
  // the current basis, repairs primal feasibility with the dual simplex.
  const LpSolution& resolve_ineq_rhs(std::span<const double> new_b) {
    if (new_b.size() != lp_.ineq_b.size())
      throw std::invalid_argument("resolve_ineq_rhs: wrong rhs length");
    if (!solved_) solve();
    lp_.ineq_b.assign(new_b.begin(), new_b.end());
    if (solution_.status != LpStatus::optimal || !refresh_rhs()) {
      build();
      run();
      return solution_;
    }
    if (!dual_simplex()) {
      build();  // stalled or infeasible basis repair, start over
      run();
      return solution_;
    }
    extract();
    return solution_;
  }

  const LpSolution& solution() const { return solution_; }

 private:
  static constexpr double kPivTol = 1e-9;
  static constexpr double kOptTol = 1e-10;

  LinearProgram lp_;
  double feas_tol_;
  double gap_tol_;
  bool solved_ = false;
  LpSolution solution_;

  int nvar_ = 0;         // original variables
  int nx_ = 0;           // split columns
  int nrow_ = 0;         // ineq + eq rows
  int ncol_ = 0;         // split + slack + artificial
  int first_art_ = 0;    // artificial columns start here
  std::vector<int> pos_col_, neg_col_;  // split map; neg_col_ = -1 if nonneg
  std::vector<int> slack_col_, art_col_, id_col_;  // per row; -1 when absent
  std::vector<double> sign_;            // row standardisation sign
  std::vector<double> tab_, rhs_, objrow_;
  std::vector<double> cost_;            // current phase costs over columns
  std::vector<int> basis_;
  std::vector<std::uint8_t> active_, is_basic_;
  long pivots_ = 0;
  bool bland_ = false;
  int stall_ = 0;

  double* row(int r) { return tab_.data() + static_cast<std::size_t>(r) * ncol_; }

  void check_shapes() const {
    std::size_t n = lp_.objective.size();
    if (n == 0) throw std::invalid_argument("linear program has no variables");
    if (lp_.nonneg.size() != n) throw std::invalid_argument("nonneg mask size mismatch");
    if (lp_.ineq_a.size() != lp_.ineq_b.size() || lp_.eq_a.size() != lp_.eq_b.size())
      throw std::invalid_argument("row and rhs counts differ");
    for (const auto& r : lp_.ineq_a)
      if (r.size() != n) throw std::invalid_argument("inequality row length mismatch");
    for (const auto& r : lp_.eq_a)
      if (r.size() != n) throw std::invalid_argument("equality row length mismatch");
    auto finite = [](std::span<const double> v) {
      return std::all_of(v.begin(), v.end(),
                         [](double x) { return std::isfinite(x); });
    };
    if (!finite(lp_.objective) || !finite(lp_.ineq_b) || !finite(lp_.eq_b))
      throw std::invalid_argument("linear program contains non-finite entries");
    for (const auto& r : lp_.ineq_a)
      if (!finite(r)) throw std::invalid_argument("linear program contains non-finite entries");
    for (const auto& r : lp_.eq_a)
      if (!finite(r)) throw std::invalid_argument("linear program contains non-finite entries");
  }

  void build() {
    nvar_ = static_cast<int>(lp_.objective.size());
    int n_ineq = static_cast<int>(lp_.ineq_a.size());
    int n_eq = static_cast<int>(lp_.eq_a.size());
    nrow_ = n_ineq + n_eq;

    pos_col_.assign(nvar_, -1);
    neg_col_.assign(nvar_, -1);
    nx_ = 0;
    for (int v = 0; v < nvar_; ++v) pos_col_[v] = nx_++;
    for (int v = 0; v < nvar_; ++v)
      if (!lp_.nonneg[v]) neg_col_[v] = nx_++;

    slack_col_.assign(nrow_, -1);
    art_col_.assign(nrow_, -1);
    sign_.assign(nrow_, 1.0);
    for (int i = 0; i < n_ineq; ++i) {
      slack_col_[i] = nx_ + i;
      if (lp_.ineq_b[i] < 0.0) sign_[i] = -1.0;
    }
    for (int k = 0; k < n_eq; ++k)
      if (lp_.eq_b[k] < 0.0) sign_[n_ineq + k] = -1.0;

    first_art_ = nx_ + n_ineq;
    int next_art = first_art_;
    for (int r = 0; r < nrow_; ++r)
      if (r >= n_ineq || sign_[r] < 0.0) art_col_[r] = next_art++;
    ncol_ = next_art;

    id_col_.assign(nrow_, -1);
    for (int r = 0; r < nrow_; ++r)
      id_col_[r] = art_col_[r] >= 0 ? art_col_[r] : slack_col_[r];

    tab_.assign(static_cast<std::size_t>(nrow_) * ncol_, 0.0);
    rhs_.assign(nrow_, 0.0);
    basis_.assign(nrow_, -1);
    active_.assign(nrow_, 1);
    is_basic_.assign(ncol_, 0);

    for (int r = 0; r < nrow_; ++r) {
      const std::vector<double>& a = r < n_ineq ? lp_.ineq_a[r] : lp_.eq_a[r - n_ineq];
      double b = r < n_ineq ? lp_.ineq_b[r] : lp_.eq_b[r - n_ineq];
      double* tr = row(r);
      for (int v = 0; v < nvar_; ++v) {
        double c = sign_[r] * a[v];
        tr[pos_col_[v]] = c;
        if (neg_col_[v] >= 0) tr[neg_col_[v]] = -c;
      }
      if (slack_col_[r] >= 0) tr[slack_col_[r]] = sign_[r];
      if (art_col_[r] >= 0) tr[art_col_[r]] = 1.0;
      rhs_[r] = sign_[r] * b;
      basis_[r] = art_col_[r] >= 0 ? art_col_[r] : slack_col_[r];
      is_basic_[basis_[r]] = 1;
    }
    solved_ = false;
  }

  void set_costs_phase1() {
    cost_.assign(ncol_, 0.0);
    for (int c = first_art_; c < ncol_; ++c) cost_[c] = -1.0;
  }

  void set_costs_phase2() {
    cost_.assign(ncol_, 0.0);
    for (int v = 0; v < nvar_; ++v) {
      cost_[pos_col_[v]] = lp_.objective[v];
      if (neg_col_[v] >= 0) cost_[neg_col_[v]] = -lp_.objective[v];
    }
  }

  // objrow_[j] = z_j - c_j; optimal for a maximisation when all >= 0.
  void compute_objrow() {
    objrow_.assign(ncol_, 0.0);
    for (int r = 0; r < nrow_; ++r) {
      if (!active_[r]) continue;
      double cb = cost_[basis_[r]];
      if (cb == 0.0) continue;
      const double* tr = row(r);
      for (int j = 0; j < ncol_; ++j) objrow_[j] += cb * tr[j];
    }
    for (int j = 0; j < ncol_; ++j) objrow_[j] -= cost_[j];
  }

  void pivot(int r, int e) {
    double* pr = row(r);
    double piv = pr[e];
    for (int j = 0; j < ncol_; ++j) pr[j] /= piv;
    rhs_[r] /= piv;
    pr[e] = 1.0;
    for (int r2 = 0; r2 < nrow_; ++r2) {
      if (r2 == r || !active_[r2]) continue;
      double* t2 = row(r2);
      double f = t2[e];
      if (f == 0.0) continue;
      for (int j = 0; j < ncol_; ++j) t2[j] -= f * pr[j];
      t2[e] = 0.0;
      rhs_[r2] -= f * rhs_[r];
    }
    double f = objrow_[e];
    if (f != 0.0) {
      for (int j = 0; j < ncol_; ++j) objrow_[j] -= f * pr[j];
      objrow_[e] = 0.0;
    }
    is_basic_[basis_[r]] = 0;
    is_basic_[e] = 1;
    basis_[r] = e;
    ++pivots_;
    if (pivots_ > 200000 + 200L * (nrow_ + ncol_)) bland_ = true;
    if (pivots_ > 5000000L) throw std::runtime_error("simplex iteration limit exceeded");
  }

  // Primal simplex on the current objrow. Returns false on unboundedness.
  bool primal_simplex(bool allow_art_entering) {
    int scan_end = allow_art_entering ? ncol_ : first_art_;
    while (true) {
      int enter = -1;
      double best = -kOptTol;
      for (int j = 0; j < scan_end; ++j) {
        if (is_basic_[j]) continue;
        double v = objrow_[j];
        if (v < best) {
          best = v;
          enter = j;
          if (bland_) break;
        }
      }
      if (enter < 0) return true;

      int leave = -1;
      double best_ratio = 0.0;
      for (int r = 0; r < nrow_; ++r) {
        if (!active_[r]) continue;
        double a = row(r)[enter];
        if (a <= kPivTol) continue;
        double ratio = rhs_[r] / a;
        if (leave < 0 || ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && basis_[r] < basis_[leave])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) return false;

      if (best_ratio < 1e-12) {
        if (++stall_ > 64) bland_ = true;
      } else {
        stall_ = 0;
        bland_ = false;
      }
      pivot(leave, enter);
    }
  }

  // Degenerate pivots move basic artificials out; rows spanned by no real
  // column are redundant and get deactivated.
  void purge_artificials() {
    for (int r = 0; r < nrow_; ++r) {
      if (!active_[r] || basis_[r] < first_art_) continue;
      const double* tr = row(r);
      int e = -1;
      for (int j = 0; j < first_art_; ++j) {
        if (!is_basic_[j] && std::abs(tr[j]) > kPivTol) {
          e = j;
          break;
        }
      }
      if (e >= 0) {
        pivot(r, e);
      } else {
        is_basic_[basis_[r]] = 0;
        active_[r] = 0;
      }
    }
  }

  void run() {
    pivots_ = 0;
    bland_ = false;
    stall_ = 0;
    if (first_art_ < ncol_) {
      set_costs_phase1();
      compute_objrow();
      primal_simplex(false);
      double infeas = 0.0;
      for (int r = 0; r < nrow_; ++r)
        if (active_[r] && basis_[r] >= first_art_) infeas += rhs_[r];
      if (infeas > feas_tol_ * (1.0 + static_cast<double>(nrow_))) {
        solution_ = LpSolution{};
        solution_.status = LpStatus::infeasible;
        solved_ = true;
        return;
      }
      purge_artificials();
    }
    set_costs_phase2();
    compute_objrow();
    bland_ = false;
    stall_ = 0;
    bool bounded = primal_simplex(false);
    if (!bounded) {
      solution_ = LpSolution{};
      solution_.status = LpStatus::unbounded;
      solved_ = true;
      return;
    }
    extract();
    solved_ = true;
  }

  // Basic values for the new rhs come from B^{-1}, whose columns sit in each
  // row's original identity column (artificial if present, else slack).
  bool refresh_rhs() {
    int n_ineq = static_cast<int>(lp_.ineq_a.size());
    std::vector<double> b_std(nrow_, 0.0);
    for (int r = 0; r < nrow_; ++r) {
      double b = r < n_ineq ? lp_.ineq_b[r] : lp_.eq_b[r - n_ineq];
      if (!active_[r]) {
        // A deactivated row was redundant under the old rhs; only identical
        // data keeps that valid.
        if (r < n_ineq) return false;
      }
      b_std[r] = sign_[r] * b;
    }
    for (int r = 0; r < nrow_; ++r) {
      if (!active_[r]) continue;
      double acc = 0.0;
      const double* tr = row(r);
      for (int k = 0; k < nrow_; ++k) {
        if (!active_[k] && k >= n_ineq) continue;
        acc += b_std[k] * tr[id_col_[k]];
      }
      rhs_[r] = acc;
    }
    return true;
  }

  bool dual_simplex() {
    bland_ = false;
    stall_ = 0;
    while (true) {
      int leave = -1;
      double most_neg = -feas_tol_;
      for (int r = 0; r < nrow_; ++r) {
        if (!active_[r]) continue;
        if (rhs_[r] < most_neg) {
          most_neg = rhs_[r];
          leave = r;
          if (bland_) break;
        }
      }
      if (leave < 0) return true;

      const double* tr = row(leave);
      int enter = -1;
      double best_ratio = 0.0;
      for (int j = 0; j < first_art_; ++j) {
        if (is_basic_[j] || tr[j] >= -kPivTol) continue;
        double ratio = objrow_[j] / (-tr[j]);
        if (enter < 0 || ratio < best_ratio - 1e-12 ||
            (ratio < best_ratio + 1e-12 && j < enter)) {
          enter = j;
          best_ratio = ratio;
        }
      }
      if (enter < 0) return false;  // primal infeasible for this rhs
      if (best_ratio < 1e-12) {
        if (++stall_ > 64) bland_ = true;
      } else {
        stall_ = 0;
        bland_ = false;
      }
      pivot(leave, enter);
    }
  }

  void extract() {
    int n_ineq = static_cast<int>(lp_.ineq_a.size());
    int n_eq = static_cast<int>(lp_.eq_a.size());
    solution_.status = LpStatus::optimal;
    solution_.primal.assign(nvar_, 0.0);
    std::vector<double> colval(ncol_, 0.0);
    for (int r = 0; r < nrow_; ++r)
      if (active_[r]) colval[basis_[r]] = rhs_[r];
    for (int v = 0; v < nvar_; ++v) {
      double x = colval[pos_col_[v]];
      if (neg_col_[v] >= 0) x -= colval[neg_col_[v]];
      solution_.primal[v] = x;
    }
    double obj = 0.0;
    for (int v = 0; v < nvar_; ++v) obj += lp_.objective[v] * solution_.primal[v];
    solution_.objective_value = obj;

    solution_.duals_ineq.assign(n_ineq, 0.0);
    for (int i = 0; i < n_ineq; ++i)
      solution_.duals_ineq[i] = std::max(0.0, objrow_[slack_col_[i]]);
    solution_.duals_eq.assign(n_eq, 0.0);
    for (int k = 0; k < n_eq; ++k) {
      int r = n_ineq + k;
      solution_.duals_eq[k] = active_[r] ? sign_[r] * objrow_[art_col_[r]] : 0.0;
    }
  }
};

inline LpSolution solve(const LinearProgram& lp, double feas_tol = 1e-9,
                        double gap_tol = 1e-8) {
  return LpSolver(lp, feas_tol, gap_tol).solve();
}

// Optimises `secondary` over the primary optimal face: the primary value is
// pinned from below (it cannot rise above its optimum), then the secondary
// objective is solved on the result. The returned objective_value is the
// primary objective at the returned point; duals belong to the pinned
// program with the pin row dropped.
inline LpSolution solve_with_secondary(const LinearProgram& lp,
                                       std::span<const double> secondary, Sense sense,
                                       double feas_tol = 1e-9, double gap_tol = 1e-8) {
  if (secondary.size() != lp.objective.size())
    throw std::invalid_argument("secondary objective length mismatch");
  LpSolution first = solve(lp, feas_tol, gap_tol);
  if (first.status != LpStatus::optimal) return first;

  LinearProgram pinned = lp;
  std::vector<double> pin_row(lp.objective.size());
  for (std::size_t v = 0; v < lp.objective.size(); ++v) pin_row[v] = -lp.objective[v];
  pinned.ineq_a.push_back(pin_row);
  pinned.ineq_b.push_back(-(first.objective_value - gap_tol));
  pinned.objective.assign(secondary.begin(), secondary.end());
  if (sense == Sense::minimize)
    for (double& c : pinned.objective) c = -c;

  LpSolution second = solve(pinned, feas_tol, gap_tol);
  if (second.status != LpStatus::optimal) {
    pinned.ineq_b.back() = -(first.objective_value - 10.0 * gap_tol);
    second = solve(pinned, feas_tol, gap_tol);
  }
  if (second.status != LpStatus::optimal)
    throw std::runtime_error("secondary optimisation lost feasibility of the optimal face");

  LpSolution out;
  out.status = LpStatus::optimal;
  out.primal = second.primal;
  double obj = 0.0;
  for (std::size_t v = 0; v < lp.objective.size(); ++v)
    obj += lp.objective[v] * second.primal[v];
  out.objective_value = obj;
  out.duals_ineq.assign(second.duals_ineq.begin(), second.duals_ineq.end() - 1);
  out.duals_eq = second.duals_eq;
  return out;
}

}  // namespace nonsig
