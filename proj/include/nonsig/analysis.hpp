#pragma once

// Optimal value of a game over non-signalling strategies, by linear
// programming: primal builders (equality and relaxed form), the explicit
// dual, sensitivity of the value to slack in the signalling rows, the
// modified two-player program and the dummy-question lift for games with
// incomplete support, plus the combinatorial constants and parameter table
// of the repetition analysis. Exponential constants are handled in log
// space throughout.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nonsig/game.hpp"
#include "nonsig/lp.hpp"

namespace nonsig {

inline constexpr double kLinearSpaceLimit = 690.0;  // ln of ~1e300

struct LogValue {
  double log_value = 0.0;
  double value = 1.0;  // +inf once exp(log_value) leaves double range
};

inline LogValue make_log_value(double log_value) {
  LogValue v;
  v.log_value = log_value;
  v.value = log_value > kLinearSpaceLimit ? std::numeric_limits<double>::infinity()
                                          : std::exp(log_value);
  return v;
}

// Variables are O(a|q) indexed q * a_count + a over the full products. The
// signalling block holds one row per direction whose conditional
// Q(.|s^i-bar) exists; zero-denominator blocks are omitted entirely.
struct PrimalProgram {
  LinearProgram lp;
  bool relaxed = true;
  long var_count = 0;
  long q_count = 0;
  long a_count = 0;
  // Directions of the signalling rows, in row order. In the relaxed form
  // these are the inequality rows; in the equality form they are the first
  // eq rows, followed by one normalisation row per question tuple.
  std::vector<SignallingDirection> row_directions;
};

// Dummy-question mixture over (question tuple, dummy flag). Zero-probability
// tuples of the base game share mass eta and carry flag 1; supported tuples
// keep Q(q)(1 - eta) with flag 0.
struct LiftedGame {
  Game base;
  double eta = 0.0;
  long dummy_count = 0;
  std::vector<long> dummy_set;      // full-product indices of dummy tuples
  std::vector<double> lifted_dist;  // joint, indexed q * 2 + flag
};

inline std::vector<double> lifted_marginal(const LiftedGame& lg) {
  std::vector<double> m(lg.lifted_dist.size() / 2);
  for (std::size_t q = 0; q < m.size(); ++q)
    m[q] = lg.lifted_dist[2 * q] + lg.lifted_dist[2 * q + 1];
  return m;
}

namespace detail {

struct DirectionIndex {
  std::vector<Radix> q_red, a_red;         // per player
  std::vector<std::vector<double>> denom;  // per player, per reduced q index
};

inline DirectionIndex direction_index(const Radix& q, const Radix& a,
                                      std::span<const double> dist) {
  DirectionIndex di;
  int m = static_cast<int>(q.sizes.size());
  di.q_red.resize(m);
  di.a_red.resize(m);
  di.denom.resize(m);
  for (int i = 0; i < m; ++i) {
    di.q_red[i] = drop_player(q, i);
    di.a_red[i] = drop_player(a, i);
    di.denom[i].assign(di.q_red[i].total, 0.0);
    for (long qi = 0; qi < q.total; ++qi) {
      Tuple t = index_to_tuple(q, qi);
      Tuple r;
      for (int k = 0; k < m; ++k)
        if (k != i) r.push_back(t[k]);
      di.denom[i][tuple_to_index(di.q_red[i], r)] += dist[qi];
    }
  }
  return di;
}

// Coefficients of one signalling row over the O(a|q) variables.
inline void signalling_row(const Radix& q, const Radix& a, const DirectionIndex& di,
                           std::span<const double> dist, int i, long s_idx, long abar,
                           double prefactor, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  const Radix& qr = di.q_red[i];
  const Radix& ar = di.a_red[i];
  Tuple st = index_to_tuple(q, s_idx);
  Tuple sbar_t;
  for (int k = 0; k < static_cast<int>(st.size()); ++k)
    if (k != i) sbar_t.push_back(st[k]);
  long sbar = tuple_to_index(qr, sbar_t);
  double denom = di.denom[i][sbar];
  for (int bi = 0; bi < a.sizes[i]; ++bi)
    out[s_idx * a.total + insert_digit(a, ar, i, bi, abar)] += prefactor;
  for (int ri = 0; ri < q.sizes[i]; ++ri) {
    long r_idx = insert_digit(q, qr, i, ri, sbar);
    double w = dist[r_idx] / denom;
    if (w == 0.0) continue;
    for (int bi = 0; bi < a.sizes[i]; ++bi)
      out[r_idx * a.total + insert_digit(a, ar, i, bi, abar)] -= prefactor * w;
  }
}

// Shared builder: the constraint distribution drives the signalling rows,
// the objective distribution weighs the winning predicate.
inline PrimalProgram build_primal_impl(const GameTables& t,
                                       std::span<const double> constraint_dist,
                                       std::span<const double> objective_dist,
                                       bool relaxed) {
  PrimalProgram p;
  p.relaxed = relaxed;
  p.q_count = t.q.total;
  p.a_count = t.a.total;
  p.var_count = t.q.total * t.a.total;

  p.lp.objective.assign(p.var_count, 0.0);
  for (long qi = 0; qi < t.q.total; ++qi)
    for (long ai = 0; ai < t.a.total; ++ai)
      p.lp.objective[qi * t.a.total + ai] =
          objective_dist[qi] * t.win[qi * t.a.total + ai];
  p.lp.nonneg.assign(p.var_count, 1);

  if (t.players >= 2) {
    DirectionIndex di = direction_index(t.q, t.a, constraint_dist);
    std::vector<double> row(p.var_count);
    for (int i = 0; i < t.players; ++i) {
      const Radix& ar = di.a_red[i];
      for (long s_idx = 0; s_idx < t.q.total; ++s_idx) {
        Tuple st = index_to_tuple(t.q, s_idx);
        Tuple sbar_t;
        for (int k = 0; k < t.players; ++k)
          if (k != i) sbar_t.push_back(st[k]);
        if (di.denom[i][tuple_to_index(di.q_red[i], sbar_t)] == 0.0) continue;
        for (long abar = 0; abar < ar.total; ++abar) {
          signalling_row(t.q, t.a, di, constraint_dist, i, s_idx, abar,
                         constraint_dist[s_idx], row);
          if (relaxed) {
            p.lp.ineq_a.push_back(row);
            p.lp.ineq_b.push_back(0.0);
          } else {
            p.lp.eq_a.push_back(row);
            p.lp.eq_b.push_back(0.0);
          }
          p.row_directions.push_back(
              SignallingDirection{i, index_to_tuple(ar, abar), st[i], sbar_t});
        }
      }
    }
  }
  for (long qi = 0; qi < t.q.total; ++qi) {
    std::vector<double> norm(p.var_count, 0.0);
    for (long ai = 0; ai < t.a.total; ++ai) norm[qi * t.a.total + ai] = 1.0;
    p.lp.eq_a.push_back(std::move(norm));
    p.lp.eq_b.push_back(1.0);
  }
  return p;
}

}  // namespace detail

inline PrimalProgram build_primal(const Game& g, bool relaxed = true) {
  GameTables t = compile(g);
  return detail::build_primal_impl(t, t.qdist, t.qdist, relaxed);
}

// Lifted program: the complete-support mixture drives the signalling
// constraints, the original distribution keeps the objective.
inline PrimalProgram build_primal(const LiftedGame& lg, bool relaxed = true) {
  GameTables t = compile(lg.base);
  std::vector<double> marginal = lifted_marginal(lg);
  if (static_cast<long>(marginal.size()) != t.q.total)
    throw std::invalid_argument("lifted distribution size mismatch");
  return detail::build_primal_impl(t, marginal, t.qdist, relaxed);
}

// Explicit dual of the relaxed primal: variables z(q) (free) then one
// y_i(q, a^i-bar) >= 0 per kept signalling row; one constraint per (a, q).
// Encoded for the maximise-only solver as max -sum z, so the minimum of
// sum z is minus the solver's objective value.
struct DualProgram {
  LinearProgram lp;
  long z_count = 0;
  long y_count = 0;
  std::vector<SignallingDirection> y_directions;
};

namespace detail {

inline DualProgram build_dual_impl(const GameTables& t,
                                   std::span<const double> constraint_dist,
                                   std::span<const double> objective_dist) {
  DirectionIndex di = direction_index(t.q, t.a, constraint_dist);
  DualProgram d;
  d.z_count = t.q.total;

  // y column layout mirrors the primal row order.
  std::vector<std::vector<long>> ycol(t.players);
  long next = d.z_count;
  if (t.players >= 2) {
    for (int i = 0; i < t.players; ++i) {
      const Radix& ar = di.a_red[i];
      ycol[i].assign(t.q.total * ar.total, -1);
      for (long s_idx = 0; s_idx < t.q.total; ++s_idx) {
        Tuple st = index_to_tuple(t.q, s_idx);
        Tuple sbar_t;
        for (int k = 0; k < t.players; ++k)
          if (k != i) sbar_t.push_back(st[k]);
        if (di.denom[i][tuple_to_index(di.q_red[i], sbar_t)] == 0.0) continue;
        for (long abar = 0; abar < ar.total; ++abar) {
          ycol[i][s_idx * ar.total + abar] = next++;
          d.y_directions.push_back(
              SignallingDirection{i, index_to_tuple(ar, abar), st[i], sbar_t});
        }
      }
    }
  }
  d.y_count = next - d.z_count;

  long ncols = next;
  d.lp.objective.assign(ncols, 0.0);
  for (long z = 0; z < d.z_count; ++z) d.lp.objective[z] = -1.0;
  d.lp.nonneg.assign(ncols, 1);
  for (long z = 0; z < d.z_count; ++z) d.lp.nonneg[z] = 0;

  for (long qi = 0; qi < t.q.total; ++qi) {
    Tuple qt = index_to_tuple(t.q, qi);
    for (long ai = 0; ai < t.a.total; ++ai) {
      // Constraint (>= form): z(q) + sum_i Q(q) y_i(q, a^i-bar)
      //   - sum_i sum_{r^i} Q(r^i, q^i-bar) Q(q^i | q^i-bar) y_i(r, a^i-bar)
      //   >= Q(q) R(q, a), with the constraint distribution on the left and
      //   the objective distribution on the right.
      std::vector<double> row(ncols, 0.0);
      row[qi] = 1.0;
      Tuple at = index_to_tuple(t.a, ai);
      if (t.players >= 2) {
        for (int i = 0; i < t.players; ++i) {
          const Radix& qr = di.q_red[i];
          const Radix& ar = di.a_red[i];
          Tuple qbar_t, abar_t;
          for (int k = 0; k < t.players; ++k) {
            if (k == i) continue;
            qbar_t.push_back(qt[k]);
            abar_t.push_back(at[k]);
          }
          long qbar = tuple_to_index(qr, qbar_t);
          double denom = di.denom[i][qbar];
          if (denom == 0.0) continue;
          long abar = tuple_to_index(ar, abar_t);
          row[ycol[i][qi * ar.total + abar]] += constraint_dist[qi];
          double cond_own = constraint_dist[qi] / denom;
          for (int ri = 0; ri < t.q.sizes[i]; ++ri) {
            long r_idx = insert_digit(t.q, qr, i, ri, qbar);
            if (constraint_dist[r_idx] == 0.0) continue;
            row[ycol[i][r_idx * ar.total + abar]] -= constraint_dist[r_idx] * cond_own;
          }
        }
      }
      for (double& c : row) c = -c;  // flip >= to <=
      d.lp.ineq_a.push_back(std::move(row));
      d.lp.ineq_b.push_back(-(objective_dist[qi] * t.win[qi * t.a.total + ai]));
    }
  }
  return d;
}

inline LpSolution solved(const LinearProgram& lp, const char* what) {
  LpSolution s = nonsig::solve(lp);
  if (s.status != LpStatus::optimal)
    throw std::runtime_error(std::string(what) + ": solver did not reach an optimum");
  return s;
}

}  // namespace detail

inline DualProgram build_dual(const Game& g) {
  GameTables t = compile(g);
  return detail::build_dual_impl(t, t.qdist, t.qdist);
}

inline DualProgram build_dual(const LiftedGame& lg) {
  GameTables t = compile(lg.base);
  std::vector<double> marginal = lifted_marginal(lg);
  return detail::build_dual_impl(t, marginal, t.qdist);
}

inline double ns_value(const Game& g) {
  return detail::solved(build_primal(g, true).lp, "ns_value").objective_value;
}

inline double ns_value(const LiftedGame& lg) {
  return detail::solved(build_primal(lg, true).lp, "ns_value(lifted)").objective_value;
}

// min sum_q z(q) of the explicit dual.
inline double dual_value(const Game& g) {
  return -detail::solved(build_dual(g).lp, "dual_value").objective_value;
}

inline double dual_value(const LiftedGame& lg) {
  return -detail::solved(build_dual(lg).lp, "dual_value(lifted)").objective_value;
}

namespace detail {

inline Strategy cleaned_strategy(const Game& g, const PrimalProgram& p, LpSolution s) {
  Strategy st{g.question_alphabets, g.answer_alphabets, std::move(s.primal)};
  for (long qi = 0; qi < p.q_count; ++qi) {
    double sum = 0.0;
    for (long ai = 0; ai < p.a_count; ++ai) {
      double& v = st.table[qi * p.a_count + ai];
      if (v < 0.0) v = 0.0;
      sum += v;
    }
    for (long ai = 0; ai < p.a_count; ++ai) st.table[qi * p.a_count + ai] /= sum;
  }
  return st;
}

inline double kappa_of(const DualProgram& d, bool minimize, const char* what) {
  LpSolution s;
  if (minimize) {
    std::vector<double> secondary(d.lp.objective.size(), 0.0);
    for (long j = d.z_count; j < d.z_count + d.y_count; ++j) secondary[j] = 1.0;
    s = solve_with_secondary(d.lp, secondary, Sense::minimize);
  } else {
    s = nonsig::solve(d.lp);
  }
  if (s.status != LpStatus::optimal)
    throw std::runtime_error(std::string(what) + ": dual solve did not reach an optimum");
  double k = 0.0;
  for (long j = d.z_count; j < d.z_count + d.y_count; ++j) k += s.primal[j];
  return k;
}

}  // namespace detail

// Argmax of the relaxed primal, cleaned into a valid strategy table.
inline Strategy optimal_ns_strategy(const Game& g) {
  PrimalProgram p = build_primal(g, true);
  return detail::cleaned_strategy(g, p, detail::solved(p.lp, "optimal_ns_strategy"));
}

inline Strategy optimal_ns_strategy(const LiftedGame& lg) {
  PrimalProgram p = build_primal(lg, true);
  return detail::cleaned_strategy(lg.base, p,
                                  detail::solved(p.lp, "optimal_ns_strategy(lifted)"));
}

// Sum of the signalling dual variables at a dual optimum. With minimize set,
// the smallest such sum over the optimal face.
inline double kappa(const Game& g, bool minimize = false) {
  return detail::kappa_of(build_dual(g), minimize, "kappa");
}

inline double kappa(const LiftedGame& lg, bool minimize = false) {
  return detail::kappa_of(build_dual(lg), minimize, "kappa(lifted)");
}

// Relaxed primal with adjustable slack on the signalling rows, kept warm for
// repeated perturbations of the same game.
class PerturbationSolver {
 public:
  explicit PerturbationSolver(const Game& g)
      : prog_(build_primal(g, true)), solver_(prog_.lp) {}
  explicit PerturbationSolver(const LiftedGame& lg)
      : prog_(build_primal(lg, true)), solver_(prog_.lp) {}

  const PrimalProgram& program() const { return prog_; }
  long slack_rows() const { return static_cast<long>(prog_.lp.ineq_b.size()); }

  double value(double uniform_slack) {
    std::vector<double> e(prog_.lp.ineq_b.size(), uniform_slack);
    return value(e);
  }

  double value(std::span<const double> slacks) {
    for (double s : slacks)
      if (s < 0.0) throw std::invalid_argument("slack must be non-negative");
    const LpSolution& s = solver_.resolve_ineq_rhs(slacks);
    if (s.status != LpStatus::optimal)
      throw std::runtime_error("perturbed solve did not reach an optimum");
    return s.objective_value;
  }

  // Duals of the unperturbed program, for sensitivity predictions.
  const LpSolution& base_solution() { return solver_.solve(); }

 private:
  PrimalProgram prog_;
  LpSolver solver_;
};

inline double perturbed_value(const Game& g, double slack) {
  if (slack < 0.0) throw std::invalid_argument("slack must be non-negative");
  PerturbationSolver ps(g);
  return ps.value(slack);
}

// Two-player program for incomplete support: zero-probability question
// tuples keep their signalling rows with prefactor eta instead of Q(q).
// The relaxed variant also relaxes normalisation to sum_a O(a|q) <= 1.
struct ModifiedProgram {
  LinearProgram lp;
  long signalling_rows = 0;
  bool relaxed = true;
  long var_count = 0, q_count = 0, a_count = 0;
  std::vector<SignallingDirection> row_directions;
};

inline ModifiedProgram build_modified_two_player(const Game& g, double eta,
                                                 bool relaxed = true) {
  if (g.players != 2)
    throw std::invalid_argument("modified program is defined for exactly 2 players");
  if (!(eta > 0.0)) throw std::invalid_argument("eta must be positive");
  GameTables t = compile(g);
  detail::DirectionIndex di = detail::direction_index(t.q, t.a, t.qdist);

  ModifiedProgram p;
  p.relaxed = relaxed;
  p.q_count = t.q.total;
  p.a_count = t.a.total;
  p.var_count = t.q.total * t.a.total;
  p.lp.objective.assign(p.var_count, 0.0);
  for (long qi = 0; qi < t.q.total; ++qi)
    for (long ai = 0; ai < t.a.total; ++ai)
      p.lp.objective[qi * t.a.total + ai] = t.qdist[qi] * t.win[qi * t.a.total + ai];
  p.lp.nonneg.assign(p.var_count, 1);

  std::vector<double> row(p.var_count);
  for (int i = 0; i < 2; ++i) {
    const Radix& ar = di.a_red[i];
    for (long s_idx = 0; s_idx < t.q.total; ++s_idx) {
      Tuple st = index_to_tuple(t.q, s_idx);
      Tuple sbar_t{st[1 - i]};
      if (di.denom[i][tuple_to_index(di.q_red[i], sbar_t)] == 0.0) continue;
      double prefactor = t.qdist[s_idx] > 0.0 ? t.qdist[s_idx] : eta;
      for (long abar = 0; abar < ar.total; ++abar) {
        detail::signalling_row(t.q, t.a, di, t.qdist, i, s_idx, abar, prefactor, row);
        if (relaxed) {
          p.lp.ineq_a.push_back(row);
          p.lp.ineq_b.push_back(0.0);
        } else {
          p.lp.eq_a.push_back(row);
          p.lp.eq_b.push_back(0.0);
        }
        p.row_directions.push_back(
            SignallingDirection{i, index_to_tuple(ar, abar), st[i], sbar_t});
        ++p.signalling_rows;
      }
    }
  }
  for (long qi = 0; qi < t.q.total; ++qi) {
    std::vector<double> norm(p.var_count, 0.0);
    for (long ai = 0; ai < t.a.total; ++ai) norm[qi * t.a.total + ai] = 1.0;
    if (relaxed) {
      p.lp.ineq_a.push_back(std::move(norm));
      p.lp.ineq_b.push_back(1.0);
    } else {
      p.lp.eq_a.push_back(std::move(norm));
      p.lp.eq_b.push_back(1.0);
    }
  }
  return p;
}

// Explicit dual of the relaxed modified program: z(q) >= 0 per norm row
// (they are inequalities here), then one y >= 0 per kept signalling row in
// build_modified_two_player's row order.
inline DualProgram build_modified_dual(const Game& g, double eta) {
  ModifiedProgram p = build_modified_two_player(g, eta, true);
  DualProgram d;
  d.z_count = p.q_count;
  d.y_count = p.signalling_rows;
  d.y_directions = p.row_directions;
  long ncols = d.z_count + d.y_count;
  d.lp.objective.assign(ncols, 0.0);
  for (long z = 0; z < d.z_count; ++z) d.lp.objective[z] = -1.0;
  d.lp.nonneg.assign(ncols, 1);
  for (long col = 0; col < p.var_count; ++col) {
    std::vector<double> row(ncols, 0.0);
    row[col / p.a_count] = -1.0;
    for (long j = 0; j < p.signalling_rows; ++j)
      row[d.z_count + j] = -p.lp.ineq_a[j][col];
    d.lp.ineq_a.push_back(std::move(row));
    d.lp.ineq_b.push_back(-p.lp.objective[col]);
  }
  return d;
}

// Signalling duals of the modified program with the smallest maximum over
// the optimal dual face; the face itself is a polytope (each family of rows
// sharing (player, others' answers, others' questions) is linearly
// dependent), so a plain vertex solve can land anywhere on it. Order
// matches build_modified_two_player's row_directions.
inline std::vector<double> modified_signalling_duals(const Game& g, double eta) {
  DualProgram d = build_modified_dual(g, eta);
  LinearProgram lp = d.lp;
  long t_col = static_cast<long>(lp.objective.size());
  lp.objective.push_back(0.0);
  lp.nonneg.push_back(1);
  for (auto& r : lp.ineq_a) r.push_back(0.0);
  for (long j = 0; j < d.y_count; ++j) {
    std::vector<double> row(t_col + 1, 0.0);
    row[d.z_count + j] = 1.0;
    row[t_col] = -1.0;
    lp.ineq_a.push_back(std::move(row));
    lp.ineq_b.push_back(0.0);
  }
  std::vector<double> secondary(t_col + 1, 0.0);
  secondary[t_col] = 1.0;
  LpSolution s = solve_with_secondary(lp, secondary, Sense::minimize);
  if (s.status != LpStatus::optimal)
    throw std::runtime_error("modified dual solve did not reach an optimum");
  return {s.primal.begin() + d.z_count, s.primal.begin() + d.z_count + d.y_count};
}

inline LiftedGame complete_support_lift(const Game& g, double eta) {
  if (!(eta > 0.0 && eta < 1.0))
    throw std::invalid_argument("eta must lie strictly between 0 and 1");
  GameTables t = compile(g);
  LiftedGame lg;
  lg.base = g;
  lg.eta = eta;
  for (long qi = 0; qi < t.q.total; ++qi)
    if (t.qdist[qi] == 0.0) lg.dummy_set.push_back(qi);
  lg.dummy_count = static_cast<long>(lg.dummy_set.size());
  lg.lifted_dist.assign(2 * t.q.total, 0.0);
  if (lg.dummy_count == 0) {
    for (long qi = 0; qi < t.q.total; ++qi) lg.lifted_dist[2 * qi] = t.qdist[qi];
    return lg;
  }
  for (long qi = 0; qi < t.q.total; ++qi)
    lg.lifted_dist[2 * qi] = t.qdist[qi] * (1.0 - eta);
  for (long qi : lg.dummy_set)
    lg.lifted_dist[2 * qi + 1] = eta / static_cast<double>(lg.dummy_count);
  return lg;
}

// (l+1)^(product-1) * exp(-l eps^2 / 2), the type-counting tail bound.
inline LogValue sanov_delta(long l, double epsilon, long alphabet_product) {
  if (l < 1) throw std::invalid_argument("sanov_delta needs l >= 1");
  if (!(epsilon > 0.0)) throw std::invalid_argument("sanov_delta needs epsilon > 0");
  if (alphabet_product < 1)
    throw std::invalid_argument("sanov_delta needs a positive alphabet product");
  double lg =
      static_cast<double>(alphabet_product - 1) * std::log(static_cast<double>(l) + 1.0) -
      static_cast<double>(l) * epsilon * epsilon / 2.0;
  return make_log_value(lg);
}

// (n+1)^(q_count (a_count - 1)), the cost of the reduction to mixtures of
// i.i.d. strategies.
inline LogValue definetti_c(long n, long q_count, long a_count) {
  if (n < 0 || q_count < 1 || a_count < 1)
    throw std::invalid_argument("definetti_c needs n >= 0 and positive alphabet counts");
  double lg = static_cast<double>(q_count) * static_cast<double>(a_count - 1) *
              std::log(static_cast<double>(n) + 1.0);
  return make_log_value(lg);
}

// Number of (player, question tuple, reduced answer tuple) combinations.
inline long test_count_d(const Game& g) {
  if (g.players < 2)
    throw std::domain_error("test_count_d needs at least 2 players");
  Radix q = make_radix(g.question_alphabets);
  Radix a = make_radix(g.answer_alphabets);
  long d = 0;
  for (int i = 0; i < g.players; ++i) d += q.total * (a.total / a.sizes[i]);
  return d;
}

struct AnalysisReport {
  double ns_value = 0.0;
  double alpha = 0.0;            // 1 - ns_value
  double kappa = 0.0;            // sum of signalling duals at the default vertex
  double kappa_minimized = 0.0;  // smallest such sum over the optimal face
  long d = 0;
  bool relaxed_equals_equality = false;
};

inline AnalysisReport analyze(const Game& g) {
  AnalysisReport r;
  r.ns_value = ns_value(g);
  r.alpha = 1.0 - r.ns_value;
  double strict =
      detail::solved(build_primal(g, false).lp, "ns_value(equality)").objective_value;
  r.relaxed_equals_equality = std::abs(strict - r.ns_value) <= 2e-8;
  r.kappa = kappa(g, false);
  r.kappa_minimized = kappa(g, true);
  r.d = test_count_d(g);
  return r;
}

struct ThresholdParameters {
  double epsilon = 0.0;
  double zeta = 0.0;
  double nu = 0.0;
  double beta = 0.0;
  long n = 0;
  double delta = 0.0;  // estimation failure mass at block length n/2
  double c = 1.0;      // de Finetti reduction cost
  long d = 0;
  double kappa = 0.0;
  double W_ns = 0.0;   // best non-signalling guessing value
};

// Largest conditional probability of one player's question given the rest.
inline double max_question_conditional(const Game& g) {
  GameTables t = compile(g);
  detail::DirectionIndex di = detail::direction_index(t.q, t.a, t.qdist);
  double best = 0.0;
  for (int i = 0; i < g.players; ++i) {
    const Radix& qr = di.q_red[i];
    for (long qi = 0; qi < t.q.total; ++qi) {
      if (t.qdist[qi] == 0.0) continue;
      Tuple qt = index_to_tuple(t.q, qi);
      Tuple qbar_t;
      for (int k = 0; k < g.players; ++k)
        if (k != i) qbar_t.push_back(qt[k]);
      double denom = di.denom[i][tuple_to_index(qr, qbar_t)];
      best = std::max(best, t.qdist[qi] / denom);
    }
  }
  return best;
}

// The standard choice: eps = beta / (10 kappa), zeta = 8 eps, nu = eps.
inline ThresholdParameters default_parameters(const Game& g, double beta, long n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("default_parameters needs an even n >= 2");
  if (!(beta > 0.0)) throw std::invalid_argument("default_parameters needs beta > 0");
  ThresholdParameters p;
  p.beta = beta;
  p.n = n;
  p.kappa = kappa(g, true);
  p.epsilon = beta / (10.0 * p.kappa);
  p.zeta = 8.0 * p.epsilon;
  p.nu = p.epsilon;
  Radix q = make_radix(g.question_alphabets);
  Radix a = make_radix(g.answer_alphabets);
  p.delta = sanov_delta(n / 2, p.epsilon, q.total * a.total).value;
  p.c = definetti_c(n, q.total, a.total).value;
  p.d = test_count_d(g);
  p.W_ns = max_question_conditional(g);
  return p;
}

// The base game with its question distribution replaced by the lifted
// marginal; this is the game actually played in modified-repetition runs.
inline Game marginal_game(const LiftedGame& lg) {
  Game g = lg.base;
  g.questions.clear();
  Radix q = make_radix(g.question_alphabets);
  std::vector<double> marg = lifted_marginal(lg);
  for (long qi = 0; qi < q.total; ++qi)
    if (marg[qi] > 0.0) g.questions.emplace_back(index_to_tuple(q, qi), marg[qi]);
  return g;
}

inline ThresholdParameters default_parameters(const LiftedGame& lg, double beta, long n) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("default_parameters needs an even n >= 2");
  if (!(beta > 0.0)) throw std::invalid_argument("default_parameters needs beta > 0");
  ThresholdParameters p;
  p.beta = beta;
  p.n = n;
  p.kappa = kappa(lg, true);
  p.epsilon = beta / (10.0 * p.kappa);
  p.zeta = 8.0 * p.epsilon;
  p.nu = p.epsilon;
  Radix q = make_radix(lg.base.question_alphabets);
  Radix a = make_radix(lg.base.answer_alphabets);
  p.delta = sanov_delta(n / 2, p.epsilon, q.total * a.total).value;
  p.c = definetti_c(n, q.total, a.total).value;
  p.d = test_count_d(lg.base);
  p.W_ns = max_question_conditional(marginal_game(lg));
  return p;
}

struct ParameterCheck {
  std::string name;
  bool pass = false;
  double margin = 0.0;  // positive slack when satisfied, deficit when not
  std::string detail;
};

struct ParameterCheckReport {
  std::vector<ParameterCheck> rows;
  bool all_pass = true;
};

namespace detail {

inline void add_check(ParameterCheckReport& rep, std::string name, bool pass,
                      double margin, std::string det) {
  rep.all_pass = rep.all_pass && pass;
  rep.rows.push_back(ParameterCheck{std::move(name), pass, margin, std::move(det)});
}

inline bool matches_log_scale(double stored, double formula_log, double rel_tol) {
  if (formula_log > kLinearSpaceLimit) return std::isinf(stored) || stored >= 1e300;
  if (formula_log < -kLinearSpaceLimit) return std::abs(stored) <= 1e-290;
  double expect = std::exp(formula_log);
  return std::abs(stored - expect) <=
         rel_tol * std::max({std::abs(expect), std::abs(stored), 1e-300});
}

}  // namespace detail

// Evaluates every row of the parameter table plus the two block-length
// conditions; never throws on bad parameters, it reports them instead.
inline ParameterCheckReport check_parameters(const Game& g, const ThresholdParameters& p) {
  ParameterCheckReport rep;
  GameTables t = compile(g);
  double qa = static_cast<double>(t.q.total) * static_cast<double>(t.a.total);
  double min_support = std::numeric_limits<double>::infinity();
  for (double v : t.qdist)
    if (v > 0.0) min_support = std::min(min_support, v);

  double alpha = 1.0 - ns_value(g);

  detail::add_check(rep, "epsilon_range", p.epsilon > 0.0 && p.epsilon <= min_support,
                    min_support - p.epsilon,
                    "0 < epsilon <= min supported question probability " +
                        std::to_string(min_support));
  detail::add_check(rep, "zeta_lower", p.zeta >= 7.0 * p.epsilon,
                    p.zeta - 7.0 * p.epsilon, "zeta >= 7 epsilon");
  detail::add_check(rep, "zeta_upper", p.zeta <= 1.0, 1.0 - p.zeta, "zeta <= 1");
  detail::add_check(rep, "beta_range", p.beta > 0.0 && p.beta <= alpha + 1e-12,
                    alpha - p.beta, "0 < beta <= alpha = " + std::to_string(alpha));
  double budget = p.beta / p.kappa;
  detail::add_check(rep, "zeta_kappa",
                    p.zeta + 2.0 * p.epsilon <= budget + 1e-12 * std::max(1.0, budget),
                    budget - p.zeta - 2.0 * p.epsilon,
                    "zeta + 2 epsilon <= beta / kappa");
  detail::add_check(rep, "nu_upper", p.nu < p.zeta - 6.0 * p.epsilon,
                    p.zeta - 6.0 * p.epsilon - p.nu, "nu < zeta - 6 epsilon");

  // Lower end of the nu window, evaluated in log space: 2 c delta must be
  // below 1 before the bound 2 c delta / (1 - 2 c delta) W_ns means anything.
  long half = std::max<long>(p.n / 2, 0);
  double log_delta = (qa - 1.0) * std::log(static_cast<double>(half) + 1.0) -
                     static_cast<double>(half) * p.epsilon * p.epsilon / 2.0;
  double log_c = static_cast<double>(t.q.total) * static_cast<double>(t.a.total - 1) *
                 std::log(static_cast<double>(std::max<long>(p.n, 0)) + 1.0);
  double log_2cd = std::log(2.0) + log_c + log_delta;
  if (log_2cd >= 0.0) {
    detail::add_check(rep, "nu_lower", false, -log_2cd,
                      "2 c delta >= 1, guessing advantage bound is vacuous");
  } else {
    double tcd = std::exp(log_2cd);
    double lower = tcd / (1.0 - tcd) * p.W_ns;
    detail::add_check(rep, "nu_lower", p.nu > lower, p.nu - lower,
                      "nu > 2 c delta / (1 - 2 c delta) * W_ns = " + std::to_string(lower));
  }

  detail::add_check(rep, "n_even", p.n >= 2 && p.n % 2 == 0,
                    static_cast<double>(p.n % 2 == 0 ? p.n - 2 : -1), "n even, n >= 2");

  double log_n = std::log(static_cast<double>(std::max<long>(p.n, 2)));
  double lhs = static_cast<double>(p.n) / log_n;
  double rhs_eps = 20.0 * qa * std::log(2.0 / p.epsilon) / (p.epsilon * p.epsilon);
  detail::add_check(rep, "n_vs_epsilon", lhs > rhs_eps, lhs - rhs_eps,
                    "n / ln n > 20 |Q||A| ln(2/epsilon) / epsilon^2 = " +
                        std::to_string(rhs_eps));
  double ratio = p.beta / (10.0 * p.kappa);
  double rhs_beta = 20.0 * qa * std::log(20.0 * p.kappa / p.beta) / (ratio * ratio);
  detail::add_check(rep, "n_vs_beta", lhs > rhs_beta, lhs - rhs_beta,
                    "n / ln n > 20 |Q||A| ln(20 kappa/beta) / (beta/10 kappa)^2 = " +
                        std::to_string(rhs_beta));

  detail::add_check(rep, "delta_consistent",
                    detail::matches_log_scale(p.delta, log_delta, 1e-9), 0.0,
                    "delta = (n/2+1)^(|A||Q|-1) exp(-n epsilon^2 / 4)");
  detail::add_check(rep, "c_consistent", detail::matches_log_scale(p.c, log_c, 1e-9),
                    0.0, "c = (n+1)^(|Q|(|A|-1))");
  detail::add_check(rep, "d_consistent", p.d == test_count_d(g),
                    static_cast<double>(p.d - test_count_d(g)),
                    "d matches the direction count");
  double wns = max_question_conditional(g);
  detail::add_check(rep, "W_ns_consistent",
                    std::abs(p.W_ns - wns) <= 1e-9 * std::max(1.0, wns), p.W_ns - wns,
                    "W_ns = max_i,q Q(q^i | q^i-bar) = " + std::to_string(wns));
  return rep;
}

struct ThresholdBound {
  double log_bound = 0.0;  // un-clamped natural log of the tail bound
  double bound = 1.0;      // clamped to [0, 1]
  long n_below_one = 2;    // first even n past the peak with bound < 1
  double kappa = 0.0;
  double alpha = 0.0;
};

// Tail bound C1 exp(-(n/4)(beta/10 kappa)^2) with
// C1 = 10 m |Q||A| (n+1)^(2(|Q||A|-1)), evaluated in log space. The core
// takes alpha and kappa directly so lifted games can supply theirs.
inline ThresholdBound threshold_bound_with(int players, long q_total, long a_total,
                                           long n, double beta, double alpha,
                                           double kappa_value) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("threshold_bound needs an even n >= 2");
  ThresholdBound out;
  out.alpha = alpha;
  if (!(beta > 0.0 && beta <= alpha + 1e-12))
    throw std::domain_error("threshold_bound needs 0 < beta <= alpha");
  out.kappa = kappa_value;
  double qa = static_cast<double>(q_total) * static_cast<double>(a_total);
  double log_k = std::log(10.0 * players * qa);
  double bexp = 2.0 * (qa - 1.0);

  if (out.kappa <= 0.0) {
    out.log_bound = -std::numeric_limits<double>::infinity();
    out.bound = 0.0;
    out.n_below_one = 2;
    return out;
  }
  double rate = beta / (10.0 * out.kappa);
  double slope = rate * rate / 4.0;
  auto log_bound_at = [&](double nn) {
    return log_k + bexp * std::log(nn + 1.0) - slope * nn;
  };
  out.log_bound = log_bound_at(static_cast<double>(n));
  out.bound = out.log_bound >= 0.0 ? 1.0 : std::exp(out.log_bound);

  // The log bound rises to its peak near bexp/slope - 1, then decreases;
  // find the first even n at or past the peak from which it stays negative.
  // A crossing always exists for positive slope, but for vanishing beta it
  // can exceed what a long holds, so the search saturates at 2^61.
  const long n_cap = 1L << 61;
  double peak = std::max(2.0, bexp / slope - 1.0);
  if (peak >= static_cast<double>(n_cap)) {
    out.n_below_one = n_cap;
    return out;
  }
  long lo = 2 * static_cast<long>(std::ceil(peak / 2.0));
  if (log_bound_at(static_cast<double>(lo)) < 0.0) {
    out.n_below_one = 2;
    return out;
  }
  long hi = lo;
  while (log_bound_at(static_cast<double>(hi)) >= 0.0) {
    if (hi >= n_cap) {
      out.n_below_one = n_cap;
      return out;
    }
    hi *= 2;
  }
  long left = lo, right = hi;  // log >= 0 at left, < 0 at right
  while (right - left > 2) {
    long mid = left + (right - left) / 2;
    mid -= mid % 2;
    if (mid <= left) mid = left + 2;
    if (log_bound_at(static_cast<double>(mid)) < 0.0)
      right = mid;
    else
      left = mid;
  }
  out.n_below_one = right;
  return out;
}

inline ThresholdBound threshold_bound(const Game& g, long n, double beta) {
  Radix q = make_radix(g.question_alphabets);
  Radix a = make_radix(g.answer_alphabets);
  return threshold_bound_with(g.players, q.total, a.total, n, beta, 1.0 - ns_value(g),
                              kappa(g, true));
}

inline ThresholdBound threshold_bound(const LiftedGame& lg, long n, double beta) {
  Radix q = make_radix(lg.base.question_alphabets);
  Radix a = make_radix(lg.base.answer_alphabets);
  return threshold_bound_with(lg.base.players, q.total, a.total, n, beta,
                              1.0 - ns_value(lg), kappa(lg, true));
}

// Largest inverse entry over every non-singular square submatrix.
inline double submatrix_delta(const std::vector<std::vector<double>>& m,
                              long enumeration_budget = 200000) {
  long r1 = static_cast<long>(m.size());
  long r2 = r1 ? static_cast<long>(m[0].size()) : 0;
  if (r1 == 0 || r2 == 0) throw std::invalid_argument("submatrix_delta: empty matrix");
  long kmax = std::min(r1, r2);

  // Count the work first; this enumeration is exponential by nature.
  double total = 0.0;
  for (long k = 1; k <= kmax; ++k) {
    double ways = 1.0, ways2 = 1.0;
    for (long j = 0; j < k; ++j) {
      ways *= static_cast<double>(r1 - j) / static_cast<double>(j + 1);
      ways2 *= static_cast<double>(r2 - j) / static_cast<double>(j + 1);
    }
    total += ways * ways2;
    if (total > static_cast<double>(enumeration_budget))
      throw std::length_error("submatrix_delta: enumeration would exceed the budget");
  }

  double delta = 0.0;
  std::vector<long> rows_sel, cols_sel;
  std::vector<double> b;  // k x 2k scratch for Gauss-Jordan on [B | I]
  auto next_combination = [](std::vector<long>& c, long limit) {
    long k = static_cast<long>(c.size());
    for (long i = k - 1; i >= 0; --i) {
      if (c[i] < limit - (k - i)) {
        ++c[i];
        for (long j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
        return true;
      }
    }
    return false;
  };
  for (long k = 1; k <= kmax; ++k) {
    rows_sel.resize(k);
    for (long i = 0; i < k; ++i) rows_sel[i] = i;
    do {
      cols_sel.resize(k);
      for (long i = 0; i < k; ++i) cols_sel[i] = i;
      do {
        b.assign(k * 2 * k, 0.0);
        for (long i = 0; i < k; ++i) {
          for (long j = 0; j < k; ++j) b[i * 2 * k + j] = m[rows_sel[i]][cols_sel[j]];
          b[i * 2 * k + k + i] = 1.0;
        }
        bool singular = false;
        for (long col = 0; col < k && !singular; ++col) {
          long piv = -1;
          double best = 1e-10;
          for (long r = col; r < k; ++r) {
            double v = std::abs(b[r * 2 * k + col]);
            if (v > best) {
              best = v;
              piv = r;
            }
          }
          if (piv < 0) {
            singular = true;
            break;
          }
          if (piv != col)
            for (long j = 0; j < 2 * k; ++j)
              std::swap(b[piv * 2 * k + j], b[col * 2 * k + j]);
          double pv = b[col * 2 * k + col];
          for (long j = 0; j < 2 * k; ++j) b[col * 2 * k + j] /= pv;
          for (long r = 0; r < k; ++r) {
            if (r == col) continue;
            double f = b[r * 2 * k + col];
            if (f == 0.0) continue;
            for (long j = 0; j < 2 * k; ++j) b[r * 2 * k + j] -= f * b[col * 2 * k + j];
          }
        }
        if (!singular)
          for (long i = 0; i < k; ++i)
            for (long j = 0; j < k; ++j)
              delta = std::max(delta, std::abs(b[i * 2 * k + k + j]));
      } while (next_combination(cols_sel, r2));
    } while (next_combination(rows_sel, r1));
  }
  return delta;
}

// Vertex-solution bound r2 Delta sum|c_j| on the total dual mass, hence on
// kappa. The enumeration behind Delta only admits very small games.
inline double dual_solution_bound(const Game& g) {
  DualProgram d = build_dual(g);
  if (static_cast<long>(d.lp.objective.size()) > 12)
    throw std::length_error(
        "dual_solution_bound: dual constraint matrix exceeds 12 columns");

  // Pure-inequality form of the primal: signalling rows, normalisation split
  // into <= and >=, then positivity. A dual vertex solves a square
  // subsystem of its transpose, so its entries obey the inverse bound.
  PrimalProgram p = build_primal(g, true);
  long r2 = p.var_count;
  std::vector<std::vector<double>> a;
  for (const auto& row : p.lp.ineq_a) a.push_back(row);
  for (const auto& row : p.lp.eq_a) {
    a.push_back(row);
    std::vector<double> neg(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) neg[j] = -row[j];
    a.push_back(std::move(neg));
  }
  for (long v = 0; v < r2; ++v) {
    std::vector<double> e(r2, 0.0);
    e[v] = -1.0;
    a.push_back(std::move(e));
  }
  double delta = submatrix_delta(a);
  double c1 = 0.0;
  for (double c : p.lp.objective) c1 += std::abs(c);
  return static_cast<double>(r2) * delta * c1;
}

}  // namespace nonsig
