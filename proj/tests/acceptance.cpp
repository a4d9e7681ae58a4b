// Acceptance gate: twelve numbered checks with pinned values and tolerances.
// Each check prints one PASS or FAIL line; its runtime budget is part of the
// pass condition. The exit status is 0 only when every check passes.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "helpers.hpp"
#include "nonsig/analysis.hpp"
#include "nonsig/game.hpp"
#include "nonsig/io.hpp"
#include "nonsig/lp.hpp"
#include "nonsig/repetition.hpp"
#include "nonsig/rng.hpp"
#include "nonsig/signalling.hpp"
#include "nonsig/stats.hpp"

using namespace nonsig;

namespace {

struct Check {
  bool pass = true;
  long asserts = 0;
  std::string first_failure;

  void require(bool ok, const std::string& what) {
    ++asserts;
    if (!ok && pass) first_failure = what;
    pass = pass && ok;
  }
};

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

// Stochastic runs register themselves here; the determinism check replays
// each one at several worker counts and compares the trial CSVs bytewise.
struct Replay {
  std::string label;
  std::string original;
  std::function<std::string(int)> csv;
};

std::vector<Replay> g_replays;

// Every trial row any experiment produced, for the frequency identity.
std::vector<TrialRecord> g_rows;

void record_rows(const std::vector<TrialRecord>& rows) {
  g_rows.insert(g_rows.end(), rows.begin(), rows.end());
}

double strict_value(const Game& g) {
  LpSolution s = solve(build_primal(g, false).lp);
  if (s.status != LpStatus::optimal)
    throw std::runtime_error("equality-form program did not reach an optimum");
  return s.objective_value;
}

// 52 games: the two named ones plus 50 random complete-support games.
// Three-player entries carry at most one three-letter slot so the
// perturbation sweep stays inside its budget.
const std::vector<Game>& corpus() {
  static const std::vector<Game> games = [] {
    std::vector<Game> out;
    out.push_back(builtin_game("chsh"));
    out.push_back(builtin_game("gyni2"));
    CounterRng rng(20260814, 0);
    for (int k = 0; k < 25; ++k) out.push_back(testgen::random_complete_game(rng, 2, 3));
    for (int k = 0; k < 15; ++k) out.push_back(testgen::random_complete_game(rng, 3, 2));
    int taken = 0;
    while (taken < 10) {
      Game g = testgen::random_complete_game(rng, 3, 3);
      int threes = 0;
      for (int s : g.question_alphabets) threes += s == 3;
      for (int s : g.answer_alphabets) threes += s == 3;
      if (threes != 1) continue;
      out.push_back(std::move(g));
      ++taken;
    }
    return out;
  }();
  return games;
}

std::string check_lift_values(Check& ctx) {
  Game anti = builtin_game("anticorr3");
  double base = ns_value(anti);
  ctx.require(std::abs(base - 1.0) <= 1e-6, "base optimum " + fmt(base) + " != 1");
  std::ostringstream d;
  d << "base=" << fmt(base) << " lifted=";
  for (double eta : {0.01, 0.1, 0.5}) {
    double v = ns_value(complete_support_lift(anti, eta));
    ctx.require(std::abs(v - 2.0 / 3.0) <= 1e-6,
                "lifted optimum at eta=" + fmt(eta) + " is " + fmt(v) + " != 2/3");
    d << fmt(v) << (eta == 0.5 ? "" : ",");
  }
  return d.str();
}

std::string check_relaxation_tightness(Check& ctx) {
  double worst = 0.0;
  for (const Game& g : corpus()) {
    double gap = std::abs(ns_value(g) - strict_value(g));
    worst = std::max(worst, gap);
    ctx.require(gap <= 1e-7, "relaxed vs equality gap " + fmt(gap));
  }
  return "games=" + std::to_string(corpus().size()) + " max gap=" + fmt(worst);
}

std::string check_duality_and_sensitivity(Check& ctx) {
  CounterRng rng(31415, 1);
  double worst_gap = 0.0, worst_excess = -1.0;
  for (const Game& g : corpus()) {
    double primal = ns_value(g);
    double dual = dual_value(g);
    worst_gap = std::max(worst_gap, std::abs(primal - dual));
    ctx.require(std::abs(primal - dual) <= 1e-7,
                "duality gap " + fmt(std::abs(primal - dual)));

    PerturbationSolver ps(g);
    const LpSolution& sol = ps.base_solution();
    const std::vector<double> ystar = sol.duals_ineq;
    const double base = sol.objective_value;
    std::vector<double> e(ystar.size());
    for (int k = 0; k < 100; ++k) {
      double predicted = base;
      for (double& x : e) {
        x = rng.next_unit() < 0.3 ? 0.0 : 0.1 * rng.next_unit();
      }
      for (std::size_t j = 0; j < e.size(); ++j) predicted += e[j] * ystar[j];
      double v = ps.value(e);
      worst_excess = std::max(worst_excess, v - predicted);
      ctx.require(v <= predicted + 1e-7,
                  "perturbed optimum exceeds dual prediction by " + fmt(v - predicted));
    }

    double kap = kappa(g);
    for (double s : {0.01, 0.05, 0.1}) {
      double v = perturbed_value(g, s);
      ctx.require(v <= primal + s * kap + 1e-7,
                  "uniform slack " + fmt(s) + " exceeds value + s*kappa by " +
                      fmt(v - primal - s * kap));
    }
  }
  return "max duality gap=" + fmt(worst_gap) +
         " max prediction excess=" + fmt(worst_excess);
}

std::string check_modified_program_duals(Check& ctx) {
  CounterRng rng(9090, 0);
  double max_dual = 0.0;
  for (int k = 0; k < 20; ++k) {
    Game g = testgen::random_incomplete_two_player(rng, 3);
    for (double eta : {1e-3, 1e-2, 1e-1}) {
      ModifiedProgram mp = build_modified_two_player(g, eta, true);
      double primal = solve(mp.lp).objective_value;
      double dual = -solve(build_modified_dual(g, eta).lp).objective_value;
      ctx.require(std::abs(primal - dual) <= 1e-7,
                  "modified duality gap " + fmt(std::abs(primal - dual)));
      std::vector<double> y = modified_signalling_duals(g, eta);
      ctx.require(y.size() == static_cast<std::size_t>(mp.signalling_rows),
                  "dual count mismatch");
      double sum = 0.0;
      for (double yj : y) {
        max_dual = std::max(max_dual, yj);
        sum += yj;
        ctx.require(yj <= 1.0 + 1e-8, "signalling dual " + fmt(yj) + " above 1");
      }
      ctx.require(sum <= static_cast<double>(mp.signalling_rows) + 1e-6,
                  "kappa " + fmt(sum) + " above d=" + std::to_string(mp.signalling_rows));
    }
  }
  return "60 programs, max signalling dual=" + fmt(max_dual);
}

std::string check_sig_forms(Check& ctx) {
  CounterRng rng(555, 0);
  Game cur;
  std::vector<SignallingDirection> dirs;
  double worst_form_gap = 0.0;
  for (int k = 0; k < 1000; ++k) {
    if (k % 20 == 0) {
      int players = (k / 20) % 2 == 0 ? 2 : 3;
      cur = testgen::random_complete_game(rng, players, players == 2 ? 3 : 2);
      dirs = enumerate_directions(cur.question_alphabets, cur.answer_alphabets);
    }
    Strategy s =
        testgen::random_strategy(rng, cur.question_alphabets, cur.answer_alphabets);
    const SignallingDirection& d = dirs[rng.next_int(static_cast<int>(dirs.size()))];
    std::optional<double> joint = sig_value(cur, s, d, SigForm::joint);
    std::optional<double> cond = sig_value(cur, s, d, SigForm::conditional);
    ctx.require(joint.has_value() && cond.has_value(),
                "direction undefined on a complete-support game");
    if (joint && cond) {
      double gap = std::abs(*joint - *cond);
      worst_form_gap = std::max(worst_form_gap, gap);
      ctx.require(gap <= 1e-10, "form disagreement " + fmt(gap));
    }
  }

  double worst_ns = 0.0;
  for (int k = 0; k < 100; ++k) {
    if (k % 10 == 0) {
      int players = (k / 10) % 2 == 0 ? 2 : 3;
      cur = testgen::random_complete_game(rng, players, players == 2 ? 3 : 2);
      dirs = enumerate_directions(cur.question_alphabets, cur.answer_alphabets);
    }
    Strategy p1 = testgen::random_product_strategy(rng, cur.question_alphabets,
                                                   cur.answer_alphabets);
    Strategy s = p1;
    if (k % 2 == 1) {
      Strategy p2 = testgen::random_product_strategy(rng, cur.question_alphabets,
                                                     cur.answer_alphabets);
      s = testgen::mix_strategies(p1, p2, rng.next_unit());
    }
    for (const SignallingDirection& d : dirs) {
      for (SigForm form : {SigForm::conditional, SigForm::joint}) {
        std::optional<double> v = sig_value(cur, s, d, form);
        ctx.require(v.has_value(), "direction undefined on a complete-support game");
        if (v) {
          worst_ns = std::max(worst_ns, std::abs(*v));
          ctx.require(std::abs(*v) <= 1e-10,
                      "non-signalling strategy shows " + fmt(*v));
        }
      }
    }
  }

  Game chsh = builtin_game("chsh");
  Strategy echo = echo_strategy({2, 2}, {2, 2}, 1, 0);
  SignallingDirection pinned{1, {1}, 1, {0}};
  for (SigForm form : {SigForm::conditional, SigForm::joint}) {
    std::optional<double> v = sig_value(chsh, echo, pinned, form);
    ctx.require(v.has_value() && std::abs(*v - 0.125) <= 1e-12,
                "echo direction value " + (v ? fmt(*v) : std::string("undefined")));
  }
  return "max form gap=" + fmt(worst_form_gap) + " max |Sig| on product=" +
         fmt(worst_ns);
}

std::string check_continuity(Check& ctx) {
  CounterRng rng(666, 0);
  double worst_ratio = 0.0;
  for (double eps : {0.01, 0.1}) {
    Game cur;
    std::vector<SignallingDirection> dirs;
    for (int k = 0; k < 1000; ++k) {
      if (k % 25 == 0) {
        int players = (k / 25) % 2 == 0 ? 2 : 3;
        cur = testgen::random_complete_game(rng, players, players == 2 ? 3 : 2);
        dirs = enumerate_directions(cur.question_alphabets, cur.answer_alphabets);
      }
      Strategy s1 =
          testgen::random_strategy(rng, cur.question_alphabets, cur.answer_alphabets);
      Strategy s3 =
          testgen::random_strategy(rng, cur.question_alphabets, cur.answer_alphabets);
      double d13 = strategy_distance(cur, s1, s3);
      double lam = d13 > eps ? eps / d13 : 1.0;
      Strategy s2 = testgen::mix_strategies(s1, s3, lam);
      ctx.require(strategy_distance(cur, s1, s2) <= eps + 1e-12,
                  "pair construction exceeded the distance target");

      std::vector<double> player_sum(cur.players, 0.0);
      for (const SignallingDirection& d : dirs) {
        std::optional<double> v1 = sig_value(cur, s1, d);
        std::optional<double> v2 = sig_value(cur, s2, d);
        ctx.require(v1.has_value() && v2.has_value(),
                    "direction undefined on a complete-support game");
        if (!v1 || !v2) continue;
        double diff = std::abs(*v1 - *v2);
        worst_ratio = std::max(worst_ratio, diff / (2.0 * eps));
        ctx.require(diff <= 2.0 * eps + 1e-10,
                    "per-direction change " + fmt(diff) + " above 2*" + fmt(eps));
        player_sum[d.player] += diff;
      }
      for (double s : player_sum)
        ctx.require(s <= 2.0 * eps + 1e-9,
                    "summed change " + fmt(s) + " above 2*" + fmt(eps));
    }
  }
  return "2000 pairs, max per-direction change / 2 eps=" + fmt(worst_ratio);
}

std::string check_estimation_tails(Check& ctx) {
  Game chsh = builtin_game("chsh");
  GameTables t = compile(chsh);
  std::vector<double> qcdf = cumulative(t.qdist);
  struct Fixed {
    const char* name;
    Strategy s;
  };
  const std::vector<Fixed> fixed = {
      {"uniform", uniform_strategy({2, 2}, {2, 2})},
      {"pr_box", testgen::pr_box()},
      {"echo", echo_strategy({2, 2}, {2, 2}, 1, 0)},
  };
  std::ostringstream d;
  long combo = 0;
  for (const Fixed& f : fixed) {
    const long at = t.a.total;
    std::vector<std::vector<double>> rows;
    for (long qi = 0; qi < t.q.total; ++qi)
      rows.push_back(
          cumulative(std::span<const double>(f.s.table.data() + qi * at, at)));
    for (long l : {2000L, 5000L}) {
      for (double eps : {0.1, 0.15}) {
        long fails = 0;
        std::vector<long> qs(l), as(l);
        for (long tr = 0; tr < 500; ++tr) {
          CounterRng rng(4242, static_cast<std::uint64_t>(combo) * 8000 +
                                   8 * static_cast<std::uint64_t>(tr));
          for (long j = 0; j < l; ++j) {
            long qi = static_cast<long>(rng.next_from_cdf(qcdf));
            qs[j] = qi;
            as[j] = static_cast<long>(rng.next_from_cdf(rows[qi]));
          }
          EstimatedStrategy est = estimate_strategy(
              qs, as, chsh.question_alphabets, chsh.answer_alphabets);
          fails += strategy_distance(chsh, est, f.s) > eps ? 1 : 0;
        }
        double freq = static_cast<double>(fails) / 500.0;
        double delta = std::min(1.0, sanov_delta(l, eps, 16).value);
        WilsonInterval wi = wilson_interval(fails, 500);
        ctx.require(freq <= delta + (wi.high - freq),
                    std::string(f.name) + " l=" + std::to_string(l) +
                        " eps=" + fmt(eps) + " failure rate " + fmt(freq) +
                        " above bound " + fmt(delta));
        if (l == 5000)
          ctx.require(freq <= 0.05, std::string(f.name) + " eps=" + fmt(eps) +
                                        " failure rate " + fmt(freq) +
                                        " above 0.05 at l=5000");
        if (l == 5000 && eps == 0.1) d << f.name << "=" << fmt(freq) << " ";
        ++combo;
      }
    }
  }
  return "12 combos, failure rates at l=5000 eps=0.1: " + d.str();
}

std::string check_test_reliability(Check& ctx) {
  Game gyni = builtin_game("gyni2");
  Strategy echo = echo_strategy(gyni.question_alphabets, gyni.answer_alphabets, 0, 1);
  SigReport sweep = max_sig(gyni, echo);
  SignallingDirection dir = sweep.max_direction;

  ReliabilityReport er =
      run_test_reliability_experiment(gyni, echo, dir, 20000, 0.2, 0.02, 300, 2026, 2);
  record_rows(er.rows);
  g_replays.push_back(
      {"reliability-echo", trials_csv(er.rows, 2026), [=](int th) {
         return trials_csv(run_test_reliability_experiment(gyni, echo, dir, 20000, 0.2,
                                                           0.02, 300, 2026, th)
                               .rows,
                           2026);
       }});
  ctx.require(er.accept_count >= 297,
              "echo accepted " + std::to_string(er.accept_count) +
                  "/300; its largest measure is " + fmt(sweep.max_value) +
                  ", below the firing threshold zeta - 2 eps = 0.16, so the test "
                  "cannot fire at these parameters");

  CounterRng prng(83, 0);
  Strategy prod = testgen::random_product_strategy(prng, gyni.question_alphabets,
                                                   gyni.answer_alphabets);
  ReliabilityReport pr =
      run_test_reliability_experiment(gyni, prod, dir, 20000, 0.2, 0.02, 300, 2027, 2);
  record_rows(pr.rows);
  g_replays.push_back(
      {"reliability-product", trials_csv(pr.rows, 2027), [=](int th) {
         return trials_csv(run_test_reliability_experiment(gyni, prod, dir, 20000, 0.2,
                                                           0.02, 300, 2027, th)
                               .rows,
                           2027);
       }});
  ctx.require(300 - pr.accept_count >= 297,
              "product rejected " + std::to_string(300 - pr.accept_count) + "/300");
  return "echo accepted " + std::to_string(er.accept_count) + "/300 (needs >= 297)" +
         ", product rejected " + std::to_string(300 - pr.accept_count) + "/300";
}

std::string check_guessing_game(Check& ctx) {
  Game chsh = builtin_game("chsh");
  SignallingDirection dir{0, {0}, 0, {0}};
  Strategy box = testgen::pr_box();
  IIDStrategy ns(box);
  GuessingGameReport nr = guessing_game(chsh, ns, dir, 2000, 0.105, 0.015, 2000, 3101, 2);
  record_rows(nr.rows);
  g_replays.push_back({"guessing-nonsignalling", trials_csv(nr.rows, 3101), [=](int th) {
                         IIDStrategy s(box);
                         return trials_csv(
                             guessing_game(chsh, s, dir, 2000, 0.105, 0.015, 2000, 3101, th)
                                 .rows,
                             3101);
                       }});
  ctx.require(std::abs(nr.W_ns - 0.5) <= 1e-12, "base rate " + fmt(nr.W_ns));
  double sigma = std::sqrt(nr.W_ns * (1.0 - nr.W_ns) / 2000.0);
  ctx.require(std::abs(nr.empirical_win - nr.W_ns) <= 3.0 * sigma,
              "non-signalling win rate " + fmt(nr.empirical_win) + " outside 3 sigma of " +
                  fmt(nr.W_ns));

  Strategy echo_table = echo_strategy({2, 2}, {2, 2}, 0, 1);
  IIDStrategy echo(echo_table);
  GuessingGameReport er = guessing_game(chsh, echo, dir, 2000, 0.105, 0.015, 2000, 3100, 2);
  record_rows(er.rows);
  g_replays.push_back({"guessing-echo", trials_csv(er.rows, 3100), [=](int th) {
                         IIDStrategy s(echo_table);
                         return trials_csv(
                             guessing_game(chsh, s, dir, 2000, 0.105, 0.015, 2000, 3100, th)
                                 .rows,
                             3100);
                       }});
  ctx.require(er.empirical_win > nr.W_ns + 3.0 * sigma,
              "echo win rate " + fmt(er.empirical_win) + " does not beat " +
                  fmt(nr.W_ns + 3.0 * sigma));
  return "non-signalling win=" + fmt(nr.empirical_win) + " (base " + fmt(nr.W_ns) +
         " +- " + fmt(3.0 * sigma) + "), echo win=" + fmt(er.empirical_win);
}

std::string check_frequencies_and_permutation(Check& ctx) {
  long counted = 0;
  for (const TrialRecord& r : g_rows) {
    ctx.require(r.f == (r.f_t + r.f_g) / 2.0, "frequency identity broke on a trial row");
    ++counted;
  }

  Game chsh = builtin_game("chsh");
  Strategy mixed =
      testgen::mix_strategies(testgen::pr_box(), uniform_strategy({2, 2}, {2, 2}), 0.5);
  auto inner = std::make_shared<IIDStrategy>(mixed);
  PermutedWrapper wrapped(inner);
  const int trials = 500;
  const long n = 100;
  std::vector<double> f_bare(trials), f_wrapped(trials);
  for (int t = 0; t < trials; ++t) {
    FrequencyReport fb = winning_frequencies(play(chsh, *inner, n, 53, 8 * t));
    FrequencyReport fw = winning_frequencies(play(chsh, wrapped, n, 9053, 8 * t));
    ctx.require(fb.f == (fb.f_t + fb.f_g) / 2.0, "frequency identity broke (bare)");
    ctx.require(fw.f == (fw.f_t + fw.f_g) / 2.0, "frequency identity broke (wrapped)");
    f_bare[t] = fb.f;
    f_wrapped[t] = fw.f;
    counted += 2;
  }
  KsResult ks = ks_two_sample(f_bare, f_wrapped);
  ctx.require(ks.p_value > 0.001,
              "permuted vs bare KS p=" + fmt(ks.p_value) + " at or below 0.001");
  return "identity on " + std::to_string(counted) + " transcripts, KS p=" +
         fmt(ks.p_value);
}

std::string check_constants(Check& ctx) {
  LogValue c = definetti_c(1, 4, 4);
  ctx.require(std::abs(c.log_value - 12.0 * std::log(2.0)) <= 1e-12 &&
                  std::abs(c.value - 4096.0) <= 1e-6,
              "mixture cost (1,4,4) is " + fmt(c.value) + " not 4096");

  Game gyni = builtin_game("gyni2");
  double kap = kappa(gyni, true);
  ThresholdBound tb = threshold_bound(gyni, 1000000, 0.05);
  double rate = 0.05 / (10.0 * kap);
  double expected = std::log(10.0 * 2.0 * 16.0) + 30.0 * std::log(1000001.0) -
                    1000000.0 * rate * rate / 4.0;
  ctx.require(std::abs(tb.log_bound - expected) <= 1e-9 * std::abs(expected),
              "log tail bound " + fmt(tb.log_bound) + " vs independent " +
                  fmt(expected));

  ThresholdParameters p = default_parameters(gyni, 0.5, 400000000);
  ParameterCheckReport rep = check_parameters(gyni, p);
  ctx.require(rep.all_pass, "default parameter table has a failing row");

  auto fails_row = [&](const ThresholdParameters& q, const char* row) {
    ParameterCheckReport r = check_parameters(gyni, q);
    bool row_failed = false;
    for (const ParameterCheck& pc : r.rows)
      if (pc.name == row) row_failed = !pc.pass;
    return !r.all_pass && row_failed;
  };
  {
    ThresholdParameters q = p;
    q.epsilon = 0.3;
    ctx.require(fails_row(q, "epsilon_range"), "epsilon_range not rejected");
  }
  {
    ThresholdParameters q = p;
    q.zeta = 6.0 * p.epsilon;
    ctx.require(fails_row(q, "zeta_lower"), "zeta_lower not rejected");
  }
  {
    ThresholdParameters q = p;
    q.zeta = 1.5;
    ctx.require(fails_row(q, "zeta_upper"), "zeta_upper not rejected");
  }
  {
    ThresholdParameters q = p;
    q.beta = 0.9;
    ctx.require(fails_row(q, "beta_range"), "beta_range not rejected");
  }
  {
    ThresholdParameters q = p;
    q.zeta = 0.12;
    ctx.require(fails_row(q, "zeta_kappa"), "zeta_kappa not rejected");
  }
  {
    ThresholdParameters q = p;
    q.nu = 0.2;
    ctx.require(fails_row(q, "nu_upper"), "nu_upper not rejected");
  }
  {
    ThresholdParameters q = p;
    q.nu = 0.0;
    ctx.require(fails_row(q, "nu_lower"), "nu_lower not rejected");
  }
  {
    ThresholdParameters q = p;
    q.n += 1;
    ctx.require(fails_row(q, "n_even"), "n_even not rejected");
  }
  {
    ThresholdParameters q = p;
    q.n = 1000;
    ctx.require(fails_row(q, "n_vs_epsilon"), "n_vs_epsilon not rejected");
  }
  {
    ThresholdParameters q = p;
    q.kappa = 400.0;
    ctx.require(fails_row(q, "n_vs_beta"), "n_vs_beta not rejected");
  }
  {
    ThresholdParameters q = p;
    // The true delta underflows to 0 at this n, so scaling it would be a
    // no-op; a representable wrong value is what the row must catch.
    q.delta = 0.5;
    ctx.require(fails_row(q, "delta_consistent"), "delta_consistent not rejected");
  }
  {
    ThresholdParameters q = p;
    q.c *= 2.0;
    ctx.require(fails_row(q, "c_consistent"), "c_consistent not rejected");
  }
  {
    ThresholdParameters q = p;
    q.d += 1;
    ctx.require(fails_row(q, "d_consistent"), "d_consistent not rejected");
  }
  {
    ThresholdParameters q = p;
    q.W_ns = 0.9;
    ctx.require(fails_row(q, "W_ns_consistent"), "W_ns_consistent not rejected");
  }
  return "c=" + fmt(c.value) + " log bound=" + fmt(tb.log_bound) +
         " kappa=" + fmt(kap) + ", 14 table rows exercised";
}

std::string check_determinism(Check& ctx) {
  ctx.require(!g_replays.empty(), "no stochastic runs registered");
  for (const Replay& r : g_replays) {
    std::string one = r.csv(1);
    std::string three = r.csv(3);
    std::string four = r.csv(4);
    ctx.require(!one.empty() && one == r.original && one == three && one == four,
                r.label + " CSV differs across worker counts");
  }
  return std::to_string(g_replays.size()) + " runs replayed at 1/3/4 workers";
}

}  // namespace

int main() {
  struct Row {
    int idx;
    const char* name;
    double limit_s;  // <= 0 means no budget
    std::string (*body)(Check&);
  };
  const std::vector<Row> rows = {
      {1, "complete-support lift optimum", 1.0, check_lift_values},
      {2, "relaxed vs equality-form values", 30.0, check_relaxation_tightness},
      {3, "strong duality and sensitivity bounds", 120.0, check_duality_and_sensitivity},
      {4, "modified-program signalling duals", 60.0, check_modified_program_duals},
      {5, "signalling measure forms and pinned values", 30.0, check_sig_forms},
      {6, "signalling measure continuity", 60.0, check_continuity},
      {7, "empirical estimation tails", 120.0, check_estimation_tails},
      {8, "signalling test reliability", 300.0, check_test_reliability},
      {9, "question guessing advantage", 300.0, check_guessing_game},
      {10, "frequency identity and permutation invariance", 120.0,
       check_frequencies_and_permutation},
      {11, "constants and parameter table", 1.0, check_constants},
      {12, "thread-count determinism", 0.0, check_determinism},
  };

  int failures = 0;
  for (const Row& r : rows) {
    Check ctx;
    std::string detail;
    auto t0 = std::chrono::steady_clock::now();
    try {
      detail = r.body(ctx);
    } catch (const std::exception& e) {
      ctx.require(false, std::string("exception: ") + e.what());
    }
    double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    bool in_time = r.limit_s <= 0.0 || secs < r.limit_s;
    bool pass = ctx.pass && in_time;
    failures += pass ? 0 : 1;

    char budget[32] = "";
    if (r.limit_s > 0.0)
      std::snprintf(budget, sizeof budget, " (budget %gs)", r.limit_s);
    std::printf("[%2d] %s %7.2fs%s  %s", r.idx, pass ? "PASS" : "FAIL", secs, budget,
                r.name);
    if (!detail.empty()) std::printf(" | %s", detail.c_str());
    if (!ctx.pass) std::printf(" | first failure: %s", ctx.first_failure.c_str());
    if (ctx.pass && !in_time) std::printf(" | over the runtime budget");
    std::printf("\n");
    std::fflush(stdout);
  }
  std::printf("acceptance: %d/12 passed\n", 12 - failures);
  return failures == 0 ? 0 : 1;
}
