#pragma once

// Monte Carlo machinery for the n-fold repeated game: question sampling
// (plain and dummy-augmented), repeated-strategy implementations, the
// positional test/game split, winning frequencies, and the experiments that
// measure concentration, test reliability, the joint accept/measure events,
// and the guessing game. Every trial draws its randomness from
// (master seed, trial index) streams, so results do not depend on the degree
// of parallelism.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "nonsig/analysis.hpp"
#include "nonsig/game.hpp"
#include "nonsig/rng.hpp"
#include "nonsig/signalling.hpp"
#include "nonsig/stats.hpp"

namespace nonsig {

// Rounds are stored as full-product indices; tuple accessors expand them.
struct Transcript {
  std::vector<int> question_alphabets;
  std::vector<int> answer_alphabets;
  std::vector<long> questions;
  std::vector<long> answers;
  std::vector<std::uint8_t> dummy_flags;  // all zero for the unmodified game
  std::vector<std::uint8_t> win_bits;     // dummy rounds auto-win

  long rounds() const { return static_cast<long>(questions.size()); }
  Tuple question_tuple(long j) const {
    return index_to_tuple(make_radix(question_alphabets), questions[j]);
  }
  Tuple answer_tuple(long j) const {
    return index_to_tuple(make_radix(answer_alphabets), answers[j]);
  }
};

struct FrequencyReport {
  double f = 0.0;    // (f_t + f_g) / 2, the overall winning frequency
  double f_t = 0.0;  // test half (first n/2 rounds)
  double f_g = 0.0;  // game half (last n/2 rounds)
  std::optional<double> f_real;  // non-dummy rounds only; empty when none
};

// Behavioral interface: one call maps all n questions to all n answers.
class RepeatedStrategy {
 public:
  virtual ~RepeatedStrategy() = default;
  virtual void respond(std::span<const long> question_idx, CounterRng& rng,
                       std::vector<long>& answer_idx) const = 0;
};

// Product strategy O^(x)n: every round answered independently from the same
// one-round table.
class IIDStrategy : public RepeatedStrategy {
 public:
  explicit IIDStrategy(Strategy one_round) : strategy_(std::move(one_round)) {
    auto bad = validate_strategy(strategy_);
    if (!bad.empty()) throw std::invalid_argument("invalid strategy: " + bad.front());
    Radix q = make_radix(strategy_.question_alphabets);
    Radix a = make_radix(strategy_.answer_alphabets);
    cdf_.resize(q.total);
    for (long qi = 0; qi < q.total; ++qi)
      cdf_[qi] = cumulative(
          std::span<const double>(strategy_.table).subspan(qi * a.total, a.total));
  }

  void respond(std::span<const long> question_idx, CounterRng& rng,
               std::vector<long>& answer_idx) const override {
    answer_idx.resize(question_idx.size());
    for (std::size_t j = 0; j < question_idx.size(); ++j)
      answer_idx[j] = static_cast<long>(rng.next_from_cdf(cdf_[question_idx[j]]));
  }

  const Strategy& one_round() const { return strategy_; }

 private:
  Strategy strategy_;
  std::vector<std::vector<double>> cdf_;
};

// One component drawn per run, then played i.i.d. across rounds.
class MixtureStrategy : public RepeatedStrategy {
 public:
  MixtureStrategy(std::vector<double> weights, std::vector<Strategy> components) {
    if (weights.size() != components.size() || components.empty())
      throw std::invalid_argument("mixture needs matching, non-empty weights/components");
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw std::invalid_argument("mixture weights must be non-negative");
      total += w;
    }
    if (total <= 0.0) throw std::invalid_argument("mixture weights sum to zero");
    for (double& w : weights) w /= total;
    for (std::size_t k = 1; k < components.size(); ++k)
      if (components[k].question_alphabets != components[0].question_alphabets ||
          components[k].answer_alphabets != components[0].answer_alphabets)
        throw std::invalid_argument("mixture components disagree on alphabets");
    for (Strategy& c : components) components_.emplace_back(std::move(c));
    weight_cdf_ = cumulative(weights);
  }

  void respond(std::span<const long> question_idx, CounterRng& rng,
               std::vector<long>& answer_idx) const override {
    components_[rng.next_from_cdf(weight_cdf_)].respond(question_idx, rng, answer_idx);
  }

  std::size_t component_count() const { return components_.size(); }

 private:
  std::vector<IIDStrategy> components_;
  std::vector<double> weight_cdf_;
};

// Symmetrization by a single uniformly drawn permutation per run: the inner
// strategy sees permuted questions, its answers are mapped back.
class PermutedWrapper : public RepeatedStrategy {
 public:
  explicit PermutedWrapper(std::shared_ptr<const RepeatedStrategy> inner)
      : inner_(std::move(inner)) {
    if (!inner_) throw std::invalid_argument("permuted wrapper needs an inner strategy");
  }

  void respond(std::span<const long> question_idx, CounterRng& rng,
               std::vector<long>& answer_idx) const override {
    long n = static_cast<long>(question_idx.size());
    std::vector<int> perm = rng.permutation(static_cast<int>(n));
    std::vector<long> permuted(n);
    for (long k = 0; k < n; ++k) permuted[k] = question_idx[perm[k]];
    std::vector<long> inner_answers;
    inner_->respond(permuted, rng, inner_answers);
    if (static_cast<long>(inner_answers.size()) != n)
      throw std::runtime_error("inner strategy returned wrong number of answers");
    answer_idx.resize(n);
    for (long k = 0; k < n; ++k) answer_idx[perm[k]] = inner_answers[k];
  }

 private:
  std::shared_ptr<const RepeatedStrategy> inner_;
};

// One-round table of the deterministic echo rule: the target player outputs
// the source player's question (reduced into its alphabet), everyone else 0.
inline Strategy echo_strategy(std::vector<int> qalpha, std::vector<int> aalpha,
                              int source, int target) {
  int m = static_cast<int>(qalpha.size());
  if (source < 0 || source >= m || target < 0 || target >= m)
    throw std::invalid_argument("echo players out of range");
  Radix q = make_radix(qalpha);
  Radix a = make_radix(aalpha);
  Strategy s{std::move(qalpha), std::move(aalpha), {}};
  s.table.assign(q.total * a.total, 0.0);
  for (long qi = 0; qi < q.total; ++qi) {
    Tuple qt = index_to_tuple(q, qi);
    Tuple at(m, 0);
    at[target] = qt[source] % s.answer_alphabets[target];
    s.table[qi * a.total + tuple_to_index(a, at)] = 1.0;
  }
  return s;
}

// Round-local signalling: answers depend on the same round's questions only.
class EchoStrategy : public RepeatedStrategy {
 public:
  EchoStrategy(std::vector<int> qalpha, std::vector<int> aalpha, int source, int target)
      : iid_(echo_strategy(std::move(qalpha), std::move(aalpha), source, target)) {}

  void respond(std::span<const long> question_idx, CounterRng& rng,
               std::vector<long>& answer_idx) const override {
    iid_.respond(question_idx, rng, answer_idx);
  }

  const Strategy& one_round() const { return iid_.one_round(); }

 private:
  IIDStrategy iid_;
};

// Cross-round signalling stress case: the target's answer in round j echoes
// the source's question from round (j + offset) mod n.
class RoundPeekStrategy : public RepeatedStrategy {
 public:
  RoundPeekStrategy(std::vector<int> qalpha, std::vector<int> aalpha, int source,
                    int target, long offset = 1)
      : qalpha_(std::move(qalpha)),
        aalpha_(std::move(aalpha)),
        source_(source),
        target_(target),
        offset_(offset) {
    int m = static_cast<int>(qalpha_.size());
    if (source < 0 || source >= m || target < 0 || target >= m)
      throw std::invalid_argument("peek players out of range");
  }

  void respond(std::span<const long> question_idx, CounterRng&,
               std::vector<long>& answer_idx) const override {
    Radix q = make_radix(qalpha_);
    Radix a = make_radix(aalpha_);
    long n = static_cast<long>(question_idx.size());
    int m = static_cast<int>(qalpha_.size());
    answer_idx.resize(n);
    for (long j = 0; j < n; ++j) {
      long peek = ((j + offset_) % n + n) % n;
      Tuple qt = index_to_tuple(q, question_idx[peek]);
      Tuple at(m, 0);
      at[target_] = qt[source_] % aalpha_[target_];
      answer_idx[j] = tuple_to_index(a, at);
    }
  }

 private:
  std::vector<int> qalpha_, aalpha_;
  int source_, target_;
  long offset_;
};

inline std::vector<long> sample_questions(const Game& g, long n, std::uint64_t seed,
                                          std::uint64_t stream = 0) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("round count must be even and at least 2");
  GameTables t = compile(g);
  std::vector<double> cdf = cumulative(t.qdist);
  CounterRng rng(seed, stream);
  std::vector<long> out(n);
  for (long j = 0; j < n; ++j) out[j] = static_cast<long>(rng.next_from_cdf(cdf));
  return out;
}

// Draws (question, dummy flag) pairs from the lifted joint distribution.
inline std::pair<std::vector<long>, std::vector<std::uint8_t>> sample_questions_modified(
    const LiftedGame& lg, long n, std::uint64_t seed, std::uint64_t stream = 0) {
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("round count must be even and at least 2");
  GameTables t = compile(lg.base);
  if (static_cast<long>(lg.lifted_dist.size()) != 2 * t.q.total)
    throw std::invalid_argument("lifted distribution size mismatch");
  std::vector<double> cdf = cumulative(lg.lifted_dist);
  CounterRng rng(seed, stream);
  std::vector<long> qs(n);
  std::vector<std::uint8_t> flags(n);
  for (long j = 0; j < n; ++j) {
    long cell = static_cast<long>(rng.next_from_cdf(cdf));
    qs[j] = cell / 2;
    flags[j] = static_cast<std::uint8_t>(cell % 2);
  }
  return {std::move(qs), std::move(flags)};
}

namespace detail {

inline void fill_answers_and_wins(const GameTables& t, const RepeatedStrategy& s,
                                  std::uint64_t seed, std::uint64_t stream_base,
                                  Transcript& tr) {
  CounterRng rng(seed, stream_base + 1);
  s.respond(tr.questions, rng, tr.answers);
  if (tr.answers.size() != tr.questions.size())
    throw std::runtime_error("strategy returned wrong number of answers");
  long n = tr.rounds();
  tr.win_bits.assign(n, 0);
  for (long j = 0; j < n; ++j) {
    if (tr.answers[j] < 0 || tr.answers[j] >= t.a.total)
      throw std::runtime_error("strategy answer outside the alphabet product");
    tr.win_bits[j] = tr.dummy_flags[j]
                         ? std::uint8_t{1}
                         : t.win[tr.questions[j] * t.a.total + tr.answers[j]];
  }
}

}  // namespace detail

// Streams used: stream_base for questions, stream_base + 1 for the strategy.
inline Transcript play(const Game& g, const RepeatedStrategy& s, long n,
                       std::uint64_t seed, std::uint64_t stream_base = 0) {
  GameTables t = compile(g);
  Transcript tr;
  tr.question_alphabets = g.question_alphabets;
  tr.answer_alphabets = g.answer_alphabets;
  tr.questions = sample_questions(g, n, seed, stream_base);
  tr.dummy_flags.assign(n, 0);
  detail::fill_answers_and_wins(t, s, seed, stream_base, tr);
  return tr;
}

inline Transcript play(const LiftedGame& lg, const RepeatedStrategy& s, long n,
                       std::uint64_t seed, std::uint64_t stream_base = 0) {
  GameTables t = compile(lg.base);
  Transcript tr;
  tr.question_alphabets = lg.base.question_alphabets;
  tr.answer_alphabets = lg.base.answer_alphabets;
  auto [qs, flags] = sample_questions_modified(lg, n, seed, stream_base);
  tr.questions = std::move(qs);
  tr.dummy_flags = std::move(flags);
  detail::fill_answers_and_wins(t, s, seed, stream_base, tr);
  return tr;
}

// Positional split: first half is test data, second half is game data.
inline std::pair<Transcript, Transcript> split(const Transcript& tr) {
  long n = tr.rounds();
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("split needs an even transcript of length >= 2");
  long half = n / 2;
  auto slice = [&](long from, long to) {
    Transcript out;
    out.question_alphabets = tr.question_alphabets;
    out.answer_alphabets = tr.answer_alphabets;
    out.questions.assign(tr.questions.begin() + from, tr.questions.begin() + to);
    out.answers.assign(tr.answers.begin() + from, tr.answers.begin() + to);
    out.dummy_flags.assign(tr.dummy_flags.begin() + from, tr.dummy_flags.begin() + to);
    out.win_bits.assign(tr.win_bits.begin() + from, tr.win_bits.begin() + to);
    return out;
  };
  return {slice(0, half), slice(half, n)};
}

inline FrequencyReport winning_frequencies(const Transcript& tr) {
  long n = tr.rounds();
  if (n == 0) throw std::invalid_argument("empty transcript");
  long half = n / 2;
  long wins_t = 0, wins_g = 0, real_rounds = 0, real_wins = 0;
  for (long j = 0; j < n; ++j) {
    if (tr.win_bits[j]) (j < half ? wins_t : wins_g) += 1;
    if (!tr.dummy_flags[j]) {
      ++real_rounds;
      real_wins += tr.win_bits[j];
    }
  }
  FrequencyReport fr;
  fr.f_t = static_cast<double>(wins_t) / static_cast<double>(half);
  fr.f_g = static_cast<double>(wins_g) / static_cast<double>(n - half);
  fr.f = (fr.f_t + fr.f_g) / 2.0;
  if (real_rounds > 0)
    fr.f_real = static_cast<double>(real_wins) / static_cast<double>(real_rounds);
  return fr;
}

// One CSV-able line per Monte Carlo trial; -1 marks fields an experiment
// does not produce.
struct TrialRecord {
  long trial = 0;
  double f = 0.0, f_t = 0.0, f_g = 0.0;
  std::optional<double> f_real;
  int test = -1;
  int event1 = -1, event2 = -1;
  int exceed = -1;
  int win = -1;
  double sig_est2 = std::numeric_limits<double>::quiet_NaN();
};

// Runs body(t) for t in [0, trials) across the given worker count. Bodies
// write only their own slot, so scheduling cannot change the result.
template <class Fn>
inline void run_trials(long trials, int threads, Fn&& body) {
  threads = std::max(1, threads);
  if (threads == 1 || trials <= 1) {
    for (long t = 0; t < trials; ++t) body(t);
    return;
  }
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (long t = w; t < trials; t += threads) body(t);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    });
  }
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

namespace detail {

// Streams 8t.. belong to trial t: questions, strategy, experiment picks.
inline constexpr std::uint64_t kStreamsPerTrial = 8;

}  // namespace detail

struct ConcentrationReport {
  double threshold = 0.0;  // 1 - alpha + beta
  long exceed_count = 0;
  long trials = 0;
  WilsonInterval interval;
  double bound = 1.0;      // clamped tail bound at this n
  double log_bound = 0.0;
  double alpha = 0.0;
  double kappa = 0.0;
  long n = 0;
  double beta = 0.0;
  std::vector<TrialRecord> rows;
};

namespace detail {

template <class GameLike>
inline ConcentrationReport concentration_impl(const GameLike& game,
                                              const RepeatedStrategy& s, long n,
                                              double beta, long trials,
                                              std::uint64_t seed, int threads) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  ConcentrationReport rep;
  ThresholdBound tb = threshold_bound(game, n, beta);
  rep.alpha = tb.alpha;
  rep.kappa = tb.kappa;
  rep.bound = tb.bound;
  rep.log_bound = tb.log_bound;
  rep.threshold = 1.0 - tb.alpha + beta;
  rep.trials = trials;
  rep.n = n;
  rep.beta = beta;
  rep.rows.resize(trials);
  run_trials(trials, threads, [&](long t) {
    Transcript tr = play(game, s, n, seed, kStreamsPerTrial * t);
    FrequencyReport fr = winning_frequencies(tr);
    TrialRecord& row = rep.rows[t];
    row.trial = t;
    row.f = fr.f;
    row.f_t = fr.f_t;
    row.f_g = fr.f_g;
    row.f_real = fr.f_real;
    row.exceed = fr.f_real && *fr.f_real > rep.threshold ? 1 : 0;
  });
  for (const TrialRecord& row : rep.rows) rep.exceed_count += row.exceed == 1;
  rep.interval = wilson_interval(rep.exceed_count, trials);
  return rep;
}

}  // namespace detail

// Frequency of the event f_real > 1 - alpha + beta, with the tail bound for
// comparison.
inline ConcentrationReport run_concentration_experiment(const Game& g,
                                                        const RepeatedStrategy& s,
                                                        long n, double beta, long trials,
                                                        std::uint64_t seed,
                                                        int threads = 1) {
  return detail::concentration_impl(g, s, n, beta, trials, seed, threads);
}

inline ConcentrationReport run_concentration_experiment(const LiftedGame& lg,
                                                        const RepeatedStrategy& s,
                                                        long n, double beta, long trials,
                                                        std::uint64_t seed,
                                                        int threads = 1) {
  return detail::concentration_impl(lg, s, n, beta, trials, seed, threads);
}

struct ReliabilityReport {
  SignallingDirection direction;
  long accept_count = 0;
  long trials = 0;
  WilsonInterval interval;
  double delta = 1.0;  // min(1, estimation tail at block length n/2)
  long n = 0;
  double zeta = 0.0, epsilon = 0.0;
  std::vector<TrialRecord> rows;
};

// Acceptance frequency of the signalling test on i.i.d. play of one
// one-round strategy.
inline ReliabilityReport run_test_reliability_experiment(
    const Game& g, const Strategy& one_round, const SignallingDirection& dir, long n,
    double zeta, double epsilon, long trials, std::uint64_t seed, int threads = 1) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (!(zeta >= 7.0 * epsilon))
    throw std::invalid_argument("reliability experiment needs zeta >= 7 epsilon");
  GameTables t = compile(g);
  IIDStrategy iid(one_round);
  ReliabilityReport rep;
  rep.direction = dir;
  rep.trials = trials;
  rep.n = n;
  rep.zeta = zeta;
  rep.epsilon = epsilon;
  rep.delta = std::min(1.0, sanov_delta(n / 2, epsilon, t.q.total * t.a.total).value);
  rep.rows.resize(trials);
  run_trials(trials, threads, [&](long tr_i) {
    Transcript tr = play(g, iid, n, seed, detail::kStreamsPerTrial * tr_i);
    FrequencyReport fr = winning_frequencies(tr);
    long half = n / 2;
    bool fired = signalling_test(
        dir, std::span<const long>(tr.questions).first(half),
        std::span<const long>(tr.answers).first(half), zeta, epsilon, t.qdist,
        g.question_alphabets, g.answer_alphabets);
    TrialRecord& row = rep.rows[tr_i];
    row.trial = tr_i;
    row.f = fr.f;
    row.f_t = fr.f_t;
    row.f_g = fr.f_g;
    row.f_real = fr.f_real;
    row.test = fired ? 1 : 0;
  });
  for (const TrialRecord& row : rep.rows) rep.accept_count += row.test == 1;
  rep.interval = wilson_interval(rep.accept_count, trials);
  return rep;
}

struct JointEventReport {
  SignallingDirection direction;
  // Event 1: the test fired yet the game half measures low signalling.
  // Event 2: the test stayed silent yet the game half measures high.
  long event1_count = 0;
  long event2_count = 0;
  long trials = 0;
  WilsonInterval interval1, interval2;
  double two_delta = 2.0;
  double low_threshold = 0.0;   // zeta - 4 epsilon
  double high_threshold = 0.0;  // zeta + 2 epsilon
  std::vector<TrialRecord> rows;
};

// Frequencies of the two contradictory test-vs-measurement events for a
// mixture strategy.
inline JointEventReport run_joint_event_experiment(const Game& g,
                                                   const MixtureStrategy& mix,
                                                   const SignallingDirection& dir,
                                                   long n, double zeta, double epsilon,
                                                   long trials, std::uint64_t seed,
                                                   int threads = 1) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  if (!(zeta >= 7.0 * epsilon))
    throw std::invalid_argument("joint-event experiment needs zeta >= 7 epsilon");
  GameTables t = compile(g);
  JointEventReport rep;
  rep.direction = dir;
  rep.trials = trials;
  rep.low_threshold = zeta - 4.0 * epsilon;
  rep.high_threshold = zeta + 2.0 * epsilon;
  rep.two_delta =
      std::min(1.0, 2.0 * std::min(1.0, sanov_delta(n / 2, epsilon,
                                                    t.q.total * t.a.total).value));
  rep.rows.resize(trials);
  run_trials(trials, threads, [&](long tr_i) {
    Transcript tr = play(g, mix, n, seed, detail::kStreamsPerTrial * tr_i);
    FrequencyReport fr = winning_frequencies(tr);
    long half = n / 2;
    bool fired = signalling_test(
        dir, std::span<const long>(tr.questions).first(half),
        std::span<const long>(tr.answers).first(half), zeta, epsilon, t.qdist,
        g.question_alphabets, g.answer_alphabets);
    EstimatedStrategy est2 = estimate_strategy(
        std::span<const long>(tr.questions).subspan(half),
        std::span<const long>(tr.answers).subspan(half), g.question_alphabets,
        g.answer_alphabets);
    std::optional<double> sig2 =
        sig_value(t.qdist, g.question_alphabets, g.answer_alphabets, est2.table, dir,
                  SigForm::conditional);
    double sig = sig2.value_or(0.0);
    TrialRecord& row = rep.rows[tr_i];
    row.trial = tr_i;
    row.f = fr.f;
    row.f_t = fr.f_t;
    row.f_g = fr.f_g;
    row.f_real = fr.f_real;
    row.test = fired ? 1 : 0;
    row.sig_est2 = sig;
    row.event1 = fired && sig < rep.low_threshold ? 1 : 0;
    row.event2 = !fired && sig >= rep.high_threshold ? 1 : 0;
  });
  for (const TrialRecord& row : rep.rows) {
    rep.event1_count += row.event1 == 1;
    rep.event2_count += row.event2 == 1;
  }
  rep.interval1 = wilson_interval(rep.event1_count, trials);
  rep.interval2 = wilson_interval(rep.event2_count, trials);
  return rep;
}

struct GuessingGameReport {
  SignallingDirection direction;
  double W_ns = 0.0;  // Q(s^i | s^i-bar), the non-signalling optimum
  double empirical_win = 0.0;
  long win_count = 0;
  long trials = 0;
  double accept_rate = 0.0;
  long accept_count = 0;
  WilsonInterval interval;
  long n = 0;
  std::vector<TrialRecord> rows;
};

// The test-then-guess procedure: the coalition of all players except i runs
// the signalling test on the test half, then guesses player i's question at
// one game-half round. The test outcome steers which round gets picked.
inline GuessingGameReport guessing_game(const Game& g, const RepeatedStrategy& s,
                                        const SignallingDirection& dir, long n,
                                        double zeta, double epsilon, long trials,
                                        std::uint64_t seed, int threads = 1) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  GameTables t = compile(g);
  detail::require_direction(dir, g.question_alphabets, g.answer_alphabets);
  Radix qr = drop_player(t.q, dir.player);
  Radix ar = drop_player(t.a, dir.player);
  long sbar = tuple_to_index(qr, dir.others_questions);
  long abar = tuple_to_index(ar, dir.others_answers);
  long s_full = insert_digit(t.q, qr, dir.player, dir.own_question, sbar);
  double denom = 0.0;
  for (int ri = 0; ri < t.q.sizes[dir.player]; ++ri)
    denom += t.qdist[insert_digit(t.q, qr, dir.player, ri, sbar)];
  if (t.qdist[s_full] == 0.0 || denom == 0.0 || t.qdist[s_full] / denom >= 1.0 - 1e-15)
    throw std::invalid_argument(
        "inadmissible direction: needs Q(s) > 0 and Q(s^i | s^i-bar) < 1");

  // Round filters: does a question index share s^i-bar, does an answer index
  // match b^i-bar.
  std::vector<std::uint8_t> q_matches(t.q.total, 0), a_matches(t.a.total, 0);
  for (int ri = 0; ri < t.q.sizes[dir.player]; ++ri)
    q_matches[insert_digit(t.q, qr, dir.player, ri, sbar)] = 1;
  for (int bi = 0; bi < t.a.sizes[dir.player]; ++bi)
    a_matches[insert_digit(t.a, ar, dir.player, bi, abar)] = 1;

  GuessingGameReport rep;
  rep.direction = dir;
  rep.W_ns = t.qdist[s_full] / denom;
  rep.trials = trials;
  rep.n = n;
  rep.rows.resize(trials);
  run_trials(trials, threads, [&](long tr_i) {
    Transcript tr = play(g, s, n, seed, detail::kStreamsPerTrial * tr_i);
    FrequencyReport fr = winning_frequencies(tr);
    long half = n / 2;
    bool fired = signalling_test(
        dir, std::span<const long>(tr.questions).first(half),
        std::span<const long>(tr.answers).first(half), zeta, epsilon, t.qdist,
        g.question_alphabets, g.answer_alphabets);
    std::vector<long> candidates, preferred;
    for (long j = half; j < n; ++j) {
      if (!q_matches[tr.questions[j]]) continue;
      candidates.push_back(j);
      if (fired && a_matches[tr.answers[j]]) preferred.push_back(j);
    }
    const std::vector<long>& pool = !preferred.empty() ? preferred : candidates;
    bool won = false;
    if (!pool.empty()) {
      CounterRng pick(seed, detail::kStreamsPerTrial * tr_i + 2);
      long j = pool[pick.next_int(static_cast<int>(pool.size()))];
      won = tr.questions[j] == s_full;
    }
    TrialRecord& row = rep.rows[tr_i];
    row.trial = tr_i;
    row.f = fr.f;
    row.f_t = fr.f_t;
    row.f_g = fr.f_g;
    row.f_real = fr.f_real;
    row.test = fired ? 1 : 0;
    row.win = won ? 1 : 0;
  });
  for (const TrialRecord& row : rep.rows) {
    rep.win_count += row.win == 1;
    rep.accept_count += row.test == 1;
  }
  rep.empirical_win = static_cast<double>(rep.win_count) / static_cast<double>(trials);
  rep.accept_rate = static_cast<double>(rep.accept_count) / static_cast<double>(trials);
  rep.interval = wilson_interval(rep.win_count, trials);
  return rep;
}

}  // namespace nonsig
