#pragma once

// The per-direction signalling measure of a strategy, in its conditional and
// joint forms, frequency estimation of strategies from transcript halves,
// and the thresholded signalling test used on test data. A direction whose
// conditioning question block has zero probability is undefined, which is
// distinct from measuring zero.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nonsig/game.hpp"

namespace nonsig {

enum class SigForm { conditional, joint };

namespace detail {

inline void require_direction(const SignallingDirection& d,
                              const std::vector<int>& qalpha,
                              const std::vector<int>& aalpha) {
  int m = static_cast<int>(qalpha.size());
  if (d.player < 0 || d.player >= m)
    throw std::invalid_argument("direction player out of range");
  if (d.own_question < 0 || d.own_question >= qalpha[d.player])
    throw std::invalid_argument("direction own question out of range");
  if (static_cast<int>(d.others_questions.size()) != m - 1 ||
      static_cast<int>(d.others_answers.size()) != m - 1)
    throw std::invalid_argument("direction reduced tuples have the wrong arity");
  int pos = 0;
  for (int k = 0; k < m; ++k) {
    if (k == d.player) continue;
    if (d.others_questions[pos] < 0 || d.others_questions[pos] >= qalpha[k])
      throw std::invalid_argument("direction others question out of range");
    if (d.others_answers[pos] < 0 || d.others_answers[pos] >= aalpha[k])
      throw std::invalid_argument("direction others answer out of range");
    ++pos;
  }
}

}  // namespace detail

// Measures how much player i's question shifts the others' answer marginal.
// Conditional form: Q(s) [O(., b-bar | s) - sum_r Q(r^i | s-bar) O(., b-bar | r)].
// Joint form: same quantity assembled from the joint of answers and questions,
// with the convention 0 when the conditioning mass is itself 0. Returns
// nothing when Q(. | s-bar) does not exist.
inline std::optional<double> sig_value(std::span<const double> qdist,
                                       const std::vector<int>& qalpha,
                                       const std::vector<int>& aalpha,
                                       std::span<const double> table,
                                       const SignallingDirection& dir,
                                       SigForm form = SigForm::conditional) {
  detail::require_direction(dir, qalpha, aalpha);
  Radix q = make_radix(qalpha);
  Radix a = make_radix(aalpha);
  int i = dir.player;
  Radix qr = drop_player(q, i);
  Radix ar = drop_player(a, i);
  long sbar = tuple_to_index(qr, dir.others_questions);
  long abar = tuple_to_index(ar, dir.others_answers);
  long s_full = insert_digit(q, qr, i, dir.own_question, sbar);

  double denom = 0.0;
  for (int ri = 0; ri < q.sizes[i]; ++ri)
    denom += qdist[insert_digit(q, qr, i, ri, sbar)];
  if (denom == 0.0) return std::nullopt;

  if (form == SigForm::conditional) {
    double own = answer_marginal(table, a, ar, i, s_full, abar);
    double avg = 0.0;
    for (int ri = 0; ri < q.sizes[i]; ++ri) {
      long r_full = insert_digit(q, qr, i, ri, sbar);
      double w = qdist[r_full] / denom;
      if (w == 0.0) continue;
      avg += w * answer_marginal(table, a, ar, i, r_full, abar);
    }
    return qdist[s_full] * (own - avg);
  }

  double mass = 0.0, at_own = 0.0;
  for (int ri = 0; ri < q.sizes[i]; ++ri) {
    long r_full = insert_digit(q, qr, i, ri, sbar);
    if (qdist[r_full] == 0.0) continue;
    double contribution = qdist[r_full] * answer_marginal(table, a, ar, i, r_full, abar);
    mass += contribution;
    if (r_full == s_full) at_own = contribution;
  }
  if (mass == 0.0) return 0.0;
  return at_own - mass * (qdist[s_full] / denom);
}

inline std::optional<double> sig_value(const Game& g, const Strategy& s,
                                       const SignallingDirection& dir,
                                       SigForm form = SigForm::conditional) {
  detail::require_same_alphabets(g, s.question_alphabets, s.answer_alphabets);
  GameTables t = compile(g);
  return sig_value(t.qdist, g.question_alphabets, g.answer_alphabets, s.table, dir, form);
}

inline std::optional<double> sig_value(const Game& g, const EstimatedStrategy& e,
                                       const SignallingDirection& dir,
                                       SigForm form = SigForm::conditional) {
  detail::require_same_alphabets(g, e.question_alphabets, e.answer_alphabets);
  GameTables t = compile(g);
  return sig_value(t.qdist, g.question_alphabets, g.answer_alphabets, e.table, dir, form);
}

// Conditional frequencies f^q_a from paired rounds, zero where a question
// tuple never occurs. Index-based core; the tuple overload converts.
inline EstimatedStrategy estimate_strategy(std::span<const long> question_idx,
                                           std::span<const long> answer_idx,
                                           const std::vector<int>& qalpha,
                                           const std::vector<int>& aalpha) {
  if (question_idx.size() != answer_idx.size())
    throw std::invalid_argument("question and answer sequences differ in length");
  Radix q = make_radix(qalpha);
  Radix a = make_radix(aalpha);
  EstimatedStrategy e;
  e.question_alphabets = qalpha;
  e.answer_alphabets = aalpha;
  e.table.assign(q.total * a.total, 0.0);
  e.counts.assign(q.total, 0);
  e.rounds = static_cast<long>(question_idx.size());
  for (std::size_t r = 0; r < question_idx.size(); ++r) {
    long qi = question_idx[r], ai = answer_idx[r];
    if (qi < 0 || qi >= q.total || ai < 0 || ai >= a.total)
      throw std::out_of_range("round index outside the alphabet product");
    ++e.counts[qi];
    e.table[qi * a.total + ai] += 1.0;
  }
  for (long qi = 0; qi < q.total; ++qi) {
    if (e.counts[qi] == 0) continue;
    for (long ai = 0; ai < a.total; ++ai)
      e.table[qi * a.total + ai] /= static_cast<double>(e.counts[qi]);
  }
  return e;
}

inline EstimatedStrategy estimate_strategy(std::span<const Tuple> questions,
                                           std::span<const Tuple> answers,
                                           const std::vector<int>& qalpha,
                                           const std::vector<int>& aalpha) {
  if (questions.size() != answers.size())
    throw std::invalid_argument("question and answer sequences differ in length");
  Radix q = make_radix(qalpha);
  Radix a = make_radix(aalpha);
  std::vector<long> qi(questions.size()), ai(answers.size());
  for (std::size_t r = 0; r < questions.size(); ++r) {
    qi[r] = tuple_to_index(q, questions[r]);
    ai[r] = tuple_to_index(a, answers[r]);
  }
  return estimate_strategy(std::span<const long>(qi), std::span<const long>(ai), qalpha,
                           aalpha);
}

// Thresholded test on test-half data: estimate, then fire iff the estimated
// signalling in the direction reaches zeta - 2 epsilon. Rejects outright
// when the direction's question tuple never occurs in the data, or when the
// direction is undefined under the true distribution.
inline bool signalling_test(const SignallingDirection& dir,
                            std::span<const long> test_question_idx,
                            std::span<const long> test_answer_idx, double zeta,
                            double epsilon, std::span<const double> qdist,
                            const std::vector<int>& qalpha,
                            const std::vector<int>& aalpha) {
  if (!(zeta >= 7.0 * epsilon))
    throw std::invalid_argument("signalling test needs zeta >= 7 epsilon");
  detail::require_direction(dir, qalpha, aalpha);
  EstimatedStrategy est =
      estimate_strategy(test_question_idx, test_answer_idx, qalpha, aalpha);
  Radix q = make_radix(qalpha);
  Radix qr = drop_player(q, dir.player);
  long s_full = insert_digit(q, qr, dir.player, dir.own_question,
                             tuple_to_index(qr, dir.others_questions));
  if (est.counts[s_full] == 0) return false;
  std::optional<double> sig =
      sig_value(qdist, qalpha, aalpha, est.table, dir, SigForm::conditional);
  if (!sig) return false;
  return *sig >= zeta - 2.0 * epsilon;
}

inline bool signalling_test(const SignallingDirection& dir,
                            std::span<const Tuple> test_questions,
                            std::span<const Tuple> test_answers, double zeta,
                            double epsilon, const Game& g) {
  GameTables t = compile(g);
  Radix q = t.q, a = t.a;
  std::vector<long> qi(test_questions.size()), ai(test_answers.size());
  for (std::size_t r = 0; r < test_questions.size(); ++r)
    qi[r] = tuple_to_index(q, test_questions[r]);
  for (std::size_t r = 0; r < test_answers.size(); ++r)
    ai[r] = tuple_to_index(a, test_answers[r]);
  return signalling_test(dir, qi, ai, zeta, epsilon, t.qdist, g.question_alphabets,
                         g.answer_alphabets);
}

struct SigEntry {
  SignallingDirection direction;
  std::optional<double> value;  // empty when the direction is undefined
};

struct SigReport {
  std::vector<SigEntry> entries;  // canonical direction order
  SignallingDirection max_direction;
  double max_value = 0.0;  // over defined directions; 0 when none defined
};

inline SigReport max_sig(std::span<const double> qdist, const std::vector<int>& qalpha,
                         const std::vector<int>& aalpha, std::span<const double> table) {
  SigReport rep;
  bool have_max = false;
  for (const SignallingDirection& dir : enumerate_directions(qalpha, aalpha)) {
    std::optional<double> v =
        sig_value(qdist, qalpha, aalpha, table, dir, SigForm::conditional);
    if (v && (!have_max || *v > rep.max_value)) {
      rep.max_value = *v;
      rep.max_direction = dir;
      have_max = true;
    }
    rep.entries.push_back(SigEntry{dir, v});
  }
  if (!have_max && !rep.entries.empty())
    rep.max_direction = rep.entries.front().direction;
  return rep;
}

inline SigReport max_sig(const Game& g, const Strategy& s) {
  detail::require_same_alphabets(g, s.question_alphabets, s.answer_alphabets);
  GameTables t = compile(g);
  return max_sig(t.qdist, g.question_alphabets, g.answer_alphabets, s.table);
}

inline SigReport max_sig(const Game& g, const EstimatedStrategy& e) {
  detail::require_same_alphabets(g, e.question_alphabets, e.answer_alphabets);
  GameTables t = compile(g);
  return max_sig(t.qdist, g.question_alphabets, g.answer_alphabets, e.table);
}

}  // namespace nonsig
