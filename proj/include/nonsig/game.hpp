#pragma once

// Finite multiplayer games and conditional strategies, stored dense over the
// full Cartesian product of the per-player alphabets. Question tuples absent
// from a game's distribution carry probability zero; (q, a) pairs absent from
// the accept set lose.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nonsig {

using Tuple = std::vector<int>;

// Mixed-radix indexing. Player 0 is the most significant digit.
struct Radix {
  std::vector<int> sizes;
  std::vector<long> strides;
  long total = 1;
};

inline Radix make_radix(std::span<const int> sizes) {
  Radix r;
  r.sizes.assign(sizes.begin(), sizes.end());
  r.strides.assign(sizes.size(), 1);
  for (int k = static_cast<int>(sizes.size()) - 2; k >= 0; --k)
    r.strides[k] = r.strides[k + 1] * sizes[k + 1];
  for (int s : sizes) r.total *= s;
  return r;
}

inline long tuple_to_index(const Radix& r, std::span<const int> t) {
  long idx = 0;
  for (std::size_t k = 0; k < t.size(); ++k) idx += t[k] * r.strides[k];
  return idx;
}

inline Tuple index_to_tuple(const Radix& r, long idx) {
  Tuple t(r.sizes.size());
  for (std::size_t k = 0; k < r.sizes.size(); ++k) {
    t[k] = static_cast<int>(idx / r.strides[k]);
    idx %= r.strides[k];
  }
  return t;
}

// Radix over all players except `drop`.
inline Radix drop_player(const Radix& r, int drop) {
  std::vector<int> sizes;
  for (int k = 0; k < static_cast<int>(r.sizes.size()); ++k)
    if (k != drop) sizes.push_back(r.sizes[k]);
  return make_radix(sizes);
}

// Full index from player `i` digit plus the reduced index of the others.
inline long insert_digit(const Radix& full, const Radix& reduced, int i, int digit,
                         long reduced_idx) {
  long idx = digit * full.strides[i];
  int pos = 0;
  for (int k = 0; k < static_cast<int>(full.sizes.size()); ++k) {
    if (k == i) continue;
    long d = reduced_idx / reduced.strides[pos];
    reduced_idx %= reduced.strides[pos];
    idx += d * full.strides[k];
    ++pos;
  }
  return idx;
}

struct Game {
  int players = 0;
  std::vector<int> question_alphabets;
  std::vector<int> answer_alphabets;
  std::vector<std::pair<Tuple, double>> questions;   // sparse distribution
  std::vector<std::pair<Tuple, Tuple>> accept;       // winning (q, a) pairs
};

struct Strategy {
  std::vector<int> question_alphabets;
  std::vector<int> answer_alphabets;
  std::vector<double> table;  // q_index * a_count + a_index; rows sum to 1
};

struct EstimatedStrategy {
  std::vector<int> question_alphabets;
  std::vector<int> answer_alphabets;
  std::vector<double> table;   // conditional frequencies; row sums are 0 or 1
  std::vector<long> counts;    // rounds seen per question tuple
  long rounds = 0;
};

// One direction of potential signalling: does player i's question s^i shift
// the marginal of the other players' answers b^i-bar at questions s^i-bar?
// The reduced tuples list the other players in increasing player order.
struct SignallingDirection {
  int player = 0;          // zero-based
  Tuple others_answers;    // b^i-bar
  int own_question = 0;    // s^i
  Tuple others_questions;  // s^i-bar

  bool operator==(const SignallingDirection&) const = default;
};

inline constexpr double kNormalizationTol = 1e-12;

namespace detail {

inline bool tuple_in_range(const Tuple& t, const std::vector<int>& sizes) {
  if (t.size() != sizes.size()) return false;
  for (std::size_t k = 0; k < t.size(); ++k)
    if (t[k] < 0 || t[k] >= sizes[k]) return false;
  return true;
}

inline std::string tuple_str(const Tuple& t) {
  std::string s = "(";
  for (std::size_t k = 0; k < t.size(); ++k) {
    if (k) s += ",";
    s += std::to_string(t[k]);
  }
  return s + ")";
}

}  // namespace detail

inline std::vector<std::string> validate_game(const Game& g) {
  std::vector<std::string> bad;
  if (g.players < 1) bad.push_back("players must be at least 1");
  if (static_cast<int>(g.question_alphabets.size()) != g.players)
    bad.push_back("question_alphabets size does not match players");
  if (static_cast<int>(g.answer_alphabets.size()) != g.players)
    bad.push_back("answer_alphabets size does not match players");
  for (int s : g.question_alphabets)
    if (s < 1) bad.push_back("question alphabet size must be at least 1");
  for (int s : g.answer_alphabets)
    if (s < 1) bad.push_back("answer alphabet size must be at least 1");
  if (!bad.empty()) return bad;  // index checks below need sane alphabets

  double mass = 0.0;
  std::set<Tuple> seen_q;
  for (const auto& [q, p] : g.questions) {
    if (!detail::tuple_in_range(q, g.question_alphabets))
      bad.push_back("question tuple " + detail::tuple_str(q) + " out of range");
    if (p < 0.0)
      bad.push_back("question tuple " + detail::tuple_str(q) + " has negative probability");
    if (!seen_q.insert(q).second)
      bad.push_back("duplicate question tuple " + detail::tuple_str(q));
    mass += p;
  }
  if (std::abs(mass - 1.0) > kNormalizationTol)
    bad.push_back("question distribution sums to " + std::to_string(mass) + ", expected 1");

  std::set<std::pair<Tuple, Tuple>> seen_a;
  for (const auto& [q, a] : g.accept) {
    if (!detail::tuple_in_range(q, g.question_alphabets))
      bad.push_back("accept question tuple " + detail::tuple_str(q) + " out of range");
    if (!detail::tuple_in_range(a, g.answer_alphabets))
      bad.push_back("accept answer tuple " + detail::tuple_str(a) + " out of range");
    if (!seen_a.insert({q, a}).second)
      bad.push_back("duplicate accept pair " + detail::tuple_str(q) + detail::tuple_str(a));
  }
  return bad;
}

// Dense view used by every numeric operation.
struct GameTables {
  int players = 0;
  Radix q;  // question radix
  Radix a;  // answer radix
  std::vector<double> qdist;    // q.total
  std::vector<std::uint8_t> win;  // q.total * a.total
};

inline GameTables compile(const Game& g) {
  auto bad = validate_game(g);
  if (!bad.empty()) {
    std::string msg = "invalid game:";
    for (const auto& b : bad) msg += " " + b + ";";
    throw std::invalid_argument(msg);
  }
  GameTables t;
  t.players = g.players;
  t.q = make_radix(g.question_alphabets);
  t.a = make_radix(g.answer_alphabets);
  t.qdist.assign(t.q.total, 0.0);
  for (const auto& [q, p] : g.questions) t.qdist[tuple_to_index(t.q, q)] = p;
  t.win.assign(t.q.total * t.a.total, 0);
  for (const auto& [q, a] : g.accept)
    t.win[tuple_to_index(t.q, q) * t.a.total + tuple_to_index(t.a, a)] = 1;
  return t;
}

inline std::vector<std::string> validate_strategy(const Strategy& s) {
  std::vector<std::string> bad;
  Radix q = make_radix(s.question_alphabets);
  Radix a = make_radix(s.answer_alphabets);
  if (static_cast<long>(s.table.size()) != q.total * a.total) {
    bad.push_back("table size does not match alphabet product");
    return bad;
  }
  for (long qi = 0; qi < q.total; ++qi) {
    double row = 0.0;
    for (long ai = 0; ai < a.total; ++ai) {
      double v = s.table[qi * a.total + ai];
      if (v < 0.0) bad.push_back("negative entry at question index " + std::to_string(qi));
      row += v;
    }
    if (std::abs(row - 1.0) > kNormalizationTol)
      bad.push_back("row for question index " + std::to_string(qi) + " sums to " +
                    std::to_string(row));
  }
  return bad;
}

inline Strategy uniform_strategy(std::vector<int> qalpha, std::vector<int> aalpha) {
  Radix q = make_radix(qalpha);
  Radix a = make_radix(aalpha);
  Strategy s{std::move(qalpha), std::move(aalpha), {}};
  s.table.assign(q.total * a.total, 1.0 / static_cast<double>(a.total));
  return s;
}

namespace detail {

inline void require_same_alphabets(const Game& g, const std::vector<int>& qa,
                                   const std::vector<int>& aa) {
  if (g.question_alphabets != qa || g.answer_alphabets != aa)
    throw std::invalid_argument("strategy alphabets do not match game alphabets");
}

}  // namespace detail

inline double winning_probability(const Game& g, const Strategy& s) {
  detail::require_same_alphabets(g, s.question_alphabets, s.answer_alphabets);
  GameTables t = compile(g);
  double w = 0.0;
  for (long qi = 0; qi < t.q.total; ++qi) {
    if (t.qdist[qi] == 0.0) continue;
    double row = 0.0;
    for (long ai = 0; ai < t.a.total; ++ai)
      if (t.win[qi * t.a.total + ai]) row += s.table[qi * t.a.total + ai];
    w += t.qdist[qi] * row;
  }
  return w;
}

// E_{q~dist} of the L1 gap between conditional tables.
inline double table_distance(std::span<const double> qdist, long a_count,
                             std::span<const double> t1, std::span<const double> t2) {
  double d = 0.0;
  for (std::size_t qi = 0; qi < qdist.size(); ++qi) {
    if (qdist[qi] == 0.0) continue;
    double row = 0.0;
    for (long ai = 0; ai < a_count; ++ai)
      row += std::abs(t1[qi * a_count + ai] - t2[qi * a_count + ai]);
    d += qdist[qi] * row;
  }
  return d;
}

template <class S1, class S2>
double strategy_distance(const Game& g, const S1& s1, const S2& s2) {
  detail::require_same_alphabets(g, s1.question_alphabets, s1.answer_alphabets);
  detail::require_same_alphabets(g, s2.question_alphabets, s2.answer_alphabets);
  GameTables t = compile(g);
  return table_distance(t.qdist, t.a.total, s1.table, s2.table);
}

// True iff every combination of per-player questions that each occur with
// positive marginal probability is itself in the support.
inline bool is_complete_support(const Game& g) {
  GameTables t = compile(g);
  std::vector<std::vector<char>> occurs(g.players);
  for (int i = 0; i < g.players; ++i) occurs[i].assign(t.q.sizes[i], 0);
  for (long qi = 0; qi < t.q.total; ++qi) {
    if (t.qdist[qi] <= 0.0) continue;
    Tuple qt = index_to_tuple(t.q, qi);
    for (int i = 0; i < g.players; ++i) occurs[i][qt[i]] = 1;
  }
  for (long qi = 0; qi < t.q.total; ++qi) {
    if (t.qdist[qi] > 0.0) continue;
    Tuple qt = index_to_tuple(t.q, qi);
    bool feasible = true;
    for (int i = 0; i < g.players && feasible; ++i) feasible = occurs[i][qt[i]];
    if (feasible) return false;
  }
  return true;
}

// Marginal over player i's answer at full question index qi.
inline double answer_marginal(std::span<const double> table, const Radix& aa,
                              const Radix& aa_reduced, int player, long qi,
                              long a_bar) {
  double m = 0.0;
  for (int ai = 0; ai < aa.sizes[player]; ++ai)
    m += table[qi * aa.total + insert_digit(aa, aa_reduced, player, ai, a_bar)];
  return m;
}

// Eq-style marginal condition over every direction, question distribution free.
inline bool is_non_signalling(const Game& g, const Strategy& s, double tol = 1e-9) {
  detail::require_same_alphabets(g, s.question_alphabets, s.answer_alphabets);
  Radix q = make_radix(g.question_alphabets);
  Radix a = make_radix(g.answer_alphabets);
  for (int i = 0; i < g.players; ++i) {
    Radix qr = drop_player(q, i);
    Radix ar = drop_player(a, i);
    for (long qbar = 0; qbar < qr.total; ++qbar) {
      for (long abar = 0; abar < ar.total; ++abar) {
        long q0 = insert_digit(q, qr, i, 0, qbar);
        double m0 = answer_marginal(s.table, a, ar, i, q0, abar);
        for (int qi = 1; qi < q.sizes[i]; ++qi) {
          long qfull = insert_digit(q, qr, i, qi, qbar);
          double m = answer_marginal(s.table, a, ar, i, qfull, abar);
          if (std::abs(m - m0) > tol) return false;
        }
      }
    }
  }
  return true;
}

// Every (player, question tuple, reduced answer tuple) combination, in the
// canonical order shared by the linear programs and the sweep reports.
inline std::vector<SignallingDirection> enumerate_directions(
    const std::vector<int>& qalpha, const std::vector<int>& aalpha) {
  Radix q = make_radix(qalpha);
  Radix a = make_radix(aalpha);
  std::vector<SignallingDirection> out;
  for (int i = 0; i < static_cast<int>(qalpha.size()); ++i) {
    Radix qr = drop_player(q, i);
    Radix ar = drop_player(a, i);
    for (long qi = 0; qi < q.total; ++qi) {
      Tuple qt = index_to_tuple(q, qi);
      int own = qt[i];
      Tuple others;
      for (int k = 0; k < static_cast<int>(qt.size()); ++k)
        if (k != i) others.push_back(qt[k]);
      for (long abar = 0; abar < ar.total; ++abar) {
        out.push_back(SignallingDirection{i, index_to_tuple(ar, abar), own, others});
      }
    }
  }
  return out;
}

// External key format "(i|b_bar|s_i|s_bar)"; players are numbered from 1.
inline std::string direction_key(const SignallingDirection& d) {
  auto join = [](const Tuple& t) {
    std::string s;
    for (std::size_t k = 0; k < t.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(t[k]);
    }
    return s;
  };
  return "(" + std::to_string(d.player + 1) + "|" + join(d.others_answers) + "|" +
         std::to_string(d.own_question) + "|" + join(d.others_questions) + ")";
}

inline SignallingDirection parse_direction_key(const std::string& key) {
  std::string body = key;
  if (!body.empty() && body.front() == '(') body = body.substr(1);
  if (!body.empty() && body.back() == ')') body.pop_back();
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (true) {
    std::size_t bar = body.find('|', start);
    if (bar == std::string::npos) {
      parts.push_back(body.substr(start));
      break;
    }
    parts.push_back(body.substr(start, bar - start));
    start = bar + 1;
  }
  if (parts.size() != 4) throw std::invalid_argument("direction key needs 4 fields: " + key);
  auto ints = [](const std::string& s) {
    Tuple t;
    std::size_t p = 0;
    while (p < s.size()) {
      std::size_t comma = s.find(',', p);
      if (comma == std::string::npos) comma = s.size();
      t.push_back(std::stoi(s.substr(p, comma - p)));
      p = comma + 1;
    }
    return t;
  };
  SignallingDirection d;
  d.player = std::stoi(parts[0]) - 1;
  d.others_answers = ints(parts[1]);
  d.own_question = std::stoi(parts[2]);
  d.others_questions = ints(parts[3]);
  return d;
}

inline Game builtin_game(const std::string& name) {
  Game g;
  if (name == "chsh") {
    g.players = 2;
    g.question_alphabets = {2, 2};
    g.answer_alphabets = {2, 2};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        g.questions.push_back({{x, y}, 0.25});
        for (int a = 0; a < 2; ++a)
          for (int b = 0; b < 2; ++b)
            if ((a ^ b) == (x & y)) g.accept.push_back({{x, y}, {a, b}});
      }
    return g;
  }
  if (name == "gyni2") {
    // Each player wins by guessing the other's question.
    g.players = 2;
    g.question_alphabets = {2, 2};
    g.answer_alphabets = {2, 2};
    for (int x = 0; x < 2; ++x)
      for (int y = 0; y < 2; ++y) {
        g.questions.push_back({{x, y}, 0.25});
        g.accept.push_back({{x, y}, {y, x}});
      }
    return g;
  }
  if (name == "anticorr3") {
    // Three players, uniform support on the three weight-one tuples. The
    // pair selected by the question must agree except under (1,0,0), where
    // players 2 and 3 must differ. Its support is incomplete by design.
    g.players = 3;
    g.question_alphabets = {2, 2, 2};
    g.answer_alphabets = {2, 2, 2};
    g.questions = {{{0, 0, 1}, 1.0 / 3}, {{0, 1, 0}, 1.0 / 3}, {{1, 0, 0}, 1.0 / 3}};
    for (int a1 = 0; a1 < 2; ++a1)
      for (int a2 = 0; a2 < 2; ++a2)
        for (int a3 = 0; a3 < 2; ++a3) {
          if (a1 == a2) g.accept.push_back({{0, 0, 1}, {a1, a2, a3}});
          if (a1 == a3) g.accept.push_back({{0, 1, 0}, {a1, a2, a3}});
          if (a2 != a3) g.accept.push_back({{1, 0, 0}, {a1, a2, a3}});
        }
    return g;
  }
  throw std::invalid_argument("unknown builtin game: " + name);
}

}  // namespace nonsig
