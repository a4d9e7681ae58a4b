#pragma once

// Seeded corpus generators shared by the unit and acceptance suites. All
// randomness flows through CounterRng so every test is reproducible.

#include <algorithm>
#include <cmath>
#include <utility>
#include <vector>

#include "nonsig/game.hpp"
#include "nonsig/rng.hpp"

namespace testgen {

using nonsig::CounterRng;
using nonsig::Game;
using nonsig::Radix;
using nonsig::Strategy;
using nonsig::Tuple;

inline std::vector<int> random_alphabets(CounterRng& rng, int players, int max_size) {
  std::vector<int> sizes(players);
  for (int& s : sizes) s = 2 + rng.next_int(max_size - 1);
  return sizes;
}

// Exponential draws normalized with a floor keep every cell's probability
// bounded away from zero.
inline std::vector<double> random_full_distribution(CounterRng& rng, long cells,
                                                    double floor_weight = 0.2) {
  std::vector<double> p(cells);
  double total = 0.0;
  for (double& x : p) {
    x = floor_weight - std::log(1.0 - rng.next_unit());
    total += x;
  }
  for (double& x : p) x /= total;
  return p;
}

inline void random_predicate(CounterRng& rng, const Radix& q, const Radix& a, Game& g,
                             double accept_prob = 0.5) {
  for (long qi = 0; qi < q.total; ++qi)
    for (long ai = 0; ai < a.total; ++ai)
      if (rng.next_unit() < accept_prob)
        g.accept.emplace_back(nonsig::index_to_tuple(q, qi), nonsig::index_to_tuple(a, ai));
}

inline Game random_complete_game(CounterRng& rng, int players, int max_alphabet = 3) {
  Game g;
  g.players = players;
  g.question_alphabets = random_alphabets(rng, players, max_alphabet);
  g.answer_alphabets = random_alphabets(rng, players, max_alphabet);
  Radix q = nonsig::make_radix(g.question_alphabets);
  Radix a = nonsig::make_radix(g.answer_alphabets);
  std::vector<double> dist = random_full_distribution(rng, q.total);
  for (long qi = 0; qi < q.total; ++qi)
    g.questions.emplace_back(nonsig::index_to_tuple(q, qi), dist[qi]);
  random_predicate(rng, q, a, g);
  return g;
}

// Two-player game whose support misses at least one per-player-feasible
// tuple, i.e. is_complete_support is false.
inline Game random_incomplete_two_player(CounterRng& rng, int max_alphabet = 3) {
  for (;;) {
    Game g;
    g.players = 2;
    g.question_alphabets = random_alphabets(rng, 2, max_alphabet);
    g.answer_alphabets = random_alphabets(rng, 2, max_alphabet);
    Radix q = nonsig::make_radix(g.question_alphabets);
    Radix a = nonsig::make_radix(g.answer_alphabets);
    std::vector<long> kept;
    for (long qi = 0; qi < q.total; ++qi)
      if (rng.next_unit() < 0.6) kept.push_back(qi);
    if (kept.empty() || static_cast<long>(kept.size()) == q.total) continue;
    std::vector<double> dist = random_full_distribution(rng, kept.size());
    for (std::size_t k = 0; k < kept.size(); ++k)
      g.questions.emplace_back(nonsig::index_to_tuple(q, kept[k]), dist[k]);
    if (nonsig::is_complete_support(g)) continue;
    random_predicate(rng, q, a, g);
    return g;
  }
}

inline Strategy random_strategy(CounterRng& rng, std::vector<int> qalpha,
                                std::vector<int> aalpha) {
  Radix q = nonsig::make_radix(qalpha);
  Radix a = nonsig::make_radix(aalpha);
  Strategy s{std::move(qalpha), std::move(aalpha), {}};
  s.table.assign(q.total * a.total, 0.0);
  for (long qi = 0; qi < q.total; ++qi) {
    double total = 0.0;
    for (long ai = 0; ai < a.total; ++ai) {
      double x = -std::log(1.0 - rng.next_unit());
      s.table[qi * a.total + ai] = x;
      total += x;
    }
    for (long ai = 0; ai < a.total; ++ai) s.table[qi * a.total + ai] /= total;
  }
  return s;
}

// Product of per-player local strategies; non-signalling by construction.
inline Strategy random_product_strategy(CounterRng& rng, std::vector<int> qalpha,
                                        std::vector<int> aalpha) {
  int m = static_cast<int>(qalpha.size());
  std::vector<std::vector<double>> local(m);
  for (int i = 0; i < m; ++i) {
    local[i].assign(static_cast<std::size_t>(qalpha[i]) * aalpha[i], 0.0);
    for (int qi = 0; qi < qalpha[i]; ++qi) {
      double total = 0.0;
      for (int ai = 0; ai < aalpha[i]; ++ai) {
        double x = -std::log(1.0 - rng.next_unit());
        local[i][qi * aalpha[i] + ai] = x;
        total += x;
      }
      for (int ai = 0; ai < aalpha[i]; ++ai) local[i][qi * aalpha[i] + ai] /= total;
    }
  }
  Radix q = nonsig::make_radix(qalpha);
  Radix a = nonsig::make_radix(aalpha);
  Strategy s{std::move(qalpha), std::move(aalpha), {}};
  s.table.assign(q.total * a.total, 0.0);
  for (long qi = 0; qi < q.total; ++qi) {
    Tuple qt = nonsig::index_to_tuple(q, qi);
    for (long ai = 0; ai < a.total; ++ai) {
      Tuple at = nonsig::index_to_tuple(a, ai);
      double p = 1.0;
      for (int i = 0; i < m; ++i) p *= local[i][qt[i] * a.sizes[i] + at[i]];
      s.table[qi * a.total + ai] = p;
    }
  }
  return s;
}

// The maximally nonlocal non-signalling strategy for chsh: uniform marginals
// with answers satisfying a xor b = x and y. Wins every question tuple.
inline Strategy pr_box() {
  Strategy s{{2, 2}, {2, 2}, std::vector<double>(16, 0.0)};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int va = 0; va < 2; ++va)
        for (int vb = 0; vb < 2; ++vb)
          if ((va ^ vb) == (x & y)) s.table[(x * 2 + y) * 4 + va * 2 + vb] = 0.5;
  return s;
}

// Mix toward a second table to land at a chosen strategy distance scale.
inline Strategy mix_strategies(const Strategy& base, const Strategy& other, double lambda) {
  Strategy out = base;
  for (std::size_t k = 0; k < out.table.size(); ++k)
    out.table[k] = (1.0 - lambda) * base.table[k] + lambda * other.table[k];
  return out;
}

// Best classical value: exhaustive search over per-player answer functions
// a_i = f_i(q_i). These are local (non-signalling) strategies.
inline double max_winning_deterministic(const Game& g) {
  nonsig::GameTables t = nonsig::compile(g);
  int m = g.players;
  std::vector<int> digits;   // flattened f_i(q_i) choices
  std::vector<int> bases;
  std::vector<int> offset(m, 0);
  for (int i = 0; i < m; ++i) {
    offset[i] = static_cast<int>(digits.size());
    for (int qj = 0; qj < t.q.sizes[i]; ++qj) {
      digits.push_back(0);
      bases.push_back(t.a.sizes[i]);
    }
  }
  std::vector<Tuple> qtuples(t.q.total);
  for (long qi = 0; qi < t.q.total; ++qi) qtuples[qi] = nonsig::index_to_tuple(t.q, qi);
  double best = 0.0;
  for (;;) {
    double w = 0.0;
    for (long qi = 0; qi < t.q.total; ++qi) {
      if (t.qdist[qi] == 0.0) continue;
      Tuple at(m);
      for (int i = 0; i < m; ++i) at[i] = digits[offset[i] + qtuples[qi][i]];
      if (t.win[qi * t.a.total + nonsig::tuple_to_index(t.a, at)]) w += t.qdist[qi];
    }
    best = std::max(best, w);
    std::size_t pos = 0;
    while (pos < digits.size() && ++digits[pos] == bases[pos]) digits[pos++] = 0;
    if (pos == digits.size()) break;
  }
  return best;
}

}  // namespace testgen
