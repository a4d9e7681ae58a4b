#pragma once

// Serialization: game/strategy/lifted-game JSON loaders and savers, report
// JSON emitters, and the per-trial CSV writer. All float formatting is
// locale-independent and shortest-round-trip, so identical inputs produce
// byte-identical artifacts.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <optional>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nonsig/analysis.hpp"
#include "nonsig/game.hpp"
#include "nonsig/repetition.hpp"
#include "nonsig/signalling.hpp"
#include "nonsig/stats.hpp"

namespace nonsig {

namespace detail {

inline std::string shortest_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
  return std::string(buf, ptr);
}

inline Tuple tuple_from_json(const nlohmann::json& j, const std::vector<int>& sizes,
                             const char* what) {
  if (!j.is_array()) throw std::invalid_argument(std::string(what) + ": tuple must be an array");
  Tuple t = j.get<Tuple>();
  if (!tuple_in_range(t, sizes))
    throw std::invalid_argument(std::string(what) + ": tuple " + tuple_str(t) +
                                " outside the declared alphabets");
  return t;
}

inline std::vector<int> alphabets_from_json(const nlohmann::json& j, const char* what) {
  if (!j.is_array() || j.empty())
    throw std::invalid_argument(std::string(what) + " must be a non-empty array");
  std::vector<int> sizes = j.get<std::vector<int>>();
  for (int s : sizes)
    if (s <= 0) throw std::invalid_argument(std::string(what) + " entries must be positive");
  return sizes;
}

}  // namespace detail

inline nlohmann::json game_to_json(const Game& g) {
  nlohmann::json j;
  j["players"] = g.players;
  j["question_alphabets"] = g.question_alphabets;
  j["answer_alphabets"] = g.answer_alphabets;
  j["questions"] = nlohmann::json::array();
  for (const auto& [q, p] : g.questions)
    j["questions"].push_back({{"q", q}, {"p", p}});
  j["accept"] = nlohmann::json::array();
  for (const auto& [q, a] : g.accept)
    j["accept"].push_back({{"q", q}, {"a", a}});
  return j;
}

inline Game game_from_json(const nlohmann::json& j) {
  Game g;
  if (!j.contains("players") || !j["players"].is_number_integer())
    throw std::invalid_argument("game: missing integer field \"players\"");
  g.players = j["players"].get<int>();
  g.question_alphabets = detail::alphabets_from_json(j.value("question_alphabets", nlohmann::json()), "question_alphabets");
  g.answer_alphabets = detail::alphabets_from_json(j.value("answer_alphabets", nlohmann::json()), "answer_alphabets");
  if (g.players != static_cast<int>(g.question_alphabets.size()) ||
      g.players != static_cast<int>(g.answer_alphabets.size()))
    throw std::invalid_argument("game: alphabet lists must have one entry per player");
  std::set<Tuple> seen_q;
  for (const auto& entry : j.value("questions", nlohmann::json::array())) {
    Tuple q = detail::tuple_from_json(entry.at("q"), g.question_alphabets, "questions");
    if (!seen_q.insert(q).second)
      throw std::invalid_argument("game: duplicate question tuple " + detail::tuple_str(q));
    g.questions.emplace_back(std::move(q), entry.at("p").get<double>());
  }
  std::set<std::pair<Tuple, Tuple>> seen_pair;
  for (const auto& entry : j.value("accept", nlohmann::json::array())) {
    Tuple q = detail::tuple_from_json(entry.at("q"), g.question_alphabets, "accept");
    Tuple a = detail::tuple_from_json(entry.at("a"), g.answer_alphabets, "accept");
    if (!seen_pair.insert({q, a}).second)
      throw std::invalid_argument("game: duplicate accept pair " + detail::tuple_str(q) +
                                  detail::tuple_str(a));
    g.accept.emplace_back(std::move(q), std::move(a));
  }
  auto bad = validate_game(g);
  if (!bad.empty()) throw std::invalid_argument("game: " + bad.front());
  return g;
}

inline nlohmann::json strategy_to_json(const Strategy& s) {
  Radix q = make_radix(s.question_alphabets);
  Radix a = make_radix(s.answer_alphabets);
  nlohmann::json j;
  j["question_alphabets"] = s.question_alphabets;
  j["answer_alphabets"] = s.answer_alphabets;
  j["table"] = nlohmann::json::array();
  for (long qi = 0; qi < q.total; ++qi)
    for (long ai = 0; ai < a.total; ++ai) {
      double p = s.table[qi * a.total + ai];
      if (p != 0.0)
        j["table"].push_back(
            {{"q", index_to_tuple(q, qi)}, {"a", index_to_tuple(a, ai)}, {"p", p}});
    }
  return j;
}

// Entries absent from "table" are zero; duplicates are rejected.
inline Strategy strategy_from_json(const nlohmann::json& j) {
  Strategy s;
  s.question_alphabets = detail::alphabets_from_json(j.value("question_alphabets", nlohmann::json()), "question_alphabets");
  s.answer_alphabets = detail::alphabets_from_json(j.value("answer_alphabets", nlohmann::json()), "answer_alphabets");
  if (s.question_alphabets.size() != s.answer_alphabets.size())
    throw std::invalid_argument("strategy: alphabet lists must have equal length");
  Radix q = make_radix(s.question_alphabets);
  Radix a = make_radix(s.answer_alphabets);
  s.table.assign(q.total * a.total, 0.0);
  std::set<std::pair<Tuple, Tuple>> seen;
  for (const auto& entry : j.value("table", nlohmann::json::array())) {
    Tuple qt = detail::tuple_from_json(entry.at("q"), s.question_alphabets, "table");
    Tuple at = detail::tuple_from_json(entry.at("a"), s.answer_alphabets, "table");
    if (!seen.insert({qt, at}).second)
      throw std::invalid_argument("strategy: duplicate table entry " + detail::tuple_str(qt) +
                                  detail::tuple_str(at));
    s.table[tuple_to_index(q, qt) * a.total + tuple_to_index(a, at)] =
        entry.at("p").get<double>();
  }
  auto bad = validate_strategy(s);
  if (!bad.empty()) throw std::invalid_argument("strategy: " + bad.front());
  return s;
}

inline nlohmann::json lifted_to_json(const LiftedGame& lg) {
  Radix q = make_radix(lg.base.question_alphabets);
  nlohmann::json j;
  j["base"] = game_to_json(lg.base);
  j["eta"] = lg.eta;
  j["dummy_count"] = lg.dummy_count;
  j["dummy_set"] = nlohmann::json::array();
  for (long qi : lg.dummy_set) j["dummy_set"].push_back(index_to_tuple(q, qi));
  j["lifted_dist"] = nlohmann::json::array();
  for (long qi = 0; qi < q.total; ++qi)
    for (int d = 0; d < 2; ++d) {
      double p = lg.lifted_dist[qi * 2 + d];
      if (p != 0.0)
        j["lifted_dist"].push_back({{"q", index_to_tuple(q, qi)}, {"d", d}, {"p", p}});
    }
  return j;
}

inline LiftedGame lifted_from_json(const nlohmann::json& j) {
  LiftedGame lg;
  lg.base = game_from_json(j.at("base"));
  lg.eta = j.at("eta").get<double>();
  if (!(lg.eta > 0.0 && lg.eta < 1.0))
    throw std::invalid_argument("lifted game: eta must lie in (0, 1)");
  Radix q = make_radix(lg.base.question_alphabets);
  lg.dummy_count = j.at("dummy_count").get<long>();
  std::set<long> dummies;
  for (const auto& entry : j.at("dummy_set")) {
    Tuple t = detail::tuple_from_json(entry, lg.base.question_alphabets, "dummy_set");
    if (!dummies.insert(tuple_to_index(q, t)).second)
      throw std::invalid_argument("lifted game: duplicate dummy tuple " + detail::tuple_str(t));
  }
  lg.dummy_set.assign(dummies.begin(), dummies.end());
  if (static_cast<long>(lg.dummy_set.size()) != lg.dummy_count)
    throw std::invalid_argument("lifted game: dummy_count disagrees with dummy_set");
  lg.lifted_dist.assign(q.total * 2, 0.0);
  std::set<std::pair<long, int>> seen;
  for (const auto& entry : j.at("lifted_dist")) {
    Tuple t = detail::tuple_from_json(entry.at("q"), lg.base.question_alphabets, "lifted_dist");
    int d = entry.at("d").get<int>();
    if (d != 0 && d != 1) throw std::invalid_argument("lifted game: d must be 0 or 1");
    long qi = tuple_to_index(q, t);
    if (!seen.insert({qi, d}).second)
      throw std::invalid_argument("lifted game: duplicate lifted_dist cell");
    lg.lifted_dist[qi * 2 + d] = entry.at("p").get<double>();
  }
  double total = 0.0;
  for (double p : lg.lifted_dist) {
    if (p < 0.0) throw std::invalid_argument("lifted game: negative probability");
    total += p;
  }
  if (std::abs(total - 1.0) > kNormalizationTol * q.total)
    throw std::invalid_argument("lifted game: lifted_dist must sum to 1");
  return lg;
}

inline nlohmann::json analysis_report_to_json(const AnalysisReport& r) {
  return {{"ns_value", r.ns_value},
          {"alpha", r.alpha},
          {"kappa", r.kappa},
          {"kappa_minimized", r.kappa_minimized},
          {"d", r.d},
          {"relaxed_equals_equality", r.relaxed_equals_equality}};
}

inline nlohmann::json threshold_parameters_to_json(const ThresholdParameters& p) {
  return {{"epsilon", p.epsilon}, {"zeta", p.zeta}, {"nu", p.nu},
          {"beta", p.beta},       {"n", p.n},       {"delta", p.delta},
          {"c", p.c},             {"d", p.d},       {"kappa", p.kappa},
          {"W_ns", p.W_ns}};
}

inline ThresholdParameters threshold_parameters_from_json(const nlohmann::json& j) {
  ThresholdParameters p;
  p.epsilon = j.at("epsilon").get<double>();
  p.zeta = j.at("zeta").get<double>();
  p.nu = j.at("nu").get<double>();
  p.beta = j.at("beta").get<double>();
  p.n = j.at("n").get<long>();
  p.delta = j.at("delta").get<double>();
  p.c = j.at("c").get<double>();
  p.d = j.at("d").get<long>();
  p.kappa = j.at("kappa").get<double>();
  p.W_ns = j.at("W_ns").get<double>();
  return p;
}

inline nlohmann::json parameter_check_to_json(const ParameterCheckReport& r) {
  nlohmann::json rows = nlohmann::json::array();
  for (const ParameterCheck& c : r.rows)
    rows.push_back({{"name", c.name}, {"pass", c.pass}, {"margin", c.margin},
                    {"detail", c.detail}});
  return {{"all_pass", r.all_pass}, {"checks", rows}};
}

inline nlohmann::json threshold_bound_to_json(const ThresholdBound& b, long n, double beta) {
  return {{"n", n},
          {"beta", beta},
          {"alpha", b.alpha},
          {"kappa", b.kappa},
          {"log_bound", b.log_bound},
          {"bound", b.bound},
          {"n_below_one", b.n_below_one}};
}

inline nlohmann::json sig_report_to_json(const SigReport& r) {
  nlohmann::json values = nlohmann::json::object();
  for (const SigEntry& e : r.entries) {
    if (e.value)
      values[direction_key(e.direction)] = *e.value;
    else
      values[direction_key(e.direction)] = nullptr;
  }
  return {{"values", values},
          {"max_direction", direction_key(r.max_direction)},
          {"max_value", r.max_value}};
}

inline nlohmann::json wilson_to_json(const WilsonInterval& w) {
  return {{"estimate", w.estimate}, {"low", w.low}, {"high", w.high}};
}

inline nlohmann::json concentration_report_to_json(const ConcentrationReport& r) {
  return {{"experiment", "concentration"},
          {"n", r.n},
          {"beta", r.beta},
          {"alpha", r.alpha},
          {"kappa", r.kappa},
          {"threshold", r.threshold},
          {"trials", r.trials},
          {"exceed_count", r.exceed_count},
          {"interval", wilson_to_json(r.interval)},
          {"bound", r.bound},
          {"log_bound", r.log_bound}};
}

inline nlohmann::json reliability_report_to_json(const ReliabilityReport& r) {
  return {{"experiment", "reliability"},
          {"direction", direction_key(r.direction)},
          {"n", r.n},
          {"zeta", r.zeta},
          {"epsilon", r.epsilon},
          {"trials", r.trials},
          {"accept_count", r.accept_count},
          {"interval", wilson_to_json(r.interval)},
          {"delta", r.delta}};
}

inline nlohmann::json joint_event_report_to_json(const JointEventReport& r) {
  return {{"experiment", "joint_events"},
          {"direction", direction_key(r.direction)},
          {"trials", r.trials},
          {"low_threshold", r.low_threshold},
          {"high_threshold", r.high_threshold},
          {"event1_count", r.event1_count},
          {"interval1", wilson_to_json(r.interval1)},
          {"event2_count", r.event2_count},
          {"interval2", wilson_to_json(r.interval2)},
          {"two_delta", r.two_delta}};
}

inline nlohmann::json guessing_report_to_json(const GuessingGameReport& r) {
  return {{"experiment", "guessing_game"},
          {"direction", direction_key(r.direction)},
          {"W_ns", r.W_ns},
          {"empirical_win", r.empirical_win},
          {"win_count", r.win_count},
          {"trials", r.trials},
          {"accept_rate", r.accept_rate},
          {"accept_count", r.accept_count},
          {"interval", wilson_to_json(r.interval)},
          {"n", r.n}};
}

inline constexpr const char* kTrialCsvHeader =
    "trial,seed,f,f_t,f_g,f_real,test,event1,event2,exceed,win,sig_est2";

inline void write_trials_csv(std::ostream& out, const std::vector<TrialRecord>& rows,
                             std::uint64_t seed) {
  auto opt_int = [](int v) { return v < 0 ? std::string() : std::to_string(v); };
  out << kTrialCsvHeader << '\n';
  for (const TrialRecord& r : rows) {
    out << r.trial << ',' << seed << ',' << detail::shortest_double(r.f) << ','
        << detail::shortest_double(r.f_t) << ',' << detail::shortest_double(r.f_g) << ','
        << (r.f_real ? detail::shortest_double(*r.f_real) : std::string()) << ','
        << opt_int(r.test) << ',' << opt_int(r.event1) << ',' << opt_int(r.event2) << ','
        << opt_int(r.exceed) << ',' << opt_int(r.win) << ','
        << (std::isnan(r.sig_est2) ? std::string() : detail::shortest_double(r.sig_est2))
        << '\n';
  }
}

inline std::string trials_csv(const std::vector<TrialRecord>& rows, std::uint64_t seed) {
  std::ostringstream out;
  write_trials_csv(out, rows, seed);
  return out.str();
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

inline nlohmann::json load_json(const std::string& path) {
  return nlohmann::json::parse(read_text_file(path));
}

inline void save_json(const std::string& path, const nlohmann::json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

inline Game load_game(const std::string& path) { return game_from_json(load_json(path)); }
inline void save_game(const std::string& path, const Game& g) {
  save_json(path, game_to_json(g));
}

inline Strategy load_strategy(const std::string& path) {
  return strategy_from_json(load_json(path));
}
inline void save_strategy(const std::string& path, const Strategy& s) {
  save_json(path, strategy_to_json(s));
}

inline LiftedGame load_lifted(const std::string& path) {
  return lifted_from_json(load_json(path));
}
inline void save_lifted(const std::string& path, const LiftedGame& lg) {
  save_json(path, lifted_to_json(lg));
}

}  // namespace nonsig
