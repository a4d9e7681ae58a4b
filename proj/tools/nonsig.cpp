// Command-line front end: game analysis (LP values, kappa, threshold bounds,
// parameter feasibility, support lifting, signalling reports) and seeded
// Monte Carlo experiments with CSV/JSON artifacts.

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"

#include "nonsig/analysis.hpp"
#include "nonsig/game.hpp"
#include "nonsig/io.hpp"
#include "nonsig/repetition.hpp"
#include "nonsig/signalling.hpp"

namespace {

// Validation failures (bad flags, unknown games, malformed files, infeasible
// parameters) exit 2; unexpected runtime failures exit 1.
struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  int threads = hw ? static_cast<int>(hw) : 1;
  if (const char* env = std::getenv("NONSIG_THREADS")) {
    char* end = nullptr;
    long cap = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || cap < 1)
      throw ValidationError("NONSIG_THREADS must be a positive integer");
    threads = std::min<long>(threads, cap);
  }
  return threads;
}

nonsig::Game resolve_game(const std::string& source) {
  if (source == "chsh" || source == "gyni2" || source == "anticorr3")
    return nonsig::builtin_game(source);
  try {
    return nonsig::load_game(source);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError("game file " + source + ": " + e.what());
  } catch (const std::runtime_error&) {
    throw ValidationError("unknown game '" + source +
                          "': not a builtin (chsh, gyni2, anticorr3) and not a readable file");
  }
}

nonsig::Strategy resolve_one_round_strategy(const std::string& source,
                                            const nonsig::Game& game) {
  nonsig::Strategy s;
  if (source == "uniform") {
    s = nonsig::uniform_strategy(game.question_alphabets, game.answer_alphabets);
  } else if (source == "optimal" || source == "iid-optimal") {
    s = nonsig::optimal_ns_strategy(game);
  } else if (source == "echo") {
    if (game.players < 2) throw ValidationError("echo strategy needs at least 2 players");
    s = nonsig::echo_strategy(game.question_alphabets, game.answer_alphabets, 0, 1);
  } else {
    try {
      s = nonsig::load_strategy(source);
    } catch (const nlohmann::json::parse_error& e) {
      throw ValidationError("strategy file " + source + ": " + e.what());
    } catch (const std::runtime_error&) {
      throw ValidationError("unknown strategy '" + source +
                            "': not a builtin (uniform, optimal, echo) and not a readable file");
    }
  }
  if (s.question_alphabets != game.question_alphabets ||
      s.answer_alphabets != game.answer_alphabets)
    throw ValidationError("strategy alphabets do not match the game");
  return s;
}

std::unique_ptr<nonsig::RepeatedStrategy> resolve_repeated_strategy(
    const std::string& source, const nonsig::Game& game,
    const std::optional<nonsig::LiftedGame>& lifted) {
  auto optimal = [&] {
    return lifted ? nonsig::optimal_ns_strategy(*lifted) : nonsig::optimal_ns_strategy(game);
  };
  if (source == "optimal" || source == "iid-optimal")
    return std::make_unique<nonsig::IIDStrategy>(optimal());
  if (source == "permuted-optimal")
    return std::make_unique<nonsig::PermutedWrapper>(
        std::make_shared<nonsig::IIDStrategy>(optimal()));
  if (source == "echo") {
    if (game.players < 2) throw ValidationError("echo strategy needs at least 2 players");
    return std::make_unique<nonsig::EchoStrategy>(game.question_alphabets,
                                                  game.answer_alphabets, 0, 1);
  }
  return std::make_unique<nonsig::IIDStrategy>(resolve_one_round_strategy(source, game));
}

nonsig::SignallingDirection resolve_direction(const std::string& key,
                                              const nonsig::Game& game) {
  nonsig::SignallingDirection dir;
  try {
    dir = nonsig::parse_direction_key(key);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("bad --direction: ") + e.what());
  }
  try {
    nonsig::detail::require_direction(dir, game.question_alphabets, game.answer_alphabets);
  } catch (const std::exception& e) {
    throw ValidationError(std::string("bad --direction: ") + e.what());
  }
  return dir;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty())
    std::cout << text;
  else
    nonsig::write_text_file(out_path, text);
}

// Experiments: --out <base> writes <base>.csv and <base>.json; without --out
// the selected --format goes to stdout.
void emit_experiment(const std::vector<nonsig::TrialRecord>& rows, std::uint64_t seed,
                     const nlohmann::json& summary, const std::string& out_path,
                     const std::string& format) {
  if (!out_path.empty()) {
    nonsig::write_text_file(out_path + ".csv", nonsig::trials_csv(rows, seed));
    nonsig::write_text_file(out_path + ".json", summary.dump(2) + "\n");
    std::cout << summary.dump(2) << "\n";
    return;
  }
  if (format == "csv")
    std::cout << nonsig::trials_csv(rows, seed);
  else
    std::cout << summary.dump(2) << "\n";
}

struct Options {
  std::string command;
  std::string game;
  std::vector<std::string> strategies;
  std::string direction;
  std::optional<double> lift;
  long n = 0;
  double beta = 0.0;
  std::optional<double> epsilon, zeta, nu;
  long trials = 0;
  std::uint64_t seed = 0;
  std::vector<long> bound_ns;
  std::string out;
  std::string format;
  bool minimize_kappa = false;
};

int run(const Options& opt) {
  using nlohmann::json;
  nonsig::Game game = resolve_game(opt.game);
  std::optional<nonsig::LiftedGame> lifted;
  if (opt.lift) {
    if (!(*opt.lift > 0.0 && *opt.lift < 1.0))
      throw ValidationError("--lift must lie strictly between 0 and 1");
    lifted = nonsig::complete_support_lift(game, *opt.lift);
  }
  int threads = thread_count();

  if (opt.command == "info") {
    nonsig::Radix q = nonsig::make_radix(game.question_alphabets);
    nonsig::Radix a = nonsig::make_radix(game.answer_alphabets);
    long support = 0;
    for (const auto& [t, p] : game.questions) support += p > 0.0;
    json j{{"players", game.players},
           {"question_alphabets", game.question_alphabets},
           {"answer_alphabets", game.answer_alphabets},
           {"question_tuples", q.total},
           {"answer_tuples", a.total},
           {"support_size", support},
           {"complete_support", nonsig::is_complete_support(game)},
           {"accept_pairs", static_cast<long>(game.accept.size())},
           {"d", nonsig::test_count_d(game)}};
    emit(j.dump(2) + "\n", opt.out);
    return 0;
  }

  if (opt.command == "value") {
    double v = lifted ? nonsig::ns_value(*lifted) : nonsig::ns_value(game);
    if (!lifted && !nonsig::is_complete_support(game))
      std::cerr << "warning: question support is incomplete; the as-written program can "
                   "overstate attainable play. Consider --lift <eta>.\n";
    if (opt.format == "json") {
      json j{{"ns_value", v}, {"lifted", static_cast<bool>(lifted)}};
      if (lifted) j["eta"] = *opt.lift;
      emit(j.dump(2) + "\n", opt.out);
    } else {
      char buf[32];
      std::snprintf(buf, sizeof(buf), "%.6f\n", v);
      emit(buf, opt.out);
    }
    return 0;
  }

  if (opt.command == "kappa") {
    json j;
    if (lifted) {
      j = json{{"kappa", nonsig::kappa(*lifted, false)},
               {"kappa_minimized", nonsig::kappa(*lifted, true)},
               {"d", nonsig::test_count_d(game)},
               {"eta", *opt.lift}};
    } else {
      j = json{{"kappa", nonsig::kappa(game, false)},
               {"kappa_minimized", nonsig::kappa(game, true)},
               {"d", nonsig::test_count_d(game)}};
    }
    emit(j.dump(2) + "\n", opt.out);
    return 0;
  }

  if (opt.command == "bound") {
    nonsig::Radix q = nonsig::make_radix(game.question_alphabets);
    nonsig::Radix a = nonsig::make_radix(game.answer_alphabets);
    double alpha = 1.0 - (lifted ? nonsig::ns_value(*lifted) : nonsig::ns_value(game));
    double kap = lifted ? nonsig::kappa(*lifted, opt.minimize_kappa)
                        : nonsig::kappa(game, opt.minimize_kappa);
    try {
      json rows = json::array();
      for (long n : opt.bound_ns) {
        nonsig::ThresholdBound b = nonsig::threshold_bound_with(
            game.players, q.total, a.total, n, opt.beta, alpha, kap);
        rows.push_back(nonsig::threshold_bound_to_json(b, n, opt.beta));
      }
      emit(json{{"rows", rows}}.dump(2) + "\n", opt.out);
    } catch (const std::domain_error& e) {
      throw ValidationError(e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    return 0;
  }

  if (opt.command == "check-params") {
    nonsig::ThresholdParameters p;
    try {
      p = lifted ? nonsig::default_parameters(*lifted, opt.beta, opt.n)
                 : nonsig::default_parameters(game, opt.beta, opt.n);
      if (opt.epsilon) p.epsilon = *opt.epsilon;
      if (opt.zeta) p.zeta = *opt.zeta;
      if (opt.nu) p.nu = *opt.nu;
      if (opt.epsilon) {
        nonsig::Radix q = nonsig::make_radix(game.question_alphabets);
        nonsig::Radix a = nonsig::make_radix(game.answer_alphabets);
        p.delta = nonsig::sanov_delta(opt.n / 2, p.epsilon, q.total * a.total).value;
      }
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    } catch (const std::domain_error& e) {
      throw ValidationError(e.what());
    }
    nonsig::ParameterCheckReport rep =
        nonsig::check_parameters(lifted ? nonsig::marginal_game(*lifted) : game, p);
    json j{{"parameters", nonsig::threshold_parameters_to_json(p)},
           {"report", nonsig::parameter_check_to_json(rep)}};
    emit(j.dump(2) + "\n", opt.out);
    if (!rep.all_pass) {
      long failing = 0;
      for (const auto& row : rep.rows) failing += !row.pass;
      std::cerr << "error: parameters infeasible (" << failing << " failing constraint"
                << (failing == 1 ? "" : "s") << ")\n";
      return 2;
    }
    return 0;
  }

  if (opt.command == "lift") {
    if (!lifted) throw ValidationError("lift requires --lift <eta>; there is no default");
    emit(nonsig::lifted_to_json(*lifted).dump(2) + "\n", opt.out);
    return 0;
  }

  if (opt.command == "sig") {
    if (opt.strategies.size() != 1)
      throw ValidationError("sig requires exactly one --strategy");
    nonsig::Strategy s = resolve_one_round_strategy(opt.strategies[0], game);
    nonsig::SigReport rep = nonsig::max_sig(game, s);
    emit(nonsig::sig_report_to_json(rep).dump(2) + "\n", opt.out);
    return 0;
  }

  if (opt.command == "simulate") {
    if (opt.strategies.size() != 1)
      throw ValidationError("simulate requires exactly one --strategy");
    auto strategy = resolve_repeated_strategy(opt.strategies[0], game, lifted);
    nonsig::ConcentrationReport rep;
    try {
      rep = lifted ? nonsig::run_concentration_experiment(*lifted, *strategy, opt.n,
                                                          opt.beta, opt.trials, opt.seed,
                                                          threads)
                   : nonsig::run_concentration_experiment(game, *strategy, opt.n, opt.beta,
                                                          opt.trials, opt.seed, threads);
    } catch (const std::domain_error& e) {
      throw ValidationError(e.what());
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    emit_experiment(rep.rows, opt.seed, nonsig::concentration_report_to_json(rep), opt.out,
                    opt.format);
    return 0;
  }

  if (opt.command == "reliability") {
    if (opt.strategies.size() != 1)
      throw ValidationError("reliability requires exactly one --strategy");
    if (!opt.zeta || !opt.epsilon)
      throw ValidationError("reliability requires --zeta and --epsilon");
    nonsig::Strategy s = resolve_one_round_strategy(opt.strategies[0], game);
    nonsig::SignallingDirection dir = resolve_direction(opt.direction, game);
    nonsig::ReliabilityReport rep;
    try {
      rep = nonsig::run_test_reliability_experiment(game, s, dir, opt.n, *opt.zeta,
                                                    *opt.epsilon, opt.trials, opt.seed,
                                                    threads);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    emit_experiment(rep.rows, opt.seed, nonsig::reliability_report_to_json(rep), opt.out,
                    opt.format);
    return 0;
  }

  if (opt.command == "joint-events") {
    if (opt.strategies.empty())
      throw ValidationError("joint-events requires at least one --strategy");
    if (!opt.zeta || !opt.epsilon)
      throw ValidationError("joint-events requires --zeta and --epsilon");
    std::vector<nonsig::Strategy> components;
    for (const std::string& src : opt.strategies)
      components.push_back(resolve_one_round_strategy(src, game));
    std::vector<double> weights(components.size(),
                                1.0 / static_cast<double>(components.size()));
    nonsig::MixtureStrategy mix(weights, components);
    nonsig::SignallingDirection dir = resolve_direction(opt.direction, game);
    nonsig::JointEventReport rep;
    try {
      rep = nonsig::run_joint_event_experiment(game, mix, dir, opt.n, *opt.zeta,
                                               *opt.epsilon, opt.trials, opt.seed, threads);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    emit_experiment(rep.rows, opt.seed, nonsig::joint_event_report_to_json(rep), opt.out,
                    opt.format);
    return 0;
  }

  if (opt.command == "guess") {
    if (opt.strategies.size() != 1)
      throw ValidationError("guess requires exactly one --strategy");
    if (!opt.zeta || !opt.epsilon)
      throw ValidationError("guess requires --zeta and --epsilon");
    auto strategy = resolve_repeated_strategy(opt.strategies[0], game, lifted);
    nonsig::SignallingDirection dir = resolve_direction(opt.direction, game);
    nonsig::GuessingGameReport rep;
    try {
      rep = nonsig::guessing_game(game, *strategy, dir, opt.n, *opt.zeta, *opt.epsilon,
                                  opt.trials, opt.seed, threads);
    } catch (const std::invalid_argument& e) {
      throw ValidationError(e.what());
    }
    emit_experiment(rep.rows, opt.seed, nonsig::guessing_report_to_json(rep), opt.out,
                    opt.format);
    return 0;
  }

  throw ValidationError("unknown command " + opt.command);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Non-signalling game values, signalling tests, and repetition experiments"};
  app.require_subcommand(1);
  Options opt;

  auto add_game = [&](CLI::App* cmd) {
    cmd->add_option("--game", opt.game, "builtin name (chsh, gyni2, anticorr3) or JSON path")
        ->required();
  };
  auto add_out = [&](CLI::App* cmd, const std::string& default_format) {
    opt.format = default_format;
    cmd->add_option("--out", opt.out, "output path (experiments append .csv/.json)");
    cmd->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));
  };
  auto add_lift = [&](CLI::App* cmd) {
    cmd->add_option("--lift", opt.lift, "dummy-question weight eta in (0,1)");
  };

  CLI::App* info = app.add_subcommand("info", "game summary and support check");
  add_game(info);
  add_out(info, "json");

  CLI::App* value = app.add_subcommand("value", "optimal non-signalling value");
  add_game(value);
  add_lift(value);
  add_out(value, "text");

  CLI::App* kappa = app.add_subcommand("kappa", "dual sensitivity constants");
  add_game(kappa);
  add_lift(kappa);
  add_out(kappa, "json");

  CLI::App* bound = app.add_subcommand("bound", "concentration tail bound over an n grid");
  add_game(bound);
  add_lift(bound);
  bound->add_option("--n", opt.bound_ns, "round counts (repeatable)")
      ->required()
      ->expected(-1);
  bound->add_option("--beta", opt.beta, "threshold slack beta")->required();
  bound->add_flag("--minimize-kappa", opt.minimize_kappa,
                  "use the smallest kappa over the optimal dual face");
  add_out(bound, "json");

  CLI::App* check = app.add_subcommand("check-params", "parameter feasibility report");
  add_game(check);
  add_lift(check);
  check->add_option("--n", opt.n, "round count")->required();
  check->add_option("--beta", opt.beta, "threshold slack beta")->required();
  check->add_option("--epsilon", opt.epsilon, "override the default epsilon");
  check->add_option("--zeta", opt.zeta, "override the default zeta");
  check->add_option("--nu", opt.nu, "override the default nu");
  add_out(check, "json");

  CLI::App* lift = app.add_subcommand("lift", "emit the dummy-question lifted game");
  add_game(lift);
  add_lift(lift);
  add_out(lift, "json");

  CLI::App* sig = app.add_subcommand("sig", "signalling report for a strategy");
  add_game(sig);
  sig->add_option("--strategy", opt.strategies,
                  "builtin (uniform, optimal, echo) or JSON path")
      ->required();
  add_out(sig, "json");

  auto add_experiment = [&](CLI::App* cmd, bool needs_test_params) {
    add_game(cmd);
    cmd->add_option("--strategy", opt.strategies,
                    "builtin (uniform, optimal, iid-optimal, permuted-optimal, echo) or "
                    "JSON path")
        ->required();
    cmd->add_option("--n", opt.n, "rounds per trial")->required();
    cmd->add_option("--trials", opt.trials, "Monte Carlo trials")->required();
    cmd->add_option("--seed", opt.seed, "master random seed")->required();
    if (needs_test_params) {
      cmd->add_option("--direction", opt.direction,
                      "signalling direction key \"(i|b_bar|s_i|s_bar)\"")
          ->required();
      cmd->add_option("--zeta", opt.zeta, "test threshold zeta")->required();
      cmd->add_option("--epsilon", opt.epsilon, "estimation accuracy epsilon")->required();
    }
    add_out(cmd, "csv");
  };

  CLI::App* simulate = app.add_subcommand("simulate", "winning-frequency concentration");
  add_experiment(simulate, false);
  add_lift(simulate);
  simulate->add_option("--beta", opt.beta, "threshold slack beta")->required();

  CLI::App* reliability = app.add_subcommand("reliability", "signalling-test acceptance");
  add_experiment(reliability, true);

  CLI::App* joint = app.add_subcommand("joint-events", "test-vs-measurement joint events");
  add_experiment(joint, true);

  CLI::App* guess = app.add_subcommand("guess", "question-guessing game");
  add_experiment(guess, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    app.exit(e);
    return 2;
  }

  opt.command = app.get_subcommands().front()->get_name();
  try {
    return run(opt);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
}
