// Command-line front end: offline solvers, online learners, the ad-model
// simulation, and instance validation. Summaries go to stdout; per-round
// traces go to --out as CSV. Every randomized run takes an explicit --seed
// and is byte-reproducible.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "submax/submax.hpp"

namespace {

using namespace submax;

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", x);
  return buf;
}

void write_out(const std::string& path, const RewardTrace& trace) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_trace_csv(out, trace);
}

void write_out(const std::string& path, const std::vector<RewardTrace>& trials) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  write_trace_csv(out, trials);
}

// Bound on objective values over feasible assignments, from the declared
// single-item marginal bound (objectives here have empty-set value 0).
double feasible_value_bound(const GroundSet& ground, const ValueOracle& f) {
  int live = 0;
  for (int k = 0; k < ground.num_positions(); ++k)
    if (!ground.position(k).empty()) ++live;
  return std::max(1e-12, live * f.value_bound());
}

int run_offline(const std::string& path, int colors, const std::string& estimator,
                int rho, double cap, std::uint64_t seed) {
  Instance inst = load_instance(path);
  const GroundSet& g = inst.ground;
  std::cout << "instance: " << path << "  objective=" << inst.objective_name
            << " K=" << g.num_positions() << " n=" << g.num_items() << "\n";

  GreedyResult local = locally_greedy(g, inst.objective);
  std::cout << "locally_greedy: value=" << fmt(local.value) << " items=[";
  for (std::size_t i = 0; i < local.assignment.ids().size(); ++i)
    std::cout << (i ? " " : "") << local.assignment.ids()[i];
  std::cout << "]\n";

  ColorEstimator est = estimator == "sampled" ? ColorEstimator::sampled(rho)
                                              : ColorEstimator::exact(cap);
  TabularGreedyResult tab = tabular_greedy(g, inst.objective, colors, est, seed);
  if (estimator == "exact" && !tab.exact)
    std::cerr << "warning: exact color enumeration exceeds cap, fell back to "
              << rho << " samples per cell\n";
  std::cout << "tabular_greedy: colors=" << colors
            << " beta=" << fmt6(beta(g.num_positions(), colors))
            << " table_value=" << fmt(tab.table_value)
            << (tab.exact ? " (exact)" : " (sampled)") << "\n";
  std::cout << "sampled assignment: value=" << fmt(inst.objective(tab.assignment))
            << " items=[";
  for (std::size_t i = 0; i < tab.assignment.ids().size(); ++i)
    std::cout << (i ? " " : "") << tab.assignment.ids()[i];
  std::cout << "]\n";

  try {
    OptResult opt = brute_force_opt(inst.objective, g, cap);
    std::cout << "optimum: value=" << fmt(opt.value) << " items=[";
    for (std::size_t i = 0; i < opt.best.ids().size(); ++i)
      std::cout << (i ? " " : "") << opt.best.ids()[i];
    std::cout << "]\n";
  } catch (const cap_exceeded&) {
    std::cout << "optimum: skipped (enumeration exceeds cap " << fmt6(cap) << ")\n";
  }
  return 0;
}

struct StreamSpec {
  // Either a stationary instance objective or a day-by-day synthetic stream.
  std::optional<Instance> instance;
  std::optional<BlogStream> blog;

  const GroundSet& ground() const {
    return instance ? instance->ground : blog->ground();
  }
  ValueOracle objective(long day) const {
    return instance ? instance->objective : blog->objective(day);
  }
  double value_bound() const {
    return instance ? instance->objective.value_bound() : blog->value_bound();
  }
};

int run_tg_online(const StreamSpec& stream, int colors, long rounds,
                  const std::string& feedback, double explore, std::uint64_t seed,
                  const std::string& out_path, double regret_cap) {
  const GroundSet& g = stream.ground();
  TgOnline::Options opt;
  opt.colors = colors;
  opt.feedback = feedback == "bandit" ? TgOnline::Feedback::Bandit : TgOnline::Feedback::Full;
  opt.explore_prob = explore;
  opt.reward_bound = feasible_value_bound(g, stream.objective(0));
  opt.seed = seed;
  TgOnline learner(g, opt);

  std::optional<RegretTracker> tracker;
  bool tracker_capped = false;
  try {
    tracker.emplace(g, regret_cap);
  } catch (const cap_exceeded&) {
    tracker_capped = true;
  }

  RewardTrace trace;
  for (long t = 0; t < rounds; ++t) {
    const ItemSet& played = learner.step();
    ValueOracle f_t = stream.objective(t);
    double reward = f_t(played);
    if (opt.feedback == TgOnline::Feedback::Bandit)
      learner.feedback(reward);
    else
      learner.feedback(f_t);
    double regret = 0.0;
    if (tracker) {
      tracker->observe(f_t, played);
      regret = tracker->regret_1m1e();
    }
    trace.add(reward, regret, learner.last_explored());
  }

  std::cout << "tg-online: colors=" << colors << " feedback=" << feedback
            << " rounds=" << rounds << "\n";
  std::cout << "cum_reward=" << fmt(trace.cumulative_reward());
  if (tracker) {
    std::cout << " final_regret_1m1e=" << fmt(tracker->regret_1m1e())
              << " best_static=" << fmt(tracker->best_static_value());
  } else if (tracker_capped) {
    std::cout << " regret=skipped (static enumeration exceeds cap)";
  }
  std::cout << "\n";
  if (!out_path.empty()) write_out(out_path, trace);
  return 0;
}

int run_ocg(const StreamSpec& stream, const std::shared_ptr<const MatroidOracle>& matroid,
            int stages, long rounds, std::optional<double> scale, std::uint64_t seed,
            const std::string& out_path, double regret_cap) {
  Ocg::Options opt;
  opt.stages = stages;
  opt.value_bound = stream.value_bound();
  opt.horizon_hint = rounds;
  opt.perturbation_scale = scale;
  opt.seed = seed;
  Ocg learner(*matroid, opt);

  std::optional<RegretTracker> tracker;
  bool tracker_capped = false;
  try {
    tracker.emplace(enumerate_independent_sets(*matroid, regret_cap));
  } catch (const cap_exceeded&) {
    tracker_capped = true;
  }

  RewardTrace trace;
  for (long t = 0; t < rounds; ++t) {
    const Ocg::Step& step = learner.step();
    ValueOracle f_t = stream.objective(t);
    double reward = f_t(step.played);
    learner.feedback(f_t);
    double regret = 0.0;
    if (tracker) {
      tracker->observe(f_t, step.played);
      regret = tracker->regret_1m1e();
    }
    trace.add(reward, regret, false);
  }

  std::cout << "ocg: stages=" << stages << " rounds=" << rounds << "\n";
  std::cout << "cum_reward=" << fmt(trace.cumulative_reward());
  if (tracker) {
    std::cout << " final_regret_1m1e=" << fmt(tracker->regret_1m1e())
              << " best_static=" << fmt(tracker->best_static_value());
  } else if (tracker_capped) {
    std::cout << " regret=skipped (independent-set enumeration exceeds cap)";
  }
  std::cout << "\n";
  if (!out_path.empty()) write_out(out_path, trace);
  return 0;
}

int run_ocg_offline(const std::string& path, double eps, std::optional<long> rounds,
                    std::optional<double> opt_hint, std::uint64_t seed) {
  Instance inst = load_instance(path);
  OcgOfflineOptions opt;
  opt.rounds = rounds;
  opt.opt_hint = opt_hint;
  opt.seed = seed;
  OcgOfflineResult res = ocg_offline_solve(inst.objective, *inst.matroid, eps, opt);
  std::cout << "ocg-offline: eps=" << fmt6(eps) << " stages=" << res.stages
            << " rounds=" << res.rounds << "\n";
  std::cout << "value=" << fmt(res.value) << " items=[";
  for (std::size_t i = 0; i < res.set.ids().size(); ++i)
    std::cout << (i ? " " : "") << res.set.ids()[i];
  std::cout << "]\n";
  return 0;
}

struct AdSimConfig {
  int positions = 5;
  int ads = 20;
  std::uint64_t seed = 1;
  int trials = 1;
  double opt_cap = 5e6;
  AdSimOptions run;
};

int run_ad_sim(const AdSimConfig& cfg, const std::string& out_path) {
  AdModel model = AdModel::reference(cfg.positions, cfg.ads);
  GroundSet ground = model.ground();
  ValueOracle expected = ad_model_oracle(model);

  // Static benchmark: exact where enumeration fits, greedy proxy otherwise.
  ItemSet benchmark;
  double benchmark_value = 0.0;
  bool benchmark_exact = true;
  try {
    OptResult opt = brute_force_opt(expected, ground, cfg.opt_cap);
    benchmark = opt.best;
    benchmark_value = opt.value;
  } catch (const cap_exceeded&) {
    benchmark_exact = false;
    GreedyResult greedy = locally_greedy(ground, expected);
    benchmark = greedy.assignment;
    benchmark_value = greedy.value;
  }

  // Trials are independent; fan them out and collect in order.
  std::vector<RewardTrace> trials(cfg.trials);
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> running;
  for (int m = 0; m < cfg.trials; ++m) {
    if (running.size() >= workers) {
      running.front().get();
      running.erase(running.begin());
    }
    running.push_back(std::async(std::launch::async, [&, m]() {
      trials[m] = run_ad_trial(model, cfg.run, benchmark, benchmark_value,
                               derive_seed(cfg.seed, "ad-trial", m))
                      .trace;
    }));
  }
  for (auto& f : running) f.get();

  double mean = 0.0;
  for (const auto& tr : trials) mean += tr.cumulative_reward();
  mean /= cfg.trials;
  double var = 0.0;
  for (const auto& tr : trials) {
    double d = tr.cumulative_reward() - mean;
    var += d * d;
  }
  var = cfg.trials > 1 ? var / (cfg.trials - 1) : 0.0;

  std::cout << "ad-sim: algo=" << cfg.run.algo << " colors=" << cfg.run.colors
            << " positions=" << cfg.positions << " ads=" << cfg.ads
            << " rounds=" << cfg.run.rounds << " trials=" << cfg.trials << "\n";
  std::cout << "static_benchmark_value=" << fmt(benchmark_value)
            << (benchmark_exact ? " (exact)" : " (greedy proxy)") << "\n";
  std::cout << "mean_cum_reward=" << fmt(mean) << " stddev=" << fmt(std::sqrt(var))
            << "\n";
  if (!out_path.empty()) write_out(out_path, trials);
  return 0;
}

int run_check(const std::string& path, int structure_cap, int matroid_cap) {
  Instance inst = load_instance(path);
  const GroundSet& g = inst.ground;
  std::cout << "instance: " << path << "  objective=" << inst.objective_name
            << " K=" << g.num_positions() << " n=" << g.num_items() << "\n";
  std::cout << "declared: monotone=" << (inst.objective.monotone() ? "yes" : "no")
            << " submodular=" << (inst.objective.submodular() ? "yes" : "no")
            << " value_bound=" << fmt(inst.objective.value_bound()) << "\n";

  int failures = 0;
  if (g.num_items() <= structure_cap) {
    StructureReport rep = check_monotone_submodular(inst.objective, g, structure_cap);
    std::cout << "verified: monotone=" << (rep.monotone ? "yes" : "no")
              << " submodular=" << (rep.submodular ? "yes" : "no") << "\n";
    if (inst.objective.monotone() && !rep.monotone) {
      ++failures;
      const auto& w = *rep.monotone_witness;
      std::cout << "  monotonicity violated: adding item " << w.added
                << " changes value by " << fmt(w.small_gain) << "\n";
    }
    if (inst.objective.submodular() && !rep.submodular) {
      ++failures;
      const auto& w = *rep.submodular_witness;
      std::cout << "  diminishing gains violated: item " << w.added << " gains "
                << fmt(w.small_gain) << " at the smaller set but " << fmt(w.large_gain)
                << " at the larger\n";
    }
  } else {
    std::cout << "verified: skipped (n=" << g.num_items() << " exceeds cap "
              << structure_cap << ")\n";
  }

  if (g.num_items() <= matroid_cap) {
    bool ok = validate_matroid_axioms(*inst.matroid, matroid_cap);
    std::cout << "matroid axioms: " << (ok ? "ok" : "VIOLATED") << "\n";
    if (!ok) ++failures;
  } else {
    std::cout << "matroid axioms: skipped (n exceeds cap " << matroid_cap << ")\n";
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Assignment and matroid maximization toolkit"};
  app.require_subcommand(1);

  // offline ------------------------------------------------------------
  auto* offline = app.add_subcommand("offline", "Greedy table construction on an instance");
  std::string off_instance, off_estimator = "exact";
  int off_colors = 1, off_rho = 1000;
  double off_cap = 1e6;
  std::uint64_t off_seed = 0;
  offline->add_option("--instance", off_instance, "instance file")->required();
  offline->add_option("--colors", off_colors, "colors per position")
      ->check(CLI::PositiveNumber);
  offline->add_option("--estimator", off_estimator, "exact|sampled")
      ->check(CLI::IsMember({"exact", "sampled"}));
  offline->add_option("--rho", off_rho, "samples per estimate (sampled mode)")
      ->check(CLI::PositiveNumber);
  offline->add_option("--cap", off_cap, "enumeration cap")->check(CLI::PositiveNumber);
  offline->add_option("--seed", off_seed, "random seed")->required();

  // tg-online ------------------------------------------------------------
  auto* tgo = app.add_subcommand("tg-online", "Online colored-table learner");
  std::string tgo_instance, tgo_feedback = "full", tgo_out;
  bool tgo_blog = false;
  int tgo_colors = 1, tgo_blog_universe = 40, tgo_blog_blogs = 5, tgo_blog_positions = 3;
  long tgo_rounds = 1000;
  double tgo_explore = -1.0, tgo_gamma = 0.8, tgo_regret_cap = 1e6;
  std::uint64_t tgo_seed = 0;
  tgo->add_option("--instance", tgo_instance, "instance file (stationary stream)");
  tgo->add_flag("--blog-stream", tgo_blog, "use the synthetic day-by-day stream");
  tgo->add_option("--universe", tgo_blog_universe, "stream: elements per day")
      ->check(CLI::PositiveNumber);
  tgo->add_option("--blogs", tgo_blog_blogs, "stream: entity count")
      ->check(CLI::PositiveNumber);
  tgo->add_option("--positions", tgo_blog_positions, "stream: positions")
      ->check(CLI::PositiveNumber);
  tgo->add_option("--gamma", tgo_gamma, "stream: position discount")
      ->check(CLI::Range(1e-9, 1.0));
  tgo->add_option("--colors", tgo_colors, "colors per position")->check(CLI::PositiveNumber);
  tgo->add_option("--rounds", tgo_rounds, "rounds")->check(CLI::PositiveNumber);
  tgo->add_option("--feedback", tgo_feedback, "full|bandit")
      ->check(CLI::IsMember({"full", "bandit"}));
  tgo->add_option("--explore", tgo_explore,
                  "bandit exploration probability (default: horizon-based)");
  tgo->add_option("--regret-cap", tgo_regret_cap, "static-benchmark enumeration cap")
      ->check(CLI::PositiveNumber);
  tgo->add_option("--seed", tgo_seed, "random seed")->required();
  tgo->add_option("--out", tgo_out, "CSV trace path");

  // ocg ------------------------------------------------------------
  auto* ocg = app.add_subcommand("ocg", "Online continuous-ascent learner");
  std::string ocg_instance, ocg_out;
  long ocg_rounds = 1000;
  double ocg_delta = 0.125, ocg_regret_cap = 1e6;
  std::optional<double> ocg_scale;
  std::uint64_t ocg_seed = 0;
  ocg->add_option("--instance", ocg_instance, "instance file")->required();
  ocg->add_option("--rounds", ocg_rounds, "rounds")->check(CLI::PositiveNumber);
  ocg->add_option("--delta", ocg_delta, "ascent step (1/delta must be integral)")
      ->check(CLI::Range(1e-6, 1.0));
  ocg->add_option("--scale", ocg_scale, "perturbation scale override");
  ocg->add_option("--regret-cap", ocg_regret_cap, "benchmark enumeration cap")
      ->check(CLI::PositiveNumber);
  ocg->add_option("--seed", ocg_seed, "random seed")->required();
  ocg->add_option("--out", ocg_out, "CSV trace path");

  // ocg-offline ------------------------------------------------------------
  auto* ocgoff = app.add_subcommand("ocg-offline", "One-shot solve via the online learner");
  std::string ocgoff_instance;
  double ocgoff_eps = 0.1;
  std::optional<long> ocgoff_rounds;
  std::optional<double> ocgoff_opt_hint;
  std::uint64_t ocgoff_seed = 0;
  ocgoff->add_option("--instance", ocgoff_instance, "instance file")->required();
  ocgoff->add_option("--epsilon", ocgoff_eps, "target accuracy in (0, 1-1/e)");
  ocgoff->add_option("--rounds", ocgoff_rounds, "round count override");
  ocgoff->add_option("--opt-hint", ocgoff_opt_hint, "optimum estimate for the round formula");
  ocgoff->add_option("--seed", ocgoff_seed, "random seed")->required();

  // ad-sim ------------------------------------------------------------
  auto* adsim = app.add_subcommand("ad-sim", "Positional ad-click simulation");
  AdSimConfig ad;
  std::string ad_out;
  adsim->add_option("--positions", ad.positions, "slots per page")->check(CLI::PositiveNumber);
  adsim->add_option("--ads", ad.ads, "ad count")->check(CLI::PositiveNumber);
  adsim->add_option("--rounds", ad.run.rounds, "rounds per trial")->check(CLI::PositiveNumber);
  adsim->add_option("--algo", ad.run.algo, "tg|random|fixed")
      ->check(CLI::IsMember({"tg", "random", "fixed"}));
  adsim->add_option("--colors", ad.run.colors, "colors (tg)")->check(CLI::PositiveNumber);
  adsim->add_option("--seed", ad.seed, "random seed")->required();
  adsim->add_option("--trials", ad.trials, "independent trials")->check(CLI::PositiveNumber);
  adsim->add_option("--explore", ad.run.explore, "exploration probability (tg)");
  adsim->add_option("--rate-scale", ad.run.rate_scale, "expert learning-rate multiplier (tg)")
      ->check(CLI::PositiveNumber);
  adsim->add_option("--opt-cap", ad.opt_cap, "benchmark enumeration cap")
      ->check(CLI::PositiveNumber);
  adsim->add_option("--out", ad_out, "CSV trace path");

  // check ------------------------------------------------------------
  auto* check = app.add_subcommand("check", "Validate declared structure of an instance");
  std::string check_instance;
  int check_cap = 14, check_matroid_cap = 12;
  check->add_option("--instance", check_instance, "instance file")->required();
  check->add_option("--cap", check_cap, "structure-check ground-set cap")
      ->check(CLI::PositiveNumber);
  check->add_option("--matroid-cap", check_matroid_cap, "matroid-check cap")
      ->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (offline->parsed())
      return run_offline(off_instance, off_colors, off_estimator, off_rho, off_cap, off_seed);

    if (tgo->parsed()) {
      if (tgo_blog == !tgo_instance.empty())
        throw CLI::ValidationError("tg-online",
                                   "need exactly one of --instance or --blog-stream");
      StreamSpec stream;
      if (tgo_blog) {
        BlogStream::Params p;
        p.seed = derive_seed(tgo_seed, "stream");
        p.universe = tgo_blog_universe;
        p.blogs = tgo_blog_blogs;
        p.positions = tgo_blog_positions;
        p.gamma = tgo_gamma;
        stream.blog.emplace(p);
      } else {
        stream.instance = load_instance(tgo_instance);
      }
      double explore = tgo_explore;
      if (tgo_feedback == "bandit" && explore < 0.0)
        explore = TgOnline::default_explore_prob(tgo_rounds, stream.ground().num_items(),
                                                 tgo_colors, stream.ground().num_positions());
      if (tgo_feedback != "bandit") explore = 0.0;
      return run_tg_online(stream, tgo_colors, tgo_rounds, tgo_feedback, explore, tgo_seed,
                           tgo_out, tgo_regret_cap);
    }

    if (ocg->parsed()) {
      double inv = 1.0 / ocg_delta;
      if (std::abs(inv - std::round(inv)) > 1e-9)
        throw CLI::ValidationError("ocg", "--delta must be the reciprocal of an integer");
      StreamSpec stream;
      stream.instance = load_instance(ocg_instance);
      auto matroid = stream.instance->matroid;
      return run_ocg(stream, matroid, static_cast<int>(std::round(inv)), ocg_rounds,
                     ocg_scale, ocg_seed, ocg_out, ocg_regret_cap);
    }

    if (ocgoff->parsed())
      return run_ocg_offline(ocgoff_instance, ocgoff_eps, ocgoff_rounds, ocgoff_opt_hint,
                             ocgoff_seed);

    if (adsim->parsed()) return run_ad_sim(ad, ad_out);

    if (check->parsed()) return run_check(check_instance, check_cap, check_matroid_cap);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
