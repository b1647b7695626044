#pragma once

// Simulation harness: a positional ad-click model with sequential scanning,
// a synthetic day-by-day stream of position-discounted coverage objectives,
// regret accounting against the best static assignment, and CSV traces.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "submax/core.hpp"
#include "submax/matroid.hpp"
#include "submax/offline.hpp"
#include "submax/online.hpp"
#include "submax/rng.hpp"

namespace submax {

// ---------------------------------------------------------------------------
// Ad model. A user scans positions 1..K in order. At a filled position the
// user clicks with probability p_click(user, ad) and leaves; otherwise they
// abandon with probability (1 - p_click) * p_abandon(user, position). At an
// empty position the same abandonment applies with p_click = 0. Reward is
// the number of clicks, 0 or 1.

struct AdUserType {
  double mix = 1.0;                        // arrival probability
  std::vector<double> click_by_ad_type;    // indexed by ad type
  std::vector<double> abandon_by_position; // indexed by position
};

struct AdModel {
  int positions = 0;
  int num_ads = 0;
  std::vector<int> ad_type;        // per ad
  std::vector<AdUserType> users;

  // Items are (position, ad) pairs, id = position * num_ads + ad.
  GroundSet ground() const { return GroundSet::regular(positions, num_ads); }
  int ad_of(ItemId v) const { return v % num_ads; }
  int position_of(ItemId v) const { return v / num_ads; }
  ItemId item(int position, int ad) const { return position * num_ads + ad; }

  // The synthetic benchmark configuration: two equally likely user types
  // (one never loses interest, one abandons half the time per position),
  // two ad types split evenly, click probability 0.5 on the matching type
  // and 0.2 otherwise.
  static AdModel reference(int positions = 5, int num_ads = 20) {
    AdModel m;
    m.positions = positions;
    m.num_ads = num_ads;
    m.ad_type.resize(num_ads);
    for (int a = 0; a < num_ads; ++a) m.ad_type[a] = a < (num_ads + 1) / 2 ? 0 : 1;
    AdUserType patient;
    patient.mix = 0.5;
    patient.click_by_ad_type = {0.5, 0.2};
    patient.abandon_by_position.assign(positions, 0.0);
    AdUserType impatient;
    impatient.mix = 0.5;
    impatient.click_by_ad_type = {0.2, 0.5};
    impatient.abandon_by_position.assign(positions, 0.5);
    m.users = {patient, impatient};
    return m;
  }
};

namespace detail {

inline std::vector<int> ad_slots(const AdModel& m, const ItemSet& s) {
  std::vector<int> slot(m.positions, -1);
  for (ItemId v : s) {
    if (v < 0 || v >= m.positions * m.num_ads)
      throw std::invalid_argument("ad model: unknown item id");
    int k = m.position_of(v);
    if (slot[k] != -1)
      throw std::invalid_argument("ad model: two ads in one position");
    slot[k] = m.ad_of(v);
  }
  return slot;
}

}  // namespace detail

struct AdOutcome {
  bool clicked = false;
  int position = -1;  // where the click or abandonment happened, -1 if scanned out
};

inline AdOutcome ad_model_round(const AdModel& m, const ItemSet& assignment, Rng& rng) {
  const std::vector<int> slot = detail::ad_slots(m, assignment);
  std::vector<double> mix(m.users.size());
  for (std::size_t u = 0; u < m.users.size(); ++u) mix[u] = m.users[u].mix;
  const AdUserType& user = m.users[rng.discrete(mix)];
  for (int k = 0; k < m.positions; ++k) {
    double p_click = slot[k] >= 0 ? user.click_by_ad_type[m.ad_type[slot[k]]] : 0.0;
    if (p_click > 0.0 && rng.bernoulli(p_click)) return {true, k};
    if (rng.bernoulli(user.abandon_by_position[k])) return {false, k};
  }
  return {false, -1};
}

// Exact click probability: per user type a single scan with the survival
// product telescoping over positions.
inline double ad_model_expected_reward(const AdModel& m, const ItemSet& assignment) {
  const std::vector<int> slot = detail::ad_slots(m, assignment);
  double total = 0.0;
  for (const AdUserType& user : m.users) {
    double reach = 1.0;
    double clicks = 0.0;
    for (int k = 0; k < m.positions; ++k) {
      double p_click = slot[k] >= 0 ? user.click_by_ad_type[m.ad_type[slot[k]]] : 0.0;
      clicks += reach * p_click;
      reach *= (1.0 - p_click) * (1.0 - user.abandon_by_position[k]);
    }
    total += user.mix * clicks;
  }
  return total;
}

inline ValueOracle ad_model_oracle(const AdModel& m) {
  // Largest single-item value: the best ad alone in the first position.
  double bound = 0.0;
  for (int a = 0; a < m.num_ads; ++a) {
    double v = 0.0;
    for (const AdUserType& u : m.users) v += u.mix * u.click_by_ad_type[m.ad_type[a]];
    bound = std::max(bound, v);
  }
  auto model = std::make_shared<const AdModel>(m);
  return ValueOracle(
      [model](const ItemSet& s) { return ad_model_expected_reward(*model, s); },
      /*monotone=*/true, /*submodular=*/true, bound);
}

// ---------------------------------------------------------------------------
// Regret accounting. The benchmark is (1 - 1/e) times the best cumulative
// value of a single static solution.

// Keeps the cumulative value of every candidate static solution, so the
// benchmark is exact at any prefix of the stream. Cost per observed round is
// one oracle evaluation per candidate.
class RegretTracker {
 public:
  RegretTracker(const GroundSet& ground, double cap = 1e6) {
    for_each_feasible(ground, cap, [&](ItemSet s) { candidates_.push_back(std::move(s)); });
    cum_.assign(candidates_.size(), 0.0);
  }

  explicit RegretTracker(std::vector<ItemSet> candidates)
      : candidates_(std::move(candidates)) {
    if (candidates_.empty())
      throw std::invalid_argument("RegretTracker: no candidate solutions");
    cum_.assign(candidates_.size(), 0.0);
  }

  void observe(const ValueOracle& f_t, const ItemSet& played) {
    for (std::size_t i = 0; i < candidates_.size(); ++i) cum_[i] += f_t(candidates_[i]);
    cum_played_ += f_t(played);
    ++rounds_;
  }

  double best_static_value() const {
    double best = 0.0;
    for (double v : cum_) best = std::max(best, v);
    return best;
  }

  double cumulative_reward() const { return cum_played_; }
  long rounds() const { return rounds_; }

  double regret_1m1e() const {
    return (1.0 - std::exp(-1.0)) * best_static_value() - cum_played_;
  }

 private:
  std::vector<ItemSet> candidates_;
  std::vector<double> cum_;
  double cum_played_ = 0.0;
  long rounds_ = 0;
};

// All independent sets of a matroid (for benchmark enumeration under a
// general constraint). DFS with downward-closure pruning; throws
// cap_exceeded past `cap` sets.
inline std::vector<ItemSet> enumerate_independent_sets(const MatroidOracle& m,
                                                       double cap = 1e6) {
  std::vector<ItemSet> out;
  std::vector<ItemId> stack;
  auto dfs = [&](auto&& self, ItemId from, ItemSet& cur) -> void {
    out.push_back(cur);
    if (static_cast<double>(out.size()) > cap)
      throw cap_exceeded("enumerate_independent_sets: cap exceeded");
    for (ItemId v = from; v < m.ground_size(); ++v) {
      ItemSet next = cur.with(v);
      if (m.is_independent(next)) {
        self(self, v + 1, next);
      }
    }
  };
  ItemSet empty;
  dfs(dfs, 0, empty);
  return out;
}

struct RegretResult {
  double regret = 0.0;
  double benchmark = 0.0;  // best static cumulative value (or proxy)
  bool proxy = false;      // true if the benchmark fell back to greedy
};

// One-shot regret over a finished run. If enumerating static solutions
// exceeds the cap, the benchmark falls back to the greedy solution of the
// summed objective (a lower bound on the true optimum) and says so.
inline RegretResult regret_1m1e(const std::vector<ItemSet>& plays,
                                const std::vector<ValueOracle>& stream,
                                const GroundSet& ground, double cap = 1e6) {
  if (plays.size() != stream.size())
    throw std::invalid_argument("regret_1m1e: plays and stream lengths differ");
  double played_total = 0.0;
  for (std::size_t t = 0; t < plays.size(); ++t) played_total += stream[t](plays[t]);

  RegretResult out;
  try {
    RegretTracker tracker(ground, cap);
    for (std::size_t t = 0; t < plays.size(); ++t) tracker.observe(stream[t], plays[t]);
    out.benchmark = tracker.best_static_value();
  } catch (const cap_exceeded&) {
    ValueOracle sum(
        [&stream](const ItemSet& s) {
          double total = 0.0;
          for (const auto& f : stream) total += f(s);
          return total;
        },
        true, true, 0.0);
    out.benchmark = locally_greedy(ground, sum).value;
    out.proxy = true;
  }
  out.regret = (1.0 - std::exp(-1.0)) * out.benchmark - played_total;
  return out;
}

// ---------------------------------------------------------------------------
// Synthetic stream of position-discounted coverage objectives. Each day
// draws a fresh universe of story elements (weights proportional to drawn
// sizes, normalized to sum 1) and a random entity/element coverage relation;
// the objective chains entities over positions with discount gamma.

class BlogStream {
 public:
  struct Params {
    std::uint64_t seed = 1;
    int universe = 40;      // story elements per day
    int blogs = 5;          // entities; items are (position, blog) pairs
    int positions = 3;
    double gamma = 0.8;
    double cover_prob = 0.3;
  };

  explicit BlogStream(Params p)
      : params_(p), ground_(GroundSet::regular(p.positions, p.blogs)) {
    if (p.universe < 1 || p.blogs < 1 || p.positions < 1)
      throw std::invalid_argument("BlogStream: sizes must be >= 1");
    if (!(p.gamma > 0.0 && p.gamma <= 1.0))
      throw std::invalid_argument("BlogStream: gamma must be in (0, 1]");
    entity_of_.resize(ground_.num_items());
    for (int v = 0; v < ground_.num_items(); ++v) entity_of_[v] = v % p.blogs;
  }

  const GroundSet& ground() const { return ground_; }
  const Params& params() const { return params_; }
  int entity_of(ItemId v) const { return entity_of_.at(v); }

  // Weights are normalized per day, so any single-item marginal is at most
  // gamma * 1.
  double value_bound() const { return params_.gamma; }

  // Deterministic function of (seed, day).
  ValueOracle objective(long day) const {
    Rng rng(derive_seed(params_.seed, "blog-day", static_cast<std::uint64_t>(day)));
    std::vector<double> weights(params_.universe);
    double total = 0.0;
    for (double& w : weights) {
      w = 1.0 + rng.uniform_int(5);  // element size in 1..5
      total += w;
    }
    for (double& w : weights) w /= total;
    std::vector<std::vector<int>> covers(params_.blogs);
    for (int e = 0; e < params_.universe; ++e)
      for (int b = 0; b < params_.blogs; ++b)
        if (rng.bernoulli(params_.cover_prob)) covers[b].push_back(e);
    ValueOracle g = make_weighted_coverage(std::move(weights), std::move(covers));
    return make_discounted_positional(ground_, entity_of_, std::move(g), params_.gamma);
  }

 private:
  Params params_;
  GroundSet ground_;
  std::vector<int> entity_of_;
};

// ---------------------------------------------------------------------------
// Traces.

struct TraceRow {
  long round = 0;       // 1-based
  double reward = 0.0;
  double cum_reward = 0.0;
  double regret_1m1e = 0.0;
  bool explored = false;
};

struct RewardTrace {
  std::vector<TraceRow> rows;

  void add(double reward, double regret, bool explored) {
    TraceRow row;
    row.round = static_cast<long>(rows.size()) + 1;
    row.reward = reward;
    row.cum_reward = (rows.empty() ? 0.0 : rows.back().cum_reward) + reward;
    row.regret_1m1e = regret;
    row.explored = explored;
    rows.push_back(row);
  }

  double cumulative_reward() const { return rows.empty() ? 0.0 : rows.back().cum_reward; }
};

namespace detail {

// Shortest round-trip decimal form, stable across runs.
inline std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

}  // namespace detail

inline void write_trace_csv(std::ostream& os, const RewardTrace& trace) {
  os << "round,reward,cum_reward,regret_1m1e,explored_flag\n";
  for (const TraceRow& r : trace.rows) {
    os << r.round << ',' << detail::format_double(r.reward) << ','
       << detail::format_double(r.cum_reward) << ','
       << detail::format_double(r.regret_1m1e) << ',' << (r.explored ? 1 : 0) << '\n';
  }
}

// Multi-trial variant with a leading trial column (0-based trials).
inline void write_trace_csv(std::ostream& os, const std::vector<RewardTrace>& trials) {
  os << "trial,round,reward,cum_reward,regret_1m1e,explored_flag\n";
  for (std::size_t i = 0; i < trials.size(); ++i) {
    for (const TraceRow& r : trials[i].rows) {
      os << i << ',' << r.round << ',' << detail::format_double(r.reward) << ','
         << detail::format_double(r.cum_reward) << ','
         << detail::format_double(r.regret_1m1e) << ',' << (r.explored ? 1 : 0) << '\n';
    }
  }
}

// ---------------------------------------------------------------------------
// One simulated campaign. Each round the policy picks an assignment, one
// user arrives and the realized click (0 or 1) is both the recorded reward
// and the learner's only feedback. Regret rows are computed against the
// exact per-round click probability, so they are smooth even though rewards
// are Bernoulli.

struct AdSimOptions {
  long rounds = 10000;
  std::string algo = "tg";  // "tg", "random", or "fixed"
  int colors = 4;           // table colors for "tg"
  double explore = -1.0;    // <0: use the horizon-based default schedule
  double rate_scale = 1.0;  // learning-rate multiplier for the table experts
};

struct AdTrialResult {
  RewardTrace trace;
  double cum_expected = 0.0;  // sum of per-round click probabilities
};

inline AdTrialResult run_ad_trial(const AdModel& model, const AdSimOptions& opt,
                                  const ItemSet& benchmark, double benchmark_value,
                                  std::uint64_t trial_seed) {
  const GroundSet ground = model.ground();
  Rng env_rng(derive_seed(trial_seed, "ad-env"));
  Rng policy_rng(derive_seed(trial_seed, "ad-policy"));

  std::optional<TgOnline> learner;
  if (opt.algo == "tg") {
    TgOnline::Options topt;
    topt.colors = opt.colors;
    topt.feedback = TgOnline::Feedback::Bandit;
    topt.explore_prob = opt.explore >= 0.0
                            ? opt.explore
                            : TgOnline::default_explore_prob(opt.rounds, ground.num_items(),
                                                             opt.colors, model.positions);
    topt.reward_bound = 1.0;  // one user, at most one click
    topt.rate_scale = opt.rate_scale;
    topt.seed = derive_seed(trial_seed, "ad-learner");
    learner.emplace(ground, topt);
  } else if (opt.algo != "random" && opt.algo != "fixed") {
    throw std::invalid_argument("run_ad_trial: unknown algo " + opt.algo);
  }

  AdTrialResult out;
  const double factor = 1.0 - std::exp(-1.0);
  for (long t = 0; t < opt.rounds; ++t) {
    ItemSet played;
    if (opt.algo == "tg") {
      played = learner->step();
    } else if (opt.algo == "random") {
      std::vector<ItemId> ids;
      for (int k = 0; k < model.positions; ++k)
        ids.push_back(model.item(k, policy_rng.uniform_int(model.num_ads)));
      played = ItemSet(std::move(ids));
    } else {
      played = benchmark;
    }
    AdOutcome outcome = ad_model_round(model, played, env_rng);
    double reward = outcome.clicked ? 1.0 : 0.0;
    if (opt.algo == "tg") learner->feedback(reward);
    out.cum_expected += ad_model_expected_reward(model, played);
    double regret = factor * benchmark_value * (t + 1) - out.cum_expected;
    out.trace.add(reward, regret, opt.algo == "tg" && learner->last_explored());
  }
  return out;
}

}  // namespace submax
