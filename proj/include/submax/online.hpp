#pragma once

// Online maximization against a stream of monotone submodular objectives.
//
// TgOnline runs one no-regret expert per (position, color) cell; each round
// the experts' picks form a colored table, a uniform color draw selects the
// played assignment, and every expert is rewarded on the value of its pick
// against the cells that precede it in color-major order. Full-information
// feedback rewards all candidate items of a cell; bandit feedback explores
// one random cell occasionally and feeds an importance-weighted estimate.
//
// Ocg maintains one follow-the-perturbed-leader expert per step of a
// fixed-step continuous ascent. Each round the experts' chosen independent
// sets stack into a fractional point y (a convex combination with weight
// delta each), y is rounded to an independent set to play, and each expert
// receives a one-sample estimate of the marginal-gain vector at its own
// prefix of the ascent as a linear objective.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "submax/core.hpp"
#include "submax/experts.hpp"
#include "submax/matroid.hpp"
#include "submax/multilinear.hpp"
#include "submax/offline.hpp"
#include "submax/rng.hpp"

namespace submax {

class TgOnline {
 public:
  enum class Feedback { Full, Bandit };

  struct Options {
    int colors = 1;
    Feedback feedback = Feedback::Full;
    // Bandit exploration probability. The T^(-1/3) (n*C*K)^(1/3) default is
    // available through default_explore_prob.
    double explore_prob = 0.0;
    // Declared upper bound on f_t over feasible assignments (for a monotone
    // submodular stream with empty-set value 0, K * max single-item marginal
    // always works).
    double reward_bound = 1.0;
    // Learning-rate multiplier handed to the default Rwm experts. Values
    // above 1 trade regret constants for faster adaptation; useful in the
    // bandit mode, where worst-case tuning against the importance-weighted
    // estimate range is far too timid for stochastic streams.
    double rate_scale = 1.0;
    std::uint64_t seed = 0;
  };

  using ExpertFactory = std::function<std::unique_ptr<ActionExpert>(
      int position, int color, int num_actions, std::uint64_t seed)>;

  static double default_explore_prob(long horizon, int num_items, int colors,
                                     int num_positions) {
    if (horizon < 1) throw std::invalid_argument("default_explore_prob: horizon < 1");
    double eps = std::cbrt(static_cast<double>(num_items) * colors * num_positions /
                           static_cast<double>(horizon));
    return std::min(1.0, eps);
  }

  TgOnline(const GroundSet& ground, Options opt, ExpertFactory factory = nullptr)
      : ground_(ground), opt_(opt) {
    if (opt_.colors < 1) throw std::invalid_argument("TgOnline: colors must be >= 1");
    if (!(opt_.reward_bound > 0.0))
      throw std::invalid_argument("TgOnline: reward bound must be > 0");
    if (opt_.feedback == Feedback::Bandit &&
        !(opt_.explore_prob >= 0.0 && opt_.explore_prob <= 1.0))
      throw std::invalid_argument("TgOnline: explore_prob must be in [0, 1]");

    const int K = ground_.num_positions();
    const int C = opt_.colors;
    int max_position = 0;
    int live = 0;
    for (int k = 0; k < K; ++k) {
      if (!ground_.position(k).empty()) {
        ++live;
        max_position = std::max(max_position, static_cast<int>(ground_.position(k).size()));
      }
    }
    live_cells_ = live * C;

    // Expert reward scale: full-information rewards are objective values;
    // bandit estimates carry the importance weight (#cells * |P_k| / eps).
    double expert_bound = opt_.reward_bound;
    if (opt_.feedback == Feedback::Bandit && opt_.explore_prob > 0.0)
      expert_bound *= static_cast<double>(live_cells_) * max_position / opt_.explore_prob;

    if (!factory) {
      double rate_scale = opt_.rate_scale;
      factory = [expert_bound, rate_scale](int position, int color, int num_actions,
                                           std::uint64_t seed) -> std::unique_ptr<ActionExpert> {
        (void)position;
        (void)color;
        return std::make_unique<Rwm>(num_actions, expert_bound, Rng(seed), rate_scale);
      };
    }
    experts_.resize(static_cast<std::size_t>(K) * C);
    for (int k = 0; k < K; ++k) {
      if (ground_.position(k).empty()) continue;
      for (int c = 0; c < C; ++c) {
        experts_[cell(k, c)] = factory(
            k, c, static_cast<int>(ground_.position(k).size()),
            derive_seed(opt_.seed, "tg-expert", static_cast<std::uint64_t>(cell(k, c))));
      }
    }
    color_rng_ = std::make_unique<Rng>(derive_seed(opt_.seed, "tg-colors"));
    explore_rng_ = std::make_unique<Rng>(derive_seed(opt_.seed, "tg-explore"));
    selection_.assign(experts_.size(), -1);
  }

  int rounds_completed() const { return rounds_; }
  bool last_explored() const { return explored_; }
  const ColorVector& last_colors() const { return colors_; }

  // Pick this round's assignment. Must alternate with feedback().
  const ItemSet& step() {
    if (awaiting_feedback_)
      throw protocol_error("TgOnline: feedback for the previous round is missing");
    const int K = ground_.num_positions();
    const int C = opt_.colors;
    for (int k = 0; k < K; ++k) {
      if (ground_.position(k).empty()) continue;
      for (int c = 0; c < C; ++c)
        selection_[cell(k, c)] = experts_[cell(k, c)]->select();
    }
    colors_ = sample_color_vector(K, C, *color_rng_);

    explored_ = false;
    if (opt_.feedback == Feedback::Bandit && opt_.explore_prob > 0.0 &&
        explore_rng_->bernoulli(opt_.explore_prob)) {
      explored_ = true;
      // One uniform cell among live positions, one uniform candidate in it.
      std::vector<int> live;
      for (int k = 0; k < K; ++k)
        if (!ground_.position(k).empty()) live.push_back(k);
      explore_k_ = live[explore_rng_->uniform_int(static_cast<int>(live.size()))];
      explore_c_ = explore_rng_->uniform_int(C);
      explore_action_ =
          explore_rng_->uniform_int(static_cast<int>(ground_.position(explore_k_).size()));
    }

    std::vector<ItemId> ids;
    for (int k = 0; k < K; ++k) {
      if (ground_.position(k).empty()) continue;
      const int ck = colors_[k];
      if (explored_) {
        // The assemblage holds the cells preceding the explored one in
        // color-major order plus the candidate at the explored cell; the
        // color draw then keeps at most one entry per position. The
        // candidate itself appears only when the explored position draws
        // the explored color, matching the quantity whose estimate is fed
        // back to that cell's expert.
        if (k == explore_k_ && ck == explore_c_)
          ids.push_back(ground_.position(k)[explore_action_]);
        else if (ck < explore_c_ || (ck == explore_c_ && k < explore_k_))
          ids.push_back(ground_.position(k)[selection_[cell(k, ck)]]);
      } else {
        ids.push_back(ground_.position(k)[selection_[cell(k, ck)]]);
      }
    }
    played_ = ItemSet(std::move(ids));
    assert(is_feasible(ground_, played_));
    awaiting_feedback_ = true;
    return played_;
  }

  // Full-information feedback: the whole objective for this round.
  void feedback(const ValueOracle& f_t) {
    if (opt_.feedback != Feedback::Full)
      throw protocol_error("TgOnline: bandit mode expects scalar feedback");
    require_awaiting();
    const int K = ground_.num_positions();
    const int C = opt_.colors;
    // Walk cells color-major, keeping the color-selected items of the cells
    // already passed; that set is what each cell's candidates are scored on.
    ItemSet prefix_sample;
    std::vector<double> rewards;
    for (int c = 0; c < C; ++c) {
      for (int k = 0; k < K; ++k) {
        const auto& cand = ground_.position(k);
        if (cand.empty()) continue;
        rewards.resize(cand.size());
        if (colors_[k] == c) {
          for (std::size_t i = 0; i < cand.size(); ++i)
            rewards[i] = f_t(prefix_sample.with(cand[i]));
        } else {
          double shared = f_t(prefix_sample);
          std::fill(rewards.begin(), rewards.end(), shared);
        }
        experts_[cell(k, c)]->update(rewards);
        if (colors_[k] == c)
          prefix_sample.insert(cand[selection_[cell(k, c)]]);
      }
    }
    finish_round();
  }

  // Bandit feedback: the observed value of the played assignment.
  void feedback(double observed) {
    if (opt_.feedback != Feedback::Bandit)
      throw protocol_error("TgOnline: full-information mode expects an objective");
    require_awaiting();
    if (!(observed >= 0.0 && observed <= opt_.reward_bound))
      throw std::invalid_argument("TgOnline: observed reward outside [0, bound]");
    // Every expert hears every round: zero vectors on exploitation rounds
    // and at the cells that were not explored, which keeps adaptive
    // learning rates synchronized with the round count. Only the explored
    // cell sees a nonzero estimate.
    const int K = ground_.num_positions();
    const int C = opt_.colors;
    std::vector<double> rewards;
    for (int k = 0; k < K; ++k) {
      const auto& cand = ground_.position(k);
      if (cand.empty()) continue;
      rewards.assign(cand.size(), 0.0);
      for (int c = 0; c < C; ++c) {
        if (explored_ && k == explore_k_ && c == explore_c_) {
          // Importance weight inverts P(this cell, this candidate, exploring).
          double w = static_cast<double>(live_cells_) * cand.size() / opt_.explore_prob;
          rewards[explore_action_] = w * observed;
          experts_[cell(k, c)]->update(rewards);
          rewards[explore_action_] = 0.0;
        } else {
          experts_[cell(k, c)]->update(rewards);
        }
      }
    }
    finish_round();
  }

 private:
  std::size_t cell(int k, int c) const {
    return static_cast<std::size_t>(k) * opt_.colors + c;
  }

  void require_awaiting() const {
    if (!awaiting_feedback_)
      throw protocol_error("TgOnline: feedback without a pending step");
  }

  void finish_round() {
    awaiting_feedback_ = false;
    ++rounds_;
  }

  const GroundSet& ground_;
  Options opt_;
  std::vector<std::unique_ptr<ActionExpert>> experts_;
  std::vector<int> selection_;
  std::unique_ptr<Rng> color_rng_, explore_rng_;
  ColorVector colors_;
  ItemSet played_;
  int live_cells_ = 0;
  int rounds_ = 0;
  bool awaiting_feedback_ = false;
  bool explored_ = false;
  int explore_k_ = -1, explore_c_ = -1, explore_action_ = -1;
};

// ---------------------------------------------------------------------------

class Ocg {
 public:
  struct Options {
    int stages = 8;           // m; the ascent step is delta = 1/m
    double value_bound = 1.0; // g, max single-item value of the stream
    long horizon_hint = 1000; // T used for the default perturbation scale
    std::optional<double> perturbation_scale;
    std::uint64_t seed = 0;
    bool round_each_step = true;  // offline reuse skips per-round rounding
  };

  struct Step {
    ItemSet played;         // empty when rounding is disabled
    FractionalPoint point;  // y = sum over stages of delta * chi(I_s)
  };

  Ocg(const MatroidOracle& matroid, Options opt) : matroid_(&matroid), opt_(opt) {
    if (opt_.stages < 1) throw std::invalid_argument("Ocg: stages must be >= 1");
    const int n = matroid.ground_size();
    if (n < 1) throw std::invalid_argument("Ocg: empty ground set");
    double scale = opt_.perturbation_scale.value_or(
        FplSet::default_scale(n, opt_.value_bound, opt_.horizon_hint));
    for (int s = 0; s < opt_.stages; ++s)
      stages_.emplace_back(matroid, scale, Rng(stage_seed(opt_.seed, s)));
    round_rng_ = std::make_unique<Rng>(derive_seed(opt_.seed, "ocg-round"));
    estimate_rng_ = std::make_unique<Rng>(derive_seed(opt_.seed, "ocg-estimate"));
  }

  static std::uint64_t stage_seed(std::uint64_t seed, int stage) {
    return derive_seed(seed, "ocg-fpl", static_cast<std::uint64_t>(stage));
  }

  int rounds_completed() const { return rounds_; }

  const Step& step() {
    if (awaiting_feedback_)
      throw protocol_error("Ocg: feedback for the previous round is missing");
    const double delta = 1.0 / opt_.stages;
    picks_.clear();
    std::vector<WeightedSet> combo;
    combo.reserve(stages_.size());
    for (auto& stage : stages_) {
      picks_.push_back(stage.select());
      combo.push_back({picks_.back(), delta});
    }
    last_.point = FractionalPoint(std::move(combo));
    last_.played =
        opt_.round_each_step ? round_to_independent(*matroid_, last_.point, *round_rng_)
                             : ItemSet{};
    awaiting_feedback_ = true;
    return last_;
  }

  void feedback(const ValueOracle& f_t) {
    if (!awaiting_feedback_) throw protocol_error("Ocg: feedback without a pending step");
    const int n = matroid_->ground_size();
    const double delta = 1.0 / opt_.stages;
    // Stage s sees the marginal-gain vector at its own ascent prefix
    // (stages before s), estimated from a single sample.
    std::vector<double> y(n, 0.0);
    for (std::size_t s = 0; s < stages_.size(); ++s) {
      SparseEstimate est = sample_marginal_estimate(f_t, y, *estimate_rng_);
      stages_[s].update(est.coord, est.value);
      for (ItemId v : picks_[s]) y[v] = std::min(1.0, y[v] + delta);
    }
    awaiting_feedback_ = false;
    ++rounds_;
  }

 private:
  const MatroidOracle* matroid_;
  Options opt_;
  std::vector<FplSet> stages_;
  std::vector<ItemSet> picks_;
  Step last_;
  std::unique_ptr<Rng> round_rng_, estimate_rng_;
  int rounds_ = 0;
  bool awaiting_feedback_ = false;
};

// ---------------------------------------------------------------------------
// One-shot maximization by running Ocg on a constant objective.

struct OcgOfflineOptions {
  std::optional<long> rounds;      // T; computed from opt_hint when absent
  std::optional<double> opt_hint;  // estimate (or lower bound) of the optimum
  std::optional<int> stages;       // override for m = ceil(2 * rank / eps)
  std::uint64_t seed = 0;
};

struct OcgOfflineResult {
  ItemSet set;
  double value = 0.0;
  long rounds = 0;
  int stages = 0;
};

// Runs the online learner for T rounds with f_t = f throughout (no per-round
// rounding), picks one round uniformly at random, and rounds that round's
// fractional point. With the default parameters the expected value
// approaches (1 - 1/e - eps) times the optimum.
inline OcgOfflineResult ocg_offline_solve(const ValueOracle& f, const MatroidOracle& m,
                                          double eps, OcgOfflineOptions opt = {}) {
  if (!(eps > 0.0 && eps < 1.0 - std::exp(-1.0)))
    throw std::invalid_argument("ocg_offline_solve: eps must lie in (0, 1 - 1/e)");
  const int d = rank(m);
  if (d < 1) throw std::invalid_argument("ocg_offline_solve: matroid has rank 0");
  const int n = m.ground_size();

  const int stages =
      opt.stages.value_or(static_cast<int>(std::ceil(2.0 * d / eps)));
  long rounds = 0;
  if (opt.rounds) {
    rounds = *opt.rounds;
  } else if (opt.opt_hint && *opt.opt_hint > 0.0) {
    const double g = f.value_bound();
    rounds = static_cast<long>(std::ceil(4.0 * d * d * n * g /
                                         (eps * eps * *opt.opt_hint * *opt.opt_hint)));
  } else {
    throw std::invalid_argument(
        "ocg_offline_solve: need either a round count or a positive optimum hint");
  }
  if (rounds < 1)
    throw std::invalid_argument("ocg_offline_solve: round count must be >= 1");

  Ocg::Options run;
  run.stages = stages;
  run.value_bound = f.value_bound();
  run.horizon_hint = rounds;
  run.seed = opt.seed;
  run.round_each_step = false;
  Ocg learner(m, run);

  const long pick = static_cast<long>(
      stream_rng(opt.seed, "ocg-offline-pick").next_below(static_cast<std::uint64_t>(rounds)));
  FractionalPoint chosen;
  for (long t = 0; t < rounds; ++t) {
    const Ocg::Step& st = learner.step();
    if (t == pick) chosen = st.point;
    learner.feedback(f);
  }
  Rng round_rng = stream_rng(opt.seed, "ocg-offline-round");
  OcgOfflineResult out;
  out.set = round_to_independent(m, chosen, round_rng);
  out.value = f(out.set);
  out.rounds = rounds;
  out.stages = stages;
  return out;
}

}  // namespace submax
