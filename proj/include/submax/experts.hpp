#pragma once

// No-regret experts.
//
// Rwm: randomized weighted majority over a finite action set with full
// reward vectors. Anytime learning rate eta_t = sqrt(8 ln N / t); selection
// probabilities are proportional to exp(eta_t * cumulative reward), computed
// fresh each round, so shifting a whole reward vector by a constant leaves
// the distribution unchanged.
//
// FplSet: follow the perturbed leader over the independent sets of a
// matroid. Linear objectives accumulate coordinate-wise; each selection adds
// a fresh i.i.d. Uniform[0, P] perturbation and takes a max-weight
// independent set, so only matroid greedy is ever needed.
//
// Both experts are deterministic functions of (seed, feedback history).
// Feedback may come from an estimator instead of the true payoffs: if the
// estimates satisfy E[x_hat] = gamma * x + eta_t with a common bias term
// eta_t, the expected worst-case regret degrades exactly by the factor
// 1/gamma. EstimatedFeedback documents that contract; it forwards estimates
// verbatim.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "submax/core.hpp"
#include "submax/matroid.hpp"
#include "submax/rng.hpp"

namespace submax {

// Interface used by the online assignment learner, so tests can substitute
// deterministic stubs for Rwm.
class ActionExpert {
 public:
  virtual ~ActionExpert() = default;
  virtual int num_actions() const = 0;
  virtual int select() = 0;
  virtual void update(std::span<const double> rewards) = 0;
};

class Rwm final : public ActionExpert {
 public:
  // reward_bound B > 0: every reward handed to update() must lie in [0, B].
  // rate_scale multiplies the anytime learning rate; any fixed positive
  // value keeps the no-regret guarantee (the bound degrades by a constant
  // factor), and values above 1 adapt faster when rewards are far from
  // adversarial, e.g. sparse importance-weighted estimates.
  Rwm(int num_actions, double reward_bound, Rng rng, double rate_scale = 1.0)
      : rng_(std::move(rng)),
        bound_(reward_bound),
        rate_scale_(rate_scale),
        cum_(num_actions, 0.0) {
    if (num_actions < 1) throw std::invalid_argument("Rwm: need at least one action");
    if (!(bound_ > 0.0)) throw std::invalid_argument("Rwm: reward bound must be > 0");
    if (!(rate_scale_ > 0.0)) throw std::invalid_argument("Rwm: rate scale must be > 0");
  }

  int num_actions() const override { return static_cast<int>(cum_.size()); }
  int round() const { return updates_ + 1; }

  // Selection distribution at the current round. Probabilities sum to 1.
  std::vector<double> probabilities() const {
    const int n = num_actions();
    if (n == 1) return {1.0};
    const double eta =
        rate_scale_ * std::sqrt(8.0 * std::log(static_cast<double>(n)) / round());
    double top = *std::max_element(cum_.begin(), cum_.end());
    std::vector<double> p(n);
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      p[i] = std::exp(eta * (cum_[i] - top));  // <= 1, no overflow
      total += p[i];
    }
    for (double& x : p) x /= total;
    return p;
  }

  int select() override {
    std::vector<double> p = probabilities();
    double u = rng_.uniform();
    double acc = 0.0;
    for (int i = 0; i + 1 < num_actions(); ++i) {
      acc += p[i];
      if (u < acc) return i;
    }
    return num_actions() - 1;
  }

  void update(std::span<const double> rewards) override {
    if (static_cast<int>(rewards.size()) != num_actions())
      throw std::invalid_argument("Rwm::update: reward vector size mismatch");
    for (double r : rewards) {
      if (!(r >= 0.0 && r <= bound_))
        throw std::invalid_argument("Rwm::update: reward outside [0, bound]");
    }
    // Cumulate in units of the bound; eta then matches rewards in [0, 1].
    for (int i = 0; i < num_actions(); ++i) cum_[i] += rewards[i] / bound_;
    ++updates_;
  }

 private:
  Rng rng_;
  double bound_;
  double rate_scale_;
  std::vector<double> cum_;
  int updates_ = 0;
};

class FplSet {
 public:
  // perturbation_scale P: selection noise is i.i.d. Uniform[0, P] per
  // coordinate. A reasonable default for horizon T and per-coordinate payoff
  // bound g is sqrt(n * g * T).
  FplSet(const MatroidOracle& matroid, double perturbation_scale, Rng rng)
      : matroid_(&matroid),
        scale_(perturbation_scale),
        rng_(std::move(rng)),
        cum_(matroid.ground_size(), 0.0) {
    if (!(scale_ > 0.0)) throw std::invalid_argument("FplSet: perturbation scale must be > 0");
  }

  static double default_scale(int n, double payoff_bound, long horizon_hint) {
    return std::sqrt(std::max(1.0, static_cast<double>(n) * payoff_bound *
                                       static_cast<double>(horizon_hint)));
  }

  int ground_size() const { return static_cast<int>(cum_.size()); }

  ItemSet select() {
    std::vector<double> w(cum_);
    for (double& x : w) x += rng_.uniform(0.0, scale_);
    return max_weight_independent_set(*matroid_, w);
  }

  // Accumulate a full linear objective...
  void update(std::span<const double> weights) {
    if (static_cast<int>(weights.size()) != ground_size())
      throw std::invalid_argument("FplSet::update: weight vector size mismatch");
    for (double x : weights) {
      if (!std::isfinite(x))
        throw std::invalid_argument("FplSet::update: non-finite weight");
    }
    for (int v = 0; v < ground_size(); ++v) cum_[v] += weights[v];
  }

  // ...or a sparse one-coordinate estimate of it.
  void update(ItemId v, double weight) {
    if (v < 0 || v >= ground_size())
      throw std::invalid_argument("FplSet::update: coordinate out of range");
    if (!std::isfinite(weight))
      throw std::invalid_argument("FplSet::update: non-finite weight");
    cum_[v] += weight;
  }

 private:
  const MatroidOracle* matroid_;
  double scale_;
  Rng rng_;
  std::vector<double> cum_;
};

// Pass-through wrapper naming the estimation contract: feeding an expert
// estimates with E[x_hat] = gamma * x + eta_t (common bias eta_t) scales its
// expected worst-case regret on the true payoffs by 1/gamma. The wrapper
// forwards verbatim; gamma is carried for reporting.
template <class Expert>
class EstimatedFeedback {
 public:
  EstimatedFeedback(Expert inner, double gamma)
      : inner_(std::move(inner)), gamma_(gamma) {
    if (!(gamma > 0.0 && gamma <= 1.0))
      throw std::invalid_argument("EstimatedFeedback: gamma must be in (0, 1]");
  }

  double gamma() const { return gamma_; }
  Expert& inner() { return inner_; }

  auto select() { return inner_.select(); }

  template <class... Args>
  void update(Args&&... args) {
    inner_.update(std::forward<Args>(args)...);
  }

 private:
  Expert inner_;
  double gamma_;
};

}  // namespace submax
