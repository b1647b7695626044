#pragma once

// Matroid independence oracles over the dense id range 0..n-1, the greedy
// primitives built on them, and randomized rounding of fractional points
// given as explicit convex combinations of independent sets.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "submax/core.hpp"
#include "submax/rng.hpp"

namespace submax {

class MatroidOracle {
 public:
  virtual ~MatroidOracle() = default;
  virtual int ground_size() const = 0;
  // Must implement a matroid: empty set independent, downward closed,
  // exchange property. Violations surface as oracle_integrity_error from the
  // algorithms that rely on them. Must be safe to call concurrently.
  virtual bool is_independent(const ItemSet& s) const = 0;
};

// At most `capacity` items from each class.
class PartitionMatroid final : public MatroidOracle {
 public:
  PartitionMatroid(std::vector<int> class_of, int capacity = 1)
      : class_of_(std::move(class_of)), capacity_(capacity) {
    if (capacity_ < 0) throw std::invalid_argument("PartitionMatroid: capacity < 0");
    num_classes_ = 0;
    for (int c : class_of_) {
      if (c < 0) throw std::invalid_argument("PartitionMatroid: negative class");
      num_classes_ = std::max(num_classes_, c + 1);
    }
  }

  explicit PartitionMatroid(const GroundSet& ground) : capacity_(1) {
    class_of_.resize(ground.num_items());
    for (int v = 0; v < ground.num_items(); ++v) class_of_[v] = ground.position_of(v);
    num_classes_ = ground.num_positions();
  }

  int ground_size() const override { return static_cast<int>(class_of_.size()); }

  bool is_independent(const ItemSet& s) const override {
    std::vector<int> used(num_classes_, 0);
    for (ItemId v : s) {
      if (v < 0 || v >= ground_size())
        throw std::invalid_argument("PartitionMatroid: unknown item id");
      if (++used[class_of_[v]] > capacity_) return false;
    }
    return true;
  }

 private:
  std::vector<int> class_of_;
  int capacity_;
  int num_classes_;
};

class UniformMatroid final : public MatroidOracle {
 public:
  UniformMatroid(int n, int r) : n_(n), r_(r) {
    if (n < 0 || r < 0) throw std::invalid_argument("UniformMatroid: n, r must be >= 0");
  }
  int ground_size() const override { return n_; }
  bool is_independent(const ItemSet& s) const override {
    for (ItemId v : s)
      if (v < 0 || v >= n_) throw std::invalid_argument("UniformMatroid: unknown item id");
    return static_cast<int>(s.size()) <= r_;
  }

 private:
  int n_, r_;
};

inline UniformMatroid free_matroid(int n) { return UniformMatroid(n, n); }

// Downward closure of an explicit list of sets. Note: an arbitrary list need
// not satisfy the exchange property; validate_matroid_axioms can tell.
class ExplicitMatroid final : public MatroidOracle {
 public:
  ExplicitMatroid(int n, std::vector<ItemSet> maximal_sets)
      : n_(n), maximal_(std::move(maximal_sets)) {
    for (const auto& s : maximal_)
      for (ItemId v : s)
        if (v < 0 || v >= n_)
          throw std::invalid_argument("ExplicitMatroid: item id out of range");
  }

  int ground_size() const override { return n_; }

  bool is_independent(const ItemSet& s) const override {
    for (ItemId v : s)
      if (v < 0 || v >= n_) throw std::invalid_argument("ExplicitMatroid: unknown item id");
    if (s.empty()) return true;
    for (const auto& m : maximal_) {
      if (std::includes(m.begin(), m.end(), s.begin(), s.end())) return true;
    }
    return false;
  }

 private:
  int n_;
  std::vector<ItemSet> maximal_;
};

// Greedy in id order; by the exchange property this reaches a maximum
// independent set, so its size is the rank.
inline int rank(const MatroidOracle& m) {
  ItemSet s;
  for (ItemId v = 0; v < m.ground_size(); ++v) {
    if (m.is_independent(s.with(v))) s.insert(v);
  }
  return static_cast<int>(s.size());
}

// Classic matroid greedy: scan by descending weight (ties by lower id),
// skip non-positive weights, keep what fits. Exact for matroids.
inline ItemSet max_weight_independent_set(const MatroidOracle& m,
                                          const std::vector<double>& weights) {
  if (static_cast<int>(weights.size()) != m.ground_size())
    throw std::invalid_argument("max_weight_independent_set: weight size mismatch");
  std::vector<ItemId> order;
  order.reserve(weights.size());
  for (ItemId v = 0; v < m.ground_size(); ++v)
    if (weights[v] > 0.0) order.push_back(v);
  std::stable_sort(order.begin(), order.end(), [&](ItemId a, ItemId b) {
    if (weights[a] != weights[b]) return weights[a] > weights[b];
    return a < b;
  });
  ItemSet s;
  for (ItemId v : order) {
    if (m.is_independent(s.with(v))) s.insert(v);
  }
  return s;
}

// Smallest-id x in b\a with a+x independent. Exists whenever |a| < |b| and
// both are independent; otherwise the oracle is not a matroid.
inline ItemId exchange_element(const MatroidOracle& m, const ItemSet& a,
                               const ItemSet& b) {
  if (a.size() >= b.size())
    throw std::invalid_argument("exchange_element: requires |a| < |b|");
  for (ItemId v : set_difference(b, a)) {
    if (m.is_independent(a.with(v))) return v;
  }
  throw oracle_integrity_error(
      "exchange_element: no augmenting element; independence oracle violates "
      "the exchange property");
}

// Exhaustive axiom check: empty set in I, downward closure, exchange.
// Meant for small ground sets (2^n subsets).
inline bool validate_matroid_axioms(const MatroidOracle& m, int cap = 12) {
  const int n = m.ground_size();
  if (n > cap) throw cap_exceeded("validate_matroid_axioms: ground set larger than cap");
  const std::uint64_t full = 1ull << n;
  std::vector<char> indep(full, 0);
  std::vector<int> card(full, 0);
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    std::vector<ItemId> ids;
    for (int v = 0; v < n; ++v)
      if (mask & (1ull << v)) ids.push_back(v);
    card[mask] = static_cast<int>(ids.size());
    indep[mask] = m.is_independent(ItemSet(std::move(ids))) ? 1 : 0;
  }
  if (!indep[0]) return false;
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    if (!indep[mask]) continue;
    // Downward closure: removing any one element stays independent.
    for (int v = 0; v < n; ++v)
      if ((mask & (1ull << v)) && !indep[mask & ~(1ull << v)]) return false;
    // Exchange against every smaller independent set.
    for (std::uint64_t other = 0; other < full; ++other) {
      if (!indep[other] || card[other] >= card[mask]) continue;
      bool found = false;
      std::uint64_t extra = mask & ~other;
      for (int v = 0; v < n && !found; ++v)
        if ((extra & (1ull << v)) && indep[other | (1ull << v)]) found = true;
      if (!found) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Fractional points as explicit convex combinations of independent sets.

struct WeightedSet {
  ItemSet set;
  double weight = 0.0;
};

class FractionalPoint {
 public:
  FractionalPoint() = default;
  explicit FractionalPoint(std::vector<WeightedSet> combo) : combo_(std::move(combo)) {
    for (const auto& ws : combo_)
      if (!(ws.weight > 0.0))
        throw std::invalid_argument("FractionalPoint: weights must be > 0");
  }

  const std::vector<WeightedSet>& combo() const { return combo_; }

  double total_weight() const {
    double t = 0.0;
    for (const auto& ws : combo_) t += ws.weight;
    return t;
  }

  // Coordinates y_v = sum of weights of sets containing v; in [0,1] whenever
  // the weights sum to at most 1.
  std::vector<double> coordinates(int n) const {
    std::vector<double> y(n, 0.0);
    for (const auto& ws : combo_)
      for (ItemId v : ws.set) {
        if (v < 0 || v >= n)
          throw std::invalid_argument("FractionalPoint: item id out of range");
        y[v] += ws.weight;
      }
    return y;
  }

  // Same point with an explicit empty-set term making the weights sum to 1.
  FractionalPoint padded() const {
    double slack = 1.0 - total_weight();
    FractionalPoint p = *this;
    if (slack > 0.0) p.combo_.push_back({ItemSet{}, slack});
    return p;
  }

 private:
  std::vector<WeightedSet> combo_;
};

namespace detail {

// View of the input matroid padded with `rank` interchangeable dummy ids and
// truncated at rank, so every independent set extends to a "base" of size
// exactly rank. Dummy ids are n..n+rank-1.
struct PaddedMatroid {
  const MatroidOracle& m;
  int n;
  int r;

  bool is_base_candidate(const ItemSet& s) const {
    if (static_cast<int>(s.size()) > r) return false;
    std::vector<ItemId> real;
    for (ItemId v : s) {
      if (v < n) real.push_back(v);
    }
    return m.is_independent(ItemSet(std::move(real)));
  }
};

}  // namespace detail

// Randomized rounding of a fractional point to a single independent set.
//
// The combination must have positive weights summing to 1 (within 1e-9) and
// every set independent. Sets are first padded with dummy elements to a
// common size d = rank(m); then the two least-weight members (A,w_A), (B,w_B)
// are repeatedly merged into one set of weight w_A+w_B by resolving each
// disagreement with a Bernoulli(w_A/(w_A+w_B)) choice, repaired by a
// symmetric exchange scanned in id order. Each resolution preserves
// per-element marginals exactly and, for submodular f, never decreases the
// expected multilinear value, so the final set S satisfies
//   Pr[v in S] = y_v   and   E[f(S)] >= F(y).
inline ItemSet round_to_independent(const MatroidOracle& m, const FractionalPoint& y,
                                    Rng& rng) {
  const int n = m.ground_size();
  const double total = y.total_weight();
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument(
        "round_to_independent: weights must sum to 1 (pad with the empty set)");
  if (y.combo().empty())
    throw std::invalid_argument("round_to_independent: empty combination");

  const int d = rank(m);
  detail::PaddedMatroid padded{m, n, d};

  struct Entry {
    ItemSet set;
    double weight;
  };
  std::vector<Entry> entries;
  entries.reserve(y.combo().size());
  for (const auto& ws : y.combo()) {
    if (!m.is_independent(ws.set))
      throw std::invalid_argument("round_to_independent: combination set not independent");
    Entry e{ws.set, ws.weight};
    for (ItemId dummy = n; static_cast<int>(e.set.size()) < d; ++dummy)
      e.set.insert(dummy);  // lowest dummy ids first; any choice works
    entries.push_back(std::move(e));
  }

  // Merge the two least-weight entries until one remains. Selection is by
  // (weight, insertion order) so runs are reproducible.
  std::vector<int> alive(entries.size());
  for (std::size_t i = 0; i < entries.size(); ++i) alive[i] = static_cast<int>(i);
  while (alive.size() > 1) {
    auto pick_min = [&](int skip) {
      int best = -1;
      for (int idx : alive) {
        if (idx == skip) continue;
        if (best == -1 || entries[idx].weight < entries[best].weight) best = idx;
      }
      return best;
    };
    int ia = pick_min(-1);
    int ib = pick_min(ia);
    ItemSet& a = entries[ia].set;
    ItemSet& b = entries[ib].set;
    const double wa = entries[ia].weight;
    const double wb = entries[ib].weight;

    while (!(a == b)) {
      ItemSet a_only = set_difference(a, b);
      ItemId i = *a_only.begin();
      // Symmetric exchange partner: first j (by id) in b\a keeping both sides
      // of the swap independent. Exists for bases of any matroid.
      ItemId j = -1;
      for (ItemId cand : set_difference(b, a)) {
        if (padded.is_base_candidate(a.without(i).with(cand)) &&
            padded.is_base_candidate(b.without(cand).with(i))) {
          j = cand;
          break;
        }
      }
      if (j == -1)
        throw oracle_integrity_error(
            "round_to_independent: no symmetric exchange; independence oracle "
            "violates the matroid axioms");
      if (rng.bernoulli(wa / (wa + wb))) {
        b.erase(j);
        b.insert(i);  // b adopts a's side of the disagreement
      } else {
        a.erase(i);
        a.insert(j);
      }
    }

    entries[ia].weight = wa + wb;
    alive.erase(std::find(alive.begin(), alive.end(), ib));
  }

  ItemSet result;
  for (ItemId v : entries[alive.front()].set)
    if (v < n) result.insert(v);
  assert(m.is_independent(result));
  return result;
}

}  // namespace submax
