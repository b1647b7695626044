#pragma once

// Ground sets, assignments, and black-box set-function oracles.
//
// Items carry dense ids 0..n-1 and are grouped into K disjoint position
// classes. An assignment is feasible when it holds at most one item per
// class; empty classes and unfilled classes are allowed. Objectives are
// set functions f: 2^V -> R>=0 exposed only through evaluation, plus
// caller-declared structure flags (monotone, submodular) and a declared
// upper bound on any single-item marginal gain.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace submax {

using ItemId = int;

struct cap_exceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct protocol_error : std::logic_error {
  using std::logic_error::logic_error;
};

// A claimed matroid/oracle property failed at runtime (bad caller input
// masquerading as a structure, not an internal bug).
struct oracle_integrity_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Small sorted id set. All algorithm state lives in these; n stays modest
// (hundreds), so a sorted vector beats node-based containers throughout.
class ItemSet {
 public:
  ItemSet() = default;
  explicit ItemSet(std::vector<ItemId> ids) : ids_(std::move(ids)) {
    std::sort(ids_.begin(), ids_.end());
    ids_.erase(std::unique(ids_.begin(), ids_.end()), ids_.end());
  }
  ItemSet(std::initializer_list<ItemId> ids) : ItemSet(std::vector<ItemId>(ids)) {}

  bool contains(ItemId v) const {
    return std::binary_search(ids_.begin(), ids_.end(), v);
  }

  void insert(ItemId v) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
    if (it == ids_.end() || *it != v) ids_.insert(it, v);
  }

  void erase(ItemId v) {
    auto it = std::lower_bound(ids_.begin(), ids_.end(), v);
    if (it != ids_.end() && *it == v) ids_.erase(it);
  }

  ItemSet with(ItemId v) const {
    ItemSet s = *this;
    s.insert(v);
    return s;
  }

  ItemSet without(ItemId v) const {
    ItemSet s = *this;
    s.erase(v);
    return s;
  }

  std::size_t size() const { return ids_.size(); }
  bool empty() const { return ids_.empty(); }
  auto begin() const { return ids_.begin(); }
  auto end() const { return ids_.end(); }
  const std::vector<ItemId>& ids() const { return ids_; }

  friend bool operator==(const ItemSet&, const ItemSet&) = default;
  // Lexicographic on the sorted id sequence; used for deterministic
  // tie-breaking among equal-value solutions.
  friend bool operator<(const ItemSet& a, const ItemSet& b) {
    return a.ids_ < b.ids_;
  }

 private:
  std::vector<ItemId> ids_;
};

inline ItemSet set_union(const ItemSet& a, const ItemSet& b) {
  std::vector<ItemId> out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return ItemSet(std::move(out));
}

inline ItemSet set_difference(const ItemSet& a, const ItemSet& b) {
  std::vector<ItemId> out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return ItemSet(std::move(out));
}

inline ItemSet set_intersection(const ItemSet& a, const ItemSet& b) {
  std::vector<ItemId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return ItemSet(std::move(out));
}

// K position classes partitioning the dense id range 0..n-1.
class GroundSet {
 public:
  explicit GroundSet(std::vector<std::vector<ItemId>> positions)
      : positions_(std::move(positions)) {
    int n = 0;
    for (const auto& p : positions_) n += static_cast<int>(p.size());
    position_of_.assign(n, -1);
    for (int k = 0; k < static_cast<int>(positions_.size()); ++k) {
      auto& p = positions_[k];
      std::sort(p.begin(), p.end());
      for (ItemId v : p) {
        if (v < 0 || v >= n)
          throw std::invalid_argument("GroundSet: item ids must be dense 0..n-1");
        if (position_of_[v] != -1)
          throw std::invalid_argument("GroundSet: position classes must be disjoint");
        position_of_[v] = k;
      }
    }
    // Density: every id in 0..n-1 was claimed exactly once.
    for (int v = 0; v < n; ++v) {
      if (position_of_[v] == -1)
        throw std::invalid_argument("GroundSet: item ids must be dense 0..n-1");
    }
  }

  // Layout helper: K classes of m items each, ids k*m .. k*m+m-1.
  static GroundSet regular(int num_positions, int items_per_position) {
    std::vector<std::vector<ItemId>> pos(num_positions);
    for (int k = 0; k < num_positions; ++k)
      for (int j = 0; j < items_per_position; ++j)
        pos[k].push_back(k * items_per_position + j);
    return GroundSet(std::move(pos));
  }

  int num_positions() const { return static_cast<int>(positions_.size()); }
  int num_items() const { return static_cast<int>(position_of_.size()); }

  const std::vector<ItemId>& position(int k) const {
    if (k < 0 || k >= num_positions())
      throw std::out_of_range("GroundSet::position: index out of range");
    return positions_[k];
  }

  int position_of(ItemId v) const {
    if (v < 0 || v >= num_items())
      throw std::out_of_range("GroundSet: unknown item id " + std::to_string(v));
    return position_of_[v];
  }

 private:
  std::vector<std::vector<ItemId>> positions_;
  std::vector<int> position_of_;
};

// Black-box evaluation oracle for a set function. The callable must be pure
// (same set, same value) and safe to invoke concurrently. `value_bound` is a
// declared upper bound on f(S+v) - f(S) over all S, v; algorithms scale their
// learning rates with it and never try to infer it by probing.
class ValueOracle {
 public:
  using Fn = std::function<double(const ItemSet&)>;

  ValueOracle() = default;
  ValueOracle(Fn fn, bool monotone, bool submodular, double value_bound)
      : fn_(std::move(fn)),
        monotone_(monotone),
        submodular_(submodular),
        value_bound_(value_bound) {
    if (!fn_) throw std::invalid_argument("ValueOracle: null evaluation function");
    if (!(value_bound_ >= 0.0))
      throw std::invalid_argument("ValueOracle: value_bound must be >= 0");
  }

  double operator()(const ItemSet& s) const { return fn_(s); }
  bool monotone() const { return monotone_; }
  bool submodular() const { return submodular_; }
  double value_bound() const { return value_bound_; }
  explicit operator bool() const { return static_cast<bool>(fn_); }

  // Same oracle with a caller-declared bound replacing the computed one.
  ValueOracle with_value_bound(double bound) const {
    return ValueOracle(fn_, monotone_, submodular_, bound);
  }

 private:
  Fn fn_;
  bool monotone_ = false;
  bool submodular_ = false;
  double value_bound_ = 0.0;
};

// ---------------------------------------------------------------------------
// Built-in objective families. Each factory declares its structure flags and
// computes the marginal-gain bound from its own parameters.

// f(S) = sum of weights of universe elements covered by at least one item.
inline ValueOracle make_weighted_coverage(std::vector<double> element_weights,
                                          std::vector<std::vector<int>> covers) {
  const int m = static_cast<int>(element_weights.size());
  for (double w : element_weights)
    if (!(w >= 0.0))
      throw std::invalid_argument("make_weighted_coverage: weights must be >= 0");
  double bound = 0.0;
  for (auto& cov : covers) {
    std::sort(cov.begin(), cov.end());
    cov.erase(std::unique(cov.begin(), cov.end()), cov.end());
    double w = 0.0;
    for (int e : cov) {
      if (e < 0 || e >= m)
        throw std::invalid_argument("make_weighted_coverage: element out of range");
      w += element_weights[e];
    }
    bound = std::max(bound, w);
  }
  auto weights = std::make_shared<const std::vector<double>>(std::move(element_weights));
  auto cov = std::make_shared<const std::vector<std::vector<int>>>(std::move(covers));
  auto fn = [weights, cov, m](const ItemSet& s) {
    std::vector<char> hit(m, 0);
    double total = 0.0;
    for (ItemId v : s) {
      if (v < 0 || v >= static_cast<int>(cov->size()))
        throw std::invalid_argument("weighted_coverage: unknown item id");
      for (int e : (*cov)[v]) {
        if (!hit[e]) {
          hit[e] = 1;
          total += (*weights)[e];
        }
      }
    }
    return total;
  };
  return ValueOracle(std::move(fn), /*monotone=*/true, /*submodular=*/true, bound);
}

// f(S) = sum of per-item weights; the fully separable special case.
inline ValueOracle make_modular(std::vector<double> item_weights) {
  for (double w : item_weights)
    if (!(w >= 0.0)) throw std::invalid_argument("make_modular: weights must be >= 0");
  double bound = 0.0;
  for (double w : item_weights) bound = std::max(bound, w);
  auto weights = std::make_shared<const std::vector<double>>(std::move(item_weights));
  auto fn = [weights](const ItemSet& s) {
    double total = 0.0;
    for (ItemId v : s) {
      if (v < 0 || v >= static_cast<int>(weights->size()))
        throw std::invalid_argument("modular: unknown item id");
      total += (*weights)[v];
    }
    return total;
  };
  return ValueOracle(std::move(fn), true, true, bound);
}

// Scalar concave shapes used by make_concave_over_targets.
struct ConcaveShape {
  std::function<double(int)> g;  // increasing, concave, g(0) = 0
  double first_step;             // g(1) - g(0), the largest increment
};

inline ConcaveShape concave_sqrt() {
  return {[](int x) { return std::sqrt(static_cast<double>(x)); }, 1.0};
}

inline ConcaveShape concave_capped(int cap) {
  if (cap < 1) throw std::invalid_argument("concave_capped: cap must be >= 1");
  return {[cap](int x) { return static_cast<double>(std::min(x, cap)); }, 1.0};
}

inline ConcaveShape concave_linear(double slope) {
  if (!(slope >= 0.0)) throw std::invalid_argument("concave_linear: slope must be >= 0");
  return {[slope](int x) { return slope * x; }, slope};
}

struct TargetGroup {
  ItemSet targets;
  double weight = 1.0;
};

// f(S) = sum_u w_u * g(|S intersect T_u|), concave g => submodular f.
inline ValueOracle make_concave_over_targets(std::vector<TargetGroup> groups,
                                             ConcaveShape shape) {
  double bound = 0.0;
  {
    // Marginal of a single item v is at most sum of w_u*(g(1)-g(0)) over
    // groups containing v; take the worst item.
    std::vector<std::pair<ItemId, double>> per_item;
    for (const auto& gr : groups) {
      if (!(gr.weight >= 0.0))
        throw std::invalid_argument("make_concave_over_targets: weights must be >= 0");
      for (ItemId v : gr.targets) per_item.emplace_back(v, gr.weight);
    }
    std::sort(per_item.begin(), per_item.end());
    double acc = 0.0;
    for (std::size_t i = 0; i < per_item.size(); ++i) {
      acc += per_item[i].second;
      if (i + 1 == per_item.size() || per_item[i + 1].first != per_item[i].first) {
        bound = std::max(bound, acc * shape.first_step);
        acc = 0.0;
      }
    }
  }
  auto grs = std::make_shared<const std::vector<TargetGroup>>(std::move(groups));
  auto g = shape.g;
  auto fn = [grs, g](const ItemSet& s) {
    double total = 0.0;
    for (const auto& gr : *grs) {
      int hits = static_cast<int>(set_intersection(s, gr.targets).size());
      total += gr.weight * g(hits);
    }
    return total;
  };
  return ValueOracle(std::move(fn), true, true, bound);
}

// ---------------------------------------------------------------------------
// Position-discounted chain objective.
//
// Items live in a position chain (class k = slot k, scanned in order) and
// each maps to an underlying entity ("blog"). With prefix entity sets
// B_k = entities placed in slots 1..k, the value is
//   sum_k gamma^k * (g(B_k) - g(B_{k-1})),   1-based k,
// i.e. each entity's contribution to g is discounted by the first slot where
// it appears.

inline double discounted_positional_value(const ValueOracle& g, double gamma,
                                          const GroundSet& ground,
                                          const std::vector<int>& item_entity,
                                          const ItemSet& s) {
  if (!(gamma > 0.0 && gamma <= 1.0))
    throw std::invalid_argument("discounted_positional_value: gamma must be in (0,1]");
  std::vector<ItemId> slot(ground.num_positions(), -1);
  for (ItemId v : s) {
    int k = ground.position_of(v);  // validates the id
    if (slot[k] != -1)
      throw std::invalid_argument(
          "discounted_positional_value: assignment holds two items in one position");
    slot[k] = v;
  }
  ItemSet prefix;
  double value = 0.0;
  double disc = 1.0;
  double prev = g(prefix);
  for (int k = 0; k < ground.num_positions(); ++k) {
    disc *= gamma;
    if (slot[k] != -1) prefix.insert(item_entity[slot[k]]);
    double cur = g(prefix);
    value += disc * (cur - prev);
    prev = cur;
  }
  return value;
}

inline ValueOracle make_discounted_positional(const GroundSet& ground,
                                              std::vector<int> item_entity,
                                              ValueOracle g, double gamma) {
  if (static_cast<int>(item_entity.size()) != ground.num_items())
    throw std::invalid_argument("make_discounted_positional: entity map size mismatch");
  auto gr = std::make_shared<const GroundSet>(ground);
  auto ent = std::make_shared<const std::vector<int>>(std::move(item_entity));
  auto gg = std::make_shared<const ValueOracle>(std::move(g));
  double bound = gamma * gg->value_bound();
  auto fn = [gr, ent, gg, gamma](const ItemSet& s) {
    return discounted_positional_value(*gg, gamma, *gr, *ent, s);
  };
  return ValueOracle(std::move(fn), gg->monotone(), gg->submodular(), bound);
}

// ---------------------------------------------------------------------------
// Feasibility and exhaustive baselines.

// True iff s holds at most one item per position class. Unknown ids throw.
inline bool is_feasible(const GroundSet& ground, const ItemSet& s) {
  std::vector<char> used(ground.num_positions(), 0);
  for (ItemId v : s) {
    int k = ground.position_of(v);
    if (used[k]) return false;
    used[k] = 1;
  }
  return true;
}

// Visit every feasible assignment (including the empty one) exactly once.
// Throws cap_exceeded if prod_k (|P_k|+1) > cap.
template <class Visitor>
void for_each_feasible(const GroundSet& ground, double cap, Visitor&& visit) {
  double count = 1.0;
  for (int k = 0; k < ground.num_positions(); ++k)
    count *= static_cast<double>(ground.position(k).size()) + 1.0;
  if (count > cap)
    throw cap_exceeded("feasible-assignment enumeration exceeds cap");
  const int K = ground.num_positions();
  std::vector<int> digit(K, 0);  // 0 = leave empty, j = j-th item of the class
  for (;;) {
    std::vector<ItemId> ids;
    for (int k = 0; k < K; ++k)
      if (digit[k] > 0) ids.push_back(ground.position(k)[digit[k] - 1]);
    visit(ItemSet(std::move(ids)));
    int k = 0;
    while (k < K) {
      if (++digit[k] <= static_cast<int>(ground.position(k).size())) break;
      digit[k] = 0;
      ++k;
    }
    if (k == K) break;
  }
}

struct OptResult {
  ItemSet best;
  double value = 0.0;
};

// Exhaustive maximization over feasible assignments. Ties go to the
// lexicographically smallest id sequence, so the result is deterministic.
inline OptResult brute_force_opt(const ValueOracle& f, const GroundSet& ground,
                                 double cap = 1e6) {
  OptResult out;
  bool first = true;
  for_each_feasible(ground, cap, [&](ItemSet s) {
    double v = f(s);
    if (first || v > out.value || (v == out.value && s < out.best)) {
      out.best = std::move(s);
      out.value = v;
      first = false;
    }
  });
  return out;
}

// ---------------------------------------------------------------------------
// Structure checking.

struct MarginalWitness {
  ItemSet base;        // A
  ItemSet superset;    // A', with A subset of A'
  ItemId added = -1;   // s, outside A'
  double small_gain = 0.0;  // f(A+s) - f(A)
  double large_gain = 0.0;  // f(A'+s) - f(A')
};

struct StructureReport {
  bool monotone = true;
  bool submodular = true;
  // First violation found, in deterministic scan order.
  std::optional<MarginalWitness> monotone_witness;
  std::optional<MarginalWitness> submodular_witness;
};

// Exhaustive check of monotonicity and diminishing marginal gains over the
// whole ground set. Submodularity is tested through the local criterion
//   f(S+v) - f(S) >= f(S+u+v) - f(S+u)   for all S and u, v outside S,
// which is equivalent to the subset form; a violating (S, u, v) is reported
// with A = S, A' = S + u. Cost is O(2^n n^2) evaluations, so n is capped.
inline StructureReport check_monotone_submodular(const ValueOracle& f,
                                                 const GroundSet& ground,
                                                 int cap = 14, double tol = 1e-9) {
  const int n = ground.num_items();
  if (n > cap)
    throw cap_exceeded("check_monotone_submodular: ground set larger than cap");
  const std::uint64_t full = 1ull << n;
  std::vector<double> val(full);
  for (std::uint64_t mask = 0; mask < full; ++mask) {
    std::vector<ItemId> ids;
    for (int v = 0; v < n; ++v)
      if (mask & (1ull << v)) ids.push_back(v);
    val[mask] = f(ItemSet(std::move(ids)));
  }
  auto to_set = [n](std::uint64_t mask) {
    std::vector<ItemId> ids;
    for (int v = 0; v < n; ++v)
      if (mask & (1ull << v)) ids.push_back(v);
    return ItemSet(std::move(ids));
  };

  StructureReport rep;
  for (std::uint64_t mask = 0; mask < full && (rep.monotone || rep.submodular); ++mask) {
    for (int u = 0; u < n; ++u) {
      if (mask & (1ull << u)) continue;
      const std::uint64_t with_u = mask | (1ull << u);
      if (rep.monotone && val[with_u] < val[mask] - tol) {
        rep.monotone = false;
        rep.monotone_witness = MarginalWitness{to_set(mask), to_set(mask), u,
                                               val[with_u] - val[mask], 0.0};
      }
      if (!rep.submodular) continue;
      for (int v = u + 1; v < n; ++v) {
        if (mask & (1ull << v)) continue;
        const std::uint64_t with_v = mask | (1ull << v);
        const std::uint64_t with_uv = with_u | (1ull << v);
        // Check both orientations so the reported witness names the element
        // whose gain grew.
        if (val[with_v] - val[mask] < val[with_uv] - val[with_u] - tol) {
          rep.submodular = false;
          rep.submodular_witness =
              MarginalWitness{to_set(mask), to_set(with_u), v,
                              val[with_v] - val[mask], val[with_uv] - val[with_u]};
          break;
        }
        if (val[with_u] - val[mask] < val[with_uv] - val[with_v] - tol) {
          rep.submodular = false;
          rep.submodular_witness =
              MarginalWitness{to_set(mask), to_set(with_v), u,
                              val[with_u] - val[mask], val[with_uv] - val[with_v]};
          break;
        }
      }
    }
  }
  return rep;
}

}  // namespace submax
