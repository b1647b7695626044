#pragma once

// Offline assignment maximization.
//
// locally_greedy fills one position at a time by best marginal value; its
// guarantee is 1/2 of the optimum. tabular_greedy refines it: every position
// gets C color cells, cells are filled color-major by maximizing the
// color-averaged value F (a uniform random color per position decides which
// cell is live), and the end result is one uniform color draw. As C grows the
// guarantee approaches 1-1/e via the factor beta(K, C); with C = 1 the
// procedure is exactly locally_greedy.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "submax/core.hpp"
#include "submax/rng.hpp"

namespace submax {

// Guarantee factor: tabular_greedy with C colors on K positions achieves at
// least beta(K, C) of the optimal feasible value (minus estimation error).
inline double beta(int num_positions, int colors) {
  if (num_positions < 1 || colors < 1)
    throw std::invalid_argument("beta: K and C must be >= 1");
  const double K = num_positions;
  const double C = colors;
  return 1.0 - std::pow(1.0 - 1.0 / C, C) - (K * (K - 1) / 2.0) / C;
}

struct ColoredItem {
  ItemId item = -1;
  int color = 0;  // in [0, C)
  friend auto operator<=>(const ColoredItem&, const ColoredItem&) = default;
};

// Treated as a set of (item, color) pairs; duplicates are harmless.
using ColoredSet = std::vector<ColoredItem>;

using ColorVector = std::vector<int>;  // one color per position, in [0, C)

// Uniform color per position.
inline ColorVector sample_color_vector(int num_positions, int colors, Rng& rng) {
  ColorVector c(num_positions);
  for (int k = 0; k < num_positions; ++k) c[k] = rng.uniform_int(colors);
  return c;
}

// The items of s whose color matches their position's drawn color.
inline ItemSet sample_colors(const GroundSet& ground, const ColoredSet& s,
                             const ColorVector& colors) {
  if (static_cast<int>(colors.size()) != ground.num_positions())
    throw std::invalid_argument("sample_colors: color vector size mismatch");
  std::vector<ItemId> ids;
  for (const ColoredItem& ci : s) {
    int k = ground.position_of(ci.item);
    if (ci.color == colors[k]) ids.push_back(ci.item);
  }
  return ItemSet(std::move(ids));
}

struct ColorEstimator {
  enum class Mode { Exact, Sampled };
  Mode mode = Mode::Exact;
  int samples = 1000;  // draws per evaluation in Sampled mode
  double cap = 1e6;    // max enumerated color vectors in Exact mode

  static ColorEstimator exact(double cap = 1e6) { return {Mode::Exact, 1000, cap}; }
  static ColorEstimator sampled(int rho) { return {Mode::Sampled, rho, 1e6}; }
};

namespace detail {

// Positions that s actually touches; colors of the others never matter, so
// exact averaging only enumerates over these.
inline std::vector<int> touched_positions(const GroundSet& ground, const ColoredSet& s) {
  std::vector<char> seen(ground.num_positions(), 0);
  for (const ColoredItem& ci : s) seen[ground.position_of(ci.item)] = 1;
  std::vector<int> out;
  for (int k = 0; k < ground.num_positions(); ++k)
    if (seen[k]) out.push_back(k);
  return out;
}

}  // namespace detail

// F(s) = E over uniform colors of f(sample_colors(s, colors)). Exact mode
// enumerates all color combinations of the touched positions (requires
// C^(#touched) <= cap); Sampled mode averages over `samples` random draws.
inline double color_averaged_value(const ValueOracle& f, const GroundSet& ground,
                                   const ColoredSet& s, int colors,
                                   const ColorEstimator& est, Rng* rng = nullptr) {
  if (colors < 1) throw std::invalid_argument("color_averaged_value: colors must be >= 1");
  for (const ColoredItem& ci : s) {
    if (ci.color < 0 || ci.color >= colors)
      throw std::invalid_argument("color_averaged_value: color out of range");
    ground.position_of(ci.item);  // validates the id
  }
  const std::vector<int> touched = detail::touched_positions(ground, s);

  if (est.mode == ColorEstimator::Mode::Sampled) {
    if (rng == nullptr)
      throw std::invalid_argument("color_averaged_value: sampled mode needs an rng");
    if (est.samples < 1)
      throw std::invalid_argument("color_averaged_value: samples must be >= 1");
    ColorVector cv(ground.num_positions(), 0);
    double total = 0.0;
    for (int it = 0; it < est.samples; ++it) {
      for (int k : touched) cv[k] = rng->uniform_int(colors);
      total += f(sample_colors(ground, s, cv));
    }
    return total / est.samples;
  }

  if (std::pow(static_cast<double>(colors), static_cast<double>(touched.size())) > est.cap)
    throw cap_exceeded("color_averaged_value: exact enumeration exceeds cap");
  ColorVector cv(ground.num_positions(), 0);
  std::vector<int> digit(touched.size(), 0);
  double total = 0.0;
  long count = 0;
  for (;;) {
    for (std::size_t i = 0; i < touched.size(); ++i) cv[touched[i]] = digit[i];
    total += f(sample_colors(ground, s, cv));
    ++count;
    std::size_t i = 0;
    while (i < digit.size()) {
      if (++digit[i] < colors) break;
      digit[i] = 0;
      ++i;
    }
    if (i == digit.size()) break;
  }
  return total / count;
}

// One chosen item per (position, color) cell.
class ColoredTable {
 public:
  ColoredTable() = default;
  ColoredTable(int num_positions, int colors)
      : positions_(num_positions), colors_(colors),
        cells_(static_cast<std::size_t>(num_positions) * colors, -1) {}

  int num_positions() const { return positions_; }
  int colors() const { return colors_; }

  void set(int k, int c, ItemId v) { cells_.at(index(k, c)) = v; }

  std::optional<ItemId> get(int k, int c) const {
    ItemId v = cells_.at(index(k, c));
    if (v < 0) return std::nullopt;
    return v;
  }

  ColoredSet as_colored_set() const {
    ColoredSet s;
    for (int k = 0; k < positions_; ++k)
      for (int c = 0; c < colors_; ++c)
        if (cells_[index(k, c)] >= 0) s.push_back({cells_[index(k, c)], c});
    return s;
  }

  // The assignment a color draw selects: position k contributes its
  // (k, colors[k]) cell if filled.
  ItemSet select(const ColorVector& colors) const {
    if (static_cast<int>(colors.size()) != positions_)
      throw std::invalid_argument("ColoredTable::select: color vector size mismatch");
    std::vector<ItemId> ids;
    for (int k = 0; k < positions_; ++k) {
      ItemId v = cells_[index(k, colors.at(k))];
      if (v >= 0) ids.push_back(v);
    }
    return ItemSet(std::move(ids));
  }

 private:
  std::size_t index(int k, int c) const {
    if (k < 0 || k >= positions_ || c < 0 || c >= colors_)
      throw std::invalid_argument("ColoredTable: cell index out of range");
    return static_cast<std::size_t>(k) * colors_ + c;
  }

  int positions_ = 0;
  int colors_ = 0;
  std::vector<ItemId> cells_;
};

// Degrades each per-cell argmax by at most epsilon(k, c): the selection
// becomes the worst candidate whose value is still within epsilon of the
// best (ties by lowest id). With all-zero epsilons the selection is the
// plain argmax, so the injector only ever widens the acceptable band.
class ArgmaxErrorInjector {
 public:
  static ArgmaxErrorInjector per_position(std::vector<double> eps) {
    validate(eps);
    ArgmaxErrorInjector inj;
    inj.eps_ = {std::move(eps)};
    return inj;
  }

  static ArgmaxErrorInjector per_cell(std::vector<std::vector<double>> eps) {
    for (const auto& row : eps) validate(row);
    ArgmaxErrorInjector inj;
    inj.eps_ = std::move(eps);
    inj.per_cell_ = true;
    return inj;
  }

  double epsilon(int k, int c) const {
    if (!per_cell_) return eps_.at(0).at(k);
    return eps_.at(k).at(c);
  }

  double total() const {
    double t = 0.0;
    for (const auto& row : eps_)
      for (double e : row) t += e;
    return t;
  }

 private:
  static void validate(const std::vector<double>& eps) {
    for (double e : eps)
      if (!(e >= 0.0))
        throw std::invalid_argument("ArgmaxErrorInjector: epsilons must be >= 0");
  }

  std::vector<std::vector<double>> eps_;
  bool per_cell_ = false;
};

namespace detail {

// Pick from scored candidates: the plain argmax (ties by lowest id), or with
// an error band the worst candidate within `eps` of the best.
inline ItemId pick_with_band(const std::vector<ItemId>& cand,
                             const std::vector<double>& score, double eps) {
  assert(!cand.empty());
  double best = score[0];
  for (double v : score) best = std::max(best, v);
  ItemId pick = -1;
  double pick_score = 0.0;
  for (std::size_t i = 0; i < cand.size(); ++i) {
    if (score[i] >= best - eps) {
      if (pick == -1 || score[i] < pick_score ||
          (score[i] == pick_score && cand[i] < pick)) {
        pick = cand[i];
        pick_score = score[i];
      }
    }
  }
  return pick;
}

}  // namespace detail

struct GreedyResult {
  ItemSet assignment;
  double value = 0.0;  // f(assignment)
};

inline std::vector<int> natural_order(int num_positions) {
  std::vector<int> order(num_positions);
  for (int k = 0; k < num_positions; ++k) order[k] = k;
  return order;
}

// Fill positions one at a time, each with the item maximizing the value of
// the assignment so far (ties by lowest id). Empty positions are skipped.
inline GreedyResult locally_greedy(const GroundSet& ground, const ValueOracle& f,
                                   const std::vector<int>& order,
                                   const ArgmaxErrorInjector* injector = nullptr) {
  {
    std::vector<char> seen(ground.num_positions(), 0);
    for (int k : order) {
      if (k < 0 || k >= ground.num_positions() || seen[k])
        throw std::invalid_argument("locally_greedy: order must list each position once");
      seen[k] = 1;
    }
    if (static_cast<int>(order.size()) != ground.num_positions())
      throw std::invalid_argument("locally_greedy: order must list each position once");
  }
  ItemSet current;
  for (int k : order) {
    const auto& cand = ground.position(k);
    if (cand.empty()) continue;
    std::vector<double> score;
    score.reserve(cand.size());
    for (ItemId x : cand) score.push_back(f(current.with(x)));
    double eps = injector ? injector->epsilon(k, 0) : 0.0;
    current.insert(detail::pick_with_band(cand, score, eps));
  }
  return {current, f(current)};
}

inline GreedyResult locally_greedy(const GroundSet& ground, const ValueOracle& f,
                                   const ArgmaxErrorInjector* injector = nullptr) {
  return locally_greedy(ground, f, natural_order(ground.num_positions()), injector);
}

struct TabularGreedyResult {
  ColoredTable table;
  ItemSet assignment;    // one uniform color draw applied to the table
  ColorVector colors;    // the realized draw
  double table_value = 0.0;  // F(table) under the requested estimator
  bool exact = true;     // false if sampled estimation was used (or forced by cap)
};

// Color-major cell filling. Each cell (k, c) receives the item of position k
// maximizing F(table + (item, c)); F is evaluated exactly when the color
// enumeration fits under the estimator cap, otherwise by sampling (a forced
// fallback is reported through `exact`). Candidates within one cell share
// the same sampled color draws, so sampled-mode comparisons are paired.
inline TabularGreedyResult tabular_greedy(const GroundSet& ground, const ValueOracle& f,
                                          int colors, const ColorEstimator& est,
                                          std::uint64_t seed,
                                          const ArgmaxErrorInjector* injector = nullptr) {
  if (colors < 1) throw std::invalid_argument("tabular_greedy: colors must be >= 1");
  const int K = ground.num_positions();
  Rng est_rng = stream_rng(seed, "tabular-estimate");
  Rng color_rng = stream_rng(seed, "tabular-colors");

  ColoredTable table(K, colors);
  ColoredSet placed;  // grows cell by cell
  std::vector<char> touched(K, 0);
  bool exact_everywhere = true;

  for (int c = 0; c < colors; ++c) {
    for (int k = 0; k < K; ++k) {
      const auto& cand = ground.position(k);
      if (cand.empty()) continue;

      // Positions whose colors matter for f(table + candidate).
      std::vector<int> active;
      for (int kk = 0; kk < K; ++kk)
        if (touched[kk] || kk == k) active.push_back(kk);

      const bool exact_here = est.mode == ColorEstimator::Mode::Exact &&
                              std::pow(static_cast<double>(colors),
                                       static_cast<double>(active.size())) <= est.cap;
      if (!exact_here) exact_everywhere = false;  // sampled, or forced fallback

      std::vector<double> score(cand.size(), 0.0);
      ColorVector cv(K, 0);
      long draws = 0;

      auto accumulate = [&]() {
        // Shared base: the items of `placed` selected by cv. Candidates only
        // differ when this cell's color is the live one for position k.
        ItemSet base = sample_colors(ground, placed, cv);
        if (cv[k] == c) {
          for (std::size_t i = 0; i < cand.size(); ++i) score[i] += f(base.with(cand[i]));
        } else {
          double shared = f(base);
          for (auto& sc : score) sc += shared;
        }
        ++draws;
      };

      if (exact_here) {
        std::vector<int> digit(active.size(), 0);
        for (;;) {
          for (std::size_t i = 0; i < active.size(); ++i) cv[active[i]] = digit[i];
          accumulate();
          std::size_t i = 0;
          while (i < digit.size()) {
            if (++digit[i] < colors) break;
            digit[i] = 0;
            ++i;
          }
          if (i == digit.size()) break;
        }
      } else {
        for (int it = 0; it < est.samples; ++it) {
          for (int kk : active) cv[kk] = est_rng.uniform_int(colors);
          accumulate();
        }
      }
      for (auto& sc : score) sc /= draws;

      double eps = injector ? injector->epsilon(k, c) : 0.0;
      ItemId pick = detail::pick_with_band(cand, score, eps);
      table.set(k, c, pick);
      placed.push_back({pick, c});
      touched[k] = 1;
    }
  }

  TabularGreedyResult out;
  out.table = table;
  out.colors = sample_color_vector(K, colors, color_rng);
  out.assignment = table.select(out.colors);
  out.exact = exact_everywhere;
  out.table_value = color_averaged_value(f, ground, table.as_colored_set(), colors,
                                         exact_everywhere ? ColorEstimator::exact(est.cap)
                                                          : ColorEstimator::sampled(est.samples),
                                         &est_rng);
  return out;
}

}  // namespace submax
