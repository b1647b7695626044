#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <cstdint>
#include <vector>

#include "submax/core.hpp"
#include "submax/matroid.hpp"
#include "submax/multilinear.hpp"
#include "submax/rng.hpp"

using namespace submax;

namespace {

// Exhaustive maximum of a weight vector over independent sets, for checking
// the greedy against something that cannot be wrong.
double brute_force_best_weight(const MatroidOracle& m, const std::vector<double>& w) {
  const int n = m.ground_size();
  double best = 0.0;
  for (std::uint64_t mask = 0; mask < (1ull << n); ++mask) {
    std::vector<ItemId> ids;
    double total = 0.0;
    for (int v = 0; v < n; ++v)
      if (mask & (1ull << v)) {
        ids.push_back(v);
        total += w[v];
      }
    if (m.is_independent(ItemSet(std::move(ids)))) best = std::max(best, total);
  }
  return best;
}

// Two disjoint maximal sets with nothing exchangeable between them. Downward
// closed but not a matroid.
class TwoIslandOracle final : public MatroidOracle {
 public:
  int ground_size() const override { return 4; }
  bool is_independent(const ItemSet& s) const override {
    ItemSet left({0, 1}), right({2, 3});
    return set_difference(s, left).empty() || set_difference(s, right).empty();
  }
};

// Breaks downward closure: pairs are independent, singletons are not.
class NoClosureOracle final : public MatroidOracle {
 public:
  int ground_size() const override { return 3; }
  bool is_independent(const ItemSet& s) const override {
    return s.empty() || s.size() == 2;
  }
};

}  // namespace

TEST_CASE("partition matroid independence", "[matroid]") {
  PartitionMatroid m({0, 0, 1, 1, 2});
  REQUIRE(m.ground_size() == 5);
  REQUIRE(m.is_independent(ItemSet{}));
  REQUIRE(m.is_independent(ItemSet({0, 2, 4})));
  REQUIRE_FALSE(m.is_independent(ItemSet({0, 1})));
  REQUIRE_FALSE(m.is_independent(ItemSet({2, 3, 4})));
  REQUIRE_THROWS_AS(m.is_independent(ItemSet({5})), std::invalid_argument);

  PartitionMatroid two({0, 0, 0, 1}, 2);
  REQUIRE(two.is_independent(ItemSet({0, 1})));
  REQUIRE_FALSE(two.is_independent(ItemSet({0, 1, 2})));
  REQUIRE(two.is_independent(ItemSet({0, 1, 3})));

  // Built from a ground set: one slot per position class.
  GroundSet g = GroundSet::regular(2, 3);
  PartitionMatroid from_ground(g);
  REQUIRE(from_ground.is_independent(ItemSet({0, 5})));
  REQUIRE_FALSE(from_ground.is_independent(ItemSet({0, 2})));

  REQUIRE_THROWS_AS(PartitionMatroid({0, 1}, -1), std::invalid_argument);
  REQUIRE_THROWS_AS(PartitionMatroid({0, -2}), std::invalid_argument);
}

TEST_CASE("uniform and explicit matroids", "[matroid]") {
  UniformMatroid u(5, 2);
  REQUIRE(u.is_independent(ItemSet({1, 4})));
  REQUIRE_FALSE(u.is_independent(ItemSet({0, 1, 2})));
  REQUIRE_THROWS_AS(u.is_independent(ItemSet({5})), std::invalid_argument);
  REQUIRE(UniformMatroid(3, 0).is_independent(ItemSet{}));
  REQUIRE_FALSE(UniformMatroid(3, 0).is_independent(ItemSet({0})));
  REQUIRE(free_matroid(4).is_independent(ItemSet({0, 1, 2, 3})));
  REQUIRE_THROWS_AS(UniformMatroid(-1, 0), std::invalid_argument);

  ExplicitMatroid e(4, {ItemSet({0, 1}), ItemSet({2})});
  REQUIRE(e.is_independent(ItemSet{}));
  REQUIRE(e.is_independent(ItemSet({0})));
  REQUIRE(e.is_independent(ItemSet({0, 1})));
  REQUIRE(e.is_independent(ItemSet({2})));
  REQUIRE_FALSE(e.is_independent(ItemSet({0, 2})));
  REQUIRE_FALSE(e.is_independent(ItemSet({3})));
  REQUIRE_THROWS_AS(ExplicitMatroid(2, {ItemSet({5})}), std::invalid_argument);
}

TEST_CASE("rank via greedy", "[matroid]") {
  REQUIRE(rank(PartitionMatroid({0, 0, 1, 1, 2})) == 3);
  REQUIRE(rank(PartitionMatroid({0, 0, 0, 1}, 2)) == 3);  // 3 capped at 2, plus 1
  REQUIRE(rank(UniformMatroid(5, 2)) == 2);
  REQUIRE(rank(UniformMatroid(5, 9)) == 5);
  REQUIRE(rank(free_matroid(0)) == 0);
  REQUIRE(rank(ExplicitMatroid(4, {ItemSet({0, 1}), ItemSet({2})})) == 2);
}

TEST_CASE("max weight independent set matches brute force", "[matroid]") {
  // Hand case first: class budgets force one pick per class.
  PartitionMatroid m({0, 0, 1, 1});
  ItemSet s = max_weight_independent_set(m, {0.3, 0.7, 0.2, 0.1});
  REQUIRE(s == ItemSet({1, 2}));

  // Ties break toward the lower id, and non-positive weights are dropped.
  REQUIRE(max_weight_independent_set(m, {0.5, 0.5, -1.0, 0.0}) == ItemSet({0}));
  REQUIRE(max_weight_independent_set(m, {-1.0, -2.0, -3.0, -0.5}).empty());
  REQUIRE_THROWS_AS(max_weight_independent_set(m, {1.0}), std::invalid_argument);

  // Random sweep over partition and uniform matroids; matroid greedy is
  // exact, so the value must equal the exhaustive maximum.
  Rng rng(derive_seed(17, "matroid-greedy-sweep"));
  for (int it = 0; it < 60; ++it) {
    int n = 2 + rng.uniform_int(7);
    std::vector<double> w(n);
    for (double& x : w) x = rng.uniform() * 2.0 - 0.5;  // some negatives
    std::unique_ptr<MatroidOracle> m2;
    if (it % 2 == 0) {
      std::vector<int> cls(n);
      for (int& c : cls) c = rng.uniform_int(3);
      m2 = std::make_unique<PartitionMatroid>(cls, 1 + rng.uniform_int(2));
    } else {
      m2 = std::make_unique<UniformMatroid>(n, rng.uniform_int(n + 1));
    }
    ItemSet pick = max_weight_independent_set(*m2, w);
    REQUIRE(m2->is_independent(pick));
    double value = 0.0;
    for (ItemId v : pick) value += w[v];
    REQUIRE(value == Catch::Approx(brute_force_best_weight(*m2, w)).margin(1e-12));
  }
}

TEST_CASE("exchange element", "[matroid]") {
  PartitionMatroid m({0, 0, 1, 1, 2});
  // a = {0}, b = {1, 2}: 1 conflicts with 0's class, so 2 augments.
  REQUIRE(exchange_element(m, ItemSet({0}), ItemSet({1, 2})) == 2);
  REQUIRE(exchange_element(m, ItemSet{}, ItemSet({3})) == 3);
  REQUIRE_THROWS_AS(exchange_element(m, ItemSet({0, 2}), ItemSet({1, 3})),
                    std::invalid_argument);  // needs |a| < |b|

  // Downward closed but exchange-free across the two islands.
  TwoIslandOracle bad;
  REQUIRE_THROWS_AS(exchange_element(bad, ItemSet({2}), ItemSet({0, 1})),
                    oracle_integrity_error);
}

TEST_CASE("matroid axiom validation", "[matroid]") {
  REQUIRE(validate_matroid_axioms(PartitionMatroid({0, 0, 1, 1, 2})));
  REQUIRE(validate_matroid_axioms(PartitionMatroid({0, 0, 0}, 2)));
  REQUIRE(validate_matroid_axioms(UniformMatroid(6, 3)));
  REQUIRE(validate_matroid_axioms(free_matroid(5)));
  REQUIRE(validate_matroid_axioms(ExplicitMatroid(3, {ItemSet({0, 1}), ItemSet({1, 2})})));

  REQUIRE_FALSE(validate_matroid_axioms(TwoIslandOracle{}));
  REQUIRE_FALSE(validate_matroid_axioms(NoClosureOracle{}));
  REQUIRE_FALSE(validate_matroid_axioms(ExplicitMatroid(3, {ItemSet({0, 1}), ItemSet({2})})));
  REQUIRE_THROWS_AS(validate_matroid_axioms(UniformMatroid(13, 2), 12), cap_exceeded);
}

TEST_CASE("fractional points", "[matroid]") {
  FractionalPoint y({{ItemSet({0, 2}), 0.25}, {ItemSet({1, 2}), 0.5}});
  REQUIRE(y.total_weight() == 0.75);
  std::vector<double> coords = y.coordinates(4);
  REQUIRE(coords == std::vector<double>{0.25, 0.5, 0.75, 0.0});

  FractionalPoint padded = y.padded();
  REQUIRE(padded.total_weight() == 1.0);
  REQUIRE(padded.combo().back().set.empty());
  REQUIRE(padded.combo().back().weight == 0.25);
  // Padding an already full combination adds nothing.
  REQUIRE(padded.padded().combo().size() == padded.combo().size());

  REQUIRE_THROWS_AS(FractionalPoint({{ItemSet({0}), 0.0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(FractionalPoint({{ItemSet({0}), -0.1}}), std::invalid_argument);
  REQUIRE_THROWS_AS(y.coordinates(2), std::invalid_argument);  // id 2 out of range
}

TEST_CASE("rounding returns integral points unchanged", "[matroid]") {
  PartitionMatroid m({0, 0, 1, 1});
  Rng rng(derive_seed(23, "round-integral"));
  FractionalPoint y({{ItemSet({1, 3}), 1.0}});
  for (int it = 0; it < 5; ++it) REQUIRE(round_to_independent(m, y, rng) == ItemSet({1, 3}));

  FractionalPoint bad({{ItemSet({1, 3}), 0.9}});
  REQUIRE_THROWS_AS(round_to_independent(m, bad, rng), std::invalid_argument);
  FractionalPoint dependent({{ItemSet({0, 1}), 1.0}});
  REQUIRE_THROWS_AS(round_to_independent(m, dependent, rng), std::invalid_argument);

  TwoIslandOracle islands;
  FractionalPoint split({{ItemSet({0, 1}), 0.5}, {ItemSet({2, 3}), 0.5}});
  REQUIRE_THROWS_AS(round_to_independent(islands, split, rng), oracle_integrity_error);
}

TEST_CASE("rounding is deterministic given the generator state", "[matroid]") {
  PartitionMatroid m({0, 0, 1, 1, 2, 2});
  FractionalPoint y({{ItemSet({0, 2, 4}), 0.5}, {ItemSet({1, 3}), 0.25}, {ItemSet({5}), 0.25}});
  Rng a(derive_seed(31, "round-repeat"));
  Rng b(derive_seed(31, "round-repeat"));
  for (int it = 0; it < 20; ++it) {
    ItemSet sa = round_to_independent(m, y, a);
    REQUIRE(sa == round_to_independent(m, y, b));
    REQUIRE(m.is_independent(sa));
  }
}

TEST_CASE("rounding preserves marginals", "[matroid]") {
  // Mixed set sizes exercise the dummy padding; weights are dyadic so the
  // expected coordinates are exact binary fractions.
  PartitionMatroid m({0, 0, 1, 1});
  FractionalPoint y(
      {{ItemSet({0, 2}), 0.5}, {ItemSet({1}), 0.25}, {ItemSet({2}), 0.125}, {ItemSet{}, 0.125}});
  std::vector<double> want = y.coordinates(4);
  REQUIRE(want == std::vector<double>{0.5, 0.25, 0.625, 0.0});

  const int trials = 20000;
  Rng rng(derive_seed(37, "round-marginals"));
  std::vector<double> hits(4, 0.0);
  for (int it = 0; it < trials; ++it) {
    ItemSet s = round_to_independent(m, y, rng);
    REQUIRE(m.is_independent(s));
    for (ItemId v : s) hits[v] += 1.0;
  }
  for (int v = 0; v < 4; ++v) {
    double freq = hits[v] / trials;
    double se = std::sqrt(std::max(want[v] * (1.0 - want[v]), 1e-12) / trials);
    INFO("coordinate " << v << " freq " << freq << " want " << want[v]);
    REQUIRE(std::abs(freq - want[v]) <= 3.0 * se + 1e-9);
  }
}

TEST_CASE("rounding does not lose value on average", "[matroid]") {
  // Submodular objective; the merge step never decreases expected value, so
  // the sampled mean must reach the multilinear baseline up to noise.
  ValueOracle f = make_weighted_coverage({0.4, 0.3, 0.2, 0.1, 0.25},
                                         {{0, 1}, {1, 2}, {3}, {2, 4}, {0, 4}});
  PartitionMatroid m({0, 0, 1, 1, 2});
  FractionalPoint y({{ItemSet({0, 2, 4}), 0.5},
                     {ItemSet({1, 3}), 0.25},
                     {ItemSet({0, 3, 4}), 0.25}});
  double base = multilinear_eval(f, y.coordinates(5), MultilinearEstimator::exact());

  const int trials = 20000;
  Rng rng(derive_seed(41, "round-value"));
  double sum = 0.0, sumsq = 0.0;
  for (int it = 0; it < trials; ++it) {
    double v = f(round_to_independent(m, y, rng));
    sum += v;
    sumsq += v * v;
  }
  double mean = sum / trials;
  double var = (sumsq - sum * sum / trials) / (trials - 1);
  double se = std::sqrt(var / trials);
  INFO("mean " << mean << " baseline " << base << " se " << se);
  REQUIRE(mean >= base - 3.0 * se);
}

TEST_CASE("rounding a two point split is a coin flip", "[matroid]") {
  UniformMatroid m(2, 1);
  FractionalPoint y({{ItemSet({0}), 0.5}, {ItemSet({1}), 0.5}});
  Rng rng(derive_seed(43, "round-coin"));
  const int trials = 4000;
  int zero = 0;
  for (int it = 0; it < trials; ++it) {
    ItemSet s = round_to_independent(m, y, rng);
    REQUIRE(s.size() == 1);
    if (s.contains(0)) ++zero;
  }
  double freq = static_cast<double>(zero) / trials;
  double se = std::sqrt(0.25 / trials);
  REQUIRE(std::abs(freq - 0.5) <= 3.0 * se);
}
