#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "submax/core.hpp"
#include "submax/rng.hpp"

using namespace submax;

TEST_CASE("item sets stay sorted and deduplicated", "[core]") {
  ItemSet s(std::vector<ItemId>{3, 1, 3, 0});
  REQUIRE(s.ids() == std::vector<ItemId>{0, 1, 3});
  REQUIRE(s.contains(1));
  REQUIRE_FALSE(s.contains(2));

  ItemSet t = s.with(2);
  REQUIRE(t.ids() == std::vector<ItemId>{0, 1, 2, 3});
  REQUIRE(s.ids() == std::vector<ItemId>{0, 1, 3});  // with() copies
  REQUIRE(t.without(0) == ItemSet({1, 2, 3}));
  REQUIRE(t.with(2) == t);  // inserting a member is a no-op

  s.insert(2);
  s.erase(3);
  REQUIRE(s == ItemSet({0, 1, 2}));

  REQUIRE(set_union(ItemSet({0, 2}), ItemSet({1, 2})) == ItemSet({0, 1, 2}));
  REQUIRE(set_difference(ItemSet({0, 1, 2}), ItemSet({1})) == ItemSet({0, 2}));
  REQUIRE(set_intersection(ItemSet({0, 1, 2}), ItemSet({1, 3})) == ItemSet({1}));

  // Lexicographic order on the sorted id lists; used for deterministic ties.
  REQUIRE(ItemSet({0, 3}) < ItemSet({1, 2}));
  REQUIRE(ItemSet({0}) < ItemSet({0, 1}));
  REQUIRE_FALSE(ItemSet({1, 2}) < ItemSet({1, 2}));
}

TEST_CASE("ground set layout and validation", "[core]") {
  GroundSet g = GroundSet::regular(3, 4);
  REQUIRE(g.num_positions() == 3);
  REQUIRE(g.num_items() == 12);
  REQUIRE(g.position(1) == std::vector<ItemId>{4, 5, 6, 7});
  REQUIRE(g.position_of(0) == 0);
  REQUIRE(g.position_of(7) == 1);
  REQUIRE(g.position_of(11) == 2);
  REQUIRE_THROWS_AS(g.position_of(12), std::out_of_range);

  // Position classes may be empty; ids must still be dense and disjoint.
  GroundSet sparse({{0}, {}, {1, 2}});
  REQUIRE(sparse.num_items() == 3);
  REQUIRE(sparse.position(1).empty());
  REQUIRE(sparse.position_of(2) == 2);

  REQUIRE_THROWS_AS(GroundSet({{0, 1}, {1}}), std::invalid_argument);  // reused id
  REQUIRE_THROWS_AS(GroundSet({{0, 2}}), std::invalid_argument);       // gap in ids
}

TEST_CASE("assignment feasibility", "[core]") {
  GroundSet g = GroundSet::regular(2, 2);  // {0,1} | {2,3}
  REQUIRE(is_feasible(g, ItemSet{}));
  REQUIRE(is_feasible(g, ItemSet({0})));
  REQUIRE(is_feasible(g, ItemSet({0, 3})));
  REQUIRE(is_feasible(g, ItemSet({1, 2})));
  REQUIRE_FALSE(is_feasible(g, ItemSet({0, 1})));  // both in position 0
  REQUIRE_FALSE(is_feasible(g, ItemSet({2, 3})));
  REQUIRE_THROWS_AS(is_feasible(g, ItemSet({4})), std::out_of_range);
}

TEST_CASE("weighted coverage oracle", "[core]") {
  // Hand-computed: covers 0 -> {e0,e1}, 1 -> {e1,e2}, 2 -> {}.
  ValueOracle f = make_weighted_coverage({0.25, 0.5, 1.0}, {{0, 1}, {1, 2}, {}});
  REQUIRE(f(ItemSet{}) == 0.0);
  REQUIRE(f(ItemSet({0})) == 0.75);
  REQUIRE(f(ItemSet({1})) == 1.5);
  REQUIRE(f(ItemSet({2})) == 0.0);
  REQUIRE(f(ItemSet({0, 1})) == 1.75);          // e1 counted once
  REQUIRE(f(ItemSet({0, 1, 2})) == 1.75);
  REQUIRE(f.value_bound() == 1.5);              // heaviest single item
  REQUIRE(f.monotone());
  REQUIRE(f.submodular());

  REQUIRE_THROWS_AS(make_weighted_coverage({-0.1}, {{0}}), std::invalid_argument);
  REQUIRE_THROWS_AS(make_weighted_coverage({1.0}, {{1}}), std::invalid_argument);
}

TEST_CASE("modular and concave-over-targets oracles", "[core]") {
  ValueOracle lin = make_modular({0.5, 0.25, 0.125});
  REQUIRE(lin(ItemSet({0, 2})) == 0.625);
  REQUIRE(lin(ItemSet{}) == 0.0);
  REQUIRE(lin.value_bound() == 0.5);
  REQUIRE_THROWS_AS(make_modular({-1.0}), std::invalid_argument);

  std::vector<TargetGroup> groups;
  groups.push_back({ItemSet({0, 1, 2}), 0.5});
  groups.push_back({ItemSet({1, 3}), 1.0});
  ValueOracle f = make_concave_over_targets(groups, concave_sqrt());
  REQUIRE(f(ItemSet{}) == 0.0);
  REQUIRE(f(ItemSet({1})) == 1.5);  // hits both groups once
  REQUIRE(f(ItemSet({0, 1})) == Catch::Approx(0.5 * std::sqrt(2.0) + 1.0).margin(1e-15));
  REQUIRE(f(ItemSet({1, 3})) == Catch::Approx(0.5 + std::sqrt(2.0)).margin(1e-15));
  REQUIRE(f.value_bound() == 1.5);  // item 1 sits in both groups

  ValueOracle capped = make_concave_over_targets({{ItemSet({0, 1, 2}), 2.0}},
                                                 concave_capped(2));
  REQUIRE(capped(ItemSet({0})) == 2.0);
  REQUIRE(capped(ItemSet({0, 1})) == 4.0);
  REQUIRE(capped(ItemSet({0, 1, 2})) == 4.0);  // saturates at the cap
}

TEST_CASE("position-discounted chain objective", "[core]") {
  GroundSet g = GroundSet::regular(2, 2);   // items 0,1 | 2,3
  std::vector<int> entity = {0, 1, 0, 1};   // item -> entity
  ValueOracle inner = make_modular({1.0, 1.0});

  ValueOracle f = make_discounted_positional(g, entity, inner, 0.8);
  REQUIRE(f(ItemSet{}) == 0.0);
  REQUIRE(f(ItemSet({0, 3})) == 0.8 * 1.0 + (0.8 * 0.8) * 1.0);  // = 1.44
  // Item 2 repeats entity 0, so the second slot adds nothing.
  REQUIRE(f(ItemSet({0, 2})) == 0.8);
  // An item only in the second slot is discounted twice.
  REQUIRE(f(ItemSet({3})) == 0.8 * 0.8);
  REQUIRE(f.value_bound() == 0.8 * 1.0);
  REQUIRE(f.monotone());
  REQUIRE(f.submodular());

  REQUIRE_THROWS_AS(f(ItemSet({0, 1})), std::invalid_argument);  // slot 0 twice
  REQUIRE_THROWS_AS(make_discounted_positional(g, {0, 1}, inner, 0.8),
                    std::invalid_argument);  // map size mismatch
  REQUIRE_THROWS_AS(discounted_positional_value(inner, 1.5, g, entity, ItemSet{}),
                    std::invalid_argument);
}

TEST_CASE("feasible enumeration and exhaustive optimum", "[core]") {
  GroundSet g({{0, 1}, {2}});
  int count = 0;
  std::vector<ItemSet> seen;
  for_each_feasible(g, 100, [&](ItemSet s) {
    ++count;
    seen.push_back(std::move(s));
  });
  REQUIRE(count == 6);  // (2+1) * (1+1), empty assignment included
  REQUIRE(std::find(seen.begin(), seen.end(), ItemSet{}) != seen.end());
  REQUIRE(std::find(seen.begin(), seen.end(), ItemSet({1, 2})) != seen.end());
  REQUIRE(std::find(seen.begin(), seen.end(), ItemSet({0, 1})) == seen.end());

  REQUIRE_THROWS_AS(for_each_feasible(g, 5, [](const ItemSet&) {}), cap_exceeded);

  // The two-slot trap instance: exhaustive search covers both viewers.
  GroundSet ab = GroundSet::regular(2, 2);
  ValueOracle f = make_weighted_coverage({0.45, 0.55}, {{0}, {1}, {}, {1}});
  OptResult opt = brute_force_opt(f, ab);
  REQUIRE(opt.best == ItemSet({0, 3}));
  REQUIRE(opt.value == 0.45 + 0.55);

  // Ties resolve to the lexicographically smallest assignment.
  GroundSet pair({{0, 1}});
  OptResult tie = brute_force_opt(make_modular({0.25, 0.25}), pair);
  REQUIRE(tie.best == ItemSet({0}));
}

TEST_CASE("structure check validates and refutes", "[core]") {
  GroundSet g = GroundSet::regular(2, 2);

  ValueOracle cov = make_weighted_coverage({0.45, 0.55}, {{0}, {1}, {}, {1}});
  StructureReport rep = check_monotone_submodular(cov, g);
  REQUIRE(rep.monotone);
  REQUIRE(rep.submodular);
  REQUIRE_FALSE(rep.monotone_witness.has_value());
  REQUIRE_FALSE(rep.submodular_witness.has_value());

  // |S|^2 grows superlinearly: monotone but not submodular.
  ValueOracle sq([](const ItemSet& s) { return static_cast<double>(s.size() * s.size()); },
                 true, true, 16.0);
  StructureReport sq_rep = check_monotone_submodular(sq, g);
  REQUIRE(sq_rep.monotone);
  REQUIRE_FALSE(sq_rep.submodular);
  REQUIRE(sq_rep.submodular_witness.has_value());
  {
    // The witness must actually exhibit increasing gains.
    const MarginalWitness& w = *sq_rep.submodular_witness;
    double small = sq(w.base.with(w.added)) - sq(w.base);
    double large = sq(w.superset.with(w.added)) - sq(w.superset);
    REQUIRE(small == w.small_gain);
    REQUIRE(large == w.large_gain);
    REQUIRE(large > small + 1e-9);
    REQUIRE_FALSE(w.superset.contains(w.added));
    REQUIRE(set_difference(w.base, w.superset).empty());  // nested
  }

  // Spike at singletons: not monotone (and the witness shows the drop).
  ValueOracle spike([](const ItemSet& s) { return s.size() == 1 ? 1.0 : 0.0; },
                    true, true, 1.0);
  StructureReport spike_rep = check_monotone_submodular(spike, g);
  REQUIRE_FALSE(spike_rep.monotone);
  REQUIRE(spike_rep.monotone_witness.has_value());
  REQUIRE(spike_rep.monotone_witness->small_gain < -1e-9);

  GroundSet big = GroundSet::regular(4, 5);  // 20 items > default cap of 14
  REQUIRE_THROWS_AS(check_monotone_submodular(cov, big), cap_exceeded);
}

TEST_CASE("random oracle families pass the structure check", "[core]") {
  Rng rng(derive_seed(41, "core-family-sweep"));
  for (int trial = 0; trial < 40; ++trial) {
    int n = 2 + rng.uniform_int(6);  // 2..7 items
    int m = 1 + rng.uniform_int(5);  // universe size
    std::vector<double> weights(m);
    for (double& w : weights) w = rng.uniform();
    std::vector<std::vector<int>> covers(n);
    for (auto& cov : covers)
      for (int e = 0; e < m; ++e)
        if (rng.bernoulli(0.4)) cov.push_back(e);
    ValueOracle f = make_weighted_coverage(weights, covers);

    // Split the items over one or two position classes.
    std::vector<std::vector<ItemId>> classes(n >= 4 ? 2 : 1);
    for (int v = 0; v < n; ++v) classes[v % classes.size()].push_back(v);
    for (auto& cls : classes) std::sort(cls.begin(), cls.end());
    GroundSet g(classes);

    StructureReport rep = check_monotone_submodular(f, g);
    REQUIRE(rep.monotone);
    REQUIRE(rep.submodular);
  }

  for (int trial = 0; trial < 20; ++trial) {
    int n = 2 + rng.uniform_int(5);
    std::vector<TargetGroup> groups;
    int gcount = 1 + rng.uniform_int(3);
    for (int i = 0; i < gcount; ++i) {
      std::vector<ItemId> ids;
      for (int v = 0; v < n; ++v)
        if (rng.bernoulli(0.5)) ids.push_back(v);
      groups.push_back({ItemSet(std::move(ids)), rng.uniform()});
    }
    ValueOracle f = make_concave_over_targets(groups, concave_sqrt());
    GroundSet g({[&] {
      std::vector<ItemId> all(n);
      for (int v = 0; v < n; ++v) all[v] = v;
      return all;
    }()});
    StructureReport rep = check_monotone_submodular(f, g);
    REQUIRE(rep.monotone);
    REQUIRE(rep.submodular);
  }
}
