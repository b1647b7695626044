#pragma once

// Plain-text instance files.
//
// Line-oriented, whitespace-separated, '#' starts a comment. Layout:
//
//   K n                      header: positions, items
//   <id> <position>          n lines, ids dense 0..n-1
//   objective <family>       then the family's block (see README)
//   bound <g>                optional override of the declared value bound
//   matroid uniform <r>      optional; default is the partition matroid
//   matroid explicit <cnt>   followed by cnt lines: set <size> <id...>
//
// Families: coverage, modular, concave, discounted.

#include <fstream>
#include <istream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "submax/core.hpp"
#include "submax/matroid.hpp"

namespace submax {

struct parse_error : std::runtime_error {
  int line;
  parse_error(int line_no, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg),
        line(line_no) {}
};

struct Instance {
  GroundSet ground;
  ValueOracle objective;
  std::shared_ptr<const MatroidOracle> matroid;  // never null
  std::string objective_name;
};

namespace detail {

// Comment-stripping, line-counting token reader.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  // Next non-empty line as a token stream; false at end of input.
  bool next(std::istringstream& out) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream probe(line);
      std::string word;
      if (probe >> word) {
        out = std::istringstream(line);
        return true;
      }
    }
    return false;
  }

  int line_no() const { return line_no_; }

  [[noreturn]] void fail(const std::string& msg) const { throw parse_error(line_no_, msg); }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

template <class T>
T expect(LineReader& r, std::istringstream& in, const std::string& what) {
  T value;
  if (!(in >> value)) r.fail("expected " + what);
  return value;
}

inline std::istringstream expect_line(LineReader& r, const std::string& what) {
  std::istringstream in;
  if (!r.next(in)) r.fail("unexpected end of file, expected " + what);
  return in;
}

inline std::vector<double> expect_doubles(LineReader& r, std::istringstream& in, int count,
                                          const std::string& what) {
  std::vector<double> out(count);
  for (int i = 0; i < count; ++i) out[i] = expect<double>(r, in, what);
  return out;
}

inline std::vector<int> expect_id_list(LineReader& r, std::istringstream& in) {
  int count = expect<int>(r, in, "an id count");
  if (count < 0) r.fail("id count must be >= 0");
  std::vector<int> ids(count);
  for (int i = 0; i < count; ++i) ids[i] = expect<int>(r, in, "an id");
  return ids;
}

}  // namespace detail

inline Instance parse_instance(std::istream& input) {
  using detail::expect;
  using detail::expect_doubles;
  using detail::expect_id_list;
  using detail::expect_line;

  detail::LineReader r(input);

  auto header = expect_line(r, "header 'K n'");
  const int K = expect<int>(r, header, "position count K");
  const int n = expect<int>(r, header, "item count n");
  if (K < 1 || n < 0) r.fail("header must have K >= 1 and n >= 0");

  std::vector<std::vector<ItemId>> positions(K);
  for (int i = 0; i < n; ++i) {
    auto line = expect_line(r, "an item line '<id> <position>'");
    const int id = expect<int>(r, line, "an item id");
    const int k = expect<int>(r, line, "a position index");
    if (id < 0 || id >= n) r.fail("item id out of range 0..n-1");
    if (k < 0 || k >= K) r.fail("position index out of range 0..K-1");
    positions[k].push_back(id);
  }
  std::optional<GroundSet> ground;
  try {
    ground.emplace(std::move(positions));
  } catch (const std::invalid_argument& e) {
    r.fail(e.what());
  }

  auto obj_line = expect_line(r, "'objective <family>'");
  std::string word = expect<std::string>(r, obj_line, "'objective'");
  if (word != "objective") r.fail("expected 'objective <family>'");
  const std::string family = expect<std::string>(r, obj_line, "a family name");

  ValueOracle oracle;
  if (family == "coverage" || family == "discounted") {
    double gamma = 0.0;
    std::vector<int> entity_of;
    int entities = n;
    if (family == "discounted") {
      auto gline = expect_line(r, "'gamma <g>'");
      if (expect<std::string>(r, gline, "'gamma'") != "gamma") r.fail("expected 'gamma <g>'");
      gamma = expect<double>(r, gline, "a gamma value");
      auto eline = expect_line(r, "'entities <count>'");
      if (expect<std::string>(r, eline, "'entities'") != "entities")
        r.fail("expected 'entities <count>'");
      entities = expect<int>(r, eline, "an entity count");
      if (entities < 1) r.fail("entity count must be >= 1");
      entity_of.assign(n, -1);
      for (int i = 0; i < n; ++i) {
        auto line = expect_line(r, "'entity <item-id> <entity-id>'");
        if (expect<std::string>(r, line, "'entity'") != "entity")
          r.fail("expected 'entity <item-id> <entity-id>'");
        int id = expect<int>(r, line, "an item id");
        int e = expect<int>(r, line, "an entity id");
        if (id < 0 || id >= n) r.fail("item id out of range");
        if (e < 0 || e >= entities) r.fail("entity id out of range");
        if (entity_of[id] != -1) r.fail("duplicate entity mapping for item " + std::to_string(id));
        entity_of[id] = e;
      }
    }
    auto uline = expect_line(r, "'universe <m>'");
    if (expect<std::string>(r, uline, "'universe'") != "universe")
      r.fail("expected 'universe <m>'");
    const int m = expect<int>(r, uline, "a universe size");
    if (m < 0) r.fail("universe size must be >= 0");
    auto wline = expect_line(r, "'weights <w...>'");
    if (expect<std::string>(r, wline, "'weights'") != "weights")
      r.fail("expected 'weights <w...>'");
    std::vector<double> weights = expect_doubles(r, wline, m, "a weight");
    std::vector<std::vector<int>> covers(family == "coverage" ? n : entities);
    std::vector<char> seen(covers.size(), 0);
    for (std::size_t i = 0; i < covers.size(); ++i) {
      auto line = expect_line(r, "'covers <id> <count> <elements...>'");
      if (expect<std::string>(r, line, "'covers'") != "covers")
        r.fail("expected 'covers <id> <count> <elements...>'");
      int id = expect<int>(r, line, "an id");
      if (id < 0 || id >= static_cast<int>(covers.size())) r.fail("covers id out of range");
      if (seen[id]) r.fail("duplicate covers line for id " + std::to_string(id));
      seen[id] = 1;
      covers[id] = expect_id_list(r, line);
      for (int e : covers[id])
        if (e < 0 || e >= m) r.fail("covered element out of range");
    }
    try {
      ValueOracle g = make_weighted_coverage(std::move(weights), std::move(covers));
      oracle = family == "coverage"
                   ? std::move(g)
                   : make_discounted_positional(*ground, std::move(entity_of), std::move(g),
                                                gamma);
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  } else if (family == "modular") {
    auto wline = expect_line(r, "'weights <w...>'");
    if (expect<std::string>(r, wline, "'weights'") != "weights")
      r.fail("expected 'weights <w...>'");
    std::vector<double> weights = expect_doubles(r, wline, n, "a weight");
    try {
      oracle = make_modular(std::move(weights));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  } else if (family == "concave") {
    auto sline = expect_line(r, "'shape sqrt|capped <cap>|linear <slope>'");
    if (expect<std::string>(r, sline, "'shape'") != "shape")
      r.fail("expected 'shape sqrt|capped <cap>|linear <slope>'");
    std::string shape_name = expect<std::string>(r, sline, "a shape name");
    ConcaveShape shape;
    if (shape_name == "sqrt") shape = concave_sqrt();
    else if (shape_name == "capped") shape = concave_capped(expect<int>(r, sline, "a cap"));
    else if (shape_name == "linear") shape = concave_linear(expect<double>(r, sline, "a slope"));
    else r.fail("unknown shape '" + shape_name + "'");
    auto gline = expect_line(r, "'groups <count>'");
    if (expect<std::string>(r, gline, "'groups'") != "groups")
      r.fail("expected 'groups <count>'");
    int count = expect<int>(r, gline, "a group count");
    if (count < 0) r.fail("group count must be >= 0");
    std::vector<TargetGroup> groups;
    for (int i = 0; i < count; ++i) {
      auto line = expect_line(r, "'group <weight> <count> <ids...>'");
      if (expect<std::string>(r, line, "'group'") != "group")
        r.fail("expected 'group <weight> <count> <ids...>'");
      TargetGroup grp;
      grp.weight = expect<double>(r, line, "a weight");
      std::vector<int> ids = expect_id_list(r, line);
      for (int id : ids)
        if (id < 0 || id >= n) r.fail("group item id out of range");
      grp.targets = ItemSet(std::move(ids));
      groups.push_back(std::move(grp));
    }
    try {
      oracle = make_concave_over_targets(std::move(groups), std::move(shape));
    } catch (const std::invalid_argument& e) {
      r.fail(e.what());
    }
  } else {
    r.fail("unknown objective family '" + family + "'");
  }

  Instance inst{std::move(*ground), std::move(oracle), nullptr, family};

  // Optional trailing sections, any order.
  std::istringstream line;
  while (r.next(line)) {
    std::string key = expect<std::string>(r, line, "a section keyword");
    if (key == "bound") {
      double b = expect<double>(r, line, "a bound");
      if (!(b >= 0.0)) r.fail("bound must be >= 0");
      inst.objective = inst.objective.with_value_bound(b);
    } else if (key == "matroid") {
      std::string kind = expect<std::string>(r, line, "a matroid kind");
      if (kind == "partition") {
        inst.matroid = std::make_shared<PartitionMatroid>(inst.ground);
      } else if (kind == "uniform") {
        int rank = expect<int>(r, line, "a rank");
        if (rank < 0) r.fail("rank must be >= 0");
        inst.matroid = std::make_shared<UniformMatroid>(n, rank);
      } else if (kind == "explicit") {
        int count = expect<int>(r, line, "a set count");
        if (count < 1) r.fail("explicit matroid needs at least one set");
        std::vector<ItemSet> maximal;
        for (int i = 0; i < count; ++i) {
          auto sline = expect_line(r, "'set <count> <ids...>'");
          if (expect<std::string>(r, sline, "'set'") != "set")
            r.fail("expected 'set <count> <ids...>'");
          std::vector<int> ids = expect_id_list(r, sline);
          for (int id : ids)
            if (id < 0 || id >= n) r.fail("set item id out of range");
          maximal.push_back(ItemSet(std::move(ids)));
        }
        inst.matroid = std::make_shared<ExplicitMatroid>(n, std::move(maximal));
      } else {
        r.fail("unknown matroid kind '" + kind + "'");
      }
    } else {
      r.fail("unknown section '" + key + "'");
    }
  }

  if (!inst.matroid) inst.matroid = std::make_shared<PartitionMatroid>(inst.ground);
  return inst;
}

inline Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  return parse_instance(in);
}

}  // namespace submax
