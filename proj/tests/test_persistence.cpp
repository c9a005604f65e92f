#include <doctest.h>

#include <random>

#include "nntopo/error.hpp"
#include "nntopo/persistence.hpp"
#include "oracles.hpp"

using namespace nntopo;

namespace {

std::vector<std::pair<std::size_t, std::size_t>> spans(const std::string& bits) {
  const auto mask = LayerMask::from_string(bits);
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (const auto& r : maximal_runs({{0, 1}, mask.view()})) out.emplace_back(r.start, r.end);
  return out;
}

bool alpha(const std::string& bits, std::size_t a, std::size_t b, std::size_t al) {
  const auto mask = LayerMask::from_string(bits);
  return is_alpha_persistent({{0, 1}, mask.view()}, a, b, al);
}

using Spans = std::vector<std::pair<std::size_t, std::size_t>>;

std::vector<NeighbourGraph> graphs_of(const ActivationChain& chain, std::size_t k) {
  std::vector<NeighbourGraph> out;
  for (const auto& layer : chain) out.push_back(build_knn_graph(layer, k));
  return out;
}

PresenceTable table_of(const std::vector<NeighbourGraph>& graphs) {
  std::vector<UndirectedEdgeSet> sets;
  for (const auto& g : graphs) sets.push_back(to_undirected(g));
  return collect_presence(sets);
}

}  // namespace

TEST_CASE("LayerMask literals") {
  const auto m = LayerMask::from_string("10100");
  CHECK(m.layers() == 5);
  CHECK(m.test(0));
  CHECK_FALSE(m.test(1));
  CHECK(m.test(2));
  CHECK(m.to_string() == "10100");
  CHECK_THROWS_AS(LayerMask::from_string("10x"), ValidationError);
  std::string wide(130, '0');
  wide[0] = wide[64] = wide[129] = '1';
  CHECK(LayerMask::from_string(wide).to_string() == wide);
}

TEST_CASE("collect_presence") {
  // Layers 0 and 2 hold {0,1}; layer 1 holds {1,2}.
  const UndirectedEdgeSet l0(3, {{0, 1}}), l1(3, {{1, 2}}), l2(3, {{0, 1}});
  const std::vector<UndirectedEdgeSet> sets = {l0, l1, l2};
  const auto t = collect_presence(sets);
  REQUIRE(t.size() == 2);
  CHECK(t[0].pair == SamplePair{0, 1});
  CHECK(LayerMask::from_string("101").view().words()[0] == t[0].mask.words()[0]);
  CHECK(t[1].pair == SamplePair{1, 2});
  CHECK(t[1].mask.test(1));
  CHECK_FALSE(t[1].mask.test(0));
  CHECK(t.layer_edge_counts()[1] == 1);

  SUBCASE("single layer") {
    const std::vector<UndirectedEdgeSet> one = {UndirectedEdgeSet(4, {{0, 1}, {0, 3}, {2, 3}})};
    const auto t1 = collect_presence(one);
    REQUIRE(t1.size() == 3);
    for (std::size_t e = 0; e < 3; ++e) {
      CHECK(t1[e].mask.layers() == 1);
      CHECK(t1[e].mask.test(0));
    }
  }
  SUBCASE("errors") {
    const std::vector<UndirectedEdgeSet> mixed = {UndirectedEdgeSet(3, {}), UndirectedEdgeSet(4, {})};
    CHECK_THROWS_AS(collect_presence(mixed), ValidationError);
    PresenceTable table(3, 2);
    table.add_layer(0, l0);
    CHECK_THROWS_AS(table.add_layer(0, l0), ValidationError);
    CHECK_THROWS_AS(table.add_layer(5, l0), ValidationError);
  }
  SUBCASE("more than 64 layers") {
    std::vector<UndirectedEdgeSet> many;
    for (std::size_t v = 0; v < 70; ++v) {
      many.push_back(v % 3 == 0 ? UndirectedEdgeSet(2, {{0, 1}}) : UndirectedEdgeSet(2, {}));
    }
    const auto tm = collect_presence(many);
    REQUIRE(tm.size() == 1);
    CHECK(maximal_runs(tm[0]).size() == 24);
    CHECK(tm[0].mask.test(69));
    CHECK_FALSE(tm[0].mask.test(68));
  }
}

TEST_CASE("maximal_runs") {
  CHECK(spans("10100") == Spans{{0, 0}, {2, 2}});
  CHECK(spans("11111") == Spans{{0, 4}});
  CHECK(spans("01110") == Spans{{1, 3}});
  CHECK(spans("00000").empty());
  CHECK(spans("1") == Spans{{0, 0}});
  CHECK(spans("110011") == Spans{{0, 1}, {4, 5}});
}

TEST_CASE("is_alpha_persistent") {
  CHECK_FALSE(alpha("101", 0, 2, 0));
  CHECK(alpha("101", 0, 2, 1));
  for (std::size_t a = 0; a < 3; ++a) {
    for (std::size_t b = a; b < 3; ++b) CHECK(alpha("111", a, b, 0));
  }
  // Endpoints must hold the edge regardless of alpha.
  CHECK_FALSE(alpha("011", 0, 2, 1));
  CHECK_FALSE(alpha("110", 0, 2, 5));
  CHECK(alpha("1001", 0, 3, 2));
  CHECK_FALSE(alpha("1001", 0, 3, 1));
  CHECK_THROWS_AS(alpha("111", 2, 1, 0), ValidationError);
  CHECK_THROWS_AS(alpha("111", 0, 3, 0), ValidationError);
}

TEST_CASE("alpha-persistence properties over all short masks") {
  for (std::size_t l = 1; l <= 8; ++l) {
    for (unsigned bits = 1; bits < (1u << l); ++bits) {
      std::string s(l, '0');
      for (std::size_t v = 0; v < l; ++v) if (bits >> v & 1u) s[v] = '1';
      const auto mask = LayerMask::from_string(s);
      const EdgePresence p{{0, 1}, mask.view()};
      const auto runs = maximal_runs(p);
      for (std::size_t r = 1; r < runs.size(); ++r) {
        CHECK(runs[r].start > runs[r - 1].end + 1);  // never adjacent or overlapping
      }
      for (std::size_t a = 0; a < l; ++a) {
        for (std::size_t b = a; b < l; ++b) {
          bool in_run = false;
          for (const auto& r : runs) in_run |= r.start <= a && b <= r.end;
          CHECK(is_alpha_persistent(p, a, b, 0) == in_run);
          for (std::size_t al = 0; al < l; ++al) {
            if (is_alpha_persistent(p, a, b, al)) CHECK(is_alpha_persistent(p, a, b, al + 1));
          }
        }
      }
    }
  }
}

TEST_CASE("persistence_matrix examples") {
  SUBCASE("fully persistent edge") {
    PresenceTable t(2, 5);
    for (std::size_t v = 0; v < 5; ++v) t.add_layer(v, UndirectedEdgeSet(2, {{0, 1}}));
    const auto m = persistence_matrix(t);
    for (std::size_t a = 0; a < 5; ++a) {
      for (std::size_t b = 0; b < 5; ++b) CHECK(m(a, b) == (a == 0 && b == 4 ? 1u : 0u));
    }
  }
  SUBCASE("reappearing edge counts twice") {
    PresenceTable t(2, 5);
    for (std::size_t v = 0; v < 5; ++v) {
      t.add_layer(v, v == 0 || v == 2 ? UndirectedEdgeSet(2, {{0, 1}}) : UndirectedEdgeSet(2, {}));
    }
    const auto m = persistence_matrix(t);
    CHECK(m(0, 0) == 1);
    CHECK(m(2, 2) == 1);
    CHECK(m.run_length_total() == 2);
  }
  SUBCASE("layers may arrive out of order") {
    PresenceTable t(3, 3);
    t.add_layer(2, UndirectedEdgeSet(3, {{0, 1}}));
    t.add_layer(0, UndirectedEdgeSet(3, {{0, 1}, {1, 2}}));
    t.add_layer(1, UndirectedEdgeSet(3, {{1, 2}}));
    const auto m = persistence_matrix(t);
    CHECK(m(0, 0) == 1);
    CHECK(m(2, 2) == 1);
    CHECK(m(0, 1) == 1);
  }
}

TEST_CASE("persistence_matrix matches the per-pair oracle") {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const auto chain = oracle::random_chain(30, 3, 4, 0.4, rng);
    const auto graphs = graphs_of(chain, 3);
    const auto table = table_of(graphs);
    const auto m = persistence_matrix(table, chain.names(), 1 + trial % 4);
    CHECK(m.counts == oracle::persistence(graphs));
    CHECK_NOTHROW(check_conservation(m, table, 3));
    std::size_t edges = 0;
    for (const auto& g : graphs) edges += oracle::undirected_count(g);
    CHECK(m.run_length_total() == edges);
  }
}

TEST_CASE("check_conservation catches tampering") {
  std::mt19937_64 rng(5);
  const auto chain = oracle::random_chain(25, 3, 3, 0.5, rng);
  const auto table = table_of(graphs_of(chain, 2));
  auto m = persistence_matrix(table);
  CHECK_NOTHROW(check_conservation(m, table, 2));
  auto shifted = m;
  shifted.counts[0] += 1;
  CHECK_THROWS_AS(check_conservation(shifted, table, 2), InvariantError);
  auto below = m;
  below.counts[1 * 3 + 0] = 1;
  CHECK_THROWS_AS(check_conservation(below, table, 2), InvariantError);
  // Wrong k breaks the per-layer edge-count bound.
  CHECK_THROWS_AS(check_conservation(m, table, 20), InvariantError);
}
