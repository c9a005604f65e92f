#include <doctest.h>

#include <random>
#include <sstream>

#include "nntopo/error.hpp"
#include "nntopo/nng.hpp"
#include "oracles.hpp"

using namespace nntopo;

namespace {

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  const std::size_t d = r.begin()->size();
  Matrix m(r.size(), d);
  std::size_t i = 0;
  for (const auto& row : r) {
    std::size_t t = 0;
    for (double x : row) m(i, t++) = x;
    ++i;
  }
  return m;
}

std::vector<SampleIndex> list(const NeighbourGraph& g, std::size_t i) {
  const auto s = g.neighbours(i);
  return {s.begin(), s.end()};
}

}  // namespace

TEST_CASE("squared_distance") {
  const double a[] = {0, 0}, b[] = {3, 4};
  CHECK(squared_distance(a, b) == 25.0);
  const double x[] = {1, 2, 3}, y[] = {1, 2, 3.5};
  CHECK(squared_distance(x, x) == 0.0);
  CHECK(squared_distance(x, y) == 0.25);
  CHECK_THROWS_AS(squared_distance(a, x), ValidationError);

  std::mt19937_64 rng(3);
  for (std::size_t d : {1u, 7u, 8u, 9u, 31u, 128u}) {
    const auto m = oracle::gaussian(2, d, rng);
    CHECK(squared_distance(m.row(0), m.row(1)) == squared_distance(m.row(1), m.row(0)));
    long double ref = 0;
    for (std::size_t t = 0; t < d; ++t) {
      const long double diff = static_cast<long double>(m(0, t)) - m(1, t);
      ref += diff * diff;
    }
    CHECK(squared_distance(m.row(0), m.row(1)) ==
          doctest::Approx(static_cast<double>(ref)).epsilon(1e-13));
  }
}

TEST_CASE("build_knn_graph hand examples") {
  const auto line = rows({{0}, {1}, {3}});
  const auto g = build_knn_graph(line, 1);
  CHECK(list(g, 0) == std::vector<SampleIndex>{1});
  CHECK(list(g, 1) == std::vector<SampleIndex>{0});
  CHECK(list(g, 2) == std::vector<SampleIndex>{1});

  const auto corner = rows({{0, 0}, {1, 0}, {0, 1}});
  const auto t = build_knn_graph(corner, 1);
  CHECK(list(t, 0) == std::vector<SampleIndex>{1});
  // 1 and 2 are sqrt(2) apart; each one's nearest is 0.
  CHECK(list(t, 1) == std::vector<SampleIndex>{0});
  CHECK(list(t, 2) == std::vector<SampleIndex>{0});
  CHECK(list(build_knn_graph(corner, 2), 0) == std::vector<SampleIndex>{1, 2});

  SUBCASE("complete graph at k = n-1") {
    const auto pts = rows({{0}, {10}, {4}, {5}, {-1}});
    const auto full = build_knn_graph(pts, 4);
    CHECK(list(full, 0) == std::vector<SampleIndex>{4, 2, 3, 1});
    CHECK(list(full, 3) == std::vector<SampleIndex>{2, 0, 1, 4});
  }

  SUBCASE("duplicates tie by index") {
    const auto dup = rows({{2}, {2}, {2}, {0}});
    const auto gd = build_knn_graph(dup, 2);
    CHECK(list(gd, 0) == std::vector<SampleIndex>{1, 2});
    CHECK(list(gd, 2) == std::vector<SampleIndex>{0, 1});
    CHECK(list(gd, 3) == std::vector<SampleIndex>{0, 1});
  }
}

TEST_CASE("build_knn_graph rejects k out of range") {
  const auto pts = rows({{0}, {1}, {2}});
  CHECK_THROWS_AS(build_knn_graph(pts, 0), ValidationError);
  CHECK_THROWS_AS(build_knn_graph(pts, 3), ValidationError);
  CHECK_NOTHROW(build_knn_graph(pts, 2));
}

TEST_CASE("NeighbourGraph validates its invariants") {
  CHECK_NOTHROW(NeighbourGraph(3, 1, {1, 0, 1}));
  CHECK_THROWS_AS(NeighbourGraph(3, 1, {0, 0, 1}), ValidationError);      // self-loop
  CHECK_THROWS_AS(NeighbourGraph(3, 2, {1, 1, 0, 2, 0, 1}), ValidationError);  // duplicate
  CHECK_THROWS_AS(NeighbourGraph(3, 1, {1, 0, 5}), ValidationError);      // out of range
  CHECK_THROWS_AS(NeighbourGraph(3, 1, {1, 0}), ValidationError);         // short
  CHECK_THROWS_AS(NeighbourGraph(3, 3, std::vector<SampleIndex>(9)), ValidationError);
}

TEST_CASE("oracle equivalence on random data with ties") {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<std::size_t> nd(2, 120), dd(1, 16);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = nd(rng), d = dd(rng);
    Matrix x = trial % 2 ? oracle::gaussian(n, d, rng) : oracle::lattice(n, d, 2, rng);
    oracle::duplicate_rows(x, n / 5, rng);
    const std::size_t k = 1 + rng() % std::min<std::size_t>(n - 1, 20);
    CHECK(oracle::same_graph(build_knn_graph(x, k), oracle::knn(x, k)));
  }
}

TEST_CASE("output independent of threads and blocking") {
  std::mt19937_64 rng(5);
  Matrix x = oracle::lattice(150, 3, 3, rng);
  const auto ref = build_knn_graph(x, 7, {1, 16, 256});
  for (KnnOptions opt : {KnnOptions{4, 1, 1}, KnnOptions{3, 7, 13}, KnnOptions{8, 64, 1000}}) {
    CHECK(build_knn_graph(x, 7, opt) == ref);
  }
}

TEST_CASE("graph for k is a prefix of the graph for k+1") {
  std::mt19937_64 rng(8);
  Matrix x = oracle::lattice(60, 4, 2, rng);
  auto prev = build_knn_graph(x, 1);
  for (std::size_t k = 2; k < 60; k += 3) {
    const auto g = build_knn_graph(x, k);
    CHECK(g.prefix(prev.k()) == prev);
    CHECK(g.prefix(k) == g);
    prev = g;
  }
  CHECK_THROWS_AS(prev.prefix(0), ValidationError);
  CHECK_THROWS_AS(prev.prefix(prev.k() + 1), ValidationError);
}

TEST_CASE("isometry and positive scaling leave the graph unchanged") {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> cd(0.01, 100.0);
  for (int trial = 0; trial < 10; ++trial) {
    const auto x = oracle::gaussian(80, 6, rng);
    REQUIRE(oracle::min_relative_gap(x) > 1e-10);
    const auto g = build_knn_graph(x, 5);
    const auto q = oracle::orthogonal(6, rng);
    const std::vector<double> shift = {3, -2, 10, 0.5, -7, 1};
    CHECK(build_knn_graph(oracle::rigid_motion(x, q, shift), 5) == g);
    CHECK(build_knn_graph(oracle::scaled(x, cd(rng)), 5) == g);
  }
}

TEST_CASE("to_undirected applies the union rule") {
  const NeighbourGraph line(3, 1, {1, 0, 1});
  const auto e = to_undirected(line);
  REQUIRE(e.size() == 2);
  CHECK(e.edges()[0] == SamplePair{0, 1});
  CHECK(e.edges()[1] == SamplePair{1, 2});
  CHECK(e.contains({2, 1}));
  CHECK_FALSE(e.contains({0, 2}));

  // 0<->1, 2<->3: every edge reciprocated.
  CHECK(to_undirected(NeighbourGraph(4, 1, {1, 0, 3, 2})).size() == 2);
  // Directed 3-cycle: nothing reciprocated.
  CHECK(to_undirected(NeighbourGraph(3, 1, {1, 2, 0})).size() == 3);

  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 10 + trial * 3, k = 1 + trial % 6;
    const auto g = build_knn_graph(oracle::gaussian(n, 3, rng), k);
    const auto u = to_undirected(g);
    CHECK(u.size() >= (n * k + 1) / 2);
    CHECK(u.size() <= n * k);
    CHECK(u.size() == oracle::undirected_count(g));
  }
}

TEST_CASE("UndirectedEdgeSet rejects non-canonical edges") {
  CHECK_THROWS_AS(UndirectedEdgeSet(3, {{1, 0}}), ValidationError);
  CHECK_THROWS_AS(UndirectedEdgeSet(3, {{0, 3}}), ValidationError);
  CHECK_THROWS_AS(UndirectedEdgeSet(3, {{1, 2}, {0, 1}}), ValidationError);
}

TEST_CASE("graph CSV dump") {
  const auto line = rows({{0}, {1}, {3}});
  std::ostringstream out;
  write_graph_csv(out, build_knn_graph(line, 1), line);
  CHECK(out.str() ==
        "sample_index,rank,neighbour_index,distance\n"
        "0,0,1,1\n1,0,0,1\n2,0,1,2\n");
}
