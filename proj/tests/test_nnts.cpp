#include <doctest.h>

#include <numeric>
#include <random>

#include "nntopo/error.hpp"
#include "nntopo/nnts.hpp"
#include "oracles.hpp"

using namespace nntopo;

namespace {

std::vector<NeighbourGraph> graphs_of(const ActivationChain& chain, std::size_t k) {
  std::vector<NeighbourGraph> out;
  for (const auto& layer : chain) out.push_back(build_knn_graph(layer, k));
  return out;
}

}  // namespace

TEST_CASE("nnts_sample") {
  const SampleIndex a[] = {1, 2, 3}, b[] = {2, 3, 4};
  CHECK(nnts_sample(a, b) == 0.5);
  CHECK(nnts_sample(a, a) == 1.0);
  const SampleIndex c[] = {1, 2}, d[] = {3, 4};
  CHECK(nnts_sample(c, d) == 0.0);
  // Order is ignored.
  const SampleIndex e[] = {3, 1, 2};
  CHECK(nnts_sample(a, e) == 1.0);
  CHECK_THROWS_AS(nnts_sample({}, a), ValidationError);
  const SampleIndex dup[] = {1, 1};
  CHECK_THROWS_AS(nnts_sample(dup, c), ValidationError);
}

TEST_CASE("nnts_pair") {
  std::mt19937_64 rng(1);
  const auto chain = oracle::random_chain(40, 4, 2, 0.5, rng);
  const auto g = graphs_of(chain, 6);
  CHECK(nnts_pair(g[0], g[0]) == 1.0);

  SUBCASE("k = n-1 converges to one") {
    const auto full = graphs_of(chain, 39);
    CHECK(nnts_pair(full[0], full[1]) == 1.0);
  }
  SUBCASE("n = 2 forces identical structure") {
    const NeighbourGraph a(2, 1, {1, 0}), b(2, 1, {1, 0});
    CHECK(nnts_pair(a, b) == 1.0);
  }
  SUBCASE("hand example") {
    // Sample 0: {1,2} vs {1,3} -> 1/3; sample 1: {0,2} vs {0,2} -> 1;
    // sample 2: {0,1} vs {1,3} -> 1/3; sample 3: {0,1} vs {0,1} -> 1.
    const NeighbourGraph a(4, 2, {1, 2, 0, 2, 0, 1, 0, 1});
    const NeighbourGraph b(4, 2, {3, 1, 2, 0, 3, 1, 1, 0});
    CHECK(nnts_pair(a, b) == doctest::Approx((1.0 / 3 + 1 + 1.0 / 3 + 1) / 4).epsilon(1e-15));
  }
  SUBCASE("mismatches") {
    const NeighbourGraph small(2, 1, {1, 0});
    CHECK_THROWS_AS(nnts_pair(g[0], small), ValidationError);
    CHECK_THROWS_AS(nnts_pair(g[0], g[0].prefix(3)), ValidationError);
  }
}

TEST_CASE("nnts_matrix") {
  SUBCASE("single layer") {
    const NeighbourGraph g(3, 1, {1, 0, 1});
    const auto m = nnts_matrix(std::vector<NeighbourGraph>{g}, {"I"});
    REQUIRE(m.layers() == 1);
    CHECK(m(0, 0) == 1.0);
    CHECK(m.k == 1);
  }
  SUBCASE("identical layers give all ones") {
    std::mt19937_64 rng(2);
    const auto x = oracle::gaussian(30, 3, rng);
    const auto chain = oracle::chain_of({x, x, x, x});
    const auto m = nnts_matrix(graphs_of(chain, 4));
    for (double q : m.values) CHECK(q == 1.0);
  }
  SUBCASE("matches the from-scratch oracle") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 10; ++trial) {
      const auto chain = oracle::random_chain(50, 5, 3, 0.8, rng);
      const auto graphs = graphs_of(chain, 1 + trial);
      const auto m = nnts_matrix(graphs, chain.names(), 1 + trial % 3);
      const auto ref = oracle::nnts(graphs);
      for (std::size_t c = 0; c < ref.size(); ++c) {
        CHECK(std::abs(m.values[c] - ref[c]) <= 1e-12);
      }
    }
  }
  SUBCASE("errors") {
    const NeighbourGraph a(3, 1, {1, 0, 1}), b(4, 1, {1, 0, 1, 2});
    CHECK_THROWS_AS(nnts_matrix(std::vector<NeighbourGraph>{a, b}), ValidationError);
    const NeighbourGraph c(3, 2, {1, 2, 0, 2, 0, 1});
    CHECK_THROWS_AS(nnts_matrix(std::vector<NeighbourGraph>{a, c}), ValidationError);
    CHECK_THROWS_AS(nnts_matrix(std::vector<NeighbourGraph>{}), ValidationError);
    CHECK_THROWS_AS(nnts_matrix(std::vector<NeighbourGraph>{a}, {"x", "y"}), ValidationError);
  }
}

TEST_CASE("nnts_matrix properties") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 20 + trial * 5;
    const auto chain = oracle::random_chain(n, 4, 4, 0.3 + 0.1 * trial, rng);
    const std::size_t k = 1 + trial % 9;
    const auto graphs = graphs_of(chain, k);
    const auto m = nnts_matrix(graphs);
    for (std::size_t a = 0; a < 4; ++a) {
      CHECK(m(a, a) == 1.0);
      for (std::size_t b = 0; b < 4; ++b) {
        CHECK(m(a, b) == m(b, a));
        CHECK(m(a, b) >= 0.0);
        CHECK(m(a, b) <= 1.0);
      }
    }

    // Relabel samples consistently in every layer.
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<Matrix> permuted;
    for (const auto& layer : chain) {
      Matrix p(n, layer.features());
      for (std::size_t i = 0; i < n; ++i) {
        std::copy(layer.data.row(perm[i]).begin(), layer.data.row(perm[i]).end(),
                  p.row(i).begin());
      }
      permuted.push_back(std::move(p));
    }
    const auto mp = nnts_matrix(graphs_of(oracle::chain_of(std::move(permuted)), k));
    for (std::size_t c = 0; c < m.values.size(); ++c) {
      // Lattice-free gaussian data: tie order is irrelevant, sums may reorder.
      CHECK(mp.values[c] == doctest::Approx(m.values[c]).epsilon(1e-12));
    }

    const auto full = nnts_matrix(graphs_of(chain, n - 1));
    for (double q : full.values) CHECK(q == 1.0);
  }
}
