#include <gtest/gtest.h>

#include "wsm/catalog.hpp"
#include "wsm/generators.hpp"
#include "wsm/oracles.hpp"
#include "wsm/rankwidth.hpp"
#include "wsm/split.hpp"

using namespace wsm;

TEST(CutRank, FiveCycleFigureEdge) {
  // vertices a..e = 0..4 around the cycle
  EXPECT_EQ(cut_rank(cycle_graph(5), make_set(5, {3, 4})), 2);
}

TEST(CutRank, EmptyAndFull) {
  const Graph g = complete_graph(4);
  EXPECT_EQ(cut_rank(g, g.empty_set()), 0);
  EXPECT_EQ(cut_rank(g, g.full_set()), 0);
}

TEST(RankWidth, FiveCycle) {
  const auto r = rank_width_exact(cycle_graph(5));
  EXPECT_EQ(r.width, 2);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(decomposition_width(cycle_graph(5), *r.witness), 2);
  EXPECT_EQ(oracle::exhaustive_rank_width(cycle_graph(5)), 2);
}

TEST(RankWidth, EdgelessAndComplete) {
  EXPECT_EQ(rank_width_exact(edgeless_graph(5)).width, 0);
  EXPECT_EQ(rank_width_exact(complete_graph(4)).width, 1);
  EXPECT_EQ(oracle::exhaustive_rank_width(complete_graph(4)), 1);
}

TEST(RankWidth, TinyGraphs) {
  EXPECT_EQ(rank_width_exact(Graph(0)).width, 0);
  const auto one = rank_width_exact(Graph(1));
  EXPECT_EQ(one.width, 0);
  ASSERT_TRUE(one.witness);
  EXPECT_EQ(one.witness->node_count(), 1u);
  EXPECT_EQ(rank_width_exact(complete_graph(2)).width, 1);
}

TEST(RankWidth, CapacityAndCap) {
  EXPECT_THROW(rank_width_exact(path_graph(17)), CapacityError);
  EXPECT_EQ(rank_width_exact(path_graph(17), {20, std::nullopt}).width, 1);
  const auto capped = rank_width_exact(cycle_graph(5), {16, 1});
  EXPECT_TRUE(capped.exceeds_cap);
  EXPECT_FALSE(capped.witness);
  EXPECT_EQ(rank_width_exact(cycle_graph(5), {16, 2}).width, 2);
}

TEST(RankWidth, WitnessShape) {
  Rng rng(3);
  for (int it = 0; it < 30; ++it) {
    const Graph g = random_graph(rng, 2 + uniform_index(rng, 9), 0.5);
    const auto r = rank_width_exact(g);
    ASSERT_TRUE(r.witness);
    const auto& d = *r.witness;
    for (const auto& nb : d.tree) EXPECT_TRUE(nb.size() == 1 || nb.size() == 3);
    EXPECT_EQ(decomposition_width(g, d), r.width);
  }
}

TEST(RankWidthProperties, SymmetryAndSubmodularity) {
  Rng rng(11);
  for (int it = 0; it < 300; ++it) {
    const std::size_t n = 1 + uniform_index(rng, 10);
    const Graph g = random_graph(rng, n, 0.45);
    VertexSet x(n), y(n);
    for (std::size_t v = 0; v < n; ++v) {
      x.set(v, rng() & 1U);
      y.set(v, rng() & 1U);
    }
    EXPECT_EQ(cut_rank(g, x), cut_rank(g, ~x));
    EXPECT_GE(cut_rank(g, x) + cut_rank(g, y), cut_rank(g, x & y) + cut_rank(g, x | y));
  }
}

TEST(RankWidthProperties, MatchesTreeEnumeration) {
  Rng rng(5);
  for (int it = 0; it < 60; ++it) {
    const Graph g = random_graph(rng, 2 + uniform_index(rng, 6), 0.5);
    EXPECT_EQ(rank_width_exact(g).width, oracle::exhaustive_rank_width(g));
  }
}

TEST(RankWidthProperties, IsomorphismInvariant) {
  Rng rng(9);
  for (int it = 0; it < 40; ++it) {
    const std::size_t n = 3 + uniform_index(rng, 8);
    const Graph g = random_graph(rng, n, 0.5);
    std::vector<Vertex> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_EQ(rank_width_exact(g).width, rank_width_exact(relabel(g, perm)).width);
  }
}

TEST(RankWidthProperties, SplitComponentsAgree) {
  Rng rng(13);
  for (int it = 0; it < 80; ++it) {
    const Graph g = random_graph(rng, 2 + uniform_index(rng, 11), 0.35);
    const auto direct = rank_width_exact(g).width;
    EXPECT_EQ(rank_width_via_splits(g).width, direct);
    for (int cap = 0; cap <= 3; ++cap) EXPECT_EQ(rank_width_at_most(g, cap), direct <= cap);
  }
}

TEST(Catalog, Counts) {
  // number of graphs on m vertices up to isomorphism
  const std::size_t expected[] = {1, 1, 2, 4, 11, 34, 156};
  for (std::size_t m = 0; m < 7; ++m) EXPECT_EQ(graph_catalog(m).size(), expected[m]);
}
