#include <random>

#include <gtest/gtest.h>

#include "wsm/generators.hpp"
#include "wsm/gf2.hpp"
#include "wsm/graph.hpp"
#include "wsm/graph_io.hpp"

using namespace wsm;

TEST(ParseGr, SingleEdge) {
  const Graph g = parse_gr("p graph 2 1\n1 2\n");
  EXPECT_EQ(g.order(), 2u);
  EXPECT_EQ(g.edge_count(), 1u);
  EXPECT_TRUE(g.adjacent(0, 1));
}

TEST(ParseGr, FiveCycle) {
  const Graph g = parse_gr("p graph 5 5\n1 2\n2 3\n3 4\n4 5\n5 1\n");
  EXPECT_EQ(g, cycle_graph(5));
}

TEST(ParseGr, Edgeless) {
  const Graph g = parse_gr("p graph 3 0\n");
  EXPECT_EQ(g.order(), 3u);
  EXPECT_EQ(g.edge_count(), 0u);
}

TEST(ParseGr, CommentsNameAndNoTrailingNewline) {
  const Graph g = parse_gr("c name tri\nc hello\np graph 3 3\n1 2\n2 3\n3 1");
  EXPECT_EQ(g.name(), "tri");
  EXPECT_EQ(g, complete_graph(3));
}

TEST(ParseGr, DuplicatesCollapse) {
  const Graph g = parse_gr("p graph 2 2\n1 2\n2 1\n");
  EXPECT_EQ(g.edge_count(), 1u);
}

TEST(ParseGr, ErrorsNameTheLine) {
  auto line_of = [](const char* text) {
    try {
      parse_gr(std::string_view(text));
    } catch (const ParseError& e) {
      return e.line();
    }
    return std::size_t{0};
  };
  EXPECT_EQ(line_of("p graph x 1\n"), 1u);
  EXPECT_EQ(line_of("c ok\np graph 2 1\n1 3\n"), 3u);
  EXPECT_EQ(line_of("p graph 2 1\n2 2\n"), 2u);
  EXPECT_EQ(line_of("1 2\n"), 1u);
  EXPECT_EQ(line_of("p graph 2 1\np graph 2 1\n"), 2u);
  EXPECT_THROW(parse_gr("p graph 3 2\n1 2\n"), ParseError);
}

TEST(ParseGr, RoundTrip) {
  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    const Graph g = random_graph(rng, 1 + i % 9, 0.4);
    EXPECT_EQ(parse_gr(to_gr(g, {"note"})), g);
  }
}

TEST(ParseGr, Collection) {
  std::istringstream in("c name a\np graph 2 1\n1 2\nc name b\np graph 3 0\n");
  const auto gs = parse_gr_collection(in);
  ASSERT_EQ(gs.size(), 2u);
  EXPECT_EQ(gs[0].name(), "a");
  EXPECT_EQ(gs[1].name(), "b");
  EXPECT_EQ(gs[1].order(), 3u);
}

TEST(Graph, RejectsSelfLoop) {
  EXPECT_THROW(Graph(2, {{1, 1}}), ContractViolation);
  EXPECT_THROW(Graph(2, {{0, 2}}), ContractViolation);
}

TEST(InducedSubgraph, AdjacentPairOfC5IsK2) {
  const auto s = induced_subgraph(cycle_graph(5), make_set(5, {1, 2}));
  EXPECT_EQ(s.graph, complete_graph(2));
  EXPECT_EQ(s.to_old, (std::vector<Vertex>{1, 2}));
}

TEST(InducedSubgraph, WholeC5) {
  EXPECT_EQ(induced_subgraph(cycle_graph(5), cycle_graph(5).full_set()).graph, cycle_graph(5));
}

TEST(InducedSubgraph, NonAdjacentPairIsEdgeless) {
  const auto s = induced_subgraph(cycle_graph(5), make_set(5, {0, 2}));
  EXPECT_EQ(s.graph, edgeless_graph(2));
  EXPECT_EQ(s.to_new[2], 1);
  EXPECT_EQ(s.to_new[1], -1);
}

TEST(InducedSubgraph, OutOfRangeMember) {
  EXPECT_THROW(make_set(3, {3}), ContractViolation);
  EXPECT_THROW(induced_subgraph(cycle_graph(5), VertexSet(4)), ContractViolation);
}

TEST(Components, Examples) {
  EXPECT_EQ(connected_components(cycle_graph(5)).size(), 1u);
  EXPECT_TRUE(connected_components(Graph(0)).empty());
  const auto cs = connected_components(disjoint_union(complete_graph(2), Graph(1)));
  ASSERT_EQ(cs.size(), 2u);
  EXPECT_EQ(cs[0], make_set(3, {0, 1}));
  EXPECT_EQ(cs[1], make_set(3, {2}));
}

TEST(Acyclic, Examples) {
  EXPECT_TRUE(is_acyclic(path_graph(4)));
  EXPECT_FALSE(is_acyclic(cycle_graph(5)));
  EXPECT_FALSE(is_acyclic(disjoint_union(complete_graph(3), complete_graph(3))));
}

TEST(Gf2, Examples) {
  EXPECT_EQ(gf2_rank(Gf2Matrix({{0, 0, 1}, {1, 0, 0}})), 2u);
  EXPECT_EQ(gf2_rank(Gf2Matrix(3, 4)), 0u);
  EXPECT_EQ(gf2_rank(Gf2Matrix({{1, 1}, {1, 1}})), 1u);
  EXPECT_THROW(Gf2Matrix({{1, 0}, {1}}), ContractViolation);
}

TEST(GraphProperties, RandomSweep) {
  Rng rng(20240601);
  for (int it = 0; it < 200; ++it) {
    const std::size_t n = 1 + uniform_index(rng, 12);
    const Graph g = random_graph(rng, n, 0.3);
    // rank symmetry
    Gf2Matrix m(1 + uniform_index(rng, 6), 1 + uniform_index(rng, 6));
    for (std::size_t i = 0; i < m.rows(); ++i)
      for (std::size_t j = 0; j < m.cols(); ++j) m.set(i, j, rng() & 1U);
    EXPECT_EQ(gf2_rank(m), gf2_rank(m.transposed()));
    // G - a
    VertexSet a(n);
    for (std::size_t v = 0; v < n; ++v) a.set(v, rng() & 1U);
    const auto rest = remove_vertices(g, a);
    EXPECT_EQ(rest.graph.order(), n - a.count());
    for (std::size_t i = 0; i < rest.to_old.size(); ++i)
      for (std::size_t j = 0; j < rest.to_old.size(); ++j)
        if (i != j)
          EXPECT_EQ(rest.graph.adjacent(Vertex(i), Vertex(j)),
                    g.adjacent(rest.to_old[i], rest.to_old[j]));
    // components partition V
    VertexSet cover(n);
    for (const auto& c : connected_components(g)) {
      EXPECT_FALSE(cover.intersects(c));
      cover |= c;
    }
    EXPECT_EQ(cover.count(), n);
  }
}
