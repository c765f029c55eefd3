#include <chrono>

#include <gtest/gtest.h>

#include "wsm/generators.hpp"
#include "wsm/mso_game.hpp"
#include "wsm/oracles.hpp"

using namespace wsm;

namespace {

Structure bare(const Graph& g) { return {g, {}, {}}; }

Structure random_structure(Rng& rng, std::size_t n, std::size_t sets, std::size_t points) {
  Structure s{random_graph(rng, n, 0.5), {}, {}};
  for (std::size_t i = 0; i < sets; ++i) s.sets.push_back(from_mask(n, rng() & full_mask(n)));
  for (std::size_t i = 0; i < points && n > 0; ++i)
    s.points.push_back(static_cast<Vertex>(uniform_index(rng, n)));
  return s;
}

// Sentences and one-set formulas of small rank used as distinguishers.
const std::vector<std::string>& small_sentences() {
  static const std::vector<std::string> out{
      "ex x. ex y. E(x,y)",
      "all x. ex y. E(x,y)",
      "ex x. all y. ~E(x,y)",
      "ex x. all y. (x = y | E(x,y))",
      "ex x. ex y. ~x = y",
      "exS X. (ex x. X(x) & ex y. ~X(y))",
      "ex x. ex y. (~x = y & ~E(x,y))",
      "all x. all y. (x = y | E(x,y))",
      "exS X. all x. (X(x) -> ex y. (X(y) & E(x,y)))",
      "exS X. ex x. (X(x) & all y. (E(x,y) -> ~X(y)))",
      "ex x. ex y. ex z. (E(x,y) & E(y,z) & E(x,z))",
      "ex x. ex y. ex z. (E(x,y) & E(y,z) & ~E(x,z) & ~x = z)",
  };
  return out;
}

}  // namespace

TEST(Game, Examples) {
  const Graph k1 = complete_graph(1), k2 = complete_graph(2), k3 = complete_graph(3);
  EXPECT_FALSE(game_equivalent({bare(k1), bare(k2), 2}));
  EXPECT_TRUE(game_equivalent({bare(k2), bare(k3), 1}));
  EXPECT_TRUE(game_equivalent({bare(k1), bare(k2), 1}));
  EXPECT_FALSE(game_equivalent({bare(k2), bare(k3), 3}));
  EXPECT_TRUE(game_equivalent({bare(Graph(0)), bare(Graph(0)), 4}));
  EXPECT_FALSE(game_equivalent({bare(Graph(0)), bare(k1), 1}));
}

TEST(Game, Limits) {
  // the vertex cap applies from two rounds on
  EXPECT_TRUE(game_equivalent({bare(path_graph(10)), bare(path_graph(10)), 1}));
  EXPECT_THROW(game_equivalent({bare(path_graph(10)), bare(path_graph(10)), 2}), CapacityError);
  EXPECT_THROW(game_equivalent({bare(path_graph(9)), bare(path_graph(9)), 4}), CapacityError);
  Structure a = bare(path_graph(3));
  a.sets.push_back(make_set(3, {0}));
  EXPECT_THROW(game_equivalent({a, bare(path_graph(3)), 1}), ContractViolation);
}

TEST(Game, AgreesWithPlayedOutGame) {
  Rng rng(41);
  int equal = 0, differ = 0;
  for (int trial = 0; trial < 160; ++trial) {
    const std::size_t sets = trial % 2, points = (trial / 2) % 2;
    const int rounds = 1 + (trial / 4) % 2;
    const std::size_t na = 1 + uniform_index(rng, 3), nb = 1 + uniform_index(rng, 3);
    const Structure a = random_structure(rng, na, sets, points);
    const Structure b = random_structure(rng, nb, sets, points);
    const bool fast = game_equivalent({a, b, rounds});
    ASSERT_EQ(fast, oracle::brute_game_equivalent(a, b, rounds)) << "trial " << trial;
    (fast ? equal : differ)++;
  }
  EXPECT_GT(equal, 10);
  EXPECT_GT(differ, 10);
}

TEST(Game, EquivalenceRelation) {
  Rng rng(5);
  std::vector<Structure> pool;
  for (int i = 0; i < 24; ++i) pool.push_back(random_structure(rng, 2 + uniform_index(rng, 4), 1, 0));
  for (int q = 1; q <= 2; ++q) {
    TypeTable t;
    std::vector<TypeId> id;
    for (const auto& s : pool) id.push_back(t.type_of(s, q));
    for (std::size_t i = 0; i < pool.size(); ++i) {
      EXPECT_TRUE(game_equivalent({pool[i], pool[i], q}));
      for (std::size_t j = 0; j < pool.size(); ++j) {
        const bool e = game_equivalent({pool[i], pool[j], q});
        EXPECT_EQ(e, game_equivalent({pool[j], pool[i], q}));
        EXPECT_EQ(e, id[i] == id[j]);
      }
    }
  }
}

TEST(Game, EquivalentStructuresAgreeOnSentences) {
  std::vector<Formula> phis;
  for (const auto& text : small_sentences()) phis.push_back(parse_formula(text));
  std::vector<Graph> graphs;
  for (std::size_t m = 1; m <= 4; ++m)
    for (const Graph& g : graph_catalog(m)) graphs.push_back(g);
  int pairs = 0;
  for (int q = 2; q <= 3; ++q) {
    TypeTable t;
    std::vector<TypeId> id;
    for (const Graph& g : graphs) id.push_back(t.type_of(bare(g), q));
    for (std::size_t i = 0; i < graphs.size(); ++i)
      for (std::size_t j = i + 1; j < graphs.size(); ++j) {
        if (id[i] != id[j]) continue;
        ++pairs;
        for (const Formula& phi : phis) {
          if (phi.quantifier_rank() > q) continue;
          EXPECT_EQ(oracle::naive_evaluate(bare(graphs[i]), phi),
                    oracle::naive_evaluate(bare(graphs[j]), phi))
              << to_string(phi);
        }
      }
  }
  EXPECT_GT(pairs, 0);
}

TEST(Representative, Examples) {
  // One round cannot tell nonempty graphs apart.
  const auto r = find_representative(edgeless_graph(5), {}, 1, 6);
  EXPECT_EQ(r.graph.order(), 1U);
  EXPECT_FALSE(r.identity);

  // A path with a marked end: something marked and something unmarked.
  const Graph p6 = path_graph(6);
  RepresentativeOptions anchored;
  anchored.anchored = true;
  const auto e = find_representative(p6, {make_set(6, {0})}, 1, 6, anchored);
  EXPECT_EQ(e.graph.order(), 2U);
  EXPECT_EQ(e.graph.edge_count(), 1U);
  EXPECT_EQ(e.boundary.at(0).count(), 1U);

  // Nothing smaller than K1 except the empty graph, which one round separates.
  const auto k = find_representative(complete_graph(1), {}, 2, 6);
  EXPECT_TRUE(k.identity);
  EXPECT_THROW(find_representative(path_graph(8), {}, 3, 2), SearchExhausted);
}

TEST(Representative, SoundAndSmallest) {
  Rng rng(77);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t n = 2 + uniform_index(rng, 4);
    const int q = 1 + trial % 2;
    Structure s = random_structure(rng, n, 1, 0);
    const auto r = find_representative(s.graph, s.sets, q, 6);
    const Structure rep{r.graph, r.boundary, {}};
    EXPECT_TRUE(oracle::brute_game_equivalent(s, rep, q) || r.graph.order() > 5);
    EXPECT_TRUE(game_equivalent({s, rep, q}));
    EXPECT_LE(r.graph.order(), n);
    // no strictly smaller graph on the played-out game
    if (r.graph.order() >= 2 && r.graph.order() - 1 <= 3) {
      for (std::size_t m = 1; m < r.graph.order(); ++m)
        for (const Graph& h : graph_catalog(m))
          for (Mask b = 0; b <= full_mask(m); ++b)
            EXPECT_FALSE(oracle::brute_game_equivalent(s, {h, {from_mask(m, b)}, {}}, q));
    }
  }
}

TEST(Representative, Options) {
  Rng rng(3);
  RepresentativeOptions forest;
  forest.forest_only = true;
  RepresentativeOptions single;
  single.singleton_boundary = true;
  RepresentativeOptions narrow;
  narrow.max_rank_width = 1;
  for (int trial = 0; trial < 10; ++trial) {
    const Graph t = random_tree(rng, 7);
    const auto r = find_representative(t, {make_set(7, {0}), make_set(7, {6})}, 2, 6, single);
    ASSERT_EQ(r.boundary.size(), 2U);
    EXPECT_EQ(r.boundary[0].count(), 1U);
    EXPECT_EQ(r.boundary[1].count(), 1U);
    EXPECT_FALSE(r.boundary[0] == r.boundary[1]);
    const auto f = find_representative(t, {}, 2, 6, forest);
    EXPECT_TRUE(is_acyclic(f.graph));
    const auto w = find_representative(random_graph(rng, 7, 0.5), {}, 2, 6, narrow);
    EXPECT_FALSE(rank_width_exact(w.graph, {16, 1}).exceeds_cap);
  }
}

TEST(Game, FiveRoundsOnFiveVertices) {
  const auto start = std::chrono::steady_clock::now();
  Structure a{cycle_graph(5), {make_set(5, {0, 2})}, {}};
  Structure b{cycle_graph(5), {make_set(5, {0, 1})}, {}};
  EXPECT_FALSE(game_equivalent({a, b, 5}));
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  RecordProperty("seconds", std::to_string(secs));
}
