#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "wsm/gf2.hpp"
#include "wsm/graph.hpp"

namespace wsm {

// rho_G(U): GF(2) rank of the U x (V \ U) adjacency submatrix.
inline int cut_rank(const Graph& g, const VertexSet& u) {
  if (u.size() != g.order()) throw ContractViolation("vertex set belongs to a different graph");
  const VertexSet outside = ~u;
  std::vector<VertexSet> rows;
  for (auto v = u.find_first(); v != VertexSet::npos; v = u.find_next(v))
    rows.push_back(g.neighbors(static_cast<Vertex>(v)) & outside);
  return static_cast<int>(gf2_rank_rows(std::move(rows)));
}

inline int cut_rank_mask(std::span<const Mask> adj, Mask u, Mask full) {
  Mask rows[64];
  std::size_t k = 0;
  const Mask outside = full & ~u;
  for (Mask rest = u; rest; rest &= rest - 1) {
    const int v = __builtin_ctzll(rest);
    rows[k++] = adj[v] & outside;
  }
  return gf2_rank_masks(std::span<Mask>(rows, k));
}

// Cut-rank of every subset of an n-vertex graph (n <= 24).
inline std::vector<std::uint8_t> all_cut_ranks(std::span<const Mask> adj) {
  const std::size_t n = adj.size();
  const Mask full = full_mask(n);
  std::vector<std::uint8_t> cr(std::size_t{1} << n);
  for (Mask s = 0; s <= full; ++s) {
    // rho(S) = rho(V \ S); only evaluate the smaller half once.
    const Mask comp = full & ~s;
    if (comp < s) {
      cr[s] = cr[comp];
      continue;
    }
    cr[s] = static_cast<std::uint8_t>(cut_rank_mask(adj, s, full));
  }
  return cr;
}

// Unrooted tree with maximum degree 3 whose leaves are the graph's vertices.
struct RankDecomposition {
  std::vector<std::vector<int>> tree;  // adjacency lists over tree nodes
  std::vector<int> leaf_of;            // vertex -> tree node
  int width = 0;

  std::size_t node_count() const noexcept { return tree.size(); }
};

struct RankWidthOptions {
  std::size_t exact_limit = 16;
  std::optional<int> cap;
};

struct RankWidthResult {
  int width = 0;             // meaningful unless exceeds_cap
  bool exceeds_cap = false;  // rw(g) > cap
  std::optional<RankDecomposition> witness;
};

namespace detail {

inline void add_tree_edge(RankDecomposition& d, int a, int b) {
  d.tree[a].push_back(b);
  d.tree[b].push_back(a);
}

inline int build_witness(RankDecomposition& d, const std::vector<Mask>& choice, Mask s, Mask full) {
  if ((s & (s - 1)) == 0) {
    const int node = static_cast<int>(d.tree.size());
    d.tree.emplace_back();
    d.leaf_of[__builtin_ctzll(s)] = node;
    return node;
  }
  const Mask a = choice[s];
  const int left = build_witness(d, choice, a, full);
  const int right = build_witness(d, choice, s & ~a, full);
  if (s == full) {
    add_tree_edge(d, left, right);
    return left;
  }
  const int node = static_cast<int>(d.tree.size());
  d.tree.emplace_back();
  add_tree_edge(d, node, left);
  add_tree_edge(d, node, right);
  return node;
}

}  // namespace detail

// Exact rank-width by dynamic programming over vertex subsets. For a subset S
// the table holds the best width of a subcubic tree on leaves S, counting the
// edge that attaches S to the rest; the whole vertex set contributes no edge of
// its own. With a cap, subsets cutting more than the cap are discarded.
inline RankWidthResult rank_width_exact(const Graph& g, const RankWidthOptions& opts = {}) {
  const std::size_t n = g.order();
  if (n > opts.exact_limit)
    throw CapacityError("exact rank-width limited to " + std::to_string(opts.exact_limit) +
                        " vertices (graph has " + std::to_string(n) +
                        "); use a cap-bounded query or a smaller graph");
  RankWidthResult res;
  if (n <= 1) {
    RankDecomposition marker;
    if (n == 1) {
      marker.tree.emplace_back();
      marker.leaf_of = {0};
    }
    res.witness = std::move(marker);
    return res;
  }
  const auto adj = g.masks();
  const auto cr = all_cut_ranks(adj);
  const Mask full = full_mask(n);
  constexpr std::uint8_t kInf = 0xff;
  const int cap = opts.cap.value_or(kInf - 1);

  std::vector<std::uint8_t> best(std::size_t{1} << n, kInf);
  std::vector<Mask> choice(std::size_t{1} << n, 0);
  for (Mask s = 1; s <= full; ++s) {
    if ((s & (s - 1)) == 0) {
      best[s] = cr[s] <= cap ? cr[s] : kInf;
      continue;
    }
    if (cr[s] > cap) continue;
    const Mask low = s & (~s + 1);
    const Mask rest = s ^ low;
    std::uint8_t b = kInf;
    // Enumerate proper parts A of S containing the lowest vertex.
    for (Mask sub = (rest - 1) & rest;; sub = (sub - 1) & rest) {
      const Mask a = sub | low;
      const std::uint8_t val = std::max(best[a], best[s ^ a]);
      if (val < b) {
        b = val;
        choice[s] = a;
        if (b <= cr[s]) break;
      }
      if (sub == 0) break;
    }
    if (b == kInf) continue;
    best[s] = std::max<std::uint8_t>(b, cr[s]);
  }

  const std::uint8_t rw = best[full];
  if (rw == kInf || rw > cap) {
    res.exceeds_cap = true;
    return res;
  }
  res.width = rw;
  RankDecomposition d;
  d.leaf_of.assign(n, -1);
  detail::build_witness(d, choice, full, full);
  d.width = rw;
  res.witness = std::move(d);
  return res;
}

// Width of a decomposition recomputed from scratch. Throws if the tree is not
// a subcubic tree with a leaf bijection onto V(g).
inline int decomposition_width(const Graph& g, const RankDecomposition& d) {
  const std::size_t nodes = d.tree.size();
  if (d.leaf_of.size() != g.order()) throw InvariantViolation("leaf map has wrong size");
  if (g.order() <= 1) return 0;
  std::size_t edge_ends = 0;
  for (const auto& nb : d.tree) {
    if (nb.size() > 3) throw InvariantViolation("tree node of degree above 3");
    edge_ends += nb.size();
  }
  if (edge_ends / 2 + 1 != nodes) throw InvariantViolation("decomposition is not a tree");
  std::vector<int> vertex_at(nodes, -1);
  for (std::size_t v = 0; v < g.order(); ++v) {
    const int node = d.leaf_of[v];
    if (node < 0 || static_cast<std::size_t>(node) >= nodes || d.tree[node].size() != 1 ||
        vertex_at[node] != -1)
      throw InvariantViolation("leaf map is not a bijection onto leaves");
    vertex_at[node] = static_cast<int>(v);
  }
  for (std::size_t t = 0; t < nodes; ++t)
    if (d.tree[t].size() == 1 && vertex_at[t] == -1)
      throw InvariantViolation("leaf without a vertex");

  int width = 0;
  for (std::size_t a = 0; a < nodes; ++a) {
    for (int b : d.tree[a]) {
      if (static_cast<std::size_t>(b) < a) continue;
      // leaves on a's side of edge (a,b)
      VertexSet side(g.order());
      std::vector<std::pair<int, int>> stack{{static_cast<int>(a), b}};
      std::size_t visited = 0;
      while (!stack.empty()) {
        auto [x, from] = stack.back();
        stack.pop_back();
        if (++visited > nodes) throw InvariantViolation("decomposition is not a tree");
        if (vertex_at[x] >= 0) side.set(vertex_at[x]);
        for (int y : d.tree[x])
          if (y != from) stack.push_back({y, x});
      }
      width = std::max(width, cut_rank(g, side));
    }
  }
  return width;
}

}  // namespace wsm
