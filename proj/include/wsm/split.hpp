#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsm/graph.hpp"
#include "wsm/rankwidth.hpp"

namespace wsm {

// True iff `a` lies inside one connected component and all vertices of `a`
// with neighbors outside `a` share one outside neighborhood. The empty set and
// whole components qualify.
inline bool is_split_module(const Graph& g, const VertexSet& a) {
  if (a.size() != g.order()) throw ContractViolation("vertex set belongs to a different graph");
  if (a.none()) return true;
  for (const VertexSet& comp : connected_components(g)) {
    if (!comp.intersects(a)) continue;
    if (!a.is_subset_of(comp)) return false;
    const VertexSet outside = comp - a;
    std::optional<VertexSet> shared;
    for (Vertex v : members(a)) {
      VertexSet out = g.neighbors(v) & outside;
      if (out.none()) continue;
      if (!shared) shared = std::move(out);
      else if (*shared != out) return false;
    }
    return true;
  }
  return true;
}

// lambda(a): members of a with a neighbor outside a.
inline VertexSet frontier(const Graph& g, const VertexSet& a) {
  if (!is_split_module(g, a)) throw ContractViolation("frontier of a set that is not a split-module");
  VertexSet out(g.order());
  for (Vertex v : members(a))
    if (!g.neighbors(v).is_subset_of(a)) out.set(v);
  return out;
}

struct SplitModule {
  VertexSet vertices;
  VertexSet frontier;
  int host_component = -1;
};

inline SplitModule make_split_module(const Graph& g, const VertexSet& a) {
  SplitModule m{a, frontier(g, a), -1};
  const auto comps = connected_components(g);
  for (std::size_t i = 0; i < comps.size(); ++i)
    if (comps[i].intersects(a)) m.host_component = static_cast<int>(i);
  return m;
}

enum class BagKind { prime, clique, star };

inline const char* to_string(BagKind k) {
  switch (k) {
    case BagKind::prime: return "prime";
    case BagKind::clique: return "clique";
    case BagKind::star: return "star";
  }
  return "?";
}

// Split decomposition of one connected component: bags linked through pairs of
// marker elements. Real elements carry a host vertex.
struct SplitTree {
  struct Element {
    int bag = -1;
    Vertex vertex = -1;  // host vertex, or -1 for a marker
    int twin = -1;       // partner marker
    bool is_marker() const noexcept { return vertex < 0; }
  };
  struct Bag {
    BagKind kind = BagKind::prime;
    std::vector<int> elements;  // local index -> element id
    Graph graph;                // over local indices
    int center = -1;            // element id of a star's center
  };

  std::vector<Element> elements;
  std::vector<Bag> bags;
  VertexSet vertices;  // the component, over host vertices

  std::size_t marker_pairs() const noexcept { return (elements.size() - vertices.count()) / 2; }
};

namespace detail {

struct WorkBag {
  std::vector<int> elems;
  std::vector<Mask> adj;
  bool alive = true;
};

// A nontrivial split (both sides >= 2) of a connected bag graph, as the side
// containing local element 0; 0 when the bag is prime or too small.
inline Mask find_split(const std::vector<Mask>& adj) {
  const std::size_t m = adj.size();
  if (m < 4) return 0;
  const Mask full = full_mask(m);
  for (std::size_t v = 1; v < m; ++v) {
    for (std::size_t x = 1; x < m; ++x) {
      if (x == v) continue;
      Mask a = Mask{1} | (Mask{1} << v);
      const Mask xbit = Mask{1} << x;
      // Grow a until every vertex outside a (other than x) sees nothing of a
      // or exactly what x sees. Every split with 0,v on one side and x on the
      // other side's frontier contains the result.
      for (bool changed = true; changed;) {
        changed = false;
        const Mask rx = adj[x] & a;
        for (Mask rest = full & ~a & ~xbit; rest; rest &= rest - 1) {
          const int b = __builtin_ctzll(rest);
          const Mask rb = adj[b] & a;
          if (rb && rb != rx) {
            a |= Mask{1} << b;
            changed = true;
            break;
          }
        }
      }
      if (__builtin_popcountll(full & ~a) >= 2) return a;
    }
  }
  return 0;
}

struct BagShape {
  BagKind kind;
  int center_local = -1;
};

inline BagShape classify_bag(const std::vector<Mask>& adj) {
  const std::size_t m = adj.size();
  const Mask full = full_mask(m);
  bool clique = true;
  for (std::size_t i = 0; i < m; ++i)
    if (adj[i] != (full & ~(Mask{1} << i))) clique = false;
  if (clique) return {BagKind::clique, -1};
  if (m >= 3) {
    for (std::size_t c = 0; c < m; ++c) {
      if (adj[c] != (full & ~(Mask{1} << c))) continue;
      bool star = true;
      for (std::size_t i = 0; i < m && star; ++i)
        if (i != c && adj[i] != (Mask{1} << c)) star = false;
      if (star) return {BagKind::star, static_cast<int>(c)};
    }
  }
  return {BagKind::prime, -1};
}

inline int local_index(const WorkBag& b, int element) {
  const auto it = std::find(b.elems.begin(), b.elems.end(), element);
  return it == b.elems.end() ? -1 : static_cast<int>(it - b.elems.begin());
}

inline SplitTree decompose_component(const Graph& g, const VertexSet& comp) {
  const auto sub = induced_subgraph(g, comp);
  const std::size_t m = sub.graph.order();
  if (m > 64) throw CapacityError("split decomposition limited to components of 64 vertices");
  SplitTree t;
  t.vertices = comp;
  std::vector<WorkBag> work(1);
  for (std::size_t v = 0; v < m; ++v) {
    t.elements.push_back({0, sub.to_old[v], -1});
    work[0].elems.push_back(static_cast<int>(v));
  }
  work[0].adj = sub.graph.masks();

  std::vector<int> queue{0};
  while (!queue.empty()) {
    const int bi = queue.back();
    queue.pop_back();
    const Mask a = find_split(work[bi].adj);
    if (a == 0) continue;
    const WorkBag old = work[bi];
    const Mask full = full_mask(old.elems.size());
    const int ma = static_cast<int>(t.elements.size());
    const int mb = ma + 1;
    const int bj = static_cast<int>(work.size());
    t.elements.push_back({bi, -1, mb});
    t.elements.push_back({bj, -1, ma});

    auto build_side = [&](Mask side, int marker, int bag) {
      WorkBag nb;
      std::vector<int> pos(old.elems.size(), -1);
      for (Mask r = side; r; r &= r - 1) {
        const int i = __builtin_ctzll(r);
        pos[i] = static_cast<int>(nb.elems.size());
        nb.elems.push_back(old.elems[i]);
        t.elements[old.elems[i]].bag = bag;
      }
      const std::size_t k = nb.elems.size();
      nb.elems.push_back(marker);
      nb.adj.assign(k + 1, 0);
      const Mask other = full & ~side;
      for (Mask r = side; r; r &= r - 1) {
        const int i = __builtin_ctzll(r);
        for (Mask s = old.adj[i] & side; s; s &= s - 1)
          nb.adj[pos[i]] |= Mask{1} << pos[__builtin_ctzll(s)];
        if (old.adj[i] & other) {
          nb.adj[pos[i]] |= Mask{1} << k;
          nb.adj[k] |= Mask{1} << pos[i];
        }
      }
      return nb;
    };
    WorkBag left = build_side(a, ma, bi);
    WorkBag right = build_side(full & ~a, mb, bj);
    work[bi] = std::move(left);
    work.push_back(std::move(right));
    queue.push_back(bi);
    queue.push_back(bj);
  }

  // Merge neighboring degenerate bags whose union is still degenerate.
  for (bool merged = true; merged;) {
    merged = false;
    for (std::size_t e = 0; e < t.elements.size() && !merged; ++e) {
      const auto& el = t.elements[e];
      if (!el.is_marker() || el.bag < 0 || el.twin < static_cast<int>(e)) continue;
      const int f = el.twin;
      const int p = el.bag;
      const int q = t.elements[f].bag;
      const BagShape sp = classify_bag(work[p].adj);
      const BagShape sq = classify_bag(work[q].adj);
      const int le = local_index(work[p], static_cast<int>(e));
      const int lf = local_index(work[q], f);
      bool ok = sp.kind == BagKind::clique && sq.kind == BagKind::clique;
      if (sp.kind == BagKind::star && sq.kind == BagKind::star)
        ok = (sp.center_local != le && sq.center_local == lf) ||
             (sp.center_local == le && sq.center_local != lf);
      if (!ok) continue;

      WorkBag nb;
      std::vector<std::pair<int, int>> origin;  // (bag, local)
      for (std::size_t i = 0; i < work[p].elems.size(); ++i)
        if (static_cast<int>(i) != le) origin.push_back({p, static_cast<int>(i)});
      for (std::size_t i = 0; i < work[q].elems.size(); ++i)
        if (static_cast<int>(i) != lf) origin.push_back({q, static_cast<int>(i)});
      const std::size_t k = origin.size();
      nb.adj.assign(k, 0);
      for (std::size_t i = 0; i < k; ++i) {
        const auto [bi, li] = origin[i];
        nb.elems.push_back(work[bi].elems[li]);
        for (std::size_t j = 0; j < k; ++j) {
          if (i == j) continue;
          const auto [bj, lj] = origin[j];
          bool adj = false;
          if (bi == bj) {
            adj = (work[bi].adj[li] >> lj) & 1U;
          } else {
            const int mi = bi == p ? le : lf;
            const int mj = bj == p ? le : lf;
            adj = ((work[bi].adj[li] >> mi) & 1U) && ((work[bj].adj[lj] >> mj) & 1U);
          }
          if (adj) nb.adj[i] |= Mask{1} << j;
        }
      }
      for (int id : nb.elems) t.elements[id].bag = p;
      work[p] = std::move(nb);
      work[q].alive = false;
      t.elements[e].bag = -1;
      t.elements[f].bag = -1;
      merged = true;
    }
  }

  // Compact: drop dead bags and consumed markers.
  std::vector<int> bag_id(work.size(), -1);
  for (std::size_t b = 0; b < work.size(); ++b)
    if (work[b].alive) {
      bag_id[b] = static_cast<int>(t.bags.size());
      t.bags.emplace_back();
    }
  std::vector<int> elem_id(t.elements.size(), -1);
  std::vector<SplitTree::Element> kept;
  for (std::size_t e = 0; e < t.elements.size(); ++e) {
    if (t.elements[e].bag < 0) continue;
    elem_id[e] = static_cast<int>(kept.size());
    kept.push_back(t.elements[e]);
  }
  for (auto& el : kept) {
    el.bag = bag_id[el.bag];
    if (el.twin >= 0) el.twin = elem_id[el.twin];
  }
  for (std::size_t b = 0; b < work.size(); ++b) {
    if (!work[b].alive) continue;
    auto& bag = t.bags[bag_id[b]];
    for (int e : work[b].elems) bag.elements.push_back(elem_id[e]);
    std::vector<Edge> edges;
    for (std::size_t i = 0; i < work[b].adj.size(); ++i)
      for (Mask r = work[b].adj[i]; r; r &= r - 1) {
        const int j = __builtin_ctzll(r);
        if (static_cast<std::size_t>(j) > i) edges.push_back({Vertex(i), Vertex(j)});
      }
    bag.graph = Graph(work[b].elems.size(), edges);
    const BagShape shape = classify_bag(work[b].adj);
    bag.kind = shape.kind;
    if (shape.center_local >= 0) bag.center = bag.elements[shape.center_local];
  }
  t.elements = std::move(kept);
  return t;
}

}  // namespace detail

// One canonical split tree per connected component, in component order.
// Components of up to three vertices form a single degenerate bag; larger bags
// are prime, or cliques and stars that cannot be merged with a neighbor.
inline std::vector<SplitTree> split_decomposition(const Graph& g) {
  std::vector<SplitTree> out;
  for (const VertexSet& comp : connected_components(g))
    out.push_back(detail::decompose_component(g, comp));
  return out;
}

// Host vertices reachable through an element: {v} for a real element, the
// leaves beyond the twin for a marker.
inline VertexSet branch_leaves(const SplitTree& t, int element) {
  VertexSet out(t.vertices.size());
  const auto& el = t.elements[element];
  if (!el.is_marker()) {
    out.set(el.vertex);
    return out;
  }
  std::vector<int> entries{el.twin};
  while (!entries.empty()) {
    const int entry = entries.back();
    entries.pop_back();
    for (int e : t.bags[t.elements[entry].bag].elements) {
      if (e == entry) continue;
      if (t.elements[e].is_marker()) entries.push_back(t.elements[e].twin);
      else out.set(t.elements[e].vertex);
    }
  }
  return out;
}

// Glue every marker pair back together: host vertices u,v are adjacent iff an
// alternating path of bag edges links them through the markers.
inline Graph recompose(const std::vector<SplitTree>& trees, std::size_t n) {
  std::vector<Edge> edges;
  for (const SplitTree& t : trees) {
    for (std::size_t start = 0; start < t.elements.size(); ++start) {
      if (t.elements[start].is_marker()) continue;
      const Vertex u = t.elements[start].vertex;
      std::vector<int> frontier{static_cast<int>(start)};
      while (!frontier.empty()) {
        const int e = frontier.back();
        frontier.pop_back();
        const auto& bag = t.bags[t.elements[e].bag];
        const auto it = std::find(bag.elements.begin(), bag.elements.end(), e);
        const auto li = static_cast<Vertex>(it - bag.elements.begin());
        for (Vertex lj : members(bag.graph.neighbors(li))) {
          const int f = bag.elements[lj];
          if (t.elements[f].is_marker()) frontier.push_back(t.elements[f].twin);
          else if (u < t.elements[f].vertex) edges.push_back({u, t.elements[f].vertex});
        }
      }
    }
  }
  return Graph(n, edges);
}

// rw(g) as the maximum over split components; only prime bags reach the exact DP.
inline RankWidthResult rank_width_via_splits(const Graph& g, const RankWidthOptions& opts = {}) {
  RankWidthResult res;
  for (const SplitTree& t : split_decomposition(g)) {
    for (const auto& bag : t.bags) {
      int w = 0;
      if (bag.kind != BagKind::prime) {
        w = bag.graph.edge_count() > 0 ? 1 : 0;
        if (opts.cap && w > *opts.cap) res.exceeds_cap = true;
      } else {
        const auto r = rank_width_exact(bag.graph, opts);
        if (r.exceeds_cap) res.exceeds_cap = true;
        w = r.width;
      }
      res.width = std::max(res.width, w);
    }
    if (res.exceeds_cap) break;
  }
  if (res.exceeds_cap) res.width = 0;
  return res;
}

inline bool rank_width_at_most(const Graph& g, int c, std::size_t exact_limit = 16) {
  return !rank_width_via_splits(g, {exact_limit, c}).exceeds_cap;
}

// The ~_c classes of a graph.
struct SplitModulePartition {
  std::vector<VertexSet> classes;  // sorted by minimum vertex
  int c = 0;
  bool whole_graph = false;  // rw(g) <= c: V returned as the only class

  std::vector<int> class_of(std::size_t n) const {
    std::vector<int> out(n, -1);
    for (std::size_t i = 0; i < classes.size(); ++i)
      for (Vertex v : members(classes[i])) out[v] = static_cast<int>(i);
    return out;
  }
};

// Inclusion-maximal split-modules of rank-width <= c. Every split-module of a
// connected graph is a union of branches at one bag of its split tree (any
// union at a degenerate bag, one branch or all but one at a prime bag); the
// maximal ones are collected from those positions and merged per vertex.
inline SplitModulePartition sim_c_classes(const Graph& g, int c, std::size_t exact_limit = 16) {
  const std::size_t n = g.order();
  SplitModulePartition out;
  out.c = c;
  const auto whole = rank_width_via_splits(g, {exact_limit, c + 1});
  if (!whole.exceeds_cap && whole.width <= c) {
    out.whole_graph = true;
    if (n > 0) out.classes.push_back(g.full_set());
    return out;
  }
  if (!whole.exceeds_cap)
    throw BelowThreshold("rank-width is exactly c+1 = " + std::to_string(c + 1) +
                         "; ~_c is not guaranteed to be an equivalence");

  std::map<VertexSet, bool> small_cache;
  auto small = [&](const VertexSet& s) {
    auto it = small_cache.find(s);
    if (it != small_cache.end()) return it->second;
    const bool ok = rank_width_at_most(induced_subgraph(g, s).graph, c, exact_limit);
    small_cache.emplace(s, ok);
    return ok;
  };

  std::vector<VertexSet> cls(n, VertexSet(n));
  for (const SplitTree& t : split_decomposition(g)) {
    const VertexSet& comp = t.vertices;
    const auto comp_rw = rank_width_via_splits(induced_subgraph(g, comp).graph,
                                               {exact_limit, c + 1});
    if (!comp_rw.exceeds_cap) {
      if (comp_rw.width == c + 1)
        throw BelowThreshold("component containing vertex " +
                             std::to_string(first_member(comp)) +
                             " has rank-width c+1; ~_c is not guaranteed to be an equivalence");
      for (Vertex v : members(comp)) cls[v] = comp;
      continue;
    }
    std::vector<VertexSet> candidates;
    for (Vertex v : members(comp)) {
      VertexSet single(n);
      single.set(v);
      candidates.push_back(single);
    }
    for (const auto& bag : t.bags) {
      std::vector<VertexSet> branches;
      for (int e : bag.elements) branches.push_back(branch_leaves(t, e));
      for (const VertexSet& b : branches) {
        if (small(b)) candidates.push_back(b);
        const VertexSet rest = comp - b;
        if (rest.any() && small(rest)) candidates.push_back(rest);
      }
      if (bag.kind == BagKind::prime) continue;
      // Greedy growth from each branch; any maximal union reached this way is
      // the class of its first branch.
      for (std::size_t i = 0; i < branches.size(); ++i) {
        if (!small(branches[i])) continue;
        VertexSet cur = branches[i];
        for (std::size_t j = 0; j < branches.size(); ++j) {
          if (j == i || cur.intersects(branches[j])) continue;
          VertexSet grown = cur | branches[j];
          if (grown != comp && small(grown)) cur = std::move(grown);
        }
        candidates.push_back(std::move(cur));
      }
    }
    for (const VertexSet& cand : candidates)
      for (Vertex v : members(cand)) cls[v] |= cand;
  }

  VertexSet covered(n);
  for (std::size_t v = 0; v < n; ++v) {
    if (covered.test(v)) continue;
    const VertexSet& m = cls[v];
    for (Vertex w : members(m))
      if (cls[w] != m)
        throw InvariantViolation("~_c classes of vertices " + std::to_string(v) + " and " +
                                 std::to_string(w) + " disagree");
    if (!is_split_module(g, m))
      throw InvariantViolation("class of vertex " + std::to_string(v) + " is not a split-module");
    if (!small(m))
      throw InvariantViolation("class of vertex " + std::to_string(v) + " has rank-width above c");
    covered |= m;
    out.classes.push_back(m);
  }
  return out;
}

}  // namespace wsm
