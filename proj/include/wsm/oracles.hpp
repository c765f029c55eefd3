#pragma once

// Brute-force ground truth. Every routine here enumerates candidates directly
// from the definitions and shares no search logic with the algorithms it
// certifies.

#include <algorithm>
#include <functional>
#include <optional>
#include <vector>

#include "wsm/annotation.hpp"
#include "wsm/gf2.hpp"
#include "wsm/graph.hpp"
#include "wsm/modulator.hpp"
#include "wsm/mso.hpp"
#include "wsm/rankwidth.hpp"

namespace wsm::oracle {

namespace detail {

inline std::vector<Mask> components_mask(const std::vector<Mask>& adj) {
  const std::size_t n = adj.size();
  std::vector<Mask> out;
  Mask seen = 0;
  for (std::size_t s = 0; s < n; ++s) {
    if ((seen >> s) & 1U) continue;
    Mask comp = Mask{1} << s;
    for (Mask grow = comp; grow;) {
      Mask next = 0;
      for (Mask r = grow; r; r &= r - 1) next |= adj[__builtin_ctzll(r)];
      grow = next & ~comp;
      comp |= next;
    }
    seen |= comp;
    out.push_back(comp);
  }
  return out;
}

inline int rank_between(const std::vector<Mask>& adj, Mask a, Mask b) {
  Gf2Matrix m(__builtin_popcountll(a), adj.size());
  std::size_t row = 0;
  for (Mask r = a; r; r &= r - 1, ++row)
    for (Mask c = adj[__builtin_ctzll(r)] & b; c; c &= c - 1) m.set(row, __builtin_ctzll(c));
  return static_cast<int>(gf2_rank(m));
}

}  // namespace detail

// Width of the best subcubic tree, found by listing every tree on the labelled
// leaves (each built by subdividing an edge of a smaller tree).
inline int exhaustive_rank_width(const Graph& g) {
  const std::size_t n = g.order();
  if (n > 9) throw CapacityError("exhaustive rank-width limited to 9 vertices");
  if (n <= 1) return 0;
  const auto adj = g.masks();
  const Mask full = full_mask(n);
  // Nodes 0..n-1 are leaves; internal nodes are appended.
  std::vector<std::pair<int, int>> edges{{0, 1}};
  int best = static_cast<int>(n);
  std::function<void(std::size_t, int)> grow = [&](std::size_t next, int nodes) {
    if (next == n) {
      int width = 0;
      for (const auto& [a, b] : edges) {
        // leaves on a's side
        Mask side = 0;
        std::vector<std::pair<int, int>> stack{{a, b}};
        while (!stack.empty()) {
          auto [x, from] = stack.back();
          stack.pop_back();
          if (x < static_cast<int>(n)) side |= Mask{1} << x;
          for (const auto& [p, q] : edges) {
            if (p == x && q != from) stack.push_back({q, x});
            if (q == x && p != from) stack.push_back({p, x});
          }
        }
        width = std::max(width, detail::rank_between(adj, side, full & ~side));
        if (width >= best) return;
      }
      best = width;
      return;
    }
    const std::size_t count = edges.size();
    for (std::size_t i = 0; i < count; ++i) {
      const auto [a, b] = edges[i];
      const int mid = nodes;
      edges[i] = {a, mid};
      edges.push_back({mid, b});
      edges.push_back({mid, static_cast<int>(next)});
      grow(next + 1, nodes + 1);
      edges.pop_back();
      edges.pop_back();
      edges[i] = {a, b};
    }
  };
  grow(2, static_cast<int>(n));
  return best;
}

// Every split-module: subsets A of one component C such that the A x (C \ A)
// adjacency matrix has rank at most 1, plus the empty set and the components.
inline std::vector<VertexSet> brute_split_modules(const Graph& g) {
  const std::size_t n = g.order();
  if (n > 14) throw CapacityError("split-module enumeration limited to 14 vertices");
  const auto adj = g.masks();
  const auto comps = detail::components_mask(adj);
  std::vector<VertexSet> out;
  for (Mask a = 0; a <= full_mask(n); ++a) {
    if (a == 0) {
      out.push_back(VertexSet(n));
      continue;
    }
    const auto host = std::find_if(comps.begin(), comps.end(), [&](Mask c) { return (c & a) == a; });
    if (host == comps.end()) continue;
    if (detail::rank_between(adj, a, *host & ~a) <= 1) out.push_back(from_mask(n, a));
  }
  return out;
}

// The ~_c relation read off the full split-module list: v ~ w iff some
// split-module of rank-width <= c holds both. Returned as the set of vertices
// related to each vertex.
inline std::vector<VertexSet> brute_sim_relation(const Graph& g, int c) {
  const std::size_t n = g.order();
  std::vector<VertexSet> related(n, VertexSet(n));
  for (const VertexSet& m : brute_split_modules(g)) {
    if (m.none()) continue;
    // rank_width_exact is itself certified against exhaustive_rank_width
    if (rank_width_exact(induced_subgraph(g, m).graph, {16, c}).exceeds_cap) continue;
    for (Vertex v : members(m)) related[v] |= m;
  }
  return related;
}

// Classes as inclusion-maximal split-modules of rank-width <= c, sorted by
// minimum vertex. Empty result when the relation is not a partition.
inline std::vector<VertexSet> brute_sim_classes(const Graph& g, int c) {
  const auto related = brute_sim_relation(g, c);
  std::vector<VertexSet> classes;
  VertexSet seen(g.order());
  for (std::size_t v = 0; v < g.order(); ++v) {
    if (seen.test(v)) continue;
    for (Vertex w : members(related[v]))
      if (related[w] != related[v]) return {};
    seen |= related[v];
    classes.push_back(related[v]);
  }
  return classes;
}

// Minimum feedback vertex set size by trying sets in increasing size.
inline int exact_fvs(const Graph& g) {
  const std::size_t n = g.order();
  if (n > 18) throw CapacityError("exact feedback vertex set limited to 18 vertices");
  const auto adj = g.masks();
  const Mask full = full_mask(n);
  auto forest_without = [&](Mask s) {
    const Mask keep = full & ~s;
    std::size_t twice = 0;
    for (Mask r = keep; r; r &= r - 1) twice += __builtin_popcountll(adj[__builtin_ctzll(r)] & keep);
    std::vector<Mask> sub(adj);
    for (std::size_t v = 0; v < n; ++v) sub[v] = ((keep >> v) & 1U) ? adj[v] & keep : 0;
    std::size_t comps = 0;
    for (Mask c : detail::components_mask(sub))
      if (c & keep) ++comps;
    return twice / 2 + comps == static_cast<std::size_t>(__builtin_popcountll(keep));
  };
  for (std::size_t k = 0; k <= n; ++k) {
    // subsets of size k in increasing order
    if (k == 0) {
      if (forest_without(0)) return 0;
      continue;
    }
    Mask s = (Mask{1} << k) - 1;
    while (s <= full) {
      if (forest_without(s)) return static_cast<int>(k);
      const Mask low = s & (~s + 1);
      const Mask ripple = s + low;
      s = (((ripple ^ s) >> 2) / low) | ripple;
    }
  }
  return static_cast<int>(n);
}

// Minimum hitting set of a set family over ground elements 0..ground-1.
inline int exact_hitting_set(std::size_t ground, const std::vector<std::vector<int>>& sets) {
  if (ground > 20) throw CapacityError("exact hitting set limited to 20 ground elements");
  std::vector<Mask> fam;
  for (const auto& s : sets) {
    Mask m = 0;
    for (int e : s) m |= Mask{1} << e;
    fam.push_back(m);
  }
  const Mask full = full_mask(ground);
  for (std::size_t k = 0; k <= ground; ++k) {
    for (Mask h = 0; h <= full; ++h) {
      if (static_cast<std::size_t>(__builtin_popcountll(h)) != k) continue;
      if (std::all_of(fam.begin(), fam.end(), [&](Mask s) { return (s & h) != 0; }))
        return static_cast<int>(k);
    }
  }
  return -1;  // some set is empty
}

// Textbook recursive semantics with full expansion of every quantifier.
inline bool naive_evaluate(const Structure& s, const Formula& phi) {
  const std::size_t n = s.graph.order();
  if (n > 12) throw CapacityError("naive evaluation limited to 12 vertices");
  std::vector<Vertex> point(phi.point_slots(), 0);
  std::vector<Mask> set(phi.set_slots(), 0);
  for (std::size_t i = 0; i < s.points.size(); ++i) point[i] = s.points[i];
  for (std::size_t i = 0; i < s.sets.size(); ++i) set[phi.free_set_slot(i)] = to_mask(s.sets[i]);
  const auto& nodes = phi.nodes();
  std::function<bool(int)> rec = [&](int i) -> bool {
    const FormulaNode& x = nodes[i];
    switch (x.kind) {
      case FormulaNode::edge: return s.graph.adjacent(point[x.p], point[x.q]);
      case FormulaNode::equal: return point[x.p] == point[x.q];
      case FormulaNode::member: return (set[x.q] >> point[x.p]) & 1U;
      case FormulaNode::negation: return !rec(x.lhs);
      case FormulaNode::conjunction: return rec(x.lhs) && rec(x.rhs);
      case FormulaNode::disjunction: return rec(x.lhs) || rec(x.rhs);
      case FormulaNode::implication: return !rec(x.lhs) || rec(x.rhs);
      case FormulaNode::exists_point:
      case FormulaNode::forall_point: {
        const bool ex = x.kind == FormulaNode::exists_point;
        for (std::size_t v = 0; v < n; ++v) {
          point[x.p] = static_cast<Vertex>(v);
          if (rec(x.lhs) == ex) return ex;
        }
        return !ex;
      }
      case FormulaNode::exists_set:
      case FormulaNode::forall_set: {
        const bool ex = x.kind == FormulaNode::exists_set;
        for (Mask m = 0; m <= full_mask(n); ++m) {
          set[x.p] = m;
          if (rec(x.lhs) == ex) return ex;
        }
        return !ex;
      }
    }
    return false;
  };
  return rec(phi.root());
}

// The q-round game played out move by move: Spoiler picks a structure and a
// point or set, Duplicator answers in the other one, and the Duplicator wins
// when the picked points induce a partial isomorphism that respects all sets.
inline bool brute_game_equivalent(const Structure& a, const Structure& b, int rounds) {
  const std::size_t na = a.graph.order(), nb = b.graph.order();
  if (na > 5 || nb > 5) throw CapacityError("brute-force game limited to 5 vertices");
  struct Side {
    std::vector<Mask> adj;
    std::vector<Mask> sets;
    std::vector<int> points;
    std::size_t n;
  };
  auto make = [](const Structure& s) {
    Side out{s.graph.masks(), {}, {}, s.graph.order()};
    for (const auto& x : s.sets) out.sets.push_back(to_mask(x));
    for (Vertex p : s.points) out.points.push_back(static_cast<int>(p));
    return out;
  };
  Side l = make(a), r = make(b);
  auto partial_iso = [&]() {
    const std::size_t k = l.points.size();
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < l.sets.size(); ++j)
        if (((l.sets[j] >> l.points[i]) & 1U) != ((r.sets[j] >> r.points[i]) & 1U)) return false;
      for (std::size_t t = 0; t < k; ++t) {
        if ((l.points[i] == l.points[t]) != (r.points[i] == r.points[t])) return false;
        if (((l.adj[l.points[i]] >> l.points[t]) & 1U) != ((r.adj[r.points[i]] >> r.points[t]) & 1U))
          return false;
      }
    }
    return true;
  };
  std::function<bool(int)> wins = [&](int left) -> bool {
    if (!partial_iso()) return false;
    if (left == 0) return true;
    for (int side = 0; side < 2; ++side) {
      Side& s = side == 0 ? l : r;
      Side& d = side == 0 ? r : l;
      for (std::size_t v = 0; v < s.n; ++v) {
        s.points.push_back(static_cast<int>(v));
        bool answered = false;
        for (std::size_t w = 0; w < d.n && !answered; ++w) {
          d.points.push_back(static_cast<int>(w));
          answered = wins(left - 1);
          d.points.pop_back();
        }
        s.points.pop_back();
        if (!answered) return false;
      }
      for (Mask x = 0; x <= full_mask(s.n); ++x) {
        s.sets.push_back(x);
        bool answered = false;
        for (Mask y = 0; y <= full_mask(d.n) && !answered; ++y) {
          d.sets.push_back(y);
          answered = wins(left - 1);
          d.sets.pop_back();
        }
        s.sets.pop_back();
        if (!answered) return false;
      }
    }
    return true;
  };
  if (l.sets.size() != r.sets.size() || l.points.size() != r.points.size())
    throw ContractViolation("game structures interpret different numbers of variables");
  return wins(rounds);
}

namespace detail {

inline bool acyclic_mask(const std::vector<Mask>& adj, Mask keep) {
  std::size_t twice = 0;
  std::vector<Mask> sub(adj.size(), 0);
  for (Mask r = keep; r; r &= r - 1) {
    const int v = __builtin_ctzll(r);
    sub[v] = adj[v] & keep;
    twice += __builtin_popcountll(sub[v]);
  }
  std::size_t comps = 0;
  for (Mask c : components_mask(sub))
    if (c & keep) ++comps;
  return twice / 2 + comps == static_cast<std::size_t>(__builtin_popcountll(keep));
}

// Induced copies of h in g by trying every injective placement.
inline std::vector<Mask> induced_copies(const std::vector<Mask>& adj, const Graph& h) {
  const std::size_t n = adj.size(), k = h.order();
  std::vector<Mask> out;
  std::vector<int> place;
  std::function<void(Mask)> rec = [&](Mask used) {
    const std::size_t i = place.size();
    if (i == k) {
      out.push_back(used);
      return;
    }
    for (std::size_t v = 0; v < n; ++v) {
      if ((used >> v) & 1U) continue;
      bool ok = true;
      for (std::size_t j = 0; j < i && ok; ++j)
        ok = static_cast<bool>((adj[v] >> place[j]) & 1U) ==
             h.adjacent(static_cast<Vertex>(i), static_cast<Vertex>(j));
      if (!ok) continue;
      place.push_back(static_cast<int>(v));
      rec(used | (Mask{1} << v));
      place.pop_back();
    }
  };
  rec(0);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

// Fewest pairwise-disjoint split-modules of rank-width <= c whose removal
// lands in the class: breadth-first search over the unions of such families.
inline int exact_wsn(const Graph& g, int c, const ClassDescriptor& target) {
  const std::size_t n = g.order();
  if (n > 12) throw CapacityError("exact well-structure number limited to 12 vertices");
  const auto adj = g.masks();
  const Mask full = full_mask(n);
  std::vector<Mask> modules;
  for (const VertexSet& m : brute_split_modules(g)) {
    if (m.none()) continue;
    if (rank_width_exact(induced_subgraph(g, m).graph, {16, c}).exceeds_cap) continue;
    modules.push_back(to_mask(m));
  }
  std::vector<Mask> occurrences;
  if (target.kind != ClassDescriptor::forest)
    for (const Graph& h : target.obs.graphs)
      for (Mask o : detail::induced_copies(adj, h)) occurrences.push_back(o);
  auto good = [&](Mask removed) {
    const Mask keep = full & ~removed;
    if (target.kind == ClassDescriptor::forest) return detail::acyclic_mask(adj, keep);
    return std::all_of(occurrences.begin(), occurrences.end(),
                       [&](Mask o) { return (o & removed) != 0; });
  };
  std::vector<char> seen(std::size_t{1} << n, 0);
  std::vector<Mask> layer{0};
  seen[0] = 1;
  for (int k = 0; !layer.empty(); ++k) {
    for (Mask u : layer)
      if (good(u)) return k;
    std::vector<Mask> next;
    for (Mask u : layer)
      for (Mask m : modules)
        if (!(m & u) && !seen[u | m]) {
          seen[u | m] = 1;
          next.push_back(u | m);
        }
    layer = std::move(next);
  }
  return -1;  // unreachable: the components always work
}

// Optimum |S| over all S with G |= phi(S), smallest first (or largest when
// maximizing); nullopt when no set qualifies.
inline std::optional<int> exact_opt_mso(const Graph& g, const Formula& phi, bool maximize = false) {
  const std::size_t n = g.order();
  if (n > 16) throw CapacityError("exact optimization limited to 16 vertices");
  if (phi.free_sets().size() != 1 || !phi.free_points().empty())
    throw ContractViolation("optimization formula needs exactly one free set variable");
  std::vector<std::vector<Mask>> by_size(n + 1);
  for (Mask s = 0; s <= full_mask(n); ++s) by_size[__builtin_popcountll(s)].push_back(s);
  for (std::size_t i = 0; i <= n; ++i) {
    const std::size_t k = maximize ? n - i : i;
    for (Mask s : by_size[k])
      if (evaluate(Structure{g, {from_mask(n, s)}, {}}, phi)) return static_cast<int>(k);
  }
  return std::nullopt;
}

// Minimum annotation value over all sets Z with G |= phi(Z).
inline std::optional<BigInt> exact_annotated_opt(const Graph& g, const Annotation& a,
                                                 const Formula& phi) {
  const std::size_t n = g.order();
  if (n > 16) throw CapacityError("exact annotated optimization limited to 16 vertices");
  std::optional<BigInt> best;
  for (Mask s = 0; s <= full_mask(n); ++s) {
    const VertexSet z = from_mask(n, s);
    BigInt w = annotation_value(a, z);
    if (best && w >= *best) continue;
    if (evaluate(Structure{g, {z}, {}}, phi)) best = std::move(w);
  }
  return best;
}

}  // namespace wsm::oracle
