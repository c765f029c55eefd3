#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "wsm/annotation.hpp"
#include "wsm/catalog.hpp"
#include "wsm/modulator.hpp"
#include "wsm/mso.hpp"
#include "wsm/mso_game.hpp"
#include "wsm/split.hpp"

namespace wsm {

struct KernelCaps {
  std::size_t size_cap = 6;
  GameLimits game;
  std::size_t exact_rw_limit = 16;
};

struct KernelOutput {
  Graph graph;
  WsModulator modulator;
  std::optional<Annotation> annotation;
  std::optional<BigInt> budget;
  std::vector<std::string> provenance;
  std::optional<bool> verdict;  // set when the instance was solved outright
};

// Module-wise replacement together with the vertex correspondence it used.
struct Replacement {
  KernelOutput out;
  std::vector<int> outside_map;  // old vertex -> new vertex, -1 inside a module
  std::vector<Representative> reps;
  std::vector<std::vector<Vertex>> module_old;  // local index -> old vertex
  std::vector<std::vector<Vertex>> module_new;  // representative vertex -> new vertex
};

// The four conditions under which two graphs with modulators have equal
// q-types, checked one by one against the given map of outside vertices.
struct QSimilarity {
  bool outside_isomorphic = false;
  bool frontier_adjacency = false;
  bool frontier_pairs = false;
  bool module_types = false;
  bool all() const noexcept {
    return outside_isomorphic && frontier_adjacency && frontier_pairs && module_types;
  }
};

inline QSimilarity check_q_similar(const Graph& g, const WsModulator& x, const Graph& h,
                                   const WsModulator& y, const std::vector<int>& tau, int q,
                                   bool check_types = true, const GameLimits& limits = {}) {
  QSimilarity out;
  if (x.size() != y.size()) return out;
  const std::size_t n = g.order();
  const VertexSet in_x = x.united(n), in_y = y.united(h.order());
  std::vector<Vertex> outside;
  for (std::size_t v = 0; v < n; ++v)
    if (!in_x.test(v)) outside.push_back(static_cast<Vertex>(v));

  out.outside_isomorphic = tau.size() == n && outside.size() == h.order() - in_y.count();
  std::set<int> image;
  for (Vertex v : outside) {
    const int t = tau[v];
    if (t < 0 || static_cast<std::size_t>(t) >= h.order() || in_y.test(t) || !image.insert(t).second)
      out.outside_isomorphic = false;
  }
  if (out.outside_isomorphic)
    for (Vertex u : outside)
      for (Vertex v : outside)
        if (u < v && g.adjacent(u, v) != h.adjacent(tau[u], tau[v])) out.outside_isomorphic = false;
  if (!out.outside_isomorphic) return out;

  out.frontier_adjacency = true;
  for (Vertex v : outside)
    for (std::size_t i = 0; i < x.size(); ++i)
      if (g.neighbors(v).intersects(x.modules[i].frontier) !=
          h.neighbors(tau[v]).intersects(y.modules[i].frontier))
        out.frontier_adjacency = false;

  auto adjacent_sets = [](const Graph& gr, const VertexSet& a, const VertexSet& b) {
    return neighborhood(gr, a).intersects(b);
  };
  out.frontier_pairs = true;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (adjacent_sets(g, x.modules[i].frontier, x.modules[j].frontier) !=
          adjacent_sets(h, y.modules[i].frontier, y.modules[j].frontier))
        out.frontier_pairs = false;

  out.module_types = true;
  if (check_types) {
    for (std::size_t i = 0; i < x.size() && out.module_types; ++i) {
      const auto a = induced_subgraph(g, x.modules[i].vertices);
      const auto b = induced_subgraph(h, y.modules[i].vertices);
      VertexSet sa(a.graph.order()), sb(b.graph.order());
      for (Vertex v : members(x.modules[i].frontier)) sa.set(a.to_new[v]);
      for (Vertex v : members(y.modules[i].frontier)) sb.set(b.to_new[v]);
      out.module_types = game_equivalent({{a.graph, {sa}, {}}, {b.graph, {sb}, {}}, q}, limits);
    }
  }
  return out;
}

// Each module G[X_i] with frontier S_i gives way to a smallest graph of the
// same q-type (modules already within the size cap stay as they are); the
// frontiers are rewired to the outside exactly as before.
inline Replacement replace_modules_detailed(const Graph& g, const WsModulator& x, int q,
                                            const KernelCaps& caps = {}) {
  const std::size_t n = g.order();
  const VertexSet inside = x.united(n);
  Replacement rp;
  rp.outside_map.assign(n, -1);
  int next = 0;
  for (std::size_t v = 0; v < n; ++v)
    if (!inside.test(v)) rp.outside_map[v] = next++;

  RepresentativeOptions opts;
  opts.limits = caps.game;
  opts.max_rank_width = x.c;
  opts.anchored = true;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& mod = x.modules[i];
    const auto sub = induced_subgraph(g, mod.vertices);
    VertexSet s(sub.graph.order());
    for (Vertex v : members(mod.frontier)) s.set(sub.to_new[v]);
    Representative rep{sub.graph, {s}, true};
    if (sub.graph.order() > caps.size_cap) {
      try {
        rep = find_representative(sub.graph, {s}, q, caps.size_cap, opts);
      } catch (const SearchExhausted& e) {
        throw SearchExhausted("module " + std::to_string(i) + ": " + e.what());
      } catch (const CapacityError& e) {
        throw CapacityError("module " + std::to_string(i) + ": " + e.what());
      }
    }
    std::vector<Vertex> ids;
    for (std::size_t j = 0; j < rep.graph.order(); ++j) ids.push_back(next++);
    rp.module_old.push_back(sub.to_old);
    rp.module_new.push_back(std::move(ids));
    rp.out.provenance.push_back("module " + std::to_string(i + 1) + ": " +
                                std::to_string(sub.graph.order()) + " -> " +
                                std::to_string(rep.graph.order()) +
                                (rep.identity ? " (kept)" : " (representative)"));
    rp.reps.push_back(std::move(rep));
  }

  const std::size_t total = static_cast<std::size_t>(next);
  GraphBuilder b(total);
  for (const Edge& e : g.edges())
    if (rp.outside_map[e.u] >= 0 && rp.outside_map[e.v] >= 0)
      b.add_edge(rp.outside_map[e.u], rp.outside_map[e.v]);
  std::vector<std::vector<Vertex>> front_new(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& rep = rp.reps[i];
    const auto& ids = rp.module_new[i];
    for (const Edge& e : rep.graph.edges()) b.add_edge(ids[e.u], ids[e.v]);
    for (Vertex v : members(rep.boundary[0])) front_new[i].push_back(ids[v]);
  }
  std::vector<int> owner(n, -1);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (Vertex v : members(x.modules[i].vertices)) owner[v] = static_cast<int>(i);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const VertexSet& f = x.modules[i].frontier;
    if (f.none()) continue;
    // frontier vertices share their outside neighborhood
    const VertexSet out_nb = g.neighbors(first_member(f)) - x.modules[i].vertices;
    std::set<int> linked;
    for (Vertex w : members(out_nb)) {
      if (owner[w] < 0) {
        for (Vertex s : front_new[i]) b.add_edge(rp.outside_map[w], s);
      } else if (owner[w] > static_cast<int>(i)) {
        linked.insert(owner[w]);
      }
    }
    for (int j : linked)
      for (Vertex s : front_new[i])
        for (Vertex t : front_new[j]) b.add_edge(s, t);
  }
  rp.out.graph = b.build();
  rp.out.modulator.c = x.c;
  rp.out.modulator.target = x.target;
  for (std::size_t i = 0; i < x.size(); ++i) {
    VertexSet m(total);
    for (Vertex v : rp.module_new[i]) m.set(v);
    rp.out.modulator.modules.push_back(make_split_module(rp.out.graph, m));
  }
  const auto sim = check_q_similar(g, x, rp.out.graph, rp.out.modulator, rp.outside_map, q, false);
  if (!sim.all()) throw InvariantViolation("module replacement broke the outside wiring");
  return rp;
}

inline KernelOutput replace_modules(const Graph& g, const WsModulator& x, int q,
                                    const KernelCaps& caps = {}) {
  return replace_modules_detailed(g, x, q, caps).out;
}

// Smallest catalog graph on which phi has the given truth value.
inline std::optional<Graph> trivial_instance(const Formula& phi, bool verdict,
                                             std::size_t max_order = 6) {
  for (std::size_t m = 0; m <= max_order; ++m)
    for (const Graph& h : graph_catalog(m))
      if (evaluate(h, phi) == verdict) return h;
  return std::nullopt;
}

namespace detail {

inline KernelOutput solved_mc(const Graph& g, const Formula& phi, const std::string& why) {
  KernelOutput out;
  const bool verdict = evaluate(g, phi);
  out.verdict = verdict;
  out.graph = trivial_instance(phi, verdict).value_or(g);
  out.modulator.target = ClassDescriptor::make(ClassDescriptor::empty);
  out.provenance.push_back(why + "; solved directly: " + (verdict ? "yes" : "no"));
  return out;
}

}  // namespace detail

// Kernel for model checking a sentence along a given modulator.
inline KernelOutput mc_kernel(const Graph& g, const Formula& phi, const WsModulator& x,
                              const KernelCaps& caps = {}) {
  if (!phi.is_sentence()) throw ContractViolation("model checking needs a sentence");
  return replace_modules(g, x, phi.quantifier_rank(), caps);
}

inline KernelOutput mc_kernel(const Graph& g, const Formula& phi, const ClassDescriptor& target,
                              int c, const KernelCaps& caps = {}) {
  if (!phi.is_sentence()) throw ContractViolation("model checking needs a sentence");
  WsModulator x;
  try {
    x = find_wsm(g, c, target, caps.exact_rw_limit);
  } catch (const BelowThreshold& e) {
    return detail::solved_mc(g, phi, std::string("below threshold: ") + e.what());
  }
  return mc_kernel(g, phi, x, caps);
}

// Annotated kernel for minimizing |S| subject to G |= phi(S), along a
// modulator to the empty graph. Modules are replaced at rank q+1; every subset
// W' of a new module is weighted by the smallest subset of the old module with
// the same q-type.
inline KernelOutput opt_annotated_kernel(const Graph& g, const WsModulator& x, const Formula& phi,
                                         const BigInt& r, const KernelCaps& caps = {}) {
  if (phi.free_sets().size() != 1 || !phi.free_points().empty())
    throw ContractViolation("optimization formula needs exactly one free set variable");
  if (x.united(g.order()).count() != g.order())
    throw ContractViolation("annotated kernel needs a modulator covering every vertex");
  const int q = phi.quantifier_rank();
  Replacement rp = replace_modules_detailed(g, x, q + 1, caps);
  Annotation ann;
  const std::size_t total = rp.out.graph.order();
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto& rep = rp.reps[i];
    const auto sub = induced_subgraph(g, x.modules[i].vertices);
    VertexSet s(sub.graph.order());
    for (Vertex v : members(x.modules[i].frontier)) s.set(sub.to_new[v]);
    try {
      check_game_limits(sub.graph.order(), q, caps.game);
    } catch (const CapacityError& e) {
      throw CapacityError("module " + std::to_string(i) + ": " + e.what());
    }
    TypeTable table;
    std::map<TypeId, std::size_t> cheapest;
    const std::size_t m = sub.graph.order();
    for (Mask w = 0; w <= full_mask(m); ++w) {
      const TypeId t = table.type_of({sub.graph, {s, from_mask(m, w)}, {}}, q);
      const std::size_t size = std::popcount(w);
      auto [it, fresh] = cheapest.emplace(t, size);
      if (!fresh) it->second = std::min(it->second, size);
    }
    const std::size_t mr = rep.graph.order();
    for (Mask w = 0; w <= full_mask(mr); ++w) {
      const TypeId t = table.type_of({rep.graph, {rep.boundary[0], from_mask(mr, w)}, {}}, q);
      const auto it = cheapest.find(t);
      if (it == cheapest.end())
        throw InvariantViolation("module " + std::to_string(i) +
                                 ": representative set without a matching original set");
      AnnotationTriple tri{VertexSet(total), VertexSet(total), BigInt(it->second)};
      for (std::size_t v = 0; v < mr; ++v)
        ((w >> v) & 1U ? tri.x : tri.y).set(rp.module_new[i][v]);
      ann.triples.push_back(std::move(tri));
    }
  }
  rp.out.annotation = std::move(ann);
  rp.out.budget = r;
  return std::move(rp.out);
}

struct WinWinResult {
  bool direct = false;  // solved outright because 2^k <= n
  KernelOutput out;
};

namespace detail {

// Fixed trivial instance with annotation {} : budget 0 on a graph where some
// set satisfies phi answers yes, budget -1 answers no.
inline KernelOutput trivial_opt(const Formula& phi, bool yes) {
  KernelOutput out;
  out.verdict = yes;
  out.annotation = Annotation{};
  out.graph = complete_graph(1);
  out.budget = yes ? 0 : -1;
  if (yes) {
    bool found = false;
    for (std::size_t m = 1; m <= 6 && !found; ++m)
      for (const Graph& h : graph_catalog(m)) {
        for (Mask z = 0; z <= full_mask(m) && !found; ++z)
          found = evaluate(Structure{h, {from_mask(m, z)}, {}}, phi);
        if (found) {
          out.graph = h;
          break;
        }
      }
    if (!found) throw SearchExhausted("no small graph satisfies the formula for any set");
  }
  out.modulator.target = ClassDescriptor::make(ClassDescriptor::empty);
  return out;
}

// Some Z with G |= phi(Z) and W(Z) <= r, by enumerating every Z.
inline bool solve_annotated(const Graph& g, const Annotation& a, const Formula& phi,
                            const BigInt& r) {
  const std::size_t n = g.order();
  if (n > 24) throw CapacityError("direct annotated solve limited to 24 vertices");
  for (Mask z = 0; z <= full_mask(n); ++z) {
    const VertexSet zs = from_mask(n, z);
    if (annotation_value(a, zs) <= r && evaluate(Structure{g, {zs}, {}}, phi)) return true;
  }
  return false;
}

}  // namespace detail

inline WinWinResult opt_winwin(const Graph& g, const Formula& phi, const BigInt& r,
                               const WsModulator& x, const KernelCaps& caps = {}) {
  WinWinResult res;
  const std::size_t n = g.order(), k = x.size();
  if (k < 63 && (std::size_t{1} << k) <= n) {
    res.direct = true;
    // the kernel is solved when it can be built; otherwise G itself, which
    // carries the same answer under the cardinality weights
    std::optional<KernelOutput> kernel;
    try {
      kernel = opt_annotated_kernel(g, x, phi, r, caps);
    } catch (const CapacityError&) {
    } catch (const SearchExhausted&) {
    }
    const bool yes = kernel ? detail::solve_annotated(kernel->graph, *kernel->annotation, phi, r)
                            : detail::solve_annotated(g, Annotation::cardinality(n), phi, r);
    res.out = detail::trivial_opt(phi, yes);
    if (kernel) res.out.provenance = kernel->provenance;
    res.out.provenance.push_back("2^" + std::to_string(k) + " <= " + std::to_string(n) +
                                 "; solved directly on " + (kernel ? "the kernel" : "the input") +
                                 ": " + (yes ? "yes" : "no"));
    return res;
  }
  res.out = opt_annotated_kernel(g, x, phi, r, caps);
  return res;
}

inline WinWinResult opt_winwin(const Graph& g, const Formula& phi, const BigInt& r, int c,
                               const KernelCaps& caps = {}) {
  WsModulator x;
  try {
    x = wsm_empty(g, c, caps.exact_rw_limit);
  } catch (const BelowThreshold& e) {
    WinWinResult res;
    res.direct = true;
    const bool yes = detail::solve_annotated(g, Annotation::cardinality(g.order()), phi, r);
    res.out = detail::trivial_opt(phi, yes);
    res.out.provenance.push_back(std::string("below threshold: ") + e.what() +
                                 "; solved directly: " + (yes ? "yes" : "no"));
    return res;
  }
  return opt_winwin(g, phi, r, x, caps);
}

struct ProtrusionResult {
  Graph graph;
  std::vector<int> old_to_new;  // -1 for replaced vertices
  bool replaced = false;
};

// Replaces G[l] by a smallest graph of the same q-type with its boundary (the
// vertices of l with neighbors outside l) marked by singleton sets; each marked
// vertex inherits the outside edges of the boundary vertex it stands for.
inline ProtrusionResult protrusion_replace(const Graph& g, const VertexSet& l, int q,
                                           const KernelCaps& caps = {}, bool forest_only = false) {
  const std::size_t n = g.order();
  ProtrusionResult res;
  res.graph = g;
  res.old_to_new.resize(n);
  for (std::size_t v = 0; v < n; ++v) res.old_to_new[v] = static_cast<int>(v);
  if (l.count() <= caps.size_cap) return res;
  const auto sub = induced_subgraph(g, l);
  std::vector<Vertex> boundary;
  for (Vertex v : members(l))
    if (!g.neighbors(v).is_subset_of(l)) boundary.push_back(v);
  std::vector<VertexSet> marks;
  for (Vertex v : boundary) {
    VertexSet s(sub.graph.order());
    s.set(sub.to_new[v]);
    marks.push_back(std::move(s));
  }
  RepresentativeOptions opts;
  opts.limits = caps.game;
  opts.singleton_boundary = true;
  opts.forest_only = forest_only;
  const Representative rep = find_representative(sub.graph, marks, q, caps.size_cap, opts);
  if (rep.identity) return res;

  int next = 0;
  for (std::size_t v = 0; v < n; ++v) res.old_to_new[v] = l.test(v) ? -1 : next++;
  const int base = next;
  GraphBuilder b(static_cast<std::size_t>(base) + rep.graph.order());
  for (const Edge& e : g.edges())
    if (!l.test(e.u) && !l.test(e.v)) b.add_edge(res.old_to_new[e.u], res.old_to_new[e.v]);
  for (const Edge& e : rep.graph.edges()) b.add_edge(base + e.u, base + e.v);
  for (std::size_t j = 0; j < boundary.size(); ++j) {
    const int stand_in = base + first_member(rep.boundary[j]);
    for (Vertex w : members(g.neighbors(boundary[j])))
      if (!l.test(w)) b.add_edge(res.old_to_new[w], stand_in);
  }
  res.graph = b.build();
  res.replaced = true;
  return res;
}

namespace detail {

// Vertices reachable from start inside alive without passing through blocked.
inline VertexSet reach(const Graph& g, const VertexSet& alive, Vertex start,
                       const VertexSet& blocked) {
  VertexSet seen(g.order());
  std::vector<Vertex> stack{start};
  seen.set(start);
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    for (Vertex w : members(g.neighbors(v) & alive))
      if (!seen.test(w) && !blocked.test(w)) {
        seen.set(w);
        stack.push_back(w);
      }
  }
  return seen;
}

// Tree protrusions of G - X whose interior avoids marked vertices and whose
// size lies in (size_cap, limit]: pendant pieces (a root plus some of its
// unmarked branches), windows between two vertices of a tree path, and groups
// of trees untouched by X. Listed in a fixed order.
inline std::vector<VertexSet> protrusion_candidates(const Graph& g, const VertexSet& xset,
                                                    std::size_t size_cap, std::size_t limit) {
  const std::size_t n = g.order();
  VertexSet h = ~xset;
  VertexSet marked(n);
  for (Vertex v : members(h))
    if (g.neighbors(v).intersects(xset)) marked.set(v);
  const VertexSet primary = marked;
  VertexSet none(n);
  for (Vertex v : members(h)) {
    const VertexSet nb = g.neighbors(v) & h;
    if (nb.count() < 3) continue;
    VertexSet self(n);
    self.set(v);
    int hit = 0;
    for (Vertex u : members(nb))
      if (reach(g, h, u, self).intersects(primary)) ++hit;
    if (hit >= 3) marked.set(v);
  }

  std::vector<VertexSet> out;
  // pendant pieces
  for (Vertex v : members(h)) {
    VertexSet self(n);
    self.set(v);
    std::vector<VertexSet> clean;
    for (Vertex u : members(g.neighbors(v) & h)) {
      VertexSet br = reach(g, h, u, self);
      if (!br.intersects(marked)) clean.push_back(std::move(br));
    }
    std::sort(clean.begin(), clean.end(), [](const VertexSet& a, const VertexSet& b) {
      return a.count() != b.count() ? a.count() < b.count() : first_member(a) < first_member(b);
    });
    VertexSet piece = self;
    for (const auto& br : clean) {
      piece |= br;
      if (piece.count() > size_cap) break;
    }
    if (piece.count() > size_cap && piece.count() <= limit) out.push_back(piece);
    // largest branches first, skipping any that would overshoot the limit
    VertexSet packed = self;
    for (auto it = clean.rbegin(); it != clean.rend(); ++it)
      if ((packed | *it).count() <= limit) packed |= *it;
    if (packed.count() > size_cap && packed != piece) out.push_back(packed);
  }
  // windows along the path of a segment between marked vertices s and t
  for (Vertex s : members(marked)) {
    VertexSet self(n);
    self.set(s);
    for (Vertex u : members(g.neighbors(s) & h & ~marked)) {
      const VertexSet region = reach(g, h & ~marked, u, self);
      const VertexSet ends = (neighborhood(g, region) & marked) - self;
      if (ends.count() != 1) continue;
      const Vertex t = first_member(ends);
      if (t < s) continue;
      // path s = p0, p1, ..., pL = t through the region
      std::vector<Vertex> parent(n, -1);
      std::vector<Vertex> queue{u};
      parent[u] = s;
      for (std::size_t i = 0; i < queue.size(); ++i)
        for (Vertex w : members(g.neighbors(queue[i]) & (region | ends)))
          if (parent[w] < 0 && w != s) {
            parent[w] = queue[i];
            if (w != t) queue.push_back(w);
          }
      std::vector<Vertex> path{t};
      while (path.back() != s) path.push_back(parent[path.back()]);
      std::reverse(path.begin(), path.end());
      VertexSet on_path(n);
      for (Vertex v : path) on_path.set(v);
      std::vector<VertexSet> hang(path.size(), VertexSet(n));
      for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        hang[i].set(path[i]);
        for (Vertex w : members(g.neighbors(path[i]) & region & ~on_path))
          hang[i] |= reach(g, region, w, on_path);
      }
      for (std::size_t i = 0; i + 2 < path.size(); ++i) {
        VertexSet piece(n);
        piece.set(path[i]);
        for (std::size_t j = i + 1; j < path.size(); ++j) {
          VertexSet closed = piece;
          closed.set(path[j]);
          if (closed.count() > size_cap && j >= i + 2) {
            if (closed.count() <= limit) out.push_back(closed);
            break;
          }
          piece |= hang[j];
        }
      }
    }
  }
  // trees not adjacent to X, grouped greedily
  VertexSet group(n);
  VertexSet seen(n);
  for (Vertex v : members(h)) {
    if (seen.test(v)) continue;
    const VertexSet comp = reach(g, h, v, none);
    seen |= comp;
    if (neighborhood(g, comp).intersects(xset)) continue;
    if ((group | comp).count() > limit) {
      if (group.count() > size_cap) out.push_back(group);
      group = VertexSet(n);
      if (comp.count() > limit) continue;
    }
    group |= comp;
  }
  if (group.count() > size_cap) out.push_back(group);
  return out;
}

}  // namespace detail

// Linear kernel on graphs of maximum degree <= d: a 2-approximate feedback
// vertex set X stays, and tree protrusions of G - X are replaced until none
// between the size cap and the game limit can shrink further.
inline KernelOutput fvs_bd_kernel(const Graph& g, const Formula& phi, std::size_t d,
                                  const KernelCaps& caps = {}) {
  if (!phi.is_sentence()) throw ContractViolation("model checking needs a sentence");
  if (g.max_degree() > d)
    throw ContractViolation("maximum degree " + std::to_string(g.max_degree()) +
                            " exceeds the bound " + std::to_string(d));
  const int q = phi.quantifier_rank();
  const std::size_t limit = q >= 2 ? caps.game.max_vertices : 64;
  Graph cur = g;
  VertexSet xset = fvs_2approx(g);
  KernelOutput out;
  out.provenance.push_back("feedback vertex set: " + std::to_string(xset.count()));
  std::set<std::vector<Vertex>> stuck;
  for (bool progress = true; progress;) {
    progress = false;
    for (const VertexSet& piece : detail::protrusion_candidates(cur, xset, caps.size_cap, limit)) {
      const auto key = members(piece);
      if (stuck.count(key)) continue;
      ProtrusionResult pr;
      try {
        pr = protrusion_replace(cur, piece, q, caps, true);
      } catch (const SearchExhausted&) {
        stuck.insert(key);
        continue;
      }
      if (!pr.replaced) {
        stuck.insert(key);
        continue;
      }
      out.provenance.push_back("protrusion of " + std::to_string(piece.count()) + " -> " +
                               std::to_string(pr.graph.order() + piece.count() - cur.order()));
      VertexSet nx(pr.graph.order());
      for (Vertex v : members(xset)) nx.set(pr.old_to_new[v]);
      xset = std::move(nx);
      cur = std::move(pr.graph);
      stuck.clear();
      progress = true;
      break;
    }
  }
  if (!is_acyclic(remove_vertices(cur, xset).graph))
    throw InvariantViolation("protrusion replacement created a cycle outside the feedback set");
  out.graph = std::move(cur);
  out.modulator.c = 0;
  out.modulator.target = ClassDescriptor::make(ClassDescriptor::forest);
  for (Vertex v : members(xset)) {
    VertexSet s(out.graph.order());
    s.set(v);
    out.modulator.modules.push_back(make_split_module(out.graph, s));
  }
  return out;
}

}  // namespace wsm
