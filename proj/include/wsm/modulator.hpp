#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wsm/catalog.hpp"
#include "wsm/graph.hpp"
#include "wsm/graph_io.hpp"
#include "wsm/split.hpp"

namespace wsm {

struct ObstructionSet {
  std::vector<Graph> graphs;
  std::size_t r = 0;  // largest order among the graphs

  ObstructionSet() = default;
  explicit ObstructionSet(std::vector<Graph> gs) : graphs(std::move(gs)) {
    for (const Graph& g : graphs) r = std::max(r, g.order());
  }
};

// Target class of a modulator. Edgeless and empty are the obstruction sets
// {K2} and {K1}, kept as their own kinds so that reports name them.
struct ClassDescriptor {
  enum Kind { forest, edgeless, empty, obstructions };
  Kind kind = empty;
  ObstructionSet obs;
  std::string source;  // file or directory for the obstruction kind

  static ClassDescriptor make(Kind k) {
    ClassDescriptor d;
    d.kind = k;
    if (k == edgeless) d.obs = ObstructionSet({complete_graph(2)});
    if (k == empty) d.obs = ObstructionSet({complete_graph(1)});
    return d;
  }
  static ClassDescriptor from_obstructions(ObstructionSet o, std::string source = {}) {
    ClassDescriptor d;
    d.kind = obstructions;
    d.obs = std::move(o);
    d.source = std::move(source);
    return d;
  }

  // Forbidden induced subgraphs; a forest has none of bounded order.
  bool finite() const noexcept { return kind != forest; }
};

inline std::string to_string(const ClassDescriptor& d) {
  switch (d.kind) {
    case ClassDescriptor::forest: return "forest";
    case ClassDescriptor::edgeless: return "edgeless";
    case ClassDescriptor::empty: return "empty";
    case ClassDescriptor::obstructions: return "obstructions:" + d.source;
  }
  return {};
}

inline ObstructionSet read_obstructions(const std::string& path) {
  namespace fs = std::filesystem;
  std::vector<Graph> graphs;
  auto load = [&](const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot open " + p.string());
    for (Graph& g : parse_gr_collection(in)) graphs.push_back(std::move(g));
  };
  if (fs::is_directory(path)) {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(path))
      if (e.path().extension() == ".gr") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files) load(f);
  } else {
    load(path);
  }
  if (graphs.empty()) throw ParseError("no obstruction graphs in " + path, 0);
  return ObstructionSet(std::move(graphs));
}

inline ClassDescriptor parse_class_descriptor(const std::string& text) {
  if (text == "forest") return ClassDescriptor::make(ClassDescriptor::forest);
  if (text == "edgeless") return ClassDescriptor::make(ClassDescriptor::edgeless);
  if (text == "empty") return ClassDescriptor::make(ClassDescriptor::empty);
  const std::string prefix = "obstructions:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string path = text.substr(prefix.size());
    return ClassDescriptor::from_obstructions(read_obstructions(path), path);
  }
  throw ContractViolation("unknown class descriptor '" + text + "'");
}

// Vertex sets inducing a copy of some obstruction, each listed once, in
// increasing lexicographic order of sorted members.
inline std::vector<VertexSet> enumerate_obstructions(const Graph& g, const ObstructionSet& obs) {
  const std::size_t n = g.order();
  std::vector<VertexSet> out;
  std::vector<std::size_t> sizes;
  for (const Graph& h : obs.graphs) sizes.push_back(h.order());
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  auto degree_sequence = [](const Graph& h) {
    std::vector<std::size_t> d;
    for (std::size_t v = 0; v < h.order(); ++v) d.push_back(h.degree(static_cast<Vertex>(v)));
    std::sort(d.begin(), d.end());
    return d;
  };
  std::vector<std::vector<std::size_t>> obs_degrees;
  for (const Graph& h : obs.graphs) obs_degrees.push_back(degree_sequence(h));

  std::vector<Vertex> pick;
  auto test = [&]() {
    VertexSet s(n);
    for (Vertex v : pick) s.set(v);
    const Graph sub = induced_subgraph(g, s).graph;
    const auto d = degree_sequence(sub);
    for (std::size_t i = 0; i < obs.graphs.size(); ++i) {
      if (obs.graphs[i].order() != sub.order() || obs_degrees[i] != d) continue;
      if (isomorphic(obs.graphs[i], sub)) {
        out.push_back(std::move(s));
        return;
      }
    }
  };
  for (std::size_t size : sizes) {
    if (size > n) break;
    if (size == 0) {
      // the empty graph is an induced subgraph of everything
      out.push_back(VertexSet(n));
      continue;
    }
    // combinations in lexicographic order
    std::vector<Vertex> idx(size);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
      pick = idx;
      test();
      int i = static_cast<int>(size) - 1;
      while (i >= 0 && idx[i] == static_cast<Vertex>(n - size + i)) --i;
      if (i < 0) break;
      ++idx[i];
      for (std::size_t j = i + 1; j < size; ++j) idx[j] = idx[j - 1] + 1;
    }
  }
  std::sort(out.begin(), out.end(), [](const VertexSet& a, const VertexSet& b) {
    return members(a) < members(b);
  });
  return out;
}

inline bool in_class(const Graph& g, const ClassDescriptor& d) {
  switch (d.kind) {
    case ClassDescriptor::forest: return is_acyclic(g);
    case ClassDescriptor::edgeless: return g.edge_count() == 0;
    case ClassDescriptor::empty: return g.order() == 0;
    case ClassDescriptor::obstructions: return enumerate_obstructions(g, d.obs).empty();
  }
  return false;
}

struct WsModulator {
  std::vector<SplitModule> modules;
  int c = 0;
  ClassDescriptor target;

  std::size_t size() const noexcept { return modules.size(); }
  VertexSet united(std::size_t n) const {
    VertexSet u(n);
    for (const auto& m : modules) u |= m.vertices;
    return u;
  }
};

// Modules, rank-width bound, and class membership of what remains.
inline bool verify_wsm(const Graph& g, const WsModulator& x, std::size_t exact_limit = 16) {
  const std::size_t n = g.order();
  VertexSet used(n);
  for (const auto& m : x.modules) {
    if (m.vertices.size() != n) return false;
    if (m.vertices.intersects(used)) return false;
    used |= m.vertices;
    if (!is_split_module(g, m.vertices)) return false;
    if (!rank_width_at_most(induced_subgraph(g, m.vertices).graph, x.c, exact_limit)) return false;
  }
  return in_class(remove_vertices(g, used).graph, x.target);
}

// Ground set for modulator searches: the ~_c classes, or the components when
// the whole graph already has rank-width <= c (V itself is then a split-module
// only if the graph is connected).
inline std::vector<VertexSet> modulator_ground(const Graph& g, int c, std::size_t exact_limit = 16) {
  auto p = sim_c_classes(g, c, exact_limit);
  if (!p.whole_graph) return std::move(p.classes);
  return connected_components(g);
}

namespace detail {

using Rational = boost::multiprecision::cpp_rational;

// Repeatedly strip vertices of degree <= 1 from the alive set.
inline void prune_low_degree(const std::vector<Mask>& adj, Mask& alive) {
  for (bool changed = true; changed;) {
    changed = false;
    for (Mask r = alive; r; r &= r - 1) {
      const int v = std::countr_zero(r);
      if (std::popcount(adj[v] & alive) <= 1) {
        alive &= ~(Mask{1} << v);
        changed = true;
      }
    }
  }
}

inline bool forest_mask(const std::vector<Mask>& adj, Mask alive) {
  prune_low_degree(adj, alive);
  return alive == 0;
}

// A cycle in which every vertex but at most one has degree 2, as a mask; 0 if
// none. Assumes minimum degree 2 on alive.
inline Mask semidisjoint_cycle(const std::vector<Mask>& adj, Mask alive) {
  Mask two = 0;
  for (Mask r = alive; r; r &= r - 1) {
    const int v = std::countr_zero(r);
    if (std::popcount(adj[v] & alive) == 2) two |= Mask{1} << v;
  }
  Mask seen = 0;
  for (Mask r = two; r; r &= r - 1) {
    const int s = std::countr_zero(r);
    if ((seen >> s) & 1U) continue;
    Mask path = Mask{1} << s;
    for (Mask grow = path; grow;) {
      Mask next = 0;
      for (Mask g = grow; g; g &= g - 1) next |= adj[std::countr_zero(g)] & two;
      grow = next & ~path;
      path |= next;
    }
    seen |= path;
    Mask outside = 0;
    for (Mask g = path; g; g &= g - 1) outside |= adj[std::countr_zero(g)] & alive & ~path;
    // a whole cycle of degree-2 vertices, or a path whose ends meet one vertex
    if (std::popcount(outside) <= 1) return path | outside;
  }
  return 0;
}

// Step II of the forest search: fixpoint over sets of at most three classes
// whose union induces a cycle, scanned in sorted order and restarted after
// every take.
inline std::vector<bool> short_cycle_classes(const std::vector<Mask>& adj,
                                             const std::vector<Mask>& cls) {
  std::vector<bool> taken(cls.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < cls.size(); ++i)
      if (!taken[i]) live.push_back(i);
    auto try_take = [&](std::initializer_list<std::size_t> pick) {
      Mask u = 0;
      for (std::size_t i : pick) u |= cls[i];
      if (forest_mask(adj, u)) return false;
      for (std::size_t i : pick) taken[i] = true;
      return true;
    };
    const std::size_t L = live.size();
    for (std::size_t a = 0; a < L && !changed; ++a) changed = try_take({live[a]});
    for (std::size_t a = 0; a < L && !changed; ++a)
      for (std::size_t b = a + 1; b < L && !changed; ++b) changed = try_take({live[a], live[b]});
    for (std::size_t a = 0; a < L && !changed; ++a)
      for (std::size_t b = a + 1; b < L && !changed; ++b)
        for (std::size_t d = b + 1; d < L && !changed; ++d)
          changed = try_take({live[a], live[b], live[d]});
  }
  return taken;
}

}  // namespace detail

// Local-ratio 2-approximation: on the graph stripped of degree <= 1 vertices,
// subtract either a uniform amount around a semidisjoint cycle or an amount
// proportional to degree - 1; vertices whose weight hits zero join the
// solution, and a final reverse pass drops redundant ones.
inline VertexSet fvs_2approx(const Graph& g) {
  const std::size_t n = g.order();
  const auto adj = g.masks();
  using detail::Rational;
  std::vector<Rational> w(n, Rational(1));
  Mask alive = full_mask(n);
  std::vector<int> chosen;
  for (;;) {
    detail::prune_low_degree(adj, alive);
    if (!alive) break;
    Mask zero = 0;
    if (const Mask cyc = detail::semidisjoint_cycle(adj, alive)) {
      Rational gamma = -1;
      for (Mask r = cyc; r; r &= r - 1) {
        const int v = std::countr_zero(r);
        if (gamma < 0 || w[v] < gamma) gamma = w[v];
      }
      for (Mask r = cyc; r; r &= r - 1) {
        const int v = std::countr_zero(r);
        w[v] -= gamma;
        if (w[v] == 0) zero |= Mask{1} << v;
      }
    } else {
      Rational gamma = -1;
      for (Mask r = alive; r; r &= r - 1) {
        const int v = std::countr_zero(r);
        const Rational ratio = w[v] / (std::popcount(adj[v] & alive) - 1);
        if (gamma < 0 || ratio < gamma) gamma = ratio;
      }
      for (Mask r = alive; r; r &= r - 1) {
        const int v = std::countr_zero(r);
        w[v] -= gamma * (std::popcount(adj[v] & alive) - 1);
        if (w[v] == 0) zero |= Mask{1} << v;
      }
    }
    for (Mask r = zero; r; r &= r - 1) chosen.push_back(std::countr_zero(r));
    alive &= ~zero;
  }
  Mask sol = 0;
  for (int v : chosen) sol |= Mask{1} << v;
  for (auto it = chosen.rbegin(); it != chosen.rend(); ++it) {
    const Mask without = sol & ~(Mask{1} << *it);
    if (detail::forest_mask(adj, full_mask(n) & ~without)) sol = without;
  }
  return from_mask(n, sol);
}

// Classes of ~_c intersecting a cycle of bounded size are taken whole first;
// a 2-approximate feedback vertex set of what remains then picks the rest.
inline WsModulator wsm_forest_3approx(const Graph& g, int c, std::size_t exact_limit = 16) {
  const std::size_t n = g.order();
  WsModulator out;
  out.c = c;
  out.target = ClassDescriptor::make(ClassDescriptor::forest);
  if (is_acyclic(g)) return out;
  const auto classes = modulator_ground(g, c, exact_limit);
  const auto adj = g.masks();
  std::vector<Mask> cls;
  for (const auto& s : classes) cls.push_back(to_mask(s));
  std::vector<bool> taken = detail::short_cycle_classes(adj, cls);
  Mask alive = full_mask(n);
  for (std::size_t i = 0; i < cls.size(); ++i)
    if (taken[i]) alive &= ~cls[i];

  // Step III: a feedback vertex set of the rest, rounded up to whole classes.
  const auto rest = remove_vertices(g, from_mask(n, ~alive & full_mask(n)));
  Mask s = 0;
  for (Vertex v : members(fvs_2approx(rest.graph))) s |= Mask{1} << rest.to_old[v];
  for (std::size_t i = 0; i < cls.size(); ++i)
    if (!taken[i] && (cls[i] & s)) taken[i] = true;

  for (std::size_t i = 0; i < cls.size(); ++i)
    if (taken[i]) out.modules.push_back(make_split_module(g, classes[i]));
  return out;
}

struct HittingInstance {
  std::vector<VertexSet> ground;
  std::vector<std::vector<int>> sets;  // sorted, deduplicated
  std::size_t r = 0;
};

// One set per obstruction occurrence: the classes it meets.
inline HittingInstance build_hitting_instance(const Graph& g, int c, const ObstructionSet& obs,
                                              std::size_t exact_limit = 16) {
  HittingInstance w;
  w.r = obs.r;
  w.ground = modulator_ground(g, c, exact_limit);
  std::vector<int> owner(g.order(), -1);
  for (std::size_t i = 0; i < w.ground.size(); ++i)
    for (Vertex v : members(w.ground[i])) owner[v] = static_cast<int>(i);
  for (const VertexSet& occ : enumerate_obstructions(g, obs)) {
    std::vector<int> s;
    for (Vertex v : members(occ)) s.push_back(owner[v]);
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    w.sets.push_back(std::move(s));
  }
  std::sort(w.sets.begin(), w.sets.end());
  w.sets.erase(std::unique(w.sets.begin(), w.sets.end()), w.sets.end());
  return w;
}

// While some set is unhit, take all of its elements.
inline std::vector<int> greedy_hitting_set(const HittingInstance& w) {
  std::vector<bool> in(w.ground.size(), false);
  std::vector<int> out;
  for (const auto& s : w.sets) {
    if (std::any_of(s.begin(), s.end(), [&](int e) { return in[e]; })) continue;
    for (int e : s) {
      in[e] = true;
      out.push_back(e);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline WsModulator wsm_obstruction_approx(const Graph& g, int c, const ClassDescriptor& target,
                                          std::size_t exact_limit = 16) {
  if (!target.finite()) throw ContractViolation("obstruction approximation needs a finite obstruction set");
  WsModulator out;
  out.c = c;
  out.target = target;
  if (in_class(g, target)) return out;
  const HittingInstance w = build_hitting_instance(g, c, target.obs, exact_limit);
  for (int e : greedy_hitting_set(w)) out.modules.push_back(make_split_module(g, w.ground[e]));
  return out;
}

// Every ~_c class as a module: a modulator to the empty graph.
inline WsModulator wsm_empty(const Graph& g, int c, std::size_t exact_limit = 16) {
  WsModulator out;
  out.c = c;
  out.target = ClassDescriptor::make(ClassDescriptor::empty);
  for (const VertexSet& s : modulator_ground(g, c, exact_limit))
    out.modules.push_back(make_split_module(g, s));
  return out;
}

inline WsModulator find_wsm(const Graph& g, int c, const ClassDescriptor& target,
                            std::size_t exact_limit = 16) {
  switch (target.kind) {
    case ClassDescriptor::forest: return wsm_forest_3approx(g, c, exact_limit);
    case ClassDescriptor::empty: return wsm_empty(g, c, exact_limit);
    default: return wsm_obstruction_approx(g, c, target, exact_limit);
  }
}

}  // namespace wsm
