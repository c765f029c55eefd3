#pragma once

#include <algorithm>
#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <boost/dynamic_bitset.hpp>

#include "wsm/errors.hpp"

namespace wsm {

using Vertex = int;
using VertexSet = boost::dynamic_bitset<std::uint64_t>;
// Dense subset representation used by the exhaustive routines (n <= 64).
using Mask = std::uint64_t;

struct Edge {
  Vertex u;
  Vertex v;
};

inline VertexSet make_set(std::size_t n, std::initializer_list<Vertex> vs) {
  VertexSet s(n);
  for (Vertex v : vs) {
    if (v < 0 || static_cast<std::size_t>(v) >= n)
      throw ContractViolation("vertex " + std::to_string(v) + " out of range");
    s.set(static_cast<std::size_t>(v));
  }
  return s;
}

template <typename Range>
VertexSet make_set_from(std::size_t n, const Range& vs) {
  VertexSet s(n);
  for (auto v : vs) {
    if (v < 0 || static_cast<std::size_t>(v) >= n)
      throw ContractViolation("vertex " + std::to_string(v) + " out of range");
    s.set(static_cast<std::size_t>(v));
  }
  return s;
}

inline std::vector<Vertex> members(const VertexSet& s) {
  std::vector<Vertex> out;
  out.reserve(s.count());
  for (auto i = s.find_first(); i != VertexSet::npos; i = s.find_next(i))
    out.push_back(static_cast<Vertex>(i));
  return out;
}

inline Vertex first_member(const VertexSet& s) {
  auto i = s.find_first();
  return i == VertexSet::npos ? -1 : static_cast<Vertex>(i);
}

inline Mask to_mask(const VertexSet& s) {
  if (s.size() > 64) throw CapacityError("vertex set wider than 64 bits");
  Mask m = 0;
  for (auto i = s.find_first(); i != VertexSet::npos; i = s.find_next(i))
    m |= Mask{1} << i;
  return m;
}

inline VertexSet from_mask(std::size_t n, Mask m) {
  VertexSet s(n);
  for (std::size_t i = 0; i < n && i < 64; ++i)
    if ((m >> i) & 1U) s.set(i);
  return s;
}

inline Mask full_mask(std::size_t n) {
  return n >= 64 ? ~Mask{0} : ((Mask{1} << n) - 1);
}

// Simple undirected graph on vertices 0..n-1, one adjacency bit-row per vertex.
// Immutable once built.
class Graph {
 public:
  Graph() = default;

  explicit Graph(std::size_t n, std::string name = {})
      : rows_(n, VertexSet(n)), name_(std::move(name)) {}

  Graph(std::size_t n, std::span<const Edge> edges, std::string name = {})
      : Graph(n, std::move(name)) {
    for (const Edge& e : edges) {
      check_vertex(e.u);
      check_vertex(e.v);
      if (e.u == e.v)
        throw ContractViolation("self-loop at vertex " + std::to_string(e.u));
      rows_[e.u].set(e.v);
      rows_[e.v].set(e.u);
    }
    count_edges();
  }

  Graph(std::size_t n, std::initializer_list<Edge> edges, std::string name = {})
      : Graph(n, std::span<const Edge>(edges.begin(), edges.size()), std::move(name)) {}

  std::size_t order() const noexcept { return rows_.size(); }
  std::size_t edge_count() const noexcept { return m_; }
  const std::string& name() const noexcept { return name_; }

  bool adjacent(Vertex u, Vertex v) const { return rows_[u].test(v); }
  const VertexSet& neighbors(Vertex v) const { return rows_[v]; }
  std::size_t degree(Vertex v) const { return rows_[v].count(); }

  std::size_t max_degree() const {
    std::size_t d = 0;
    for (const auto& r : rows_) d = std::max(d, r.count());
    return d;
  }

  VertexSet empty_set() const { return VertexSet(order()); }
  VertexSet full_set() const {
    VertexSet s(order());
    s.set();
    return s;
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    out.reserve(m_);
    for (std::size_t u = 0; u < order(); ++u)
      for (auto v = rows_[u].find_next(u); v != VertexSet::npos; v = rows_[u].find_next(v))
        out.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
    return out;
  }

  // Adjacency rows as 64-bit masks; only valid for n <= 64.
  std::vector<Mask> masks() const {
    if (order() > 64) throw CapacityError("graph has more than 64 vertices");
    std::vector<Mask> out(order());
    for (std::size_t v = 0; v < order(); ++v) out[v] = to_mask(rows_[v]);
    return out;
  }

  Graph renamed(std::string name) const {
    Graph g = *this;
    g.name_ = std::move(name);
    return g;
  }

  friend bool operator==(const Graph& a, const Graph& b) { return a.rows_ == b.rows_; }

 private:
  void check_vertex(Vertex v) const {
    if (v < 0 || static_cast<std::size_t>(v) >= order())
      throw ContractViolation("vertex " + std::to_string(v) + " out of range");
  }
  void count_edges() {
    std::size_t twice = 0;
    for (const auto& r : rows_) twice += r.count();
    m_ = twice / 2;
  }

  std::vector<VertexSet> rows_;
  std::string name_;
  std::size_t m_ = 0;

  friend class GraphBuilder;
};

// Mutable staging area for graphs assembled edge by edge.
class GraphBuilder {
 public:
  explicit GraphBuilder(std::size_t n = 0) : edges_(), n_(n) {}

  Vertex add_vertex() { return static_cast<Vertex>(n_++); }
  void add_edge(Vertex u, Vertex v) { edges_.push_back({u, v}); }
  std::size_t order() const noexcept { return n_; }

  Graph build(std::string name = {}) const { return Graph(n_, edges_, std::move(name)); }

 private:
  std::vector<Edge> edges_;
  std::size_t n_;
};

struct InducedSubgraph {
  Graph graph;
  std::vector<Vertex> to_old;  // new index -> old vertex
  std::vector<Vertex> to_new;  // old vertex -> new index, or -1
};

inline InducedSubgraph induced_subgraph(const Graph& g, const VertexSet& a) {
  if (a.size() != g.order()) throw ContractViolation("vertex set belongs to a different graph");
  InducedSubgraph out;
  out.to_new.assign(g.order(), -1);
  for (Vertex v : members(a)) {
    out.to_new[v] = static_cast<Vertex>(out.to_old.size());
    out.to_old.push_back(v);
  }
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < out.to_old.size(); ++i) {
    const Vertex u = out.to_old[i];
    const VertexSet nb = g.neighbors(u) & a;
    for (auto w = nb.find_next(u); w != VertexSet::npos; w = nb.find_next(w))
      edges.push_back({static_cast<Vertex>(i), out.to_new[w]});
  }
  out.graph = Graph(out.to_old.size(), edges);
  return out;
}

// G - a
inline InducedSubgraph remove_vertices(const Graph& g, const VertexSet& a) {
  return induced_subgraph(g, ~a);
}

// N(a): vertices outside a with a neighbor in a.
inline VertexSet neighborhood(const Graph& g, const VertexSet& a) {
  VertexSet out(g.order());
  for (auto v = a.find_first(); v != VertexSet::npos; v = a.find_next(v)) out |= g.neighbors(v);
  return out - a;
}

// Components ordered by minimum vertex.
inline std::vector<VertexSet> connected_components(const Graph& g) {
  std::vector<VertexSet> comps;
  VertexSet seen(g.order());
  for (std::size_t s = 0; s < g.order(); ++s) {
    if (seen.test(s)) continue;
    VertexSet comp(g.order());
    comp.set(s);
    VertexSet frontier = comp;
    while (frontier.any()) {
      VertexSet next(g.order());
      for (auto v = frontier.find_first(); v != VertexSet::npos; v = frontier.find_next(v))
        next |= g.neighbors(v);
      next -= comp;
      comp |= next;
      frontier = std::move(next);
    }
    seen |= comp;
    comps.push_back(std::move(comp));
  }
  return comps;
}

inline bool is_connected(const Graph& g) { return connected_components(g).size() <= 1; }

inline bool is_acyclic(const Graph& g) {
  return g.edge_count() + connected_components(g).size() == g.order();
}

inline Graph disjoint_union(const Graph& a, const Graph& b) {
  std::vector<Edge> edges = a.edges();
  const auto shift = static_cast<Vertex>(a.order());
  for (const Edge& e : b.edges()) edges.push_back({e.u + shift, e.v + shift});
  return Graph(a.order() + b.order(), edges);
}

// perm[old] = new
inline Graph relabel(const Graph& g, std::span<const Vertex> perm) {
  if (perm.size() != g.order()) throw ContractViolation("permutation has wrong length");
  std::vector<Edge> edges;
  for (const Edge& e : g.edges()) edges.push_back({perm[e.u], perm[e.v]});
  return Graph(g.order(), edges, g.name());
}

inline Graph edgeless_graph(std::size_t n) { return Graph(n); }

inline Graph complete_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v) edges.push_back({Vertex(u), Vertex(v)});
  return Graph(n, edges);
}

inline Graph path_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v) edges.push_back({Vertex(v - 1), Vertex(v)});
  return Graph(n, edges);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t v = 0; v < n; ++v) edges.push_back({Vertex(v), Vertex((v + 1) % n)});
  return Graph(n, edges);
}

// K_{1,leaves} with center 0.
inline Graph star_graph(std::size_t leaves) {
  std::vector<Edge> edges;
  for (std::size_t v = 1; v <= leaves; ++v) edges.push_back({0, Vertex(v)});
  return Graph(leaves + 1, edges);
}

}  // namespace wsm
