#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <vector>

#include "wsm/graph.hpp"

namespace wsm {

// Upper-triangle adjacency bits of a graph with at most 11 vertices under a
// given labeling (position -> vertex).
inline std::uint64_t adjacency_code(const Graph& g, std::span<const Vertex> at) {
  std::uint64_t code = 0;
  int bit = 0;
  const auto n = at.size();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j, ++bit)
      if (g.adjacent(at[i], at[j])) code |= std::uint64_t{1} << bit;
  return code;
}

namespace detail {

// Vertices grouped by an isomorphism-invariant key; canonical labelings only
// permute within a group.
inline std::vector<std::vector<Vertex>> invariant_cells(const Graph& g) {
  const auto n = g.order();
  std::vector<std::pair<std::vector<std::size_t>, Vertex>> keyed;
  for (std::size_t v = 0; v < n; ++v) {
    std::vector<std::size_t> key{g.degree(static_cast<Vertex>(v))};
    std::vector<std::size_t> nd;
    for (Vertex w : members(g.neighbors(static_cast<Vertex>(v)))) nd.push_back(g.degree(w));
    std::sort(nd.begin(), nd.end());
    key.insert(key.end(), nd.begin(), nd.end());
    keyed.push_back({std::move(key), static_cast<Vertex>(v)});
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::vector<Vertex>> cells;
  for (std::size_t i = 0; i < keyed.size(); ++i) {
    if (i == 0 || keyed[i].first != keyed[i - 1].first) cells.emplace_back();
    cells.back().push_back(keyed[i].second);
  }
  return cells;
}

inline void canonical_search(const Graph& g, std::vector<std::vector<Vertex>>& cells,
                             std::size_t cell, std::vector<Vertex>& at, std::uint64_t& best,
                             std::vector<Vertex>& best_at) {
  if (cell == cells.size()) {
    const auto code = adjacency_code(g, at);
    if (code < best || best_at.empty()) {
      best = code;
      best_at = at;
    }
    return;
  }
  auto& c = cells[cell];
  std::sort(c.begin(), c.end());
  do {
    const auto base = at.size();
    at.insert(at.end(), c.begin(), c.end());
    canonical_search(g, cells, cell + 1, at, best, best_at);
    at.resize(base);
  } while (std::next_permutation(c.begin(), c.end()));
}

}  // namespace detail

struct CanonicalForm {
  std::uint64_t code = 0;
  std::vector<Vertex> labeling;  // position -> vertex
};

// Minimum adjacency code over invariant-respecting labelings; equal codes (and
// orders) iff the graphs are isomorphic. Intended for graphs with <= 9 vertices.
inline CanonicalForm canonical_form(const Graph& g) {
  if (g.order() > 11) throw CapacityError("canonical form limited to 11 vertices");
  auto cells = detail::invariant_cells(g);
  std::vector<Vertex> at;
  CanonicalForm out;
  detail::canonical_search(g, cells, 0, at, out.code, out.labeling);
  return out;
}

inline bool isomorphic(const Graph& a, const Graph& b) {
  return a.order() == b.order() && a.edge_count() == b.edge_count() &&
         canonical_form(a).code == canonical_form(b).code;
}

inline Graph canonical_graph(const Graph& g) {
  const auto cf = canonical_form(g);
  std::vector<Vertex> perm(g.order());
  for (std::size_t pos = 0; pos < cf.labeling.size(); ++pos) perm[cf.labeling[pos]] = Vertex(pos);
  return relabel(g, perm);
}

// Every graph on exactly m vertices, one per isomorphism class, in increasing
// canonical-code order. Built by extending the (m-1)-vertex catalog with one
// vertex in every possible way.
inline const std::vector<Graph>& graph_catalog(std::size_t m) {
  static std::mutex mu;
  static std::map<std::size_t, std::vector<Graph>> cache;
  if (m > 8) throw CapacityError("graph catalog limited to 8 vertices");
  std::lock_guard lock(mu);
  if (auto it = cache.find(m); it != cache.end()) return it->second;
  for (std::size_t k = 0; k <= m; ++k) {
    if (cache.count(k)) continue;
    std::vector<Graph> out;
    if (k == 0) {
      out.push_back(Graph(0));
    } else {
      std::map<std::uint64_t, Graph> seen;
      for (const Graph& base : cache.at(k - 1)) {
        const auto edges = base.edges();
        for (Mask nb = 0; nb < (Mask{1} << (k - 1)); ++nb) {
          std::vector<Edge> e = edges;
          for (std::size_t v = 0; v + 1 < k; ++v)
            if ((nb >> v) & 1U) e.push_back({Vertex(v), Vertex(k - 1)});
          Graph g(k, e);
          const auto cf = canonical_form(g);
          if (!seen.count(cf.code)) seen.emplace(cf.code, canonical_graph(g));
        }
      }
      for (auto& [code, g] : seen) out.push_back(std::move(g));
    }
    cache.emplace(k, std::move(out));
  }
  return cache.at(m);
}

}  // namespace wsm
