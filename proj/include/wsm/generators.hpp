#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "wsm/graph.hpp"
#include "wsm/modulator.hpp"
#include "wsm/rankwidth.hpp"
#include "wsm/split.hpp"

namespace wsm {

using Rng = std::mt19937_64;

// G(n, p) with a fixed generator; uniform_real_distribution output differs
// between standard libraries, so edges are drawn from raw 64-bit words.
inline Graph random_graph(Rng& rng, std::size_t n, double p) {
  const auto threshold = static_cast<std::uint64_t>(p * 18446744073709551615.0);
  std::vector<Edge> edges;
  for (std::size_t u = 0; u < n; ++u)
    for (std::size_t v = u + 1; v < n; ++v)
      if (rng() <= threshold) edges.push_back({Vertex(u), Vertex(v)});
  return Graph(n, edges);
}

inline std::size_t uniform_index(Rng& rng, std::size_t bound) { return rng() % bound; }

// Random labelled tree via attachment to a uniformly chosen earlier vertex.
inline Graph random_tree(Rng& rng, std::size_t n) {
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v)
    edges.push_back({Vertex(uniform_index(rng, v)), Vertex(v)});
  return Graph(n, edges);
}

// Rejection-sampled connected G(n, p).
inline Graph random_connected_graph(Rng& rng, std::size_t n, double p) {
  for (;;) {
    Graph g = random_graph(rng, n, p);
    if (is_connected(g)) return g;
  }
}

// Connected random graph on n vertices whose rank-width is at least min_rw.
inline Graph random_wide_graph(Rng& rng, std::size_t n, int min_rw, double p = 0.5) {
  for (;;) {
    Graph g = random_connected_graph(rng, n, p);
    if (rank_width_exact(g, {std::max<std::size_t>(n, 16), min_rw - 1}).exceeds_cap) return g;
  }
}

inline bool coin(Rng& rng, double p) {
  return rng() <= static_cast<std::uint64_t>(p * 18446744073709551615.0);
}

// Cograph built by random disjoint unions and joins; connected means the top
// operation is a join.
inline Graph random_cograph(Rng& rng, std::size_t n, bool connected = true) {
  if (n <= 1) return Graph(n);
  const std::size_t left = 1 + uniform_index(rng, n - 1);
  const bool join = connected || coin(rng, 0.5);
  const Graph a = random_cograph(rng, left, false), b = random_cograph(rng, n - left, false);
  GraphBuilder gb(n);
  for (const Edge& e : a.edges()) gb.add_edge(e.u, e.v);
  for (const Edge& e : b.edges()) gb.add_edge(Vertex(left) + e.u, Vertex(left) + e.v);
  if (join)
    for (std::size_t u = 0; u < left; ++u)
      for (std::size_t v = left; v < n; ++v) gb.add_edge(Vertex(u), Vertex(v));
  return gb.build();
}

// Tree whose maximum degree stays within max_degree.
inline Graph random_bounded_tree(Rng& rng, std::size_t n, std::size_t max_degree) {
  std::vector<std::size_t> deg(n, 0);
  std::vector<Edge> edges;
  for (std::size_t v = 1; v < n; ++v) {
    std::vector<std::size_t> open;
    for (std::size_t u = 0; u < v; ++u)
      if (deg[u] + 1 < max_degree || (u == 0 && deg[u] < max_degree)) open.push_back(u);
    if (open.empty()) open.push_back(v - 1);
    const std::size_t u = open[uniform_index(rng, open.size())];
    ++deg[u];
    ++deg[v];
    edges.push_back({Vertex(u), Vertex(v)});
  }
  return Graph(n, edges);
}

// A connected graph of rank-width <= c on n vertices.
inline Graph random_narrow_module(Rng& rng, std::size_t n, int c) {
  if (c <= 0) return Graph(std::min<std::size_t>(n, 1));
  if (c == 1 || n <= 3) return coin(rng, 0.5) ? random_tree(rng, n) : random_cograph(rng, n);
  for (int attempt = 0; attempt < 64; ++attempt) {
    Graph g = random_connected_graph(rng, n, 0.5);
    if (!rank_width_exact(g, {16, c}).exceeds_cap) return g;
  }
  return random_tree(rng, n);
}

struct PlantedInstance {
  Graph graph;
  WsModulator plant;
};

// Appends k connected modules of rank-width <= c (sizes 1..module_size) to a
// host graph; each frontier is a random nonempty subset of its module, joined
// to a random part of the host and completely to some earlier frontiers. The
// result is shuffled.
inline PlantedInstance attach_modules(Rng& rng, const Graph& host, std::size_t k, int c,
                                      std::size_t module_size, const ClassDescriptor& target) {
  std::vector<Graph> mods;
  std::size_t n = host.order();
  for (std::size_t i = 0; i < k; ++i) {
    mods.push_back(random_narrow_module(rng, 1 + uniform_index(rng, std::max<std::size_t>(module_size, 1)), c));
    n += mods.back().order();
  }
  GraphBuilder gb(n);
  for (const Edge& e : host.edges()) gb.add_edge(e.u, e.v);
  std::vector<std::vector<Vertex>> ids(k), front(k);
  Vertex next = static_cast<Vertex>(host.order());
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t v = 0; v < mods[i].order(); ++v) ids[i].push_back(next++);
    for (const Edge& e : mods[i].edges()) gb.add_edge(ids[i][e.u], ids[i][e.v]);
    for (Vertex v : ids[i])
      if (coin(rng, 0.5)) front[i].push_back(v);
    if (front[i].empty()) front[i].push_back(ids[i][uniform_index(rng, ids[i].size())]);
    for (std::size_t w = 0; w < host.order(); ++w)
      if (coin(rng, 0.4))
        for (Vertex f : front[i]) gb.add_edge(f, Vertex(w));
    for (std::size_t j = 0; j < i; ++j)
      if (coin(rng, 0.4))
        for (Vertex f : front[i])
          for (Vertex t : front[j]) gb.add_edge(f, t);
  }
  const Graph raw = gb.build();
  std::vector<Vertex> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  PlantedInstance out{relabel(raw, perm), {}};
  out.plant.c = c;
  out.plant.target = target;
  for (std::size_t i = 0; i < k; ++i) {
    VertexSet m(n);
    for (Vertex v : ids[i]) m.set(perm[v]);
    out.plant.modules.push_back(make_split_module(out.graph, m));
  }
  return out;
}

// A random member of the class on about n vertices.
inline Graph random_class_member(Rng& rng, std::size_t n, const ClassDescriptor& target) {
  switch (target.kind) {
    case ClassDescriptor::empty: return Graph(0);
    case ClassDescriptor::edgeless: return Graph(n);
    case ClassDescriptor::forest: {
      const Graph t = random_tree(rng, n);
      std::vector<Edge> keep;
      for (const Edge& e : t.edges())
        if (coin(rng, 0.7)) keep.push_back(e);
      return Graph(n, keep);
    }
    case ClassDescriptor::obstructions: {
      Graph g = random_graph(rng, n, 0.3);
      for (;;) {
        const auto occ = enumerate_obstructions(g, target.obs);
        if (occ.empty()) return g;
        g = remove_vertices(g, make_set(g.order(), {first_member(occ.front())})).graph;
      }
    }
  }
  return Graph(0);
}

// Graph with k planted split-modules of rank-width <= c around a member of
// the target class; the plant is a (k, c)-well-structured modulator.
inline PlantedInstance gen_planted(std::uint64_t seed, std::size_t k, int c,
                                   std::size_t module_size, const ClassDescriptor& target,
                                   std::size_t base_size = 4) {
  Rng rng(seed);
  const Graph base = random_class_member(rng, base_size, target);
  return attach_modules(rng, base, k, c, module_size, target);
}

// A connected core of rank-width >= c+2 with k small modules attached, so the
// whole graph is above the threshold of ~_c.
inline PlantedInstance gen_threshold(std::uint64_t seed, std::size_t core, std::size_t k, int c,
                                     std::size_t module_size, const ClassDescriptor& target) {
  Rng rng(seed);
  const Graph wide = random_wide_graph(rng, core, c + 2);
  return attach_modules(rng, wide, k, c, module_size, target);
}

// The path on 2i+1 vertices: vertex cover grows with i while a single
// split-module of rank-width 1 covers it.
inline Graph gen_vc_gap_family(std::size_t i) {
  if (i < 1) throw ContractViolation("gap family starts at i = 1");
  return path_graph(2 * i + 1);
}

// Cycles joined in a chain, with long pendant trees and paths; maximum degree
// at most 4.
inline Graph gen_cycles_with_pendants(std::uint64_t seed, std::size_t cycles,
                                      std::size_t pendant_total) {
  Rng rng(seed);
  GraphBuilder gb;
  std::vector<std::size_t> deg;
  auto add = [&]() {
    deg.push_back(0);
    return gb.add_vertex();
  };
  auto link = [&](Vertex u, Vertex v) {
    gb.add_edge(u, v);
    ++deg[u];
    ++deg[v];
  };
  std::vector<Vertex> cycle_vertices;
  Vertex prev = -1;
  for (std::size_t i = 0; i < cycles; ++i) {
    const std::size_t len = 3 + uniform_index(rng, 4);
    std::vector<Vertex> cyc;
    for (std::size_t j = 0; j < len; ++j) cyc.push_back(add());
    for (std::size_t j = 0; j < len; ++j) link(cyc[j], cyc[(j + 1) % len]);
    if (prev >= 0) {
      // a path of 0..4 extra vertices between consecutive cycles
      Vertex at = prev;
      for (std::size_t s = uniform_index(rng, 5); s > 0; --s) {
        const Vertex v = add();
        link(at, v);
        at = v;
      }
      link(at, cyc[0]);
    }
    prev = cyc[len / 2];
    cycle_vertices.insert(cycle_vertices.end(), cyc.begin(), cyc.end());
  }
  std::size_t left = pendant_total;
  while (left > 0) {
    std::vector<Vertex> open;
    for (Vertex v : cycle_vertices)
      if (deg[v] < 4) open.push_back(v);
    if (open.empty()) break;
    const Vertex root = open[uniform_index(rng, open.size())];
    const std::size_t size = std::min(left, 3 + uniform_index(rng, 12));
    left -= size;
    const Graph t = coin(rng, 0.5) ? path_graph(size) : random_bounded_tree(rng, size, 3);
    std::vector<Vertex> ids;
    for (std::size_t j = 0; j < size; ++j) ids.push_back(add());
    for (const Edge& e : t.edges()) link(ids[e.u], ids[e.v]);
    link(root, ids[0]);
  }
  return gb.build();
}

}  // namespace wsm
