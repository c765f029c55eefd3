#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "wsm/catalog.hpp"
#include "wsm/graph.hpp"
#include "wsm/mso.hpp"
#include "wsm/rankwidth.hpp"

namespace wsm {

struct GameConfig {
  Structure left;
  Structure right;
  int rounds = 0;
};

struct GameLimits {
  std::size_t max_vertices = 9;  // for two or more rounds
  // Bound on the number of positions visited, estimated as n * (n + 2^n)^(q-1).
  double state_budget = 3e7;
};

inline double game_cost(std::size_t n, int rounds) {
  if (rounds <= 0) return 1.0;
  return static_cast<double>(n + 1) *
         std::pow(static_cast<double>(n) + std::ldexp(1.0, static_cast<int>(n)), rounds - 1);
}

inline void check_game_limits(std::size_t n, int rounds, const GameLimits& limits) {
  if (rounds < 0) throw ContractViolation("negative number of rounds");
  // one round only looks at single points, so the vertex cap is waived
  if (n > 64) throw CapacityError("games limited to 64 vertices");
  if (rounds >= 2 && n > limits.max_vertices)
    throw CapacityError("game limited to " + std::to_string(limits.max_vertices) +
                        " vertices (structure has " + std::to_string(n) + ")");
  if (game_cost(n, rounds) > limits.state_budget)
    throw CapacityError("game with " + std::to_string(rounds) + " rounds on " +
                        std::to_string(n) + " vertices exceeds the state budget");
}

using TypeId = std::uint64_t;

// Interns q-types. A rank-0 type records equalities, adjacencies and set
// memberships among the picked points (the partial-isomorphism data); a rank-r
// type is the rank-0 type together with the sets of rank-(r-1) types reachable
// by one point move and by one set move. Two positions get equal ids (from the
// same table, at the same rank) iff the Duplicator wins the r-round game
// between them.
class TypeTable {
 public:
  TypeId type_of(const Structure& s, int rounds) {
    std::vector<Mask> sets;
    for (const auto& x : s.sets) {
      if (x.size() != s.graph.order()) throw ContractViolation("set over a different universe");
      sets.push_back(to_mask(x));
    }
    std::vector<int> points;
    for (Vertex p : s.points) {
      if (static_cast<std::size_t>(p) >= s.graph.order())
        throw ContractViolation("point out of range");
      points.push_back(static_cast<int>(p));
    }
    adj_ = s.graph.masks();
    memo_.clear();
    if (scratch_.size() <= static_cast<std::size_t>(rounds)) scratch_.resize(rounds + 1);
    return rec(sets, points, rounds);
  }

  std::size_t size() const noexcept { return ids_.size(); }

 private:
  static constexpr TypeId composite_bit = TypeId{1} << 63;
  static constexpr TypeId interned_atom_bit = TypeId{1} << 62;

  struct KeyHash {
    std::size_t operator()(const std::vector<TypeId>& v) const noexcept {
      std::uint64_t h = 1469598103934665603ULL;
      for (auto x : v) {
        h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
        h *= 1099511628211ULL;
      }
      return static_cast<std::size_t>(h);
    }
  };
  using Interner = std::unordered_map<std::vector<TypeId>, TypeId, KeyHash>;

  static TypeId intern(Interner& map, const std::vector<TypeId>& key, TypeId tag) {
    if (auto it = map.find(key); it != map.end()) return it->second;
    const TypeId id = tag | map.size();
    map.emplace(key, id);
    return id;
  }

  TypeId atomic(const std::vector<Mask>& sets, const std::vector<int>& points) {
    const std::size_t l = sets.size(), k = points.size();
    if (l < 64 && k < 64 && 12 + k * l + k * (k - 1) <= 62) {
      TypeId code = l | (k << 6);
      int bit = 12;
      for (int p : points)
        for (Mask x : sets) code |= ((x >> p) & 1U) << bit++;
      for (std::size_t i = 0; i < k; ++i)
        for (std::size_t j = i + 1; j < k; ++j) {
          code |= TypeId{points[i] == points[j]} << bit++;
          code |= ((adj_[points[i]] >> points[j]) & 1U) << bit++;
        }
      return code;
    }
    std::vector<TypeId> key{l, k};
    for (int p : points)
      for (Mask x : sets) key.push_back((x >> p) & 1U);
    for (std::size_t i = 0; i < k; ++i)
      for (std::size_t j = i + 1; j < k; ++j)
        key.push_back((points[i] == points[j] ? 2U : 0U) | ((adj_[points[i]] >> points[j]) & 1U));
    return intern(atoms_, key, interned_atom_bit);
  }

  TypeId rec(std::vector<Mask>& sets, std::vector<int>& points, int rounds) {
    const TypeId atom = atomic(sets, points);
    if (rounds == 0) return atom;
    std::vector<TypeId> memo_key;
    if (rounds >= 2) {
      // Interleavings of point and set moves reach the same position.
      memo_key.reserve(3 + sets.size() + points.size());
      memo_key.push_back(static_cast<TypeId>(rounds));
      memo_key.push_back(sets.size());
      memo_key.insert(memo_key.end(), sets.begin(), sets.end());
      memo_key.insert(memo_key.end(), points.begin(), points.end());
      if (auto it = memo_.find(memo_key); it != memo_.end()) return it->second;
    }
    auto& buf = scratch_[rounds];
    buf.point_ids.clear();
    buf.set_ids.clear();
    const std::size_t n = adj_.size();
    if (rounds == 1) {
      // set moves cannot change the rank-0 outcome of a later point move
      for (std::size_t v = 0; v < n; ++v) {
        points.push_back(static_cast<int>(v));
        buf.point_ids.push_back(atomic(sets, points));
        points.pop_back();
      }
    } else {
      const auto cls = twin_classes(sets, points);
      Mask picked = 0;
      for (int p : points) picked |= Mask{1} << p;
      for (const auto& c : cls) {
        points.push_back(c.front());
        buf.point_ids.push_back(rec(sets, points, rounds - 1));
        points.pop_back();
      }
      for (Mask r = picked; r; r &= r - 1) {
        points.push_back(std::countr_zero(r));
        buf.point_ids.push_back(rec(sets, points, rounds - 1));
        points.pop_back();
      }
      // Swapping twins maps a set to an equivalent one, so only the number of
      // members taken from each twin class matters.
      std::vector<std::size_t> take(cls.size(), 0);
      const std::size_t picked_combos = std::size_t{1} << std::popcount(picked);
      for (;;) {
        Mask base = 0;
        for (std::size_t i = 0; i < cls.size(); ++i)
          for (std::size_t t = 0; t < take[i]; ++t) base |= Mask{1} << cls[i][t];
        for (std::size_t pm = 0; pm < picked_combos; ++pm) {
          Mask x = base;
          std::size_t bit = 0;
          for (Mask r = picked; r; r &= r - 1, ++bit)
            if ((pm >> bit) & 1U) x |= Mask{1} << std::countr_zero(r);
          sets.push_back(x);
          buf.set_ids.push_back(rec(sets, points, rounds - 1));
          sets.pop_back();
        }
        std::size_t i = 0;
        while (i < cls.size() && take[i] == cls[i].size()) take[i++] = 0;
        if (i == cls.size()) break;
        ++take[i];
      }
    }
    auto& p_ids = buf.point_ids;
    auto& s_ids = buf.set_ids;
    std::sort(p_ids.begin(), p_ids.end());
    p_ids.erase(std::unique(p_ids.begin(), p_ids.end()), p_ids.end());
    std::sort(s_ids.begin(), s_ids.end());
    s_ids.erase(std::unique(s_ids.begin(), s_ids.end()), s_ids.end());
    auto& key = buf.key;
    key.clear();
    key.push_back(static_cast<TypeId>(rounds));
    key.push_back(atom);
    key.push_back(p_ids.size());
    key.insert(key.end(), p_ids.begin(), p_ids.end());
    key.insert(key.end(), s_ids.begin(), s_ids.end());
    const TypeId id = intern(ids_, key, composite_bit);
    if (rounds >= 2) memo_.emplace(std::move(memo_key), id);
    return id;
  }

  // Unpicked vertices grouped into classes of pairwise twins (same set
  // memberships, same neighborhood apart from each other). Any permutation
  // inside a class is an automorphism of the position.
  std::vector<std::vector<int>> twin_classes(const std::vector<Mask>& sets,
                                             const std::vector<int>& points) const {
    const std::size_t n = adj_.size();
    Mask picked = 0;
    for (int p : points) picked |= Mask{1} << p;
    std::vector<std::vector<int>> cls;
    for (std::size_t v = 0; v < n; ++v) {
      if ((picked >> v) & 1U) continue;
      bool placed = false;
      for (auto& c : cls) {
        const int u = c.front();
        const Mask uv = (Mask{1} << u) | (Mask{1} << v);
        if ((adj_[u] & ~uv) != (adj_[v] & ~uv)) continue;
        bool same_sets = true;
        for (Mask s : sets)
          if (((s >> u) & 1U) != ((s >> v) & 1U)) same_sets = false;
        if (!same_sets) continue;
        // a class holds only true twins or only false twins
        if (c.size() > 1 &&
            static_cast<bool>((adj_[u] >> v) & 1U) != static_cast<bool>((adj_[c[0]] >> c[1]) & 1U))
          continue;
        c.push_back(static_cast<int>(v));
        placed = true;
        break;
      }
      if (!placed) cls.push_back({static_cast<int>(v)});
    }
    return cls;
  }

  struct Scratch {
    std::vector<TypeId> point_ids, set_ids, key;
  };

  std::vector<Mask> adj_;
  std::vector<Scratch> scratch_;
  Interner ids_, atoms_, memo_;
};

// Duplicator wins the q-round MSO game on the configuration.
inline bool game_equivalent(const GameConfig& cfg, const GameLimits& limits = {}) {
  if (cfg.left.sets.size() != cfg.right.sets.size() ||
      cfg.left.points.size() != cfg.right.points.size())
    throw ContractViolation("game structures interpret different numbers of variables");
  check_game_limits(cfg.left.graph.order(), cfg.rounds, limits);
  check_game_limits(cfg.right.graph.order(), cfg.rounds, limits);
  TypeTable table;
  return table.type_of(cfg.left, cfg.rounds) == table.type_of(cfg.right, cfg.rounds);
}

struct RepresentativeOptions {
  GameLimits limits;
  std::optional<int> max_rank_width;  // keep rw(h) <= c
  bool forest_only = false;
  bool singleton_boundary = false;  // every boundary set is one distinct vertex
  // Each component of h meets the first boundary set (or h is connected when
  // that set is empty), mirroring the source; keeps replaced modules inside one
  // component of the host.
  bool anchored = false;
};

struct Representative {
  Graph graph;
  std::vector<VertexSet> boundary;
  bool identity = false;
};

namespace detail {

inline bool anchored_shape(const Graph& h, const std::vector<VertexSet>& boundary) {
  const auto comps = connected_components(h);
  if (boundary.empty() || boundary.front().none()) return comps.size() <= 1;
  for (const auto& c : comps)
    if (!c.intersects(boundary.front())) return false;
  return true;
}

}  // namespace detail

// Smallest (h, boundary') with the same q-type as (g, boundary), searched over
// all graphs of fewer vertices up to isomorphism and all boundary
// interpretations. Falls back to g itself when nothing smaller exists and g
// already fits the size cap.
inline Representative find_representative(const Graph& g, const std::vector<VertexSet>& boundary,
                                          int q, std::size_t size_cap,
                                          const RepresentativeOptions& opts = {}) {
  const std::size_t n = g.order();
  for (const auto& b : boundary)
    if (b.size() != n) throw ContractViolation("boundary set over a different universe");
  Representative self{g, boundary, true};
  try {
    check_game_limits(n, q, opts.limits);
  } catch (const CapacityError&) {
    if (n <= size_cap) return self;
    throw;
  }
  const Structure source{g, boundary, {}};
  const bool anchored = opts.anchored && detail::anchored_shape(g, boundary);
  const std::size_t l = boundary.size();

  TypeTable table;
  std::vector<TypeId> target;
  for (int r = 0; r <= q; ++r) target.push_back(table.type_of(source, r));

  const std::size_t top = std::min<std::size_t>(size_cap, n == 0 ? 0 : n - 1);
  for (std::size_t m = 0; m <= top && n > 0; ++m) {
    if (m > 8) break;
    for (const Graph& h : graph_catalog(m)) {
      if (opts.forest_only && !is_acyclic(h)) continue;
      if (opts.max_rank_width &&
          rank_width_exact(h, {16, *opts.max_rank_width}).exceeds_cap)
        continue;
      // Per position the admissible boundary sets: every subset, or one vertex.
      std::vector<Mask> choices;
      if (opts.singleton_boundary) {
        for (std::size_t v = 0; v < m; ++v) choices.push_back(Mask{1} << v);
      } else {
        for (Mask b = 0; b <= full_mask(m); ++b) choices.push_back(b);
      }
      if (l > 0 && choices.empty()) continue;
      std::vector<std::size_t> pick(l, 0);
      for (;;) {
        bool ok = true;
        if (opts.singleton_boundary) {
          Mask seen = 0;
          for (std::size_t i = 0; i < l; ++i) {
            if (seen & choices[pick[i]]) ok = false;
            seen |= choices[pick[i]];
          }
        }
        std::vector<VertexSet> bnd;
        if (ok) {
          for (std::size_t i = 0; i < l; ++i) bnd.push_back(from_mask(m, choices[pick[i]]));
          if (anchored && !detail::anchored_shape(h, bnd)) ok = false;
        }
        if (ok) {
          const Structure cand{h, bnd, {}};
          bool equal = true;
          for (int r = 0; r <= q && equal; ++r) equal = table.type_of(cand, r) == target[r];
          if (equal) return {h, bnd, false};
        }
        std::size_t i = 0;
        while (i < l && pick[i] + 1 == choices.size()) pick[i++] = 0;
        if (i == l) break;
        ++pick[i];
      }
    }
  }
  if (n <= size_cap) return self;
  throw SearchExhausted("no representative with at most " + std::to_string(size_cap) +
                        " vertices has the same " + std::to_string(q) + "-type");
}

}  // namespace wsm
