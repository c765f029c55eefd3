// Acceptance run: nine checks, one PASS/FAIL line each. Exit status is the
// number of failed checks.

#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "wsm/catalog.hpp"
#include "wsm/generators.hpp"
#include "wsm/kernel.hpp"
#include "wsm/mso_game.hpp"
#include "wsm/oracles.hpp"

using namespace wsm;

namespace {

const ClassDescriptor kForest = ClassDescriptor::make(ClassDescriptor::forest);
const ClassDescriptor kEdgeless = ClassDescriptor::make(ClassDescriptor::edgeless);
const ClassDescriptor kEmpty = ClassDescriptor::make(ClassDescriptor::empty);

// Kernel size per feedback vertex for the bounded-degree family, measured on
// the first run (worst 16.33 over seeds 1..50) and kept as a regression bound.
constexpr double kFvsAlpha = 17.0;

Formula formula(const std::string& name) {
  return read_formula_file(std::string(WSM_DATA_DIR) + "/formulas/" + name + ".mso");
}

struct Outcome {
  bool pass = true;
  std::string detail;
  double limit_s = 0;
};

// Counts failures; the first one is kept for the report line.
struct Tally {
  int checked = 0;
  int failed = 0;
  std::string first;

  void expect(bool ok, const std::string& what) {
    ++checked;
    if (ok) return;
    if (failed++ == 0) first = what;
  }
  Outcome outcome(std::string detail, double limit_s) const {
    if (failed) detail += "; " + std::to_string(failed) + " violations, first: " + first;
    return {failed == 0, detail, limit_s};
  }
};

std::string graph_line(const Graph& g) {
  std::ostringstream out;
  out << "n=" << g.order();
  for (const Edge& e : g.edges()) out << ' ' << e.u + 1 << '-' << e.v + 1;
  return out.str();
}

Outcome rank_width_check() {
  Tally t;
  const auto start = std::chrono::steady_clock::now();
  const Graph c5 = cycle_graph(5);
  const auto r = rank_width_exact(c5);
  t.expect(r.width == 2 && r.witness && decomposition_width(c5, *r.witness) == 2, "C5 width or witness");
  const double c5_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  t.expect(c5_s < 1.0, "C5 took " + std::to_string(c5_s) + " s");
  int graphs = 0;
  for (std::size_t m = 1; m <= 7; ++m)
    for (const Graph& g : graph_catalog(m)) {
      if (!is_connected(g)) continue;
      ++graphs;
      t.expect(rank_width_exact(g).width == oracle::exhaustive_rank_width(g), graph_line(g));
    }
  return t.outcome("rw(C5)=" + std::to_string(r.width) + ", " + std::to_string(graphs) +
                       " connected graphs n<=7 against tree enumeration",
                   600);
}

Outcome sim_classes_check() {
  Tally t;
  Rng rng(2);
  // no graph on 7 or fewer vertices has rank-width 3
  for (int i = 0; i < 200; ++i) {
    const Graph g = random_wide_graph(rng, 8, 3);
    t.expect(sim_c_classes(g, 1).classes == oracle::brute_sim_classes(g, 1), graph_line(g));
  }
  return t.outcome("200 connected graphs n=8, rw>=3, c=1", 300);
}

// Seeded threshold instances with at most max_n vertices, c alternating 0/1.
template <class F>
void threshold_instances(std::uint64_t seed, int count, std::size_t max_n, const ClassDescriptor& target,
                         F&& body) {
  Rng rng(seed);
  for (int done = 0; done < count;) {
    const int c = done % 2;
    const auto inst = gen_threshold(rng(), c == 0 ? 6 : 8, 1 + uniform_index(rng, 3), c,
                                    1 + uniform_index(rng, 2), target);
    if (inst.graph.order() > max_n) continue;
    body(inst.graph, c);
    ++done;
  }
}

Outcome forest_wsm_check() {
  Tally t;
  int worst_num = 0, worst_den = 1;
  threshold_instances(3, 200, 12, kForest, [&](const Graph& g, int c) {
    const WsModulator x = wsm_forest_3approx(g, c);
    const int opt = oracle::exact_wsn(g, c, kForest);
    t.expect(verify_wsm(g, x), "verify " + graph_line(g));
    t.expect(static_cast<int>(x.size()) <= 3 * opt, "ratio " + graph_line(g));
    if (opt > 0 && x.size() * worst_den > static_cast<std::size_t>(worst_num * opt)) {
      worst_num = static_cast<int>(x.size());
      worst_den = opt;
    }
  });
  return t.outcome("200 instances n<=12, worst ratio " + std::to_string(worst_num) + "/" +
                       std::to_string(worst_den),
                   900);
}

Outcome obstruction_wsm_check() {
  Tally t;
  const ClassDescriptor cluster = ClassDescriptor::from_obstructions(ObstructionSet({path_graph(3)}), "P3");
  for (const ClassDescriptor* target : {&kEdgeless, &cluster}) {
    threshold_instances(target == &kEdgeless ? 4 : 5, 100, 12, *target, [&](const Graph& g, int c) {
      const WsModulator x = wsm_obstruction_approx(g, c, *target);
      const int opt = oracle::exact_wsn(g, c, *target);
      t.expect(verify_wsm(g, x), "verify " + graph_line(g));
      t.expect(x.size() <= target->obs.r * static_cast<std::size_t>(opt), "ratio " + graph_line(g));
      const auto w = build_hitting_instance(g, c, target->obs);
      t.expect(oracle::exact_hitting_set(w.ground.size(), w.sets) == opt, "hitting " + graph_line(g));
    });
  }
  return t.outcome("100 instances each for {K2} (r=2) and {P3} (r=3), n<=12", 1200);
}

Outcome fvs_check() {
  Tally t;
  Rng rng(5);
  for (int i = 0; i < 500; ++i) {
    const Graph g = random_graph(rng, 4 + uniform_index(rng, 11), 0.1 + 0.1 * (i % 4));
    const VertexSet s = fvs_2approx(g);
    t.expect(is_acyclic(remove_vertices(g, s).graph), "not a fvs " + graph_line(g));
    t.expect(static_cast<int>(s.count()) <= 2 * oracle::exact_fvs(g), "ratio " + graph_line(g));
  }
  return t.outcome("500 graphs n<=14", 300);
}

Outcome mc_kernel_check() {
  Tally t;
  const std::vector<std::pair<std::string, Formula>> phis{
      {"three_colorable", formula("three_colorable")},
      {"isolated_vertex", formula("isolated_vertex")},
      {"dominating_vertex", formula("dominating_vertex")},
      {"triangle", formula("triangle")},
  };
  const KernelCaps caps;
  Rng rng(6);
  std::size_t largest = 0;
  for (int i = 0; i < 100; ++i) {
    const auto inst = gen_planted(rng(), 1 + uniform_index(rng, 4), 1, 5, kEmpty, 0);
    for (const auto& [name, phi] : phis) {
      const KernelOutput out = mc_kernel(inst.graph, phi, inst.plant, caps);
      largest = std::max(largest, out.graph.order());
      t.expect(evaluate(out.graph, phi) == evaluate(inst.graph, phi), name + " " + graph_line(inst.graph));
      t.expect(out.graph.order() <= inst.plant.size() * caps.size_cap, "size " + graph_line(inst.graph));
    }
  }
  // a tighter cap forces real replacements; modules with no representative
  // that small are reported by SearchExhausted and skipped
  KernelCaps tight;
  tight.size_cap = 3;
  int shrunk = 0, skipped = 0;
  Rng again(6);
  for (int i = 0; i < 100; ++i) {
    const auto inst = gen_planted(again(), 1 + uniform_index(again, 4), 1, 5, kEmpty, 0);
    for (std::size_t f = 1; f < phis.size(); ++f) {
      const auto& [name, phi] = phis[f];
      KernelOutput out;
      try {
        out = mc_kernel(inst.graph, phi, inst.plant, tight);
      } catch (const SearchExhausted&) {
        ++skipped;
        continue;
      }
      if (out.graph.order() < inst.graph.order()) ++shrunk;
      t.expect(evaluate(out.graph, phi) == evaluate(inst.graph, phi), name + " cap 3 " + graph_line(inst.graph));
      t.expect(out.graph.order() <= inst.plant.size() * tight.size_cap, "size cap 3 " + graph_line(inst.graph));
    }
  }
  t.expect(shrunk > 0, "no kernel shrank at cap 3");
  return t.outcome("100 planted instances k<=4, modules<=5, 4 sentences, largest kernel " +
                       std::to_string(largest) + "; cap 3: " + std::to_string(shrunk) + " shrunk, " +
                       std::to_string(skipped) + " without representative",
                   1800);
}

Outcome opt_kernel_check() {
  Tally t;
  const std::vector<std::pair<std::string, Formula>> phis{
      {"vertex_cover", formula("vertex_cover")},
      {"dominating_set", formula("dominating_set")},
  };
  Rng rng(7);
  int direct = 0;
  for (int done = 0; done < 50;) {
    const auto inst = gen_planted(rng(), 2 + uniform_index(rng, 2), 1, 4, kEmpty, 0);
    if (inst.graph.order() > 12) continue;
    ++done;
    for (const auto& [name, phi] : phis) {
      const auto want = oracle::exact_opt_mso(inst.graph, phi);
      const KernelOutput out = opt_annotated_kernel(inst.graph, inst.plant, phi, want.value_or(0));
      const auto got = oracle::exact_annotated_opt(out.graph, *out.annotation, phi);
      t.expect(want && got && BigInt(*want) == *got, name + " optimum " + graph_line(inst.graph));
      if (!want) continue;
      for (int r : {*want - 1, *want}) {
        const WinWinResult res = opt_winwin(inst.graph, phi, r, inst.plant);
        if (!res.direct) continue;
        ++direct;
        t.expect(res.out.verdict && *res.out.verdict == (*want <= r),
                 name + " direct verdict " + graph_line(inst.graph));
      }
    }
  }
  t.expect(direct > 0, "direct branch never taken");
  return t.outcome("50 planted instances n<=12, " + std::to_string(direct) + " direct-branch verdicts", 1800);
}

// Cycle rank m - n + components; equals the minimum feedback vertex set when
// cycles are vertex-disjoint, as in the generator.
int cycle_rank(const Graph& g) {
  return static_cast<int>(g.edge_count() + connected_components(g).size()) - static_cast<int>(g.order());
}

Outcome fvs_kernel_check() {
  Tally t;
  const std::vector<std::pair<std::string, Formula>> phis{
      {"isolated_vertex", formula("isolated_vertex")},
      {"dominating_vertex", formula("dominating_vertex")},
      {"min_degree_one", formula("min_degree_one")},
  };
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const Graph g = gen_cycles_with_pendants(seed, 3, 40);
    const int fvs = cycle_rank(g);
    const Formula& phi = phis[seed % phis.size()].second;
    const KernelOutput out = fvs_bd_kernel(g, phi, 4, {});
    t.expect(evaluate(out.graph, phi) == evaluate(g, phi), phis[seed % phis.size()].first + " seed " +
                                                              std::to_string(seed));
    const double ratio = static_cast<double>(out.graph.order()) / std::max(fvs, 1);
    worst = std::max(worst, ratio);
    t.expect(ratio <= kFvsAlpha, "size " + std::to_string(out.graph.order()) + " seed " + std::to_string(seed));
  }
  std::ostringstream d;
  d << "50 instances, degree<=4, |FVS|=3, worst |V(kernel)|/|FVS| " << worst << " (alpha " << kFvsAlpha << ")";
  return t.outcome(d.str(), 1800);
}

Outcome game_check() {
  Tally t;
  std::vector<Graph> graphs;
  for (std::size_t m = 1; m <= 5; ++m)
    for (const Graph& g : graph_catalog(m)) graphs.push_back(g);
  std::vector<std::pair<std::string, Formula>> corpus;
  for (const char* name : {"dominating_set", "dominating_vertex", "has_edge", "independent_set",
                           "isolated_vertex", "min_degree_one", "split_in_two", "triangle", "two_vertices",
                           "vertex_cover"}) {
    Formula phi = formula(name);
    if (phi.quantifier_rank() <= 2) corpus.emplace_back(name, std::move(phi));
  }
  // every graph with every set: covers sentences and one-set formulas alike
  std::vector<Structure> pool;
  for (const Graph& g : graphs)
    for (Mask z = 0; z <= full_mask(g.order()); ++z) pool.push_back({g, {from_mask(g.order(), z)}, {}});
  int equivalent = 0;
  for (int q = 1; q <= 2; ++q) {
    for (std::size_t i = 0; i < graphs.size(); ++i) {
      const Structure a{graphs[i], {}, {}};
      t.expect(game_equivalent({a, a, q}), "reflexive " + graph_line(graphs[i]));
      for (std::size_t j = i + 1; j < graphs.size(); ++j) {
        const Structure b{graphs[j], {}, {}};
        t.expect(game_equivalent({a, b, q}) == game_equivalent({b, a, q}), "symmetric");
      }
    }
    TypeTable table;
    std::vector<TypeId> id;
    for (const auto& s : pool) id.push_back(table.type_of(s, q));
    std::vector<std::vector<char>> truth;
    for (const auto& s : pool) {
      std::vector<char> row;
      for (const auto& [name, phi] : corpus)
        row.push_back(phi.free_sets().empty() ? evaluate(s.graph, phi) : evaluate(s, phi));
      truth.push_back(std::move(row));
    }
    for (std::size_t i = 0; i < pool.size(); ++i)
      for (std::size_t j = i + 1; j < pool.size(); ++j) {
        if (id[i] != id[j]) continue;
        ++equivalent;
        for (std::size_t f = 0; f < corpus.size(); ++f) {
          if (corpus[f].second.quantifier_rank() > q) continue;
          t.expect(truth[i][f] == truth[j][f], corpus[f].first + " q=" + std::to_string(q));
        }
      }
  }
  return t.outcome(std::to_string(graphs.size()) + " graphs n<=5, " + std::to_string(pool.size()) +
                       " structures, " + std::to_string(corpus.size()) + " formulas, " +
                       std::to_string(equivalent) + " equivalent pairs",
                   1200);
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks{
      {"rank-width", rank_width_check},
      {"~c partition", sim_classes_check},
      {"forest modulator 3-approximation", forest_wsm_check},
      {"obstruction modulator r-approximation", obstruction_wsm_check},
      {"fvs 2-approximation", fvs_check},
      {"model-checking kernel", mc_kernel_check},
      {"annotated optimization kernel", opt_kernel_check},
      {"bounded-degree fvs kernel", fvs_kernel_check},
      {"game equivalence", game_check},
  };
  int failed = 0;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = checks[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what(), 0};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.limit_s > 0 && secs > o.limit_s) {
      o.pass = false;
      o.detail += "; over time limit " + std::to_string(static_cast<int>(o.limit_s)) + " s";
    }
    if (!o.pass) ++failed;
    std::printf("%s %d %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", static_cast<int>(i + 1),
                checks[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed;
}
