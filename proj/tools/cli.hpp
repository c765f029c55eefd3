#pragma once

// Command-line front end. run_command parses an argument list, dispatches to
// one subcommand and writes a line-oriented "key: value" report.

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wsm/annotation.hpp"
#include "wsm/errors.hpp"
#include "wsm/generators.hpp"
#include "wsm/graph_io.hpp"
#include "wsm/kernel.hpp"
#include "wsm/modulator.hpp"
#include "wsm/mso.hpp"
#include "wsm/rankwidth.hpp"
#include "wsm/split.hpp"

namespace wsm::cli {

enum Status : int {
  yes = 0,
  ok = 0,
  no = 1,
  usage = 2,
  capacity = 3,
  contract = 4,
  internal = 5,
};

struct RunConfig {
  std::string command;
  std::vector<std::string> positional;
  int c = 1;
  std::string target = "forest";
  std::string formula;
  std::string budget;
  std::uint64_t seed = 1;
  std::size_t cap_rw = 16;
  std::size_t cap_game = 9;
  std::size_t cap_size = 6;
  std::optional<std::size_t> max_degree;
  std::string output;

  KernelCaps caps() const {
    KernelCaps k;
    k.size_cap = cap_size;
    k.game.max_vertices = cap_game;
    k.exact_rw_limit = cap_rw;
    return k;
  }
};

// Raised for argument problems detected after parsing.
class UsageError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline std::string join(const VertexSet& s) {
  std::string out;
  for (Vertex v : members(s)) {
    if (!out.empty()) out += ' ';
    out += std::to_string(v + 1);
  }
  return out.empty() ? "-" : out;
}

inline const std::string& arg(const RunConfig& cfg, std::size_t i, const char* what) {
  if (cfg.positional.size() <= i) throw UsageError(cfg.command + ": missing " + what);
  return cfg.positional[i];
}

inline Graph load_graph(const RunConfig& cfg) {
  const std::string& path = arg(cfg, 0, "graph file");
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open " + path);
  return parse_gr(in);
}

inline Formula load_formula(const RunConfig& cfg) {
  if (cfg.formula.empty()) throw UsageError(cfg.command + ": --formula is required");
  std::ifstream probe(cfg.formula);
  if (!probe) throw UsageError("cannot open " + cfg.formula);
  return read_formula_file(cfg.formula);
}

inline BigInt load_budget(const RunConfig& cfg) {
  if (cfg.budget.empty()) throw UsageError(cfg.command + ": --budget is required");
  try {
    return BigInt(cfg.budget);
  } catch (const std::exception&) {
    throw UsageError("bad budget '" + cfg.budget + "'");
  }
}

inline std::size_t count_arg(const RunConfig& cfg, std::size_t i, const char* what) {
  const std::string& s = arg(cfg, i, what);
  const auto v = wsm::detail::to_integer(s);
  if (!v || *v < 0) throw UsageError(std::string("bad ") + what + " '" + s + "'");
  return static_cast<std::size_t>(*v);
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

inline void report_modulator(std::ostream& out, const WsModulator& x) {
  out << "class: " << to_string(x.target) << '\n';
  out << "c: " << x.c << '\n';
  out << "k: " << x.size() << '\n';
  for (std::size_t i = 0; i < x.size(); ++i)
    out << "module " << i + 1 << ": " << join(x.modules[i].vertices)
        << " | frontier: " << join(x.modules[i].frontier) << '\n';
}

inline std::vector<std::string> modulator_comments(const WsModulator& x) {
  std::vector<std::string> lines;
  lines.push_back("class: " + to_string(x.target));
  lines.push_back("c: " + std::to_string(x.c));
  for (std::size_t i = 0; i < x.size(); ++i)
    lines.push_back("module " + std::to_string(i + 1) + ": " + join(x.modules[i].vertices));
  return lines;
}

inline void verified(std::ostream& out, bool good, const std::string& what) {
  if (!good) throw InvariantViolation("self-check failed: " + what);
  out << "verify: ok\n";
}

// ---- subcommands ----

inline int cmd_rankwidth(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const auto res = rank_width_exact(g, {cfg.cap_rw, std::nullopt});
  out << "vertices: " << g.order() << '\n';
  out << "edges: " << g.edge_count() << '\n';
  out << "rankwidth: " << res.width << '\n';
  const auto& d = *res.witness;
  out << "tree-nodes: " << d.node_count() << '\n';
  for (std::size_t a = 0; a < d.tree.size(); ++a)
    for (int b : d.tree[a])
      if (static_cast<std::size_t>(b) > a) out << "tree-edge: " << a << ' ' << b << '\n';
  for (std::size_t v = 0; v < g.order(); ++v) out << "leaf: " << v + 1 << ' ' << d.leaf_of[v] << '\n';
  verified(out, decomposition_width(g, d) == res.width, "witness width");
  return ok;
}

inline int cmd_cutrank(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  VertexSet u(g.order());
  for (std::size_t i = 1; i < cfg.positional.size(); ++i) {
    const std::size_t v = count_arg(cfg, i, "vertex");
    if (v < 1 || v > g.order()) throw UsageError("vertex " + cfg.positional[i] + " out of range");
    u.set(v - 1);
  }
  const int r = cut_rank(g, u);
  out << "set: " << join(u) << '\n';
  out << "cutrank: " << r << '\n';
  verified(out, cut_rank(g, ~u) == r, "cut-rank symmetry");
  return ok;
}

inline int cmd_splits(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const auto trees = split_decomposition(g);
  out << "components: " << trees.size() << '\n';
  for (std::size_t ti = 0; ti < trees.size(); ++ti) {
    const SplitTree& t = trees[ti];
    out << "component " << ti + 1 << ": " << join(t.vertices) << '\n';
    for (std::size_t b = 0; b < t.bags.size(); ++b) {
      out << "bag " << ti + 1 << '.' << b + 1 << ": " << to_string(t.bags[b].kind);
      for (int e : t.bags[b].elements) {
        const auto& el = t.elements[e];
        if (el.is_marker())
          out << " >" << ti + 1 << '.' << t.elements[el.twin].bag + 1;
        else
          out << ' ' << el.vertex + 1;
      }
      out << '\n';
    }
  }
  verified(out, recompose(trees, g.order()) == g, "recomposition");
  return ok;
}

inline int cmd_classes(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const auto p = sim_c_classes(g, cfg.c, cfg.cap_rw);
  out << "c: " << cfg.c << '\n';
  out << "whole-graph: " << (p.whole_graph ? "yes" : "no") << '\n';
  out << "classes: " << p.classes.size() << '\n';
  for (std::size_t i = 0; i < p.classes.size(); ++i)
    out << "class " << i + 1 << ": " << join(p.classes[i]) << '\n';
  VertexSet seen(g.order());
  bool good = true;
  for (const auto& s : p.classes) {
    good = good && !s.intersects(seen) && is_split_module(g, s) &&
           rank_width_at_most(induced_subgraph(g, s).graph, cfg.c, cfg.cap_rw);
    seen |= s;
  }
  verified(out, good && seen.count() == g.order(), "partition into small split-modules");
  return ok;
}

inline int cmd_wsm(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const ClassDescriptor target = parse_class_descriptor(cfg.target);
  const WsModulator x = find_wsm(g, cfg.c, target, cfg.cap_rw);
  report_modulator(out, x);
  verified(out, verify_wsm(g, x, cfg.cap_rw), "well-structured modulator");
  return ok;
}

inline int cmd_kernel(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const Formula phi = load_formula(cfg);
  const ClassDescriptor target = parse_class_descriptor(cfg.target);
  KernelOutput k;
  if (cfg.max_degree) {
    if (target.kind != ClassDescriptor::forest)
      throw UsageError("--max-degree needs --class forest");
    k = fvs_bd_kernel(g, phi, *cfg.max_degree, cfg.caps());
  } else {
    k = mc_kernel(g, phi, target, cfg.c, cfg.caps());
  }
  out << "input-vertices: " << g.order() << '\n';
  out << "kernel-vertices: " << k.graph.order() << '\n';
  out << "kernel-edges: " << k.graph.edge_count() << '\n';
  if (k.verdict) {
    out << "verdict: " << (*k.verdict ? "yes" : "no") << '\n';
  } else {
    report_modulator(out, k.modulator);
  }
  for (const auto& p : k.provenance) out << "note: " << p << '\n';
  if (!cfg.output.empty()) {
    auto comments = modulator_comments(k.modulator);
    for (const auto& p : k.provenance) comments.push_back(p);
    write_file(cfg.output, to_gr(k.graph, comments));
    out << "output: " << cfg.output << '\n';
  }
  if (k.verdict)
    verified(out, evaluate(k.graph, phi) == *k.verdict, "trivial instance answer");
  else
    verified(out, verify_wsm(k.graph, k.modulator, cfg.cap_rw), "kernel modulator");
  return ok;
}

inline int cmd_opt(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const Formula phi = load_formula(cfg);
  const BigInt r = load_budget(cfg);
  const WinWinResult res = opt_winwin(g, phi, r, cfg.c, cfg.caps());
  const KernelOutput& k = res.out;
  out << "input-vertices: " << g.order() << '\n';
  out << "branch: " << (res.direct ? "direct" : "kernel") << '\n';
  out << "kernel-vertices: " << k.graph.order() << '\n';
  out << "triples: " << k.annotation->triples.size() << '\n';
  out << "budget: " << *k.budget << '\n';
  if (k.verdict) out << "verdict: " << (*k.verdict ? "yes" : "no") << '\n';
  for (const auto& p : k.provenance) out << "note: " << p << '\n';
  if (!cfg.output.empty()) {
    std::vector<std::string> comments{"budget: " + k.budget->str()};
    for (const auto& p : k.provenance) comments.push_back(p);
    write_file(cfg.output, to_gr(k.graph, comments));
    std::ostringstream ann;
    write_annotation(ann, *k.annotation, {"budget " + k.budget->str()});
    write_file(cfg.output + ".ann", ann.str());
    out << "output: " << cfg.output << '\n';
    out << "annotation: " << cfg.output << ".ann\n";
  }
  bool good = true;
  for (const auto& t : k.annotation->triples) good = good && !t.x.intersects(t.y);
  if (k.verdict) {
    good = good && wsm::detail::solve_annotated(k.graph, *k.annotation, phi, *k.budget) == *k.verdict;
  } else {
    good = good && verify_wsm(k.graph, k.modulator, cfg.cap_rw);
  }
  verified(out, good, "annotated instance");
  if (k.verdict) return *k.verdict ? yes : no;
  return ok;
}

// Sentences are evaluated; formulas with one free set variable are optimized
// under the cardinality weights or a sidecar annotation and compared with the
// budget.
inline int cmd_check(const RunConfig& cfg, std::ostream& out) {
  const Graph g = load_graph(cfg);
  const Formula phi = load_formula(cfg);
  const std::size_t n = g.order();
  if (phi.is_sentence()) {
    const bool answer = evaluate(g, phi);
    out << "answer: " << (answer ? "yes" : "no") << '\n';
    // the answer cannot depend on vertex names
    std::vector<Vertex> perm(n);
    for (std::size_t v = 0; v < n; ++v) perm[v] = static_cast<Vertex>(n - 1 - v);
    verified(out, evaluate(relabel(g, perm), phi) == answer, "relabelled evaluation");
    return answer ? yes : no;
  }
  if (phi.free_sets().size() != 1 || !phi.free_points().empty())
    throw ContractViolation("check needs a sentence or a formula with one free set variable");
  Annotation a = Annotation::cardinality(n);
  if (cfg.positional.size() >= 2) {
    std::ifstream in(cfg.positional[1]);
    if (!in) throw UsageError("cannot open " + cfg.positional[1]);
    a = read_annotation(in, n);
  }
  const BigInt r = load_budget(cfg);
  if (n > 24) throw CapacityError("exact optimization limited to 24 vertices");
  std::optional<BigInt> best;
  Mask witness = 0;
  for (Mask z = 0; z <= full_mask(n); ++z) {
    const VertexSet zs = from_mask(n, z);
    const BigInt w = annotation_value(a, zs);
    if (best && w >= *best) continue;
    if (evaluate(Structure{g, {zs}, {}}, phi)) {
      best = w;
      witness = z;
    }
  }
  const bool answer = best && *best <= r;
  out << "optimum: " << (best ? best->str() : "none") << '\n';
  if (best) out << "witness: " << join(from_mask(n, witness)) << '\n';
  out << "answer: " << (answer ? "yes" : "no") << '\n';
  verified(out,
           !best || (evaluate(Structure{g, {from_mask(n, witness)}, {}}, phi) &&
                     annotation_value(a, from_mask(n, witness)) == *best),
           "witness");
  return answer ? yes : no;
}

inline int cmd_gen(const RunConfig& cfg, std::ostream& out) {
  const std::string& family = arg(cfg, 0, "family");
  Graph g;
  std::optional<WsModulator> plant;
  if (family == "planted" || family == "threshold") {
    const ClassDescriptor target = parse_class_descriptor(cfg.target);
    PlantedInstance inst;
    if (family == "planted") {
      inst = gen_planted(cfg.seed, count_arg(cfg, 1, "k"), cfg.c, count_arg(cfg, 2, "module size"), target);
    } else {
      const std::size_t core = count_arg(cfg, 1, "core size");
      if (core > cfg.cap_rw) throw CapacityError("core larger than --cap-rw");
      inst = gen_threshold(cfg.seed, core, count_arg(cfg, 2, "k"), cfg.c,
                           count_arg(cfg, 3, "module size"), target);
    }
    g = std::move(inst.graph);
    plant = std::move(inst.plant);
  } else if (family == "gap") {
    g = gen_vc_gap_family(count_arg(cfg, 1, "i"));
  } else if (family == "cycles") {
    g = gen_cycles_with_pendants(cfg.seed, count_arg(cfg, 1, "cycle count"),
                                 count_arg(cfg, 2, "pendant vertices"));
  } else if (family == "random") {
    Rng rng(cfg.seed);
    const std::size_t n = count_arg(cfg, 1, "n");
    const std::string& p = arg(cfg, 2, "edge probability");
    double prob = 0;
    try {
      prob = std::stod(p);
    } catch (const std::exception&) {
      throw UsageError("bad edge probability '" + p + "'");
    }
    if (prob < 0 || prob > 1) throw UsageError("edge probability outside [0, 1]");
    g = random_graph(rng, n, prob);
  } else {
    throw UsageError("unknown family '" + family + "' (planted, threshold, gap, cycles, random)");
  }
  std::vector<std::string> report{"family: " + family, "seed: " + std::to_string(cfg.seed),
                                  "vertices: " + std::to_string(g.order()),
                                  "edges: " + std::to_string(g.edge_count())};
  if (plant)
    for (auto& line : modulator_comments(*plant)) report.push_back(line);
  bool good = true;
  if (family == "planted") {
    good = verify_wsm(g, *plant, cfg.cap_rw);
  } else if (family == "threshold") {
    // the core stays outside the class, so only the modules and the width are checked
    for (const auto& m : plant->modules)
      good = good && is_split_module(g, m.vertices) &&
             rank_width_at_most(induced_subgraph(g, m.vertices).graph, cfg.c, cfg.cap_rw);
    if (g.order() <= cfg.cap_rw)
      good = good && rank_width_exact(g, {cfg.cap_rw, cfg.c + 1}).exceeds_cap;
  }
  if (!good) throw InvariantViolation("self-check failed: planted modules");
  report.push_back("verify: ok");
  if (cfg.output.empty()) {
    out << to_gr(g, report);
  } else {
    write_file(cfg.output, to_gr(g, report));
    for (const auto& line : report) out << line << '\n';
    out << "output: " << cfg.output << '\n';
  }
  return ok;
}

}  // namespace detail

inline int dispatch(const RunConfig& cfg, std::ostream& out) {
  static const std::map<std::string, std::function<int(const RunConfig&, std::ostream&)>> table{
      {"rankwidth", detail::cmd_rankwidth}, {"cutrank", detail::cmd_cutrank},
      {"splits", detail::cmd_splits},       {"classes", detail::cmd_classes},
      {"wsm", detail::cmd_wsm},             {"kernel", detail::cmd_kernel},
      {"opt", detail::cmd_opt},             {"check", detail::cmd_check},
      {"gen", detail::cmd_gen},
  };
  return table.at(cfg.command)(cfg, out);
}

// Parses args (without the program name), runs the subcommand, and maps
// library errors onto exit statuses.
inline int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"well-structured modulators and kernels", "wsmk"};
  app.require_subcommand(1);
  const std::vector<std::pair<const char*, const char*>> commands{
      {"rankwidth", "exact rank-width with a witness decomposition"},
      {"cutrank", "cut-rank of a vertex set (1-indexed vertices after the graph)"},
      {"splits", "split decomposition"},
      {"classes", "partition into maximal split-modules of rank-width <= c"},
      {"wsm", "approximate well-structured modulator to a class"},
      {"kernel", "model-checking kernel for a sentence"},
      {"opt", "annotated kernel or verdict for minimizing |S| subject to phi(S)"},
      {"check", "evaluate a sentence, or compare an optimum with the budget"},
      {"gen", "instance generators: planted, threshold, gap, cycles, random"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("inputs", cfg.positional, "graph file and further arguments");
    sub->add_option("-c", cfg.c, "rank-width bound c")->check(CLI::NonNegativeNumber);
    sub->add_option("--class", cfg.target, "forest | edgeless | empty | obstructions:<path>");
    sub->add_option("--formula", cfg.formula, "MSO formula file");
    sub->add_option("--budget", cfg.budget, "budget r");
    sub->add_option("--seed", cfg.seed, "generator seed");
    sub->add_option("--cap-rw", cfg.cap_rw, "exact rank-width vertex limit")->check(CLI::PositiveNumber);
    sub->add_option("--cap-game", cfg.cap_game, "game vertex limit")->check(CLI::PositiveNumber);
    sub->add_option("--cap-size", cfg.cap_size, "representative size cap")->check(CLI::PositiveNumber);
    sub->add_option("--max-degree", cfg.max_degree, "bounded-degree forest kernel");
    sub->add_option("-o", cfg.output, "output file");
    sub->callback([&cfg, name = std::string(name)] { cfg.command = name; });
  }
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  }
  if (cfg.command.empty()) {
    for (CLI::App* sub : app.get_subcommands()) {
      if (sub->get_help_ptr() && sub->get_help_ptr()->count() > 0) {
        out << sub->help();
        return ok;
      }
    }
  }
  try {
    return dispatch(cfg, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return usage;
  } catch (const CapacityError& e) {
    err << "capacity: " << e.what() << '\n';
    return capacity;
  } catch (const SearchExhausted& e) {
    err << "capacity: " << e.what() << " (raise --cap-size)\n";
    return capacity;
  } catch (const ContractViolation& e) {
    err << "contract: " << e.what() << '\n';
    return contract;
  } catch (const BelowThreshold& e) {
    err << "contract: below threshold: " << e.what() << '\n';
    return contract;
  } catch (const InvariantViolation& e) {
    err << "internal: " << e.what() << '\n';
    return internal;
  }
}

}  // namespace wsm::cli
