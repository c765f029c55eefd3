#pragma once

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wsm/graph.hpp"

namespace wsm {

// MSO1 over graphs. Lowercase identifiers are point variables, capitalized
// ones set variables; E is the edge relation.
struct FormulaNode {
  enum Kind : std::uint8_t {
    edge,         // E(p, q)
    equal,        // p = q
    member,       // S(p)
    negation,
    conjunction,
    disjunction,
    implication,
    exists_point,
    forall_point,
    exists_set,
    forall_set,
  };
  Kind kind;
  int lhs = -1;  // child node
  int rhs = -1;
  int p = -1;  // point slot (atoms) or bound slot (quantifiers)
  int q = -1;  // second point slot, or set slot for member atoms
  Mask free_points = 0;  // point slots occurring free below this node
  bool has_set_quantifier = false;
  int rank = 0;
};

class Formula {
 public:
  const std::vector<std::string>& free_sets() const noexcept { return free_sets_; }
  const std::vector<std::string>& free_points() const noexcept { return free_points_; }
  bool is_sentence() const noexcept { return free_sets_.empty() && free_points_.empty(); }
  int quantifier_rank() const { return nodes_.empty() ? 0 : nodes_[root_].rank; }
  bool has_set_quantifier() const { return !nodes_.empty() && nodes_[root_].has_set_quantifier; }
  const std::string& source() const noexcept { return source_; }

  const std::vector<FormulaNode>& nodes() const noexcept { return nodes_; }
  int root() const noexcept { return root_; }
  std::size_t point_slots() const noexcept { return point_names_.size(); }
  std::size_t set_slots() const noexcept { return set_names_.size(); }
  const std::string& point_name(int slot) const { return point_names_[slot]; }
  const std::string& set_name(int slot) const { return set_names_[slot]; }
  int free_set_slot(std::size_t i) const { return free_set_slots_[i]; }

 private:
  std::vector<FormulaNode> nodes_;
  int root_ = -1;
  std::vector<std::string> free_sets_;
  std::vector<int> free_set_slots_;
  std::vector<std::string> free_points_;
  std::vector<std::string> point_names_;  // per slot
  std::vector<std::string> set_names_;
  std::string source_;

  friend class FormulaParser;
};

class FormulaParser {
 public:
  FormulaParser(std::string_view text, const std::vector<std::string>& free_points)
      : text_(text) {
    f_.source_ = std::string(text);
    for (const auto& name : free_points) {
      if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
        throw ContractViolation("free point variable '" + name + "' must be lowercase");
      scope_points_.push_back({name, new_point(name)});
      f_.free_points_.push_back(name);
    }
  }

  Formula parse() {
    next();
    f_.root_ = parse_formula();
    if (tok_.kind != Tok::end) fail("unexpected '" + tok_.text + "'");
    finish(f_.root_);
    return std::move(f_);
  }

 private:
  enum class Tok { ident, lparen, rparen, comma, dot, neg, conj, disj, implies, equals, end };
  struct Token {
    Tok kind = Tok::end;
    std::string text;
    std::size_t line = 1, col = 1;
  };

  [[noreturn]] void fail(const std::string& what) const {
    throw ParseError("column " + std::to_string(tok_.col) + ": " + what, tok_.line);
  }

  void next() {
    // skip blanks and # comments
    for (;;) {
      while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance();
      if (pos_ < text_.size() && text_[pos_] == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
        continue;
      }
      break;
    }
    tok_ = Token{Tok::end, "", line_, col_};
    if (pos_ >= text_.size()) return;
    const char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      const std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
              text_[pos_] == '\''))
        advance();
      tok_.kind = Tok::ident;
      tok_.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (c == '-' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '>') {
      advance();
      advance();
      tok_.kind = Tok::implies;
      tok_.text = "->";
      return;
    }
    static const std::map<char, Tok> single{{'(', Tok::lparen}, {')', Tok::rparen},
                                            {',', Tok::comma},  {'.', Tok::dot},
                                            {'~', Tok::neg},    {'&', Tok::conj},
                                            {'|', Tok::disj},   {'=', Tok::equals}};
    const auto it = single.find(c);
    tok_.text = std::string(1, c);
    if (it == single.end()) fail("unexpected character '" + tok_.text + "'");
    tok_.kind = it->second;
    advance();
  }

  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) fail(std::string("expected ") + what);
    next();
  }

  int add(FormulaNode node) {
    f_.nodes_.push_back(node);
    return static_cast<int>(f_.nodes_.size()) - 1;
  }

  int new_point(const std::string& name) {
    f_.point_names_.push_back(name);
    if (f_.point_names_.size() > 64) fail("more than 64 point variables");
    return static_cast<int>(f_.point_names_.size()) - 1;
  }
  int new_set(const std::string& name) {
    f_.set_names_.push_back(name);
    return static_cast<int>(f_.set_names_.size()) - 1;
  }

  static bool is_keyword(const std::string& s) {
    return s == "ex" || s == "all" || s == "exS" || s == "allS";
  }

  int parse_formula() {
    const int lhs = parse_disjunction();
    if (tok_.kind != Tok::implies) return lhs;
    next();
    const int rhs = parse_formula();
    return add({FormulaNode::implication, lhs, rhs});
  }

  int parse_disjunction() {
    int lhs = parse_conjunction();
    while (tok_.kind == Tok::disj) {
      next();
      const int rhs = parse_conjunction();
      lhs = add({FormulaNode::disjunction, lhs, rhs});
    }
    return lhs;
  }

  int parse_conjunction() {
    int lhs = parse_unary();
    while (tok_.kind == Tok::conj) {
      next();
      const int rhs = parse_unary();
      lhs = add({FormulaNode::conjunction, lhs, rhs});
    }
    return lhs;
  }

  int parse_unary() {
    if (tok_.kind == Tok::neg) {
      next();
      return add({FormulaNode::negation, parse_unary()});
    }
    if (tok_.kind == Tok::lparen) {
      next();
      const int inner = parse_formula();
      expect(Tok::rparen, "')'");
      return inner;
    }
    if (tok_.kind != Tok::ident) fail(tok_.kind == Tok::end ? "unexpected end of formula"
                                                            : "unexpected '" + tok_.text + "'");
    if (is_keyword(tok_.text)) return parse_quantifier();
    return parse_atom();
  }

  int parse_quantifier() {
    const std::string q = tok_.text;
    const bool set = q == "exS" || q == "allS";
    next();
    if (tok_.kind != Tok::ident || is_keyword(tok_.text)) fail("expected a variable after " + q);
    const std::string name = tok_.text;
    const bool upper = std::isupper(static_cast<unsigned char>(name[0]));
    if (set && !upper) fail("set variable '" + name + "' must be capitalized");
    if (!set && upper) fail("point variable '" + name + "' must be lowercase");
    if (name == "E") fail("'E' is reserved for the edge relation");
    next();
    expect(Tok::dot, "'.'");
    FormulaNode node{};
    if (set) {
      node.kind = q == "exS" ? FormulaNode::exists_set : FormulaNode::forall_set;
      node.p = new_set(name);
      scope_sets_.push_back({name, node.p});
      node.lhs = parse_formula();
      scope_sets_.pop_back();
    } else {
      node.kind = q == "ex" ? FormulaNode::exists_point : FormulaNode::forall_point;
      node.p = new_point(name);
      scope_points_.push_back({name, node.p});
      node.lhs = parse_formula();
      scope_points_.pop_back();
    }
    return add(node);
  }

  int point_ref() {
    if (tok_.kind != Tok::ident || is_keyword(tok_.text)) fail("expected a point variable");
    const std::string name = tok_.text;
    if (!std::islower(static_cast<unsigned char>(name[0])))
      fail("'" + name + "' is not a point variable");
    for (auto it = scope_points_.rbegin(); it != scope_points_.rend(); ++it)
      if (it->first == name) {
        next();
        return it->second;
      }
    fail("unbound point variable '" + name + "' (declare it free)");
  }

  int set_ref(const std::string& name) {
    for (auto it = scope_sets_.rbegin(); it != scope_sets_.rend(); ++it)
      if (it->first == name) return it->second;
    const auto it = free_set_slot_.find(name);
    if (it != free_set_slot_.end()) return it->second;
    const int slot = new_set(name);
    free_set_slot_[name] = slot;
    f_.free_sets_.push_back(name);
    f_.free_set_slots_.push_back(slot);
    return slot;
  }

  int parse_atom() {
    const std::string name = tok_.text;
    if (std::isupper(static_cast<unsigned char>(name[0]))) {
      next();
      expect(Tok::lparen, "'('");
      if (name == "E") {
        const int a = point_ref();
        expect(Tok::comma, "','");
        const int b = point_ref();
        expect(Tok::rparen, "')'");
        return add({FormulaNode::edge, -1, -1, a, b});
      }
      const int s = set_ref(name);
      const int a = point_ref();
      expect(Tok::rparen, "')'");
      return add({FormulaNode::member, -1, -1, a, s});
    }
    const int a = point_ref();
    expect(Tok::equals, "'='");
    const int b = point_ref();
    return add({FormulaNode::equal, -1, -1, a, b});
  }

  // Bottom-up attributes; children always precede parents in the node list.
  void finish(int) {
    for (auto& node : f_.nodes_) {
      auto child = [&](int i) -> const FormulaNode& { return f_.nodes_[i]; };
      switch (node.kind) {
        case FormulaNode::edge:
        case FormulaNode::equal:
          node.free_points = (Mask{1} << node.p) | (Mask{1} << node.q);
          break;
        case FormulaNode::member:
          node.free_points = Mask{1} << node.p;
          break;
        case FormulaNode::negation:
          node.free_points = child(node.lhs).free_points;
          node.has_set_quantifier = child(node.lhs).has_set_quantifier;
          node.rank = child(node.lhs).rank;
          break;
        case FormulaNode::conjunction:
        case FormulaNode::disjunction:
        case FormulaNode::implication:
          node.free_points = child(node.lhs).free_points | child(node.rhs).free_points;
          node.has_set_quantifier =
              child(node.lhs).has_set_quantifier || child(node.rhs).has_set_quantifier;
          node.rank = std::max(child(node.lhs).rank, child(node.rhs).rank);
          break;
        case FormulaNode::exists_point:
        case FormulaNode::forall_point:
          node.free_points = child(node.lhs).free_points & ~(Mask{1} << node.p);
          node.has_set_quantifier = child(node.lhs).has_set_quantifier;
          node.rank = child(node.lhs).rank + 1;
          break;
        case FormulaNode::exists_set:
        case FormulaNode::forall_set:
          node.free_points = child(node.lhs).free_points;
          node.has_set_quantifier = true;
          node.rank = child(node.lhs).rank + 1;
          break;
      }
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
  Token tok_;
  Formula f_;
  std::vector<std::pair<std::string, int>> scope_points_;
  std::vector<std::pair<std::string, int>> scope_sets_;
  std::map<std::string, int> free_set_slot_;
};

// Free set variables are collected in order of first occurrence; free point
// variables have to be declared.
inline Formula parse_formula(std::string_view text, const std::vector<std::string>& free_points = {}) {
  return FormulaParser(text, free_points).parse();
}

inline Formula read_formula_file(const std::string& path,
                                 const std::vector<std::string>& free_points = {}) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream text;
  text << in.rdbuf();
  return parse_formula(text.str(), free_points);
}

// Fully parenthesized text that parses back to the same tree.
inline std::string to_string(const Formula& f) {
  const auto& nodes = f.nodes();
  auto rec = [&](auto&& self, int i) -> std::string {
    const auto& n = nodes[i];
    switch (n.kind) {
      case FormulaNode::edge:
        return "E(" + f.point_name(n.p) + "," + f.point_name(n.q) + ")";
      case FormulaNode::equal:
        return f.point_name(n.p) + "=" + f.point_name(n.q);
      case FormulaNode::member:
        return f.set_name(n.q) + "(" + f.point_name(n.p) + ")";
      case FormulaNode::negation:
        return "~" + self(self, n.lhs);
      case FormulaNode::conjunction:
        return "(" + self(self, n.lhs) + " & " + self(self, n.rhs) + ")";
      case FormulaNode::disjunction:
        return "(" + self(self, n.lhs) + " | " + self(self, n.rhs) + ")";
      case FormulaNode::implication:
        return "(" + self(self, n.lhs) + " -> " + self(self, n.rhs) + ")";
      case FormulaNode::exists_point:
        return "(ex " + f.point_name(n.p) + ". " + self(self, n.lhs) + ")";
      case FormulaNode::forall_point:
        return "(all " + f.point_name(n.p) + ". " + self(self, n.lhs) + ")";
      case FormulaNode::exists_set:
        return "(exS " + f.set_name(n.p) + ". " + self(self, n.lhs) + ")";
      case FormulaNode::forall_set:
        return "(allS " + f.set_name(n.p) + ". " + self(self, n.lhs) + ")";
    }
    return "";
  };
  return f.nodes().empty() ? "" : rec(rec, f.root());
}

// A graph with interpretations of a formula's free variables.
struct Structure {
  Graph graph;
  std::vector<VertexSet> sets;
  std::vector<Vertex> points;
};

struct EvalOptions {
  std::size_t set_quantifier_limit = 20;  // max n when set quantifiers occur
};

namespace detail {

// Three-valued evaluation under a partial assignment of set variables. Each
// call is vectorized over one point slot: results are masks of values for
// which the subformula is certainly true / certainly false.
class Evaluator {
 public:
  Evaluator(const Formula& f, const Graph& g)
      : f_(f), n_(g.order()), adj_(g.masks()), full_(full_mask(g.order())),
        points_(f.point_slots(), 0), in_(f.set_slots(), 0), out_(f.set_slots(), 0) {
    order_by_connectivity(g);
  }

  void bind_point(int slot, Vertex v) { points_[slot] = v; }
  void bind_set(int slot, Mask members) {
    in_[slot] = members;
    out_[slot] = full_ & ~members;
  }

  bool sentence_value() {
    const auto [t, fl] = eval(f_.root(), -1);
    if (t == fl) throw InvariantViolation("evaluation left an unknown value");
    return t != 0;
  }

 private:
  struct Tri {
    Mask t, f;
  };

  Mask full_for(int vec) const { return vec < 0 ? Mask{1} : full_; }

  Tri constant(bool value, int vec) const {
    return value ? Tri{full_for(vec), 0} : Tri{0, full_for(vec)};
  }

  Tri eval(int i, int vec) {
    const FormulaNode& node = f_.nodes()[i];
    const Mask full = full_for(vec);
    switch (node.kind) {
      case FormulaNode::edge: {
        const bool pv = node.p == vec, qv = node.q == vec;
        if (pv && qv) return {0, full};
        if (!pv && !qv) return constant((adj_[points_[node.p]] >> points_[node.q]) & 1U, vec);
        const Mask row = adj_[points_[pv ? node.q : node.p]];
        return {row, full & ~row};
      }
      case FormulaNode::equal: {
        const bool pv = node.p == vec, qv = node.q == vec;
        if (pv && qv) return {full, 0};
        if (!pv && !qv) return constant(points_[node.p] == points_[node.q], vec);
        const Mask bit = Mask{1} << points_[pv ? node.q : node.p];
        return {bit, full & ~bit};
      }
      case FormulaNode::member: {
        if (node.p == vec) return {in_[node.q], out_[node.q]};
        const Vertex v = points_[node.p];
        if ((in_[node.q] >> v) & 1U) return {full, 0};
        if ((out_[node.q] >> v) & 1U) return {0, full};
        return {0, 0};
      }
      case FormulaNode::negation: {
        const Tri r = eval(node.lhs, vec);
        return {r.f, r.t};
      }
      case FormulaNode::conjunction: {
        const Tri a = eval(node.lhs, vec);
        if (a.f == full) return a;
        const Tri b = eval(node.rhs, vec);
        return {a.t & b.t, a.f | b.f};
      }
      case FormulaNode::disjunction: {
        const Tri a = eval(node.lhs, vec);
        if (a.t == full) return a;
        const Tri b = eval(node.rhs, vec);
        return {a.t | b.t, a.f & b.f};
      }
      case FormulaNode::implication: {
        const Tri a = eval(node.lhs, vec);
        if (a.f == full) return {full, 0};
        const Tri b = eval(node.rhs, vec);
        return {a.f | b.t, a.t & b.f};
      }
      case FormulaNode::exists_point:
      case FormulaNode::forall_point:
        return point_quantifier(node, vec);
      case FormulaNode::exists_set:
      case FormulaNode::forall_set:
        return set_quantifier(i, vec);
    }
    return {0, 0};
  }

  Tri point_quantifier(const FormulaNode& node, int vec) {
    const bool exists = node.kind == FormulaNode::exists_point;
    const Mask full = full_for(vec);
    const FormulaNode& body = f_.nodes()[node.lhs];
    if (vec >= 0 && ((body.free_points >> vec) & 1U)) {
      // body depends on the vector slot: iterate the bound variable
      Tri acc = exists ? Tri{0, full} : Tri{full, 0};
      for (std::size_t v = 0; v < n_; ++v) {
        points_[node.p] = static_cast<Vertex>(v);
        const Tri r = eval(node.lhs, vec);
        if (exists) {
          acc.t |= r.t;
          acc.f &= r.f;
          if (acc.t == full) break;
        } else {
          acc.t &= r.t;
          acc.f |= r.f;
          if (acc.f == full) break;
        }
      }
      return acc;
    }
    const Tri r = eval(node.lhs, node.p);
    bool t, fl;
    if (exists) {
      t = r.t != 0;
      fl = r.f == full_;
    } else {
      t = r.t == full_;
      fl = r.f != 0;
    }
    return {t ? full : 0, fl ? full : 0};
  }

  // A maximal run of same-kind set quantifiers is searched jointly.
  Tri set_quantifier(int i, int vec) {
    const Mask full = full_for(vec);
    const FormulaNode& node = f_.nodes()[i];
    const bool exists = node.kind == FormulaNode::exists_set;
    std::vector<int> slots;
    int body = i;
    while (f_.nodes()[body].kind == node.kind) {
      slots.push_back(f_.nodes()[body].p);
      body = f_.nodes()[body].lhs;
    }
    auto scalar = [&]() {
      for (int s : slots) in_[s] = out_[s] = 0;
      const int r = search(slots, body, exists, 0);
      for (int s : slots) in_[s] = out_[s] = 0;
      return r;
    };
    if (vec >= 0 && ((node.free_points >> vec) & 1U)) {
      Tri acc{0, 0};
      for (std::size_t v = 0; v < n_; ++v) {
        points_[vec] = static_cast<Vertex>(v);
        const int r = scalar();
        if (r > 0) acc.t |= Mask{1} << v;
        if (r < 0) acc.f |= Mask{1} << v;
      }
      return acc;
    }
    const int r = scalar();
    return {r > 0 ? full : 0, r < 0 ? full : 0};
  }

  // +1 true, -1 false, 0 unknown (only possible while an enclosing set
  // variable is still partial).
  int search(const std::vector<int>& slots, int body, bool exists, std::size_t depth) {
    const Tri r = eval(body, -1);
    const int value = r.t ? 1 : (r.f ? -1 : 0);
    const int goal = exists ? 1 : -1;
    if (value != 0 || depth == n_) return value;
    const Mask bit = Mask{1} << order_[depth];
    bool unknown = false;
    const std::size_t combos = std::size_t{1} << slots.size();
    for (std::size_t combo = 0; combo < combos; ++combo) {
      for (std::size_t k = 0; k < slots.size(); ++k) {
        if ((combo >> k) & 1U) in_[slots[k]] |= bit;
        else out_[slots[k]] |= bit;
      }
      const int sub = search(slots, body, exists, depth + 1);
      for (int s : slots) {
        in_[s] &= ~bit;
        out_[s] &= ~bit;
      }
      if (sub == goal) return goal;
      if (sub == 0) unknown = true;
    }
    return unknown ? 0 : -goal;
  }

  // Vertices ordered so that each one has many earlier neighbors; partial
  // assignments then decide local constraints early.
  void order_by_connectivity(const Graph& g) {
    Mask placed = 0;
    for (std::size_t k = 0; k < n_; ++k) {
      int best = -1;
      std::pair<int, int> key{-1, -1};
      for (std::size_t v = 0; v < n_; ++v) {
        if ((placed >> v) & 1U) continue;
        const std::pair<int, int> kv{__builtin_popcountll(adj_[v] & placed),
                                     static_cast<int>(g.degree(static_cast<Vertex>(v)))};
        if (kv > key) {
          key = kv;
          best = static_cast<int>(v);
        }
      }
      order_.push_back(best);
      placed |= Mask{1} << best;
    }
  }

  const Formula& f_;
  std::size_t n_;
  std::vector<Mask> adj_;
  Mask full_;
  std::vector<Vertex> points_;
  std::vector<Mask> in_, out_;
  std::vector<int> order_;
};

}  // namespace detail

// G, interpretations |= phi under standard MSO1 semantics.
inline bool evaluate(const Structure& s, const Formula& phi, const EvalOptions& opts = {}) {
  const std::size_t n = s.graph.order();
  if (s.sets.size() != phi.free_sets().size())
    throw ContractViolation("formula has " + std::to_string(phi.free_sets().size()) +
                            " free set variables, structure interprets " +
                            std::to_string(s.sets.size()));
  if (s.points.size() != phi.free_points().size())
    throw ContractViolation("formula has " + std::to_string(phi.free_points().size()) +
                            " free point variables, structure interprets " +
                            std::to_string(s.points.size()));
  if (n > 64) throw CapacityError("evaluation limited to 64 vertices");
  if (phi.has_set_quantifier() && n > opts.set_quantifier_limit)
    throw CapacityError("set quantification limited to " +
                        std::to_string(opts.set_quantifier_limit) + " vertices (graph has " +
                        std::to_string(n) + ")");
  detail::Evaluator ev(phi, s.graph);
  for (std::size_t i = 0; i < s.sets.size(); ++i) {
    if (s.sets[i].size() != n) throw ContractViolation("set interpretation has the wrong universe");
    ev.bind_set(phi.free_set_slot(i), to_mask(s.sets[i]));
  }
  for (std::size_t i = 0; i < s.points.size(); ++i) {
    if (s.points[i] < 0 || static_cast<std::size_t>(s.points[i]) >= n)
      throw ContractViolation("point interpretation out of range");
    ev.bind_point(static_cast<int>(i), s.points[i]);
  }
  return ev.sentence_value();
}

inline bool evaluate(const Graph& g, const Formula& phi, const EvalOptions& opts = {}) {
  return evaluate(Structure{g, {}, {}}, phi, opts);
}

}  // namespace wsm
