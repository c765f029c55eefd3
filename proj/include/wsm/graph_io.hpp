#pragma once

#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wsm/graph.hpp"

namespace wsm {

namespace detail {

inline std::vector<std::string> split_ws(std::string_view line) {
  std::vector<std::string> out;
  std::istringstream in{std::string(line)};
  std::string tok;
  while (in >> tok) out.push_back(tok);
  return out;
}

inline std::optional<long long> to_integer(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  std::size_t pos = 0;
  try {
    long long v = std::stoll(tok, &pos);
    if (pos != tok.size()) return std::nullopt;
    return v;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

struct GrBlock {
  std::string name;
  std::vector<std::string> comments;
  std::size_t n = 0;
  std::size_t declared_m = 0;
  std::vector<Edge> edges;
  bool has_header = false;
};

inline Graph finish_block(const GrBlock& b, std::size_t line) {
  if (!b.has_header) throw ParseError("missing 'p graph' header", line);
  if (b.edges.size() != b.declared_m)
    throw ParseError("header declares " + std::to_string(b.declared_m) + " edges, found " +
                         std::to_string(b.edges.size()),
                     line);
  return Graph(b.n, b.edges, b.name);
}

// Shared line parser; `allow_many` enables the multi-graph collection format.
inline std::vector<Graph> parse_gr_impl(std::istream& in, bool allow_many) {
  std::vector<Graph> out;
  GrBlock block;
  std::string pending_name;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto toks = split_ws(line);
    if (toks.empty()) continue;
    if (toks[0] == "c") {
      if (toks.size() >= 3 && toks[1] == "name") {
        const auto at = line.find("name") + 4;
        std::string label = line.substr(at);
        label.erase(0, label.find_first_not_of(" \t"));
        if (!block.has_header)
          block.name = label;
        else if (allow_many)
          pending_name = label;
      }
      continue;
    }
    if (toks[0] == "p") {
      if (block.has_header) {
        if (!allow_many) throw ParseError("second 'p graph' header", lineno);
        out.push_back(finish_block(block, lineno));
        block = GrBlock{};
        block.name = pending_name;
        pending_name.clear();
      }
      if (toks.size() != 4 || toks[1] != "graph") throw ParseError("malformed header", lineno);
      const auto n = to_integer(toks[2]);
      const auto m = to_integer(toks[3]);
      if (!n || !m || *n < 0 || *m < 0) throw ParseError("malformed header", lineno);
      block.n = static_cast<std::size_t>(*n);
      block.declared_m = static_cast<std::size_t>(*m);
      block.has_header = true;
      continue;
    }
    if (!block.has_header) throw ParseError("edge line before 'p graph' header", lineno);
    if (toks.size() != 2) throw ParseError("edge line must hold exactly two vertices", lineno);
    const auto u = to_integer(toks[0]);
    const auto v = to_integer(toks[1]);
    if (!u || !v) throw ParseError("non-numeric vertex", lineno);
    const auto n = static_cast<long long>(block.n);
    if (*u < 1 || *u > n || *v < 1 || *v > n)
      throw ParseError("vertex index out of range", lineno);
    if (*u == *v) throw ParseError("self-loop", lineno);
    block.edges.push_back({static_cast<Vertex>(*u - 1), static_cast<Vertex>(*v - 1)});
  }
  if (block.has_header || !allow_many || out.empty()) out.push_back(finish_block(block, lineno));
  return out;
}

}  // namespace detail

// .gr format: "c " comments, one "p graph <n> <m>" header, m lines "<u> <v>" (1-indexed).
inline Graph parse_gr(std::istream& in) { return detail::parse_gr_impl(in, false).front(); }

inline Graph parse_gr(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_gr(in);
}

// Several .gr blocks in one stream, each optionally preceded by "c name <label>".
inline std::vector<Graph> parse_gr_collection(std::istream& in) {
  return detail::parse_gr_impl(in, true);
}

inline Graph read_gr_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path);
  return parse_gr(in);
}

inline void write_gr(std::ostream& out, const Graph& g,
                     const std::vector<std::string>& comments = {}) {
  if (!g.name().empty()) out << "c name " << g.name() << '\n';
  for (const auto& c : comments) out << "c " << c << '\n';
  out << "p graph " << g.order() << ' ' << g.edge_count() << '\n';
  for (const Edge& e : g.edges()) out << e.u + 1 << ' ' << e.v + 1 << '\n';
}

inline std::string to_gr(const Graph& g, const std::vector<std::string>& comments = {}) {
  std::ostringstream out;
  write_gr(out, g, comments);
  return out.str();
}

}  // namespace wsm
