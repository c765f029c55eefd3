#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "wsm/errors.hpp"
#include "wsm/graph.hpp"

namespace wsm {

using BigInt = boost::multiprecision::cpp_int;

// Weight w counted for every set that contains x and avoids y.
struct AnnotationTriple {
  VertexSet x;
  VertexSet y;
  BigInt w;
};

struct Annotation {
  std::vector<AnnotationTriple> triples;

  // One ({v}, {}, 1) per vertex: the value of a set is its size.
  static Annotation cardinality(std::size_t n) {
    Annotation a;
    for (std::size_t v = 0; v < n; ++v) {
      VertexSet x(n);
      x.set(v);
      a.triples.push_back({x, VertexSet(n), 1});
    }
    return a;
  }
};

inline BigInt annotation_value(const Annotation& a, const VertexSet& z) {
  BigInt total = 0;
  for (const auto& t : a.triples)
    if (t.x.is_subset_of(z) && !t.y.intersects(z)) total += t.w;
  return total;
}

// Sidecar lines "a <|X|> <X...> <|Y|> <Y...> <w>", vertices 1-indexed; lines
// starting with "c" are comments.
inline void write_annotation(std::ostream& out, const Annotation& a,
                             const std::vector<std::string>& comments = {}) {
  for (const auto& c : comments) out << "c " << c << '\n';
  for (const auto& t : a.triples) {
    out << "a " << t.x.count();
    for (Vertex v : members(t.x)) out << ' ' << v + 1;
    out << ' ' << t.y.count();
    for (Vertex v : members(t.y)) out << ' ' << v + 1;
    out << ' ' << t.w << '\n';
  }
}

inline Annotation read_annotation(std::istream& in, std::size_t n) {
  Annotation a;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ls(line);
    std::string tag;
    if (!(ls >> tag) || tag == "c") continue;
    if (tag != "a") throw ParseError("expected 'a' or 'c' line", lineno);
    AnnotationTriple t{VertexSet(n), VertexSet(n), 0};
    for (VertexSet* s : {&t.x, &t.y}) {
      std::size_t count = 0;
      if (!(ls >> count)) throw ParseError("missing set size", lineno);
      for (std::size_t i = 0; i < count; ++i) {
        long long v = 0;
        if (!(ls >> v) || v < 1 || static_cast<std::size_t>(v) > n)
          throw ParseError("bad vertex in annotation", lineno);
        s->set(static_cast<std::size_t>(v - 1));
      }
    }
    std::string w;
    if (!(ls >> w)) throw ParseError("missing weight", lineno);
    try {
      t.w = BigInt(w);
    } catch (const std::exception&) {
      throw ParseError("bad weight '" + w + "'", lineno);
    }
    if (t.w < 0) throw ParseError("negative weight", lineno);
    if (t.x.intersects(t.y)) throw ParseError("triple with overlapping sets", lineno);
    a.triples.push_back(std::move(t));
  }
  return a;
}

}  // namespace wsm
