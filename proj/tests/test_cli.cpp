#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "wsm/graph_io.hpp"
#include "wsm/oracles.hpp"

namespace {

namespace fs = std::filesystem;

struct Outcome {
  int status;
  std::string out;
  std::string err;
};

Outcome run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int status = wsm::cli::run_command(args, out, err);
  return {status, out.str(), err.str()};
}

std::string graph(const std::string& name) { return std::string(WSM_DATA_DIR) + "/graphs/" + name; }
std::string formula(const std::string& name) {
  return std::string(WSM_DATA_DIR) + "/formulas/" + name + ".mso";
}

bool has_line(const std::string& text, const std::string& line) {
  std::istringstream in(text);
  std::string l;
  while (std::getline(in, l))
    if (l == line) return true;
  return false;
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / ("wsmk_test_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST(Cli, RankWidthOfFiveCycle) {
  const Outcome r = run({"rankwidth", graph("c5.gr")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "rankwidth: 2"));
  EXPECT_TRUE(has_line(r.out, "verify: ok"));
}

TEST(Cli, CutRank) {
  // {1,2} against {3,4,5} in C5: rows of 1 and 2 over 3..5 are 001 and 100
  const Outcome r = run({"cutrank", graph("c5.gr"), "1", "2"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "cutrank: 2"));
  EXPECT_EQ(run({"cutrank", graph("c5.gr"), "7"}).status, 2);
}

TEST(Cli, SplitsAndClasses) {
  Outcome r = run({"splits", graph("bowtie_tail.gr")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "components: 1"));
  EXPECT_TRUE(has_line(r.out, "verify: ok"));
  r = run({"classes", graph("p7.gr"), "-c", "1"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "whole-graph: yes"));
  r = run({"classes", graph("c5.gr"), "-c", "0"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "classes: 5"));
}

TEST(Cli, ModulatorAndKernel) {
  Outcome r = run({"wsm", graph("c5_triangle.gr"), "--class", "forest", "-c", "0"});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "verify: ok"));
  const fs::path out = scratch() / "k.gr";
  r = run({"kernel", graph("c5_triangle.gr"), "--class", "forest", "-c", "0", "--formula",
           formula("triangle"), "-o", out.string()});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "verify: ok"));
  const wsm::Graph k = wsm::read_gr_file(out.string());
  EXPECT_TRUE(wsm::oracle::naive_evaluate({k, {}, {}}, wsm::read_formula_file(formula("triangle"))));
  EXPECT_LE(k.order(), 8u);
}

TEST(Cli, BelowThresholdKernelSolvesOutright) {
  const Outcome r = run({"kernel", graph("c5.gr"), "--class", "empty", "-c", "1", "--formula",
                     formula("triangle")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "verdict: no"));
}

TEST(Cli, OptAndCheck) {
  const fs::path dir = scratch();
  const std::string out = (dir / "opt.gr").string();
  // vertex cover of P7 is 3: yes at budget 3, no at budget 2
  Outcome r = run({"opt", graph("p7.gr"), "--formula", formula("vertex_cover"), "--budget", "3", "-c",
               "1", "-o", out});
  EXPECT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "verify: ok"));
  EXPECT_TRUE(fs::exists(out + ".ann"));
  r = run({"check", out, out + ".ann", "--formula", formula("vertex_cover"), "--budget",
           r.out.substr(r.out.find("budget: ") + 8, r.out.find('\n', r.out.find("budget: ")) -
                                                         r.out.find("budget: ") - 8)});
  EXPECT_EQ(r.status, 0) << r.out << r.err;
  r = run({"opt", graph("p7.gr"), "--formula", formula("vertex_cover"), "--budget", "2", "-c", "1"});
  EXPECT_EQ(r.status, 1) << r.err;

  r = run({"check", graph("p7.gr"), "--formula", formula("vertex_cover"), "--budget", "3"});
  EXPECT_EQ(r.status, 0);
  EXPECT_TRUE(has_line(r.out, "optimum: 3"));
  r = run({"check", graph("c5.gr"), "--formula", formula("triangle")});
  EXPECT_EQ(r.status, 1);
  EXPECT_TRUE(has_line(r.out, "answer: no"));
}

TEST(Cli, ExitStatuses) {
  EXPECT_EQ(run({}).status, 2);
  EXPECT_EQ(run({"nosuch"}).status, 2);
  EXPECT_EQ(run({"rankwidth", graph("bad_vertex.gr")}).status, 2);
  EXPECT_EQ(run({"rankwidth", graph("missing.gr")}).status, 2);
  EXPECT_EQ(run({"rankwidth", graph("c5.gr"), "--cap-rw", "0"}).status, 2);
  EXPECT_EQ(run({"rankwidth", graph("c5.gr"), "--cap-rw", "4"}).status, 3);
  EXPECT_EQ(run({"wsm", graph("c5.gr"), "--class", "forest", "-c", "1"}).status, 4);
  EXPECT_EQ(run({"wsm", graph("c5.gr"), "--class", "planar"}).status, 4);
  EXPECT_EQ(run({"kernel", graph("c5.gr"), "--formula", formula("vertex_cover")}).status, 4);
  EXPECT_EQ(run({"check", graph("c5.gr"), "--formula", formula("vertex_cover")}).status, 2);
}

TEST(Cli, GeneratorsAreDeterministic) {
  for (const auto& args : std::vector<std::vector<std::string>>{
           {"gen", "planted", "3", "4", "--seed", "7", "--class", "forest"},
           {"gen", "threshold", "8", "2", "3", "--seed", "3"},
           {"gen", "gap", "4"},
           {"gen", "cycles", "3", "20", "--seed", "11"},
           {"gen", "random", "9", "0.4", "--seed", "5"}}) {
    const Outcome a = run(args), b = run(args);
    ASSERT_EQ(a.status, 0) << a.err;
    EXPECT_EQ(a.out, b.out);
    const wsm::Graph g = wsm::parse_gr(a.out);
    EXPECT_GT(g.order(), 0u);
    EXPECT_TRUE(has_line(a.out, "c verify: ok"));
  }
  EXPECT_NE(run({"gen", "random", "9", "0.4", "--seed", "5"}).out,
            run({"gen", "random", "9", "0.4", "--seed", "6"}).out);
  EXPECT_EQ(run({"gen", "random", "9", "1.5"}).status, 2);
}

TEST(Cli, FvsKernelFlag) {
  const fs::path dir = scratch();
  const std::string in = (dir / "cyc.gr").string();
  ASSERT_EQ(run({"gen", "cycles", "2", "20", "--seed", "4", "-o", in}).status, 0);
  const Outcome r = run({"kernel", in, "--class", "forest", "--max-degree", "4", "--formula",
                     formula("triangle")});
  ASSERT_EQ(r.status, 0) << r.err;
  EXPECT_TRUE(has_line(r.out, "verify: ok"));
}
