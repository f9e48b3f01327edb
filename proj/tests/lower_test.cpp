#include <gtest/gtest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "untag/cfg.hpp"
#include "untag/frontend.hpp"

using namespace untag;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool noSwitchFallThrough(const CfgFunction& f) {
  // A case block may only reach another case block of the same switch
  // through the switch terminator itself.
  for (const auto& b : f.blocks) {
    if (b.term.kind != Terminator::Kind::Switch) continue;
    std::set<int> targets;
    for (const auto& c : b.term.cases) targets.insert(c.second);
    targets.insert(b.term.defaultTarget);
    for (int t : targets)
      for (int s : f.blocks[t].term.successors())
        if (targets.count(s) && s != t) return false;
  }
  return true;
}

}  // namespace

TEST(Lower, EvalSwitchHasFourCasesAndDefault) {
  Program p = parseOrThrow(readFile(UNTAG_CORPUS_DIR "/expr.mc"));
  LoweredProgram lp = lower(p);
  const CfgFunction* eval = lp.find("eval");
  ASSERT_NE(eval, nullptr);
  const Terminator& t = eval->blocks[0].term;
  ASSERT_EQ(t.kind, Terminator::Kind::Switch);
  EXPECT_EQ(t.cases.size(), 4u);
  EXPECT_GE(t.defaultTarget, 0);
  EXPECT_TRUE(noSwitchFallThrough(*eval));
  // The discriminee is a temporary copied from (*e).kind in the entry block.
  ASSERT_EQ(eval->blocks[0].instrs.size(), 1u);
  EXPECT_EQ(eval->blocks[0].instrs[0].str(), "$t1 = (*e).kind");
}

TEST(Lower, StraightLineIsOneBlock) {
  Program p = parseOrThrow("int f(int a) { int b = a + 1; b = b * 2; print(b); return b; }");
  CfgFunction f = lowerFunction(p, p.functions[0]);
  EXPECT_EQ(f.blocks.size(), 1u);
  EXPECT_EQ(f.blocks[0].term.kind, Terminator::Kind::Return);
}

TEST(Lower, IfElseMakesFourBlocks) {
  Program p = parseOrThrow("void f(int c) { int x; if (c) { x = 1; } else { x = 2; } print(x); }");
  CfgFunction f = lowerFunction(p, p.functions[0]);
  ASSERT_EQ(f.blocks.size(), 4u);
  EXPECT_EQ(f.blocks[0].term.kind, Terminator::Kind::Branch);
  EXPECT_EQ(f.blocks[1].term.successors(), std::vector<int>{3});
  EXPECT_EQ(f.blocks[2].term.successors(), std::vector<int>{3});
  auto preds = f.predecessors();
  EXPECT_EQ(preds[3].size(), 2u);
}

TEST(Lower, ShortCircuitAndRefinesOnEachConjunct) {
  Program p = parseOrThrow(
      "struct S { int k; int *p; };\n"
      "int f(struct S *s) { if (s->k == 1 && s->p != null) { return 1; } return 0; }");
  CfgFunction f = lowerFunction(p, p.functions[0]);
  int cmpBranches = 0;
  for (const auto& b : f.blocks)
    if (b.term.kind == Terminator::Kind::Branch && b.term.cmp) ++cmpBranches;
  EXPECT_EQ(cmpBranches, 2);
  EXPECT_FALSE(f.hasLoop());
}

TEST(Lower, WhileHasBackEdge) {
  Program p = parseOrThrow("int f(int n) { int s = 0; while (n > 0) { s += n; n -= 1; } return s; }");
  CfgFunction f = lowerFunction(p, p.functions[0]);
  EXPECT_TRUE(f.hasLoop());
}

TEST(Lower, EveryCorpusSwitchIsFallThroughFree) {
  for (const char* name : {"expr.mc"}) {
    Program p = parseOrThrow(readFile(std::string(UNTAG_CORPUS_DIR "/") + name));
    for (const auto& f : lower(p).functions) EXPECT_TRUE(noSwitchFallThrough(f)) << name;
  }
}
