#include <gtest/gtest.h>

#include "soundness_check.hpp"
#include "test_util.hpp"
#include "untag/frontend.hpp"
#include "untag/oracle.hpp"
#include "untag/pipeline.hpp"

using namespace untag;
using untag::testing::corpusPrograms;
using untag::testing::readFile;
using untag::testing::Checked;
using untag::testing::checkProgram;
using untag::testing::intParams;


TEST(Soundness, EnumerationRefusesLargeDomains) {
  EXPECT_THROW(enumerateInputs(1, {0, 1, 2, 3, 4}), std::invalid_argument);
  EXPECT_EQ(enumerateInputs(2, {0, 1, 2}).size(), 9u);
  EXPECT_EQ(enumerateInputs(0, {0, 1}).size(), 1u);
}

TEST(Soundness, CfgExecutionMatchesInterpreter) {
  for (const auto& path : corpusPrograms()) {
    Program p = parseOrThrow(readFile(path));
    LoweredProgram lp = lower(p);
    for (const auto& f : lp.functions) {
      if (!intParams(f)) continue;
      for (const auto& in : enumerateInputs(f.params.size(), {0, 1, 2, 3})) {
        Outcome a = runCfg(lp, f.name, in, nullptr, 200000);
        Outcome b = run(p, f.name, in, RunOptions{false, 200000});
        SCOPED_TRACE(path + " " + f.name);
        EXPECT_EQ(a.output, b.output);
        EXPECT_EQ(a.termination, b.termination);
        EXPECT_EQ(a.reinterpretations, b.reinterpretations);
      }
    }
  }
}

TEST(Soundness, MustGraphsHoldOnEveryCorpusRun) {
  for (const auto& path : corpusPrograms()) {
    Program p = parseOrThrow(readFile(path));
    Checked c = checkProgram(p);
    SCOPED_TRACE(path);
    EXPECT_GT(c.states, 0u);
    for (const auto& v : c.violations)
      ADD_FAILURE() << v.function << " bb" << v.block << "[" << v.index << "]: " << v.fact;
  }
}

TEST(Soundness, CheckerRejectsAWrongLabel) {
  Program p = parseOrThrow("int main(int a) { int x = 1; print(x); return 0; }");
  LoweredProgram lp = lower(p);
  MayPointsTo may = computeMay(lp);
  FunctionAnalysis fa = MustAnalyzer(lp, may).analyze(lp.functions[0]);
  const CfgFunction& fn = lp.functions[0];
  int last = static_cast<int>(fn.blocks[0].instrs.size());
  PointsToGraph bad = *fa.before(0, last);
  int x = *bad.target(*bad.root("x"), {});
  bad.nodes[x].label = IntLabel{{2}, IntLabel::Provenance::Assignment};
  size_t good = 0;
  size_t wrong = 0;
  runCfg(lp, "main", {0}, [&](const CfgFunction& f, int b, int i, const ConcreteState& st) {
    if (b != 0 || i != last) return;
    good += checkState(p, f, b, i, *fa.before(b, i), st).size();
    wrong += checkState(p, f, b, i, bad, st).size();
  });
  EXPECT_EQ(good, 0u);
  EXPECT_EQ(wrong, 1u);
}

TEST(Soundness, CheckerRejectsAWrongEdge) {
  Program p = parseOrThrow("int main(int a) { int x = 1; int y = 2; print(x + y); return 0; }");
  LoweredProgram lp = lower(p);
  MayPointsTo may = computeMay(lp);
  FunctionAnalysis fa = MustAnalyzer(lp, may).analyze(lp.functions[0]);
  const CfgFunction& fn = lp.functions[0];
  int last = static_cast<int>(fn.blocks[0].instrs.size());
  PointsToGraph bad = *fa.before(0, last);
  bad.setEdge(*bad.root("y"), {}, *bad.target(*bad.root("x"), {}));
  size_t wrong = 0;
  runCfg(lp, "main", {0}, [&](const CfgFunction& f, int b, int i, const ConcreteState& st) {
    if (b == 0 && i == last) wrong += checkState(p, f, b, i, bad, st).size();
  });
  EXPECT_GE(wrong, 1u);
}
