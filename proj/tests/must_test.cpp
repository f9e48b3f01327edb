#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "untag/cfg.hpp"
#include "untag/frontend.hpp"
#include "untag/may_pta.hpp"
#include "untag/must_pta.hpp"

using namespace untag;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Fixture {
  Program program;
  LoweredProgram lowered;
  MayPointsTo may;

  explicit Fixture(const std::string& src) : program(parseOrThrow(src)) {
    lowered = lower(program);
    may = computeMay(lowered);
  }

  FunctionAnalysis analyze(const std::string& fn) const {
    return MustAnalyzer(lowered, may).analyze(*lowered.find(fn));
  }
};

IrPlace place(const std::string& base, std::vector<Proj> projs = {}) { return IrPlace{base, std::move(projs), nullptr}; }
Proj deref() { return Proj{Proj::Kind::Deref, {}, 0}; }
Proj field(const std::string& f) { return Proj{Proj::Kind::Field, f, 0}; }

std::optional<IntLabel> labelAt(const PointsToGraph& g, const IrPlace& p) {
  auto n = placeValue(g, p);
  if (!n) return std::nullopt;
  return g.nodes[*n].label;
}

const char* kExprTypes =
    "struct Expr { int kind; union { struct Expr *e; struct BExpr b; } v; };\n"
    "struct BExpr { struct Expr *l; struct Expr *r; };\n";

}  // namespace

TEST(Must, ConstantAssignmentLabelsTarget) {
  Fixture fx("int f() { int x = 1; return x; }");
  auto fa = fx.analyze("f");
  const auto& exit = fa.exit(0);
  ASSERT_TRUE(exit);
  auto l = labelAt(*exit, place("x"));
  ASSERT_TRUE(l);
  EXPECT_EQ(l->values, std::set<int64_t>{1});
  EXPECT_EQ(l->provenance, IntLabel::Provenance::Assignment);
}

TEST(Must, CopySharesNodeAndRefinementPropagates) {
  Fixture fx("int f(int y) { int x = y; if (x == 1) { print(y); } return 0; }");
  auto fa = fx.analyze("f");
  const auto& exit = *fa.exit(0);
  EXPECT_EQ(placeValue(exit, place("x")), placeValue(exit, place("y")));
  // Then-block is bb1; its entry state knows y == 1 through the shared node.
  const auto& then = *fa.before(1, 0);
  auto l = labelAt(then, place("y"));
  ASSERT_TRUE(l);
  EXPECT_EQ(l->values, std::set<int64_t>{1});
  EXPECT_EQ(l->provenance, IntLabel::Provenance::Branch);
}

TEST(Must, ReadOfKindSharesNodeWithLocal) {
  Fixture fx(std::string(kExprTypes) + "int f(struct Expr *e) { int k = e->kind; return k; }");
  auto fa = fx.analyze("f");
  const auto& exit = *fa.exit(0);
  auto viaField = placeValue(exit, place("e", {deref(), field("kind")}));
  ASSERT_TRUE(viaField);
  EXPECT_EQ(viaField, placeValue(exit, place("k")));
}

TEST(Must, SwitchCaseLabelsDiscriminee) {
  Fixture fx(readFile(UNTAG_CORPUS_DIR "/expr.mc"));
  auto fa = fx.analyze("eval");
  const CfgFunction& f = *fx.lowered.find("eval");
  const Terminator& sw = f.blocks[0].term;
  for (const auto& [vals, target] : sw.cases) {
    const auto& st = fa.before(target, 0);
    ASSERT_TRUE(st);
    auto l = labelAt(*st, place("e", {deref(), field("kind")}));
    ASSERT_TRUE(l) << "case " << vals[0];
    EXPECT_EQ(l->values, std::set<int64_t>(vals.begin(), vals.end()));
    EXPECT_EQ(l->provenance, IntLabel::Provenance::Branch);
  }
}

TEST(Must, JoinAfterTwoCasesUnionsLabels) {
  Fixture fx(std::string(kExprTypes) +
             "int g(struct Expr *e) {\n"
             "  switch (e->kind) { case 2: { print(1); } case 3: { print(2); } default: { return 0; } }\n"
             "  struct Expr *l = e->v.b.l;\n"
             "  return 1;\n"
             "}\n");
  auto fa = fx.analyze("g");
  const CfgFunction& f = *fx.lowered.find("g");
  int join = f.blocks[0].term.defaultTarget + 1;
  const auto& st = fa.before(join, 0);
  ASSERT_TRUE(st);
  auto l = labelAt(*st, place("e", {deref(), field("kind")}));
  ASSERT_TRUE(l);
  EXPECT_EQ(l->values, (std::set<int64_t>{2, 3}));
  EXPECT_EQ(l->provenance, IntLabel::Provenance::Branch);
}

TEST(Must, JoinWithUnlabeledSideDropsLabel) {
  Fixture fx("int f(int c, int y) { int x; if (c) { x = 1; } else { x = y; } print(x); return 0; }");
  auto fa = fx.analyze("f");
  const auto& st = *fa.before(3, 0);
  auto n = placeValue(st, place("x"));
  ASSERT_TRUE(n);
  EXPECT_FALSE(st.nodes[*n].label);
}

TEST(Must, AliasedWriteRemovesKindEdge) {
  Fixture fx(std::string(kExprTypes) +
             "int f(int c, struct Expr *other) {\n"
             "  struct Expr ev;\n"
             "  struct Expr *e;\n"
             "  if (c) { e = &ev; } else { e = new struct Expr; }\n"
             "  int k = e->kind;\n"
             "  ev = *other;\n"
             "  switch (k) { case 1: { print(k); } default: { } }\n"
             "  return 0;\n"
             "}\n");
  auto fa = fx.analyze("f");
  const CfgFunction& f = *fx.lowered.find("f");
  int swBlock = -1;
  for (const auto& b : f.blocks)
    if (b.term.kind == Terminator::Kind::Switch) swBlock = b.id;
  ASSERT_GE(swBlock, 0);
  const auto& before = fa.exit(swBlock);
  ASSERT_TRUE(before);
  // The write to ev may hit *e, so (*e).kind is no longer known.
  EXPECT_FALSE(placeValue(*before, place("e", {deref(), field("kind")})));
  int caseBlock = f.blocks[swBlock].term.cases[0].second;
  const auto& inCase = *fa.before(caseBlock, 0);
  auto l = labelAt(inCase, place("k"));
  ASSERT_TRUE(l);
  EXPECT_EQ(l->values, std::set<int64_t>{1});
  EXPECT_FALSE(placeValue(inCase, place("e", {deref(), field("kind")})));
}

TEST(Must, UnionWriteKeepsTagEdgeAndRecordsMember) {
  Fixture fx(std::string(kExprTypes) +
             "struct Expr *mk(struct Expr *a, struct Expr *b) {\n"
             "  struct Expr *e = new struct Expr;\n"
             "  e->kind = 2;\n"
             "  e->v.b.l = a;\n"
             "  e->v.b.r = b;\n"
             "  return e;\n"
             "}\n");
  auto fa = fx.analyze("mk");
  const auto& exit = *fa.exit(0);
  auto l = labelAt(exit, place("e", {deref(), field("kind")}));
  ASSERT_TRUE(l);
  EXPECT_EQ(l->values, std::set<int64_t>{2});
  auto loc = resolvePlace(exit, place("e", {deref()}), 1);
  ASSERT_TRUE(loc);
  const auto& w = exit.nodes[loc->first].written;
  ASSERT_EQ(w.count(FieldPath{"v"}), 1u);
  EXPECT_EQ(w.at(FieldPath{"v"}), "b");
}

TEST(Must, InfeasibleCaseIsUnreached) {
  Fixture fx("int f() { int x = 1; switch (x) { case 2: { print(2); } default: { print(0); } } return 0; }");
  auto fa = fx.analyze("f");
  const CfgFunction& f = *fx.lowered.find("f");
  int caseBlock = f.blocks[0].term.cases[0].second;
  EXPECT_FALSE(fa.before(caseBlock, 0));
}

TEST(Must, UnknownCallStripsEdges) {
  Fixture fx("int f(fn h) { int x = 1; h(); return x; }");
  auto fa = fx.analyze("f");
  // The final read of x re-creates an edge, but the constant is forgotten.
  EXPECT_FALSE(labelAt(*fa.exit(0), place("x")));
}

TEST(Must, LoopTerminatesUnderCap) {
  Fixture fx("int f(int n) { int i = 0; while (i < n) { i = i + 1; } int k = 0; while (k < 100) { k += 1; } return i; }");
  auto fa = fx.analyze("f");
  EXPECT_GT(fa.iterations, 0u);
}
