#include <gtest/gtest.h>

#include "test_util.hpp"
#include "untag/frontend.hpp"
#include "untag/oracle.hpp"

using namespace untag;
using untag::testing::readFile;

namespace {

Outcome runC(const std::string& src, std::vector<int64_t> in = {}, RunOptions opts = {}) {
  return run(parseOrThrow(src), "main", in, opts);
}

const char* kPair =
    "struct P { int kind; union { int a; int b; struct Q q; } u; };\n"
    "struct Q { int x; int y; };\n";

}  // namespace

TEST(Interp, ArithmeticWrapsAndOrders) {
  Outcome o = runC(
      "int main(int x) { print(x * 4611686018427387904); print(7 / -2); print(-7 % 3); print(3 < x); return 0; }", {4});
  EXPECT_EQ(o.termination, Termination::Normal);
  EXPECT_EQ(o.output, (std::vector<int64_t>{0, -3, -1, 1}));
}

TEST(Interp, DivisionByZeroAborts) {
  Outcome o = runC("int main(int x) { print(1); print(5 / x); return 0; }", {0});
  EXPECT_EQ(o.termination, Termination::Abort);
  EXPECT_EQ(o.output, std::vector<int64_t>{1});
  EXPECT_EQ(o.site, "main");
}

TEST(Interp, ShortCircuitSkipsRightOperand) {
  Outcome o = runC("int main(int x) { struct Q *p = null; if (p != null && p->x == 1) { print(1); } print(2); return 0; }"
                   "struct Q { int x; };", {0});
  EXPECT_EQ(o.termination, Termination::Normal);
  EXPECT_EQ(o.output, std::vector<int64_t>{2});
}

TEST(Interp, NullDereferenceAborts) {
  Outcome o = runC("struct Q { int x; }; int main() { struct Q *p = null; print(p->x); return 0; }");
  EXPECT_EQ(o.termination, Termination::Abort);
}

TEST(Interp, StrictReinterpretationFaults) {
  std::string src = std::string(kPair) + "int main() { struct P p; p.u.a = 5; print(1); print(p.u.b); return 0; }";
  Outcome strict = runC(src);
  EXPECT_EQ(strict.termination, Termination::ReinterpretationFault);
  EXPECT_EQ(strict.output, std::vector<int64_t>{1});
  EXPECT_EQ(strict.reinterpretations, std::vector<std::string>{"main/b"});
  Outcome loose = runC(src, {}, RunOptions{false});
  EXPECT_EQ(loose.termination, Termination::Normal);
  // Same-shape members share storage.
  EXPECT_EQ(loose.output, (std::vector<int64_t>{1, 5}));
}

TEST(Interp, DifferentShapeReadsStaleSlot) {
  std::string src = std::string(kPair) +
                    "int main() { struct P p; p.u.q.x = 3; p.u.a = 5; print(p.u.q.x); return 0; }";
  Outcome loose = runC(src, {}, RunOptions{false});
  EXPECT_EQ(loose.output, std::vector<int64_t>{3});
  EXPECT_EQ(loose.reinterpretations, std::vector<std::string>{"main/q"});
}

TEST(Interp, WholeUnionCopyKeepsMarker) {
  std::string src = std::string(kPair) +
                    "int main() { struct P p; struct P r; p.u.b = 2; r = p; print(r.u.b); return 0; }";
  EXPECT_EQ(runC(src).output, std::vector<int64_t>{2});
  std::string bad = std::string(kPair) + "int main() { struct P p; struct P r; p.u.b = 2; r = p; print(r.u.a); return 0; }";
  EXPECT_EQ(runC(bad).termination, Termination::ReinterpretationFault);
}

TEST(Interp, StepLimitStopsLoops) {
  Outcome o = runC("int main() { int i = 0; while (1) { i = i + 1; } return 0; }", {}, RunOptions{true, 1000});
  EXPECT_EQ(o.termination, Termination::StepLimit);
}

TEST(Interp, DeepRecursionStops) {
  Outcome o = runC("int f(int n) { return f(n + 1); } int main() { return f(0); }");
  EXPECT_EQ(o.termination, Termination::StepLimit);
}

TEST(Interp, IndirectCallThroughLocal) {
  Outcome o = runC("int inc(int x) { return x + 1; } int main(int a) { fn f = inc; print(f(a)); return 0; }", {4});
  EXPECT_EQ(o.output, std::vector<int64_t>{5});
}

namespace {

const char* kTagged =
    "struct B { int l; };\n"
    "struct E { E_v v; };\n"
    "enum E_v { Empty0, e1(int), b2(B) }\n"
    "impl E_v {\n"
    "  int get_e() { if let E_v::e1(ref x) = *self { return *x; } abort(); }\n"
    "}\n";

Outcome runTag(const std::string& body, std::vector<int64_t> in = {}) {
  return run(parseOrThrow(std::string(kTagged) + body, Dialect::MiniTag), "main", in);
}

}  // namespace

TEST(Interp, GetOnWrongVariantAbortsInsideHelper) {
  Outcome o = runTag("int main() { E* e = new E; print(1); print(e->v.get_e()); return 0; }");
  EXPECT_EQ(o.termination, Termination::Abort);
  EXPECT_EQ(o.output, std::vector<int64_t>{1});
  EXPECT_EQ(o.site, "main/get_e");
  Outcome ok = runTag("int main(int a) { E* e = new E; e->v = E_v::e1(a); print(e->v.get_e()); return 0; }", {7});
  EXPECT_EQ(ok.output, std::vector<int64_t>{7});
}

TEST(Interp, EnumZeroValueIsFirstVariant) {
  Outcome o = runTag(
      "int main() { E x; match (x.v) { E_v::Empty0 => { print(0); } _ => { print(1); } } return 0; }");
  EXPECT_EQ(o.output, std::vector<int64_t>{0});
}

TEST(Interp, MatchBindsPayloadByReference) {
  Outcome o = runTag(
      "int main() { E x; B b; b.l = 4; x.v = E_v::b2(b);\n"
      "  match (x.v) { E_v::b2(ref p) => { (*p).l = 9; } _ => { abort(); } }\n"
      "  if let E_v::b2(ref q) = x.v { print((*q).l); } return 0; }");
  EXPECT_EQ(o.termination, Termination::Normal) << o.message;
  EXPECT_EQ(o.output, std::vector<int64_t>{9});
}

TEST(Interp, ExprGoldenAgreesWithSource) {
  Program t = parseOrThrow(readFile(UNTAG_CORPUS_DIR "/expr.mt"), Dialect::MiniTag);
  Program c = parseOrThrow(readFile(UNTAG_CORPUS_DIR "/expr.mc"));
  for (int64_t d = 0; d < 4; ++d) {
    Outcome a = run(c, "main", {d, d});
    Outcome b = run(t, "main", {d, d});
    EXPECT_EQ(a.termination, Termination::Normal);
    EXPECT_EQ(a.output, b.output);
  }
}

TEST(Diff, ManifestDefaults) {
  auto cases = parseManifest(nlohmann::json::parse(R"([{"inputs": [1, 2]},
    {"entry": "f", "inputs": [], "expected_termination": "abort", "strict": false,
     "transformed_termination": "abort", "abort_site": "f/get_x"}])"));
  ASSERT_EQ(cases.size(), 2u);
  EXPECT_EQ(cases[0].entry, "main");
  EXPECT_TRUE(cases[0].strict);
  EXPECT_FALSE(cases[0].expectedOutput);
  EXPECT_EQ(cases[1].entry, "f");
  EXPECT_EQ(cases[1].expectedTermination, Termination::Abort);
  EXPECT_FALSE(cases[1].strict);
  EXPECT_EQ(cases[1].abortSite, "f/get_x");
  EXPECT_THROW(parseManifest(nlohmann::json::parse(R"([{"inputs": [], "expected_termination": "crash"}])")),
               std::invalid_argument);
}

TEST(Diff, DetectsChangedOutput) {
  Program a = parseOrThrow("int main(int x) { print(x); return 0; }");
  Program b = parseOrThrow("int main(int x) { print(x + 1); return 0; }");
  TestCase tc;
  tc.inputs = {3};
  Verdict same = diffTest(a, a, tc);
  EXPECT_TRUE(same.equal);
  EXPECT_TRUE(same.expected);
  Verdict diff = diffTest(a, b, tc);
  EXPECT_FALSE(diff.equal);
  EXPECT_FALSE(diff.expected);
  tc.expectedOutput = std::vector<int64_t>{4};
  EXPECT_FALSE(diffTest(a, a, tc).expected);
}

TEST(Diff, AnnotatedAbortMustHappenAtItsSite) {
  Program a = parseOrThrow("int main() { print(1); print(2); return 0; }");
  Program b = parseOrThrow("int main() { print(1); abort(); }");
  TestCase tc;
  tc.transformedTermination = Termination::Abort;
  tc.abortSite = "main";
  EXPECT_TRUE(diffTest(a, b, tc).expected);
  tc.abortSite = "other";
  EXPECT_FALSE(diffTest(a, b, tc).expected);
  Program c = parseOrThrow("int main() { print(5); abort(); }");
  tc.abortSite = "main";
  EXPECT_FALSE(diffTest(a, c, tc).expected);
}
