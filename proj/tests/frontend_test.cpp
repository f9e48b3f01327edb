#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "untag/frontend.hpp"

using namespace untag;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int countKind(const Program& p, TypeDefKind k, bool anonymous) {
  int n = 0;
  for (const auto& t : p.types)
    if (t.kind == k && t.anonymous == anonymous) ++n;
  return n;
}

}  // namespace

TEST(Frontend, ExprProgramShape) {
  Program p = parseOrThrow(readFile(UNTAG_CORPUS_DIR "/expr.mc"));
  EXPECT_EQ(countKind(p, TypeDefKind::Struct, false), 2);
  EXPECT_EQ(countKind(p, TypeDefKind::Union, true), 1);
  EXPECT_NE(p.findFunction("eval"), nullptr);
  const TypeDef* u = p.findType("Expr_v");
  ASSERT_NE(u, nullptr);
  EXPECT_EQ(u->fields.size(), 2u);
}

TEST(Frontend, EmptySource) {
  Program p = parseOrThrow("");
  EXPECT_TRUE(p.types.empty());
  EXPECT_TRUE(p.functions.empty());
  EXPECT_TRUE(p.globals.empty());
}

TEST(Frontend, UnknownFieldIsNamed) {
  auto r = parse("struct S { int a; };\nint f(struct S *e) { return e->w; }\n");
  ASSERT_FALSE(r.ok());
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_NE(r.diagnostics[0].message.find("'w'"), std::string::npos);
  EXPECT_EQ(r.diagnostics[0].loc.line, 2);
}

TEST(Frontend, SyntaxErrorHasPosition) {
  auto r = parse("int f() {\n  return 1 +;\n}\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].kind, Diagnostic::Kind::Syntax);
  EXPECT_EQ(r.diagnostics[0].loc.line, 2);
}

TEST(Frontend, LexicalError) {
  auto r = parse("int f() { return 1 @ 2; }");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].kind, Diagnostic::Kind::Lexical);
}

TEST(Frontend, UnknownTypeAndDuplicates) {
  auto r1 = parse("struct S { struct T *p; };");
  ASSERT_FALSE(r1.ok());
  EXPECT_EQ(r1.diagnostics[0].kind, Diagnostic::Kind::UnknownType);
  auto r2 = parse("struct S { int a; int a; };");
  ASSERT_FALSE(r2.ok());
  EXPECT_EQ(r2.diagnostics[0].kind, Diagnostic::Kind::Duplicate);
  auto r3 = parse("int f() { return 0; }\nint f() { return 1; }");
  ASSERT_FALSE(r3.ok());
  EXPECT_EQ(r3.diagnostics[0].kind, Diagnostic::Kind::Duplicate);
}

TEST(Frontend, MiniTagConstructsRejectedInMiniC) {
  auto r = parse("enum E { A, B(int) }");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].kind, Diagnostic::Kind::Dialect);
}

TEST(Frontend, ConstantsResolve) {
  Program p = parseOrThrow(
      "enum { K_A = 3, K_B };\n"
      "int f(int x) { switch (x) { case K_A: return K_B; default: return 0; } }\n");
  const Stmt& sw = *p.functions[0].body[0];
  EXPECT_EQ(sw.cases[0].values[0], 3);
  EXPECT_EQ(sw.cases[0].body[0]->expr->value, 4);
  EXPECT_EQ(emit(p, Dialect::MiniC), emit(parseOrThrow(emit(p, Dialect::MiniC)), Dialect::MiniC));
}

TEST(Frontend, RoundTripExpr) {
  Program p = parseOrThrow(readFile(UNTAG_CORPUS_DIR "/expr.mc"));
  std::string once = emit(p, Dialect::MiniC);
  Program q = parseOrThrow(once);
  EXPECT_EQ(once, emit(q, Dialect::MiniC));
}

TEST(Frontend, EveryCorpusProgramRoundTrips) {
  for (const auto& entry : std::filesystem::directory_iterator(UNTAG_CORPUS_DIR)) {
    auto ext = entry.path().extension();
    if (ext != ".mc" && ext != ".mt") continue;
    Dialect d = ext == ".mc" ? Dialect::MiniC : Dialect::MiniTag;
    Program p = parseOrThrow(readFile(entry.path().string()), d);
    std::string once = emit(p, d);
    EXPECT_EQ(once, emit(parseOrThrow(once, d), d)) << entry.path();
  }
}

TEST(Frontend, MiniTagEnumEmission) {
  std::string src =
      "struct Expr { Expr_v v; };\n"
      "struct BExpr { Expr *l; Expr *r; };\n"
      "enum Expr_v { Empty0, e1(Expr*), b2(BExpr), b3(BExpr) }\n"
      "int f(Expr *e) {\n"
      "  match ((*e).v) { Expr_v::b2(ref x) | Expr_v::b3(ref x) => { return 1; } _ => { return 0; } }\n"
      "}\n";
  Program p = parseOrThrow(src, Dialect::MiniTag);
  std::string out = emit(p, Dialect::MiniTag);
  EXPECT_NE(out.find("enum Expr_v {\n  Empty0,\n  e1(Expr*),\n  b2(BExpr),\n  b3(BExpr)\n}"), std::string::npos);
  EXPECT_NE(out.find("Expr_v::b2(ref x) | Expr_v::b3(ref x) =>"), std::string::npos);
  EXPECT_EQ(out, emit(parseOrThrow(out, Dialect::MiniTag), Dialect::MiniTag));
  EXPECT_THROW(emit(p, Dialect::MiniC), DiagnosticError);
}

TEST(Frontend, PrecedenceSurvivesRoundTrip) {
  std::string src =
      "struct S { int a; };\n"
      "int f(struct S *s, int x) { return (x + 1) * -(x - 2) - (*s).a + s->a % 3 - -4; }\n";
  Program p = parseOrThrow(src);
  std::string out = emit(p, Dialect::MiniC);
  EXPECT_NE(out.find("(x + 1) * -(x - 2) - (*s).a + s->a % 3 - -4"), std::string::npos) << out;
}

TEST(Frontend, LocalsMayNotShadowGlobalsInMiniC) {
  auto r = parse("int g;\nint f() { int g = 1; return g; }\n");
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.diagnostics[0].kind, Diagnostic::Kind::Duplicate);
}
