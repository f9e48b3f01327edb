#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "untag/frontend.hpp"
#include "untag/pipeline.hpp"

using namespace untag;

namespace {

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kTypes =
    "struct Expr { int kind; union { struct Expr *e; struct BExpr b; } v; };\n"
    "struct BExpr { struct Expr *l; struct Expr *r; };\n";

}  // namespace

TEST(Heuristic, ExprIdentifiesKind) {
  Program p = parseOrThrow(readFile(UNTAG_CORPUS_DIR "/expr.mc"));
  auto a = analyze(p);
  const UnionReport* u = a->report.find("Expr", "v");
  ASSERT_TRUE(u);
  ASSERT_TRUE(u->tagField);
  EXPECT_EQ(*u->tagField, "kind");
  std::map<std::string, TagSet> expected{{"e", {1}}, {"b", {2, 3}}};
  EXPECT_EQ(u->association.fieldTags, expected);
  EXPECT_EQ(u->association.accessTags, (TagSet{1, 2, 3}));
  EXPECT_EQ(u->association.remTags, TagSet{0});
  EXPECT_TRUE(u->association.allTags.count(0));
}

TEST(Heuristic, ConflictingAccessesReject) {
  Program p = parseOrThrow(std::string(kTypes) +
                           "int f(struct Expr *e) { switch (e->kind) { case 1: { return eval(e->v.e); } } return 0; }\n"
                           "int g(struct Expr *e) { switch (e->kind) { case 1: { return e->v.b.l->kind; } } return 0; }\n"
                           "int eval(struct Expr *e) { return 0; }\n");
  auto a = analyze(p);
  std::string why;
  EXPECT_FALSE(a->heuristic().collectFromAccesses("Expr", "v", "kind", &why));
  EXPECT_NE(why.find("tag 1"), std::string::npos) << why;
  EXPECT_FALSE(a->report.find("Expr", "v")->tagField);
}

TEST(Heuristic, AssignedValuesDoNotCountAtAccesses) {
  Program p = parseOrThrow(std::string(kTypes) +
                           "int f(struct Expr *e, struct Expr *x) { e->kind = 1; struct Expr *y = e->v.e; return 0; }\n");
  auto a = analyze(p);
  auto r = a->heuristic().collectFromAccesses("Expr", "v", "kind");
  ASSERT_TRUE(r);
  EXPECT_TRUE(r->fieldTags.empty());
  // The observation exists and carries the assignment label.
  auto obs = a->heuristic().accesses("Expr", "v", "kind");
  ASSERT_EQ(obs.size(), 1u);
  ASSERT_TRUE(obs[0].tag);
  EXPECT_EQ(obs[0].tag->provenance, IntLabel::Provenance::Assignment);
}

TEST(Heuristic, BlockEndStateAssociatesLastWrittenMember) {
  Program p = parseOrThrow(std::string(kTypes) +
                           "struct Expr *mk(struct Expr *e, struct BExpr x) { e->kind = 2; e->v.b = x; return e; }\n");
  auto a = analyze(p);
  auto s = a->heuristic().collectFromStructs("Expr", "v", "kind");
  EXPECT_EQ(s["b"], TagSet{2});
  EXPECT_TRUE(s["e"].empty());
}

TEST(Heuristic, NoLabelsNoTags) {
  Program p = parseOrThrow(std::string(kTypes) + "int f(struct Expr *e) { return e->kind; }\n");
  auto a = analyze(p);
  EXPECT_TRUE(a->heuristic().collectAllTags("Expr", "v", "kind").empty());
}

TEST(Heuristic, MoreTagsWinsAndTiesGoToDeclarationOrder) {
  // `a` tags three values at accesses, `b` only one.
  Program p = parseOrThrow(
      "struct S { int b; int a; union { int x; int y; } u; };\n"
      "int f(struct S *s) {\n"
      "  switch (s->a) { case 1: { return s->u.x; } case 2: { return s->u.y; } case 3: { return s->u.y; } }\n"
      "  if (s->b == 7) { return s->u.x; }\n"
      "  return 0;\n"
      "}\n");
  auto a = analyze(p);
  const UnionReport* u = a->report.find("S", "u");
  ASSERT_TRUE(u->tagField);
  EXPECT_EQ(*u->tagField, "a");
  ASSERT_EQ(u->outcomes.size(), 2u);
  EXPECT_TRUE(u->outcomes[0].identified);

  Program q = parseOrThrow(
      "struct S { int b; int a; union { int x; int y; } u; };\n"
      "int f(struct S *s) {\n"
      "  if (s->a == 1) { return s->u.x; }\n"
      "  if (s->b == 7) { return s->u.y; }\n"
      "  return 0;\n"
      "}\n");
  auto qa = analyze(q);
  ASSERT_TRUE(qa->report.find("S", "u")->tagField);
  EXPECT_EQ(*qa->report.find("S", "u")->tagField, "b");
}

TEST(Heuristic, AllTagsContainAccessTagsOnEveryCorpusProgram) {
  for (const auto& entry : std::filesystem::directory_iterator(UNTAG_CORPUS_DIR)) {
    if (entry.path().extension() != ".mc") continue;
    Program p = parseOrThrow(readFile(entry.path().string()));
    auto a = analyze(p);
    TagHeuristic h = a->heuristic();
    for (const auto& [s, u] : a->candidates.unions)
      for (const auto& f : a->candidates.eligibleFields.at(s)) {
        auto acc = h.collectFromAccesses(s, u, f);
        if (!acc) continue;
        TagSet all = h.collectAllTags(s, u, f);
        for (auto t : acc->accessTags) EXPECT_TRUE(all.count(t)) << entry.path() << " " << s << "." << f << " " << t;
      }
  }
}

TEST(Heuristic, SelectedFieldTagsAreDisjoint) {
  for (const auto& entry : std::filesystem::directory_iterator(UNTAG_CORPUS_DIR)) {
    if (entry.path().extension() != ".mc") continue;
    Program p = parseOrThrow(readFile(entry.path().string()));
    auto a = analyze(p);
    for (const auto& u : a->report.unions) {
      if (!u.tagField) continue;
      TagSet seen;
      for (const auto& [member, tags] : u.association.fieldTags)
        for (auto t : tags) EXPECT_TRUE(seen.insert(t).second) << entry.path() << " " << member << " " << t;
      for (auto t : u.association.remTags) EXPECT_FALSE(seen.count(t)) << entry.path() << " rem " << t;
    }
  }
}
