#include "untag/candidates.hpp"

#include <algorithm>

namespace untag {

bool CandidateSet::isStruct(const std::string& s) const {
  return std::find(structs.begin(), structs.end(), s) != structs.end();
}

namespace {

// The struct owning field access `e`, or empty when `e` is not a field access.
std::string ownerOf(const Expr& e) {
  if (e.kind != ExprKind::Field) return {};
  const TypePtr& t = e.operands[0]->type;
  return t && t->isNamed() ? t->name : std::string();
}

}  // namespace

std::vector<std::string> tagEligibleFields(const TypeDef& def, const Program& program) {
  std::set<std::string> excluded;
  for (const auto& f : program.functions) {
    visitStmts(f.body, [&](const Stmt& s) {
      if (s.kind == StmtKind::Assign && !s.assignOp.empty() && ownerOf(*s.lhs) == def.name)
        excluded.insert(s.lhs->name);
    });
    visitExprs(f.body, [&](const Expr& e) {
      if (e.kind == ExprKind::AddrOf && ownerOf(*e.operands[0]) == def.name) excluded.insert(e.operands[0]->name);
    });
  }
  std::vector<std::string> out;
  for (const auto& fd : def.fields)
    if (fd.type->isInt() && !excluded.count(fd.name)) out.push_back(fd.name);
  return out;
}

CandidateSet collectCandidates(const Program& program) {
  CandidateSet c;
  for (const auto& def : program.types) {
    if (def.kind != TypeDefKind::Struct) continue;
    std::vector<std::string> unions;
    for (const auto& fd : def.fields) {
      const TypeDef* u = fd.type->isNamed() ? program.findType(fd.type->name) : nullptr;
      if (u && u->kind == TypeDefKind::Union && u->anonymous) unions.push_back(fd.name);
    }
    if (unions.empty()) continue;
    auto eligible = tagEligibleFields(def, program);
    if (eligible.empty()) continue;
    c.structs.push_back(def.name);
    for (const auto& u : unions) c.unions.emplace_back(def.name, u);
    c.eligibleFields[def.name] = std::move(eligible);
  }
  if (c.empty()) return c;
  for (const auto& f : program.functions) {
    bool touches = false;
    visitExprs(f.body, [&](const Expr& e) {
      if (!touches && e.kind == ExprKind::Field && c.isStruct(ownerOf(e))) touches = true;
    });
    if (touches) c.functions.insert(f.name);
  }
  return c;
}

}  // namespace untag
