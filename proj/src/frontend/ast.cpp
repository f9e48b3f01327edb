#include "untag/ast.hpp"

namespace untag {

TypePtr Type::Int() {
  static const TypePtr t = std::make_shared<Type>(Type{Kind::Int, {}, nullptr});
  return t;
}
TypePtr Type::Void() {
  static const TypePtr t = std::make_shared<Type>(Type{Kind::Void, {}, nullptr});
  return t;
}
TypePtr Type::NullT() {
  static const TypePtr t = std::make_shared<Type>(Type{Kind::Null, {}, nullptr});
  return t;
}
TypePtr Type::Fn() {
  static const TypePtr t = std::make_shared<Type>(Type{Kind::Fn, {}, nullptr});
  return t;
}
TypePtr Type::Named(std::string name) {
  return std::make_shared<Type>(Type{Kind::Named, std::move(name), nullptr});
}
TypePtr Type::PointerTo(TypePtr pointee) {
  return std::make_shared<Type>(Type{Kind::Pointer, {}, std::move(pointee)});
}

std::string Type::str() const {
  switch (kind) {
    case Kind::Int: return "int";
    case Kind::Void: return "void";
    case Kind::Null: return "null";
    case Kind::Fn: return "fn";
    case Kind::Named: return name;
    case Kind::Pointer: return pointee->str() + "*";
  }
  return "?";
}

bool sameType(const TypePtr& a, const TypePtr& b) {
  if (!a || !b) return a == b;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Type::Kind::Named: return a->name == b->name;
    case Type::Kind::Pointer: return sameType(a->pointee, b->pointee);
    default: return true;
  }
}

const FieldDecl* TypeDef::field(const std::string& f) const {
  for (const auto& fd : fields)
    if (fd.name == f) return &fd;
  return nullptr;
}

int TypeDef::fieldIndex(const std::string& f) const {
  for (size_t i = 0; i < fields.size(); ++i)
    if (fields[i].name == f) return static_cast<int>(i);
  return -1;
}

int TypeDef::variantIndex(const std::string& v) const {
  for (size_t i = 0; i < variants.size(); ++i)
    if (variants[i].name == v) return static_cast<int>(i);
  return -1;
}

const char* opSpelling(Op op) {
  switch (op) {
    case Op::Neg: return "-";
    case Op::Not: return "!";
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    case Op::Mod: return "%";
    case Op::Eq: return "==";
    case Op::Ne: return "!=";
    case Op::Lt: return "<";
    case Op::Le: return "<=";
    case Op::Gt: return ">";
    case Op::Ge: return ">=";
    case Op::And: return "&&";
    case Op::Or: return "||";
  }
  return "?";
}

ExprPtr Expr::clone() const {
  auto e = std::make_unique<Expr>();
  e->kind = kind;
  e->id = id;
  e->loc = loc;
  e->value = value;
  e->name = name;
  e->enumName = enumName;
  e->variant = variant;
  e->typeArg = typeArg;
  e->op = op;
  e->arrow = arrow;
  e->type = type;
  e->indirectCall = indirectCall;
  e->fnValue = fnValue;
  for (const auto& o : operands) e->operands.push_back(o->clone());
  return e;
}

static std::vector<StmtPtr> cloneStmts(const std::vector<StmtPtr>& v) {
  std::vector<StmtPtr> out;
  out.reserve(v.size());
  for (const auto& s : v) out.push_back(s->clone());
  return out;
}

StmtPtr Stmt::clone() const {
  auto s = std::make_unique<Stmt>();
  s->kind = kind;
  s->id = id;
  s->loc = loc;
  s->typeArg = typeArg;
  s->name = name;
  s->assignOp = assignOp;
  if (lhs) s->lhs = lhs->clone();
  if (expr) s->expr = expr->clone();
  s->body = cloneStmts(body);
  s->elseBody = cloneStmts(elseBody);
  s->hasElse = hasElse;
  s->patterns = patterns;
  for (const auto& c : cases) {
    SwitchCase nc;
    nc.values = c.values;
    nc.valueNames = c.valueNames;
    nc.body = cloneStmts(c.body);
    nc.loc = c.loc;
    s->cases.push_back(std::move(nc));
  }
  if (defaultBody) s->defaultBody = cloneStmts(*defaultBody);
  for (const auto& a : arms) s->arms.push_back(MatchArm{a.patterns, cloneStmts(a.body)});
  return s;
}

Function Function::clone() const {
  Function f;
  f.name = name;
  f.owner = owner;
  f.returnType = returnType;
  f.params = params;
  f.body = cloneStmts(body);
  f.loc = loc;
  return f;
}

const TypeDef* Program::findType(const std::string& name) const {
  for (const auto& t : types)
    if (t.name == name) return &t;
  return nullptr;
}

TypeDef* Program::findType(const std::string& name) {
  for (auto& t : types)
    if (t.name == name) return &t;
  return nullptr;
}

const Function* Program::findFunction(const std::string& name) const {
  for (const auto& f : functions)
    if (f.owner.empty() && f.name == name) return &f;
  return nullptr;
}

const Function* Program::findMethod(const std::string& owner, const std::string& name) const {
  for (const auto& f : functions)
    if (f.owner == owner && f.name == name) return &f;
  return nullptr;
}

const GlobalVar* Program::findGlobal(const std::string& name) const {
  for (const auto& g : globals)
    if (g.name == name) return &g;
  return nullptr;
}

std::optional<int64_t> Program::findConstant(const std::string& name) const {
  for (const auto& t : types)
    if (t.kind == TypeDefKind::ConstGroup)
      for (const auto& [n, v] : t.constants)
        if (n == name) return v;
  return std::nullopt;
}

Program Program::clone() const {
  Program p;
  p.dialect = dialect;
  p.types = types;
  p.globals = globals;
  for (const auto& f : functions) p.functions.push_back(f.clone());
  return p;
}

TypePtr fieldPathType(const Program& program, TypePtr type, const std::vector<std::string>& path) {
  for (const auto& step : path) {
    if (!type || !type->isNamed()) return nullptr;
    const TypeDef* def = program.findType(type->name);
    if (!def) return nullptr;
    const FieldDecl* fd = def->field(step);
    if (!fd) return nullptr;
    type = fd->type;
  }
  return type;
}

bool isAggregate(const Program& program, const TypePtr& type) {
  return type && type->isNamed() && program.findType(type->name) != nullptr;
}

static void collectSlots(const Program& program, const TypePtr& type, std::vector<std::string>& prefix,
                         std::vector<std::vector<std::string>>& out) {
  const TypeDef* def = type && type->isNamed() ? program.findType(type->name) : nullptr;
  if (!def || def->kind != TypeDefKind::Struct) {
    out.push_back(prefix);
    return;
  }
  for (const auto& f : def->fields) {
    prefix.push_back(f.name);
    collectSlots(program, f.type, prefix, out);
    prefix.pop_back();
  }
}

std::vector<std::vector<std::string>> scalarSlots(const Program& program, const TypePtr& type) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::string> prefix;
  collectSlots(program, type, prefix, out);
  return out;
}

std::vector<std::string> canonicalPath(const Program& program, TypePtr type,
                                       const std::vector<std::string>& path) {
  std::vector<std::string> out;
  for (const auto& step : path) {
    const TypeDef* def = type && type->isNamed() ? program.findType(type->name) : nullptr;
    if (!def || def->kind != TypeDefKind::Struct) break;
    const FieldDecl* fd = def->field(step);
    if (!fd) break;
    out.push_back(step);
    type = fd->type;
  }
  return out;
}

std::string joinPath(const std::vector<std::string>& path) {
  std::string s;
  for (const auto& p : path) {
    s += '.';
    s += p;
  }
  return s;
}

void visitStmts(const std::vector<StmtPtr>& body, const std::function<void(const Stmt&)>& fn) {
  for (const auto& s : body) {
    fn(*s);
    visitStmts(s->body, fn);
    visitStmts(s->elseBody, fn);
    for (const auto& c : s->cases) visitStmts(c.body, fn);
    if (s->defaultBody) visitStmts(*s->defaultBody, fn);
    for (const auto& a : s->arms) visitStmts(a.body, fn);
  }
}

void visitExpr(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& o : e.operands) visitExpr(*o, fn);
}

void visitExprs(const std::vector<StmtPtr>& body, const std::function<void(const Expr&)>& fn) {
  visitStmts(body, [&](const Stmt& s) {
    if (s.lhs) visitExpr(*s.lhs, fn);
    if (s.expr) visitExpr(*s.expr, fn);
  });
}

}  // namespace untag
