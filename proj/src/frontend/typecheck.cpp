#include <map>
#include <set>

#include "untag/frontend.hpp"

namespace untag {

namespace {

[[noreturn]] void fail(Diagnostic::Kind kind, SourceLoc loc, std::string msg) {
  throw DiagnosticError({Diagnostic{kind, loc, std::move(msg)}});
}

bool assignable(const TypePtr& dst, const TypePtr& src) {
  if (sameType(dst, src)) return true;
  if (src->kind == Type::Kind::Null) return dst->isPointer() || dst->kind == Type::Kind::Fn;
  return false;
}

class Checker {
 public:
  explicit Checker(Program& p) : program_(p) {}

  std::vector<Diagnostic> run() {
    checkTypes();
    std::set<std::string> seen;
    for (auto& g : program_.globals) {
      guard([&] {
        checkTypeRef(g.type, g.loc);
        if (g.type->kind == Type::Kind::Void) fail(Diagnostic::Kind::Type, g.loc, "global of type void");
        if (!seen.insert(g.name).second)
          fail(Diagnostic::Kind::Duplicate, g.loc, "duplicate global '" + g.name + "'");
      });
    }
    std::set<std::pair<std::string, std::string>> fnames;
    for (auto& f : program_.functions) {
      guard([&] {
        if (!fnames.insert({f.owner, f.name}).second)
          fail(Diagnostic::Kind::Duplicate, f.loc, "duplicate function '" + f.name + "'");
        if (f.owner.empty() && seen.count(f.name))
          fail(Diagnostic::Kind::Duplicate, f.loc, "function '" + f.name + "' shadows a global");
      });
    }
    for (auto& f : program_.functions) guard([&] { checkFunction(f); });
    return std::move(diags_);
  }

 private:
  Program& program_;
  std::vector<Diagnostic> diags_;
  std::vector<std::map<std::string, TypePtr>> scopes_;
  std::set<std::string> functionLocals_;
  const Function* current_ = nullptr;

  template <typename F>
  void guard(F&& f) {
    try {
      f();
    } catch (const DiagnosticError& e) {
      for (const auto& d : e.diagnostics()) diags_.push_back(d);
    }
  }

  bool tag() const { return program_.dialect == Dialect::MiniTag; }

  void checkTypeRef(const TypePtr& t, SourceLoc loc) {
    if (t->isPointer()) return checkTypeRef(t->pointee, loc);
    if (t->isNamed()) {
      const TypeDef* def = program_.findType(t->name);
      if (!def || def->kind == TypeDefKind::ConstGroup)
        fail(Diagnostic::Kind::UnknownType, loc, "unknown type '" + t->name + "'");
    }
  }

  void checkTypes() {
    std::set<std::string> constNames;
    for (auto& def : program_.types) {
      guard([&] {
        if (def.kind == TypeDefKind::Enum && !tag())
          fail(Diagnostic::Kind::Dialect, def.loc, "enum type definitions are only allowed in MiniTag");
        for (const auto& f : def.fields) {
          checkTypeRef(f.type, f.loc);
          if (f.type->kind == Type::Kind::Void) fail(Diagnostic::Kind::Type, f.loc, "field of type void");
          if (f.type->isNamed() && f.type->name == def.name)
            fail(Diagnostic::Kind::Type, f.loc, "type '" + def.name + "' contains itself");
        }
        std::set<std::string> vnames;
        for (const auto& v : def.variants) {
          if (v.payload) checkTypeRef(v.payload, def.loc);
          if (!vnames.insert(v.name).second)
            fail(Diagnostic::Kind::Duplicate, def.loc, "duplicate variant '" + v.name + "'");
        }
        for (const auto& [n, _] : def.constants)
          if (!constNames.insert(n).second)
            fail(Diagnostic::Kind::Duplicate, def.loc, "duplicate constant '" + n + "'");
      });
    }
    // An anonymous union must be the type of exactly one struct field.
    for (const auto& def : program_.types) {
      if (!def.anonymous) continue;
      int uses = 0;
      for (const auto& s : program_.types)
        for (const auto& f : s.fields)
          if (f.type->isNamed() && f.type->name == def.name) ++uses;
      if (uses != 1)
        diags_.push_back({Diagnostic::Kind::Type, def.loc, "anonymous union '" + def.name + "' used " +
                                                               std::to_string(uses) + " times"});
    }
  }

  TypePtr lookupVar(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      auto f = it->find(name);
      if (f != it->end()) return f->second;
    }
    if (const GlobalVar* g = program_.findGlobal(name)) return g->type;
    return nullptr;
  }

  void declare(const std::string& name, TypePtr type, SourceLoc loc) {
    if (scopes_.back().count(name))
      fail(Diagnostic::Kind::Duplicate, loc, "duplicate variable '" + name + "'");
    if (!tag() && !functionLocals_.insert(name).second)
      fail(Diagnostic::Kind::Duplicate, loc, "duplicate local '" + name + "' in function");
    if (!tag() && program_.findGlobal(name))
      fail(Diagnostic::Kind::Duplicate, loc, "local '" + name + "' shadows a global");
    scopes_.back()[name] = std::move(type);
  }

  void checkFunction(Function& f) {
    current_ = &f;
    scopes_.clear();
    functionLocals_.clear();
    scopes_.emplace_back();
    checkTypeRef(f.returnType, f.loc);
    if (!f.owner.empty()) {
      if (!tag()) fail(Diagnostic::Kind::Dialect, f.loc, "methods are only allowed in MiniTag");
      const TypeDef* owner = program_.findType(f.owner);
      if (!owner) fail(Diagnostic::Kind::UnknownType, f.loc, "unknown impl target '" + f.owner + "'");
      declare("self", Type::PointerTo(Type::Named(f.owner)), f.loc);
    }
    for (const auto& p : f.params) {
      checkTypeRef(p.type, f.loc);
      if (p.type->kind == Type::Kind::Void) fail(Diagnostic::Kind::Type, f.loc, "parameter of type void");
      declare(p.name, p.type, f.loc);
    }
    stmts(f.body);
    current_ = nullptr;
  }

  void stmts(std::vector<StmtPtr>& body) {
    scopes_.emplace_back();
    for (auto& s : body) guard([&] { stmt(*s); });
    scopes_.pop_back();
  }

  void requireScalar(const Expr& e, const char* what) {
    if (!e.type->isScalar() || e.type->kind == Type::Kind::Null)
      if (e.type->kind != Type::Kind::Null)
        fail(Diagnostic::Kind::Type, e.loc, std::string(what) + " must be a scalar, got " + e.type->str());
  }

  const TypeDef& enumDef(const TypePtr& t, SourceLoc loc) {
    const TypeDef* def = t->isNamed() ? program_.findType(t->name) : nullptr;
    if (!def || def->kind != TypeDefKind::Enum)
      fail(Diagnostic::Kind::Type, loc, "pattern scrutinee must be an enum, got " + t->str());
    return *def;
  }

  // Checks the alternatives and returns the binding (name, type) they share.
  std::optional<std::pair<std::string, TypePtr>> patterns(const std::vector<Pattern>& ps, const TypeDef& def,
                                                          SourceLoc loc) {
    std::optional<std::pair<std::string, TypePtr>> binding;
    std::set<std::string> seen;
    for (size_t i = 0; i < ps.size(); ++i) {
      const Pattern& p = ps[i];
      if (p.enumName != def.name)
        fail(Diagnostic::Kind::Type, loc, "pattern enum '" + p.enumName + "' does not match '" + def.name + "'");
      int vi = def.variantIndex(p.variant);
      if (vi < 0) fail(Diagnostic::Kind::Type, loc, "unknown variant '" + p.variant + "'");
      if (!seen.insert(p.variant).second)
        fail(Diagnostic::Kind::Duplicate, loc, "variant '" + p.variant + "' repeated in pattern");
      const VariantDecl& v = def.variants[vi];
      if (p.binding != Pattern::Binding::None && !v.payload)
        fail(Diagnostic::Kind::Type, loc, "variant '" + p.variant + "' has no payload");
      if (p.binding == Pattern::Binding::None && v.payload)
        fail(Diagnostic::Kind::Type, loc, "variant '" + p.variant + "' needs a payload pattern");
      std::optional<std::pair<std::string, TypePtr>> mine;
      if (p.binding == Pattern::Binding::Ref) mine = std::make_pair(p.bindName, Type::PointerTo(v.payload));
      if (i == 0) {
        binding = mine;
      } else if (binding.has_value() != mine.has_value() ||
                 (binding && (binding->first != mine->first || !sameType(binding->second, mine->second)))) {
        fail(Diagnostic::Kind::Type, loc, "or-pattern alternatives must bind the same name and type");
      }
    }
    return binding;
  }

  void scopedWithBinding(std::vector<StmtPtr>& body, const std::optional<std::pair<std::string, TypePtr>>& b,
                         SourceLoc loc) {
    scopes_.emplace_back();
    if (b) scopes_.back()[b->first] = b->second;
    (void)loc;
    stmts(body);
    scopes_.pop_back();
  }

  void stmt(Stmt& s) {
    switch (s.kind) {
      case StmtKind::Block: stmts(s.body); return;
      case StmtKind::VarDecl: {
        checkTypeRef(s.typeArg, s.loc);
        if (s.typeArg->kind == Type::Kind::Void) fail(Diagnostic::Kind::Type, s.loc, "variable of type void");
        if (s.expr) {
          expr(*s.expr);
          if (!assignable(s.typeArg, s.expr->type))
            fail(Diagnostic::Kind::Type, s.loc,
                 "cannot initialise " + s.typeArg->str() + " from " + s.expr->type->str());
        }
        declare(s.name, s.typeArg, s.loc);
        return;
      }
      case StmtKind::Assign: {
        expr(*s.lhs);
        expr(*s.expr);
        if (!isLvalue(*s.lhs)) fail(Diagnostic::Kind::Type, s.loc, "assignment target is not an lvalue");
        if (s.assignOp.empty()) {
          if (!assignable(s.lhs->type, s.expr->type))
            fail(Diagnostic::Kind::Type, s.loc,
                 "cannot assign " + s.expr->type->str() + " to " + s.lhs->type->str());
        } else if (!s.lhs->type->isInt() || !s.expr->type->isInt()) {
          fail(Diagnostic::Kind::Type, s.loc, "compound assignment needs integers");
        }
        return;
      }
      case StmtKind::ExprStmt:
        expr(*s.expr, true);
        return;
      case StmtKind::If:
        expr(*s.expr);
        requireScalar(*s.expr, "condition");
        stmts(s.body);
        stmts(s.elseBody);
        return;
      case StmtKind::While:
        expr(*s.expr);
        requireScalar(*s.expr, "condition");
        stmts(s.body);
        return;
      case StmtKind::Switch: {
        expr(*s.expr);
        if (!s.expr->type->isInt()) fail(Diagnostic::Kind::Type, s.loc, "switch needs an integer");
        std::set<int64_t> seen;
        for (auto& c : s.cases) {
          for (size_t i = 0; i < c.values.size(); ++i) {
            if (i < c.valueNames.size() && !c.valueNames[i].empty()) {
              auto v = program_.findConstant(c.valueNames[i]);
              if (!v) fail(Diagnostic::Kind::Type, c.loc, "unknown constant '" + c.valueNames[i] + "'");
              c.values[i] = *v;
            }
            if (!seen.insert(c.values[i]).second)
              fail(Diagnostic::Kind::Duplicate, c.loc, "duplicate case " + std::to_string(c.values[i]));
          }
          stmts(c.body);
        }
        if (s.defaultBody) stmts(*s.defaultBody);
        return;
      }
      case StmtKind::IfLet: {
        expr(*s.expr);
        if (!isLvalue(*s.expr)) fail(Diagnostic::Kind::Type, s.loc, "if-let scrutinee must be an lvalue");
        const TypeDef& def = enumDef(s.expr->type, s.loc);
        auto b = patterns(s.patterns, def, s.loc);
        scopedWithBinding(s.body, b, s.loc);
        stmts(s.elseBody);
        return;
      }
      case StmtKind::Match: {
        expr(*s.expr);
        if (!isLvalue(*s.expr)) fail(Diagnostic::Kind::Type, s.loc, "match scrutinee must be an lvalue");
        const TypeDef& def = enumDef(s.expr->type, s.loc);
        for (size_t i = 0; i < s.arms.size(); ++i) {
          auto& arm = s.arms[i];
          if (arm.patterns.empty()) {
            if (i + 1 != s.arms.size()) fail(Diagnostic::Kind::Syntax, s.loc, "'_' arm must be last");
            stmts(arm.body);
            continue;
          }
          auto b = patterns(arm.patterns, def, s.loc);
          scopedWithBinding(arm.body, b, s.loc);
        }
        return;
      }
      case StmtKind::Return: {
        TypePtr want = current_->returnType;
        if (!s.expr) {
          if (want->kind != Type::Kind::Void) fail(Diagnostic::Kind::Type, s.loc, "missing return value");
          return;
        }
        expr(*s.expr);
        if (want->kind == Type::Kind::Void || !assignable(want, s.expr->type))
          fail(Diagnostic::Kind::Type, s.loc, "cannot return " + s.expr->type->str() + " as " + want->str());
        return;
      }
      case StmtKind::Print:
        expr(*s.expr);
        if (!s.expr->type->isInt()) fail(Diagnostic::Kind::Type, s.loc, "print needs an integer");
        return;
      case StmtKind::Abort:
        return;
    }
  }

  bool isLvalue(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Var: return !e.fnValue;
      case ExprKind::Deref: return true;
      case ExprKind::Field: return isLvalue(*e.operands[0]);
      default: return false;
    }
  }

  void args(Expr& e, size_t first, const std::vector<Param>& params, const std::string& what) {
    size_t n = e.operands.size() - first;
    if (n != params.size())
      fail(Diagnostic::Kind::Type, e.loc,
           what + " expects " + std::to_string(params.size()) + " arguments, got " + std::to_string(n));
    for (size_t i = 0; i < n; ++i) {
      Expr& a = *e.operands[first + i];
      expr(a);
      if (!assignable(params[i].type, a.type))
        fail(Diagnostic::Kind::Type, a.loc,
             "argument " + std::to_string(i + 1) + " of " + what + ": expected " + params[i].type->str() +
                 ", got " + a.type->str());
    }
  }

  void expr(Expr& e, bool statementContext = false) {
    switch (e.kind) {
      case ExprKind::IntLit: e.type = Type::Int(); break;
      case ExprKind::NullLit: e.type = Type::NullT(); break;
      case ExprKind::Var: {
        if (TypePtr t = lookupVar(e.name)) {
          e.type = t;
          e.fnValue = false;
        } else if (program_.findFunction(e.name)) {
          e.type = Type::Fn();
          e.fnValue = true;
        } else if (auto c = program_.findConstant(e.name)) {
          // Symbolic constants become literals that remember their spelling.
          e.kind = ExprKind::IntLit;
          e.value = *c;
          e.type = Type::Int();
        } else {
          fail(Diagnostic::Kind::Type, e.loc, "unknown identifier '" + e.name + "'");
        }
        break;
      }
      case ExprKind::New:
        checkTypeRef(e.typeArg, e.loc);
        if (e.typeArg->kind == Type::Kind::Void) fail(Diagnostic::Kind::Type, e.loc, "new of void");
        e.type = Type::PointerTo(e.typeArg);
        break;
      case ExprKind::AddrOf:
        expr(*e.operands[0]);
        if (!isLvalue(*e.operands[0])) fail(Diagnostic::Kind::Type, e.loc, "cannot take the address of an rvalue");
        e.type = Type::PointerTo(e.operands[0]->type);
        break;
      case ExprKind::Deref:
        expr(*e.operands[0]);
        if (!e.operands[0]->type->isPointer())
          fail(Diagnostic::Kind::Type, e.loc, "cannot dereference " + e.operands[0]->type->str());
        e.type = e.operands[0]->type->pointee;
        if (e.type->kind == Type::Kind::Void) fail(Diagnostic::Kind::Type, e.loc, "dereference of void*");
        break;
      case ExprKind::Field: {
        expr(*e.operands[0]);
        const TypePtr& bt = e.operands[0]->type;
        const TypeDef* def = bt->isNamed() ? program_.findType(bt->name) : nullptr;
        if (!def || (def->kind != TypeDefKind::Struct && def->kind != TypeDefKind::Union))
          fail(Diagnostic::Kind::Type, e.loc, "field access on non-record type " + bt->str());
        const FieldDecl* fd = def->field(e.name);
        if (!fd) fail(Diagnostic::Kind::Type, e.loc, "no field '" + e.name + "' in " + def->name);
        e.type = fd->type;
        break;
      }
      case ExprKind::Call: {
        TypePtr vt = lookupVar(e.name);
        if (vt) {
          if (vt->kind != Type::Kind::Fn) fail(Diagnostic::Kind::Type, e.loc, "'" + e.name + "' is not callable");
          e.indirectCall = true;
          for (auto& a : e.operands) {
            expr(*a);
            if (!a->type->isScalar()) fail(Diagnostic::Kind::Type, a->loc, "indirect call arguments must be scalars");
          }
          e.type = Type::Int();
          break;
        }
        const Function* f = program_.findFunction(e.name);
        if (!f) fail(Diagnostic::Kind::Type, e.loc, "unknown function '" + e.name + "'");
        e.indirectCall = false;
        args(e, 0, f->params, "'" + e.name + "'");
        e.type = f->returnType;
        break;
      }
      case ExprKind::MethodCall: {
        if (!tag()) fail(Diagnostic::Kind::Dialect, e.loc, "method calls are only allowed in MiniTag");
        expr(*e.operands[0]);
        const TypePtr& rt = e.operands[0]->type;
        const Function* m = rt->isNamed() ? program_.findMethod(rt->name, e.name) : nullptr;
        if (!m) fail(Diagnostic::Kind::Type, e.loc, "no method '" + e.name + "' on " + rt->str());
        args(e, 1, m->params, "method '" + e.name + "'");
        e.type = m->returnType;
        break;
      }
      case ExprKind::Unary:
        expr(*e.operands[0]);
        if (e.op == Op::Neg && !e.operands[0]->type->isInt())
          fail(Diagnostic::Kind::Type, e.loc, "negation needs an integer");
        if (e.op == Op::Not) requireScalar(*e.operands[0], "operand of '!'");
        e.type = Type::Int();
        break;
      case ExprKind::Binary: {
        expr(*e.operands[0]);
        expr(*e.operands[1]);
        const TypePtr& a = e.operands[0]->type;
        const TypePtr& b = e.operands[1]->type;
        if (e.op == Op::Eq || e.op == Op::Ne) {
          if (!assignable(a, b) && !assignable(b, a) &&
              !(a->kind == Type::Kind::Null && b->kind == Type::Kind::Null))
            fail(Diagnostic::Kind::Type, e.loc, "cannot compare " + a->str() + " with " + b->str());
          if (!a->isScalar() || !b->isScalar()) fail(Diagnostic::Kind::Type, e.loc, "cannot compare records");
        } else if (e.op == Op::And || e.op == Op::Or) {
          requireScalar(*e.operands[0], "operand of logical operator");
          requireScalar(*e.operands[1], "operand of logical operator");
        } else if (!a->isInt() || !b->isInt()) {
          fail(Diagnostic::Kind::Type, e.loc, std::string("operator '") + opSpelling(e.op) + "' needs integers");
        }
        e.type = Type::Int();
        break;
      }
      case ExprKind::VariantCtor: {
        if (!tag()) fail(Diagnostic::Kind::Dialect, e.loc, "variant constructors are only allowed in MiniTag");
        const TypeDef* def = program_.findType(e.enumName);
        if (!def || def->kind != TypeDefKind::Enum)
          fail(Diagnostic::Kind::UnknownType, e.loc, "unknown enum '" + e.enumName + "'");
        int vi = def->variantIndex(e.variant);
        if (vi < 0) fail(Diagnostic::Kind::Type, e.loc, "unknown variant '" + e.variant + "'");
        const VariantDecl& v = def->variants[vi];
        if (static_cast<bool>(v.payload) != !e.operands.empty())
          fail(Diagnostic::Kind::Type, e.loc, "variant '" + e.variant + "' payload mismatch");
        if (v.payload) {
          expr(*e.operands[0]);
          if (!assignable(v.payload, e.operands[0]->type))
            fail(Diagnostic::Kind::Type, e.loc, "variant '" + e.variant + "' expects " + v.payload->str());
        }
        e.type = Type::Named(def->name);
        break;
      }
    }
    if (e.type->kind == Type::Kind::Void && !statementContext)
      fail(Diagnostic::Kind::Type, e.loc, "void value used in an expression");
  }
};

}  // namespace

std::vector<Diagnostic> typecheck(Program& program) { return Checker(program).run(); }

static void renumberExpr(Expr& e, int& next) {
  e.id = next++;
  for (auto& o : e.operands) renumberExpr(*o, next);
}

static void renumberStmts(std::vector<StmtPtr>& body, int& next);

static void renumberStmt(Stmt& s, int& next) {
  s.id = next++;
  if (s.lhs) renumberExpr(*s.lhs, next);
  if (s.expr) renumberExpr(*s.expr, next);
  renumberStmts(s.body, next);
  renumberStmts(s.elseBody, next);
  for (auto& c : s.cases) renumberStmts(c.body, next);
  if (s.defaultBody) renumberStmts(*s.defaultBody, next);
  for (auto& a : s.arms) renumberStmts(a.body, next);
}

static void renumberStmts(std::vector<StmtPtr>& body, int& next) {
  for (auto& s : body) renumberStmt(*s, next);
}

void renumber(Program& program) {
  int next = 1;
  for (auto& f : program.functions) renumberStmts(f.body, next);
}

}  // namespace untag
