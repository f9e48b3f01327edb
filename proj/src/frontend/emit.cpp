#include <sstream>

#include "untag/frontend.hpp"

namespace untag {

namespace {

int precedence(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Binary:
      switch (e.op) {
        case Op::Or: return 1;
        case Op::And: return 2;
        case Op::Eq:
        case Op::Ne: return 3;
        case Op::Lt:
        case Op::Le:
        case Op::Gt:
        case Op::Ge: return 4;
        case Op::Add:
        case Op::Sub: return 5;
        default: return 6;
      }
    case ExprKind::Unary:
    case ExprKind::Deref:
    case ExprKind::AddrOf:
    case ExprKind::New: return 7;
    case ExprKind::IntLit: return e.value < 0 && e.name.empty() ? 7 : 9;
    case ExprKind::Field:
    case ExprKind::MethodCall: return 8;
    default: return 9;
  }
}

class Emitter {
 public:
  Emitter(const Program& p, Dialect d) : program_(p), dialect_(d) {}

  std::string run() {
    bool first = true;
    auto gap = [&] {
      if (!first) out_ << "\n";
      first = false;
    };
    for (const auto& def : program_.types) {
      if (def.anonymous) continue;
      gap();
      typeDef(def);
    }
    if (!program_.globals.empty()) {
      gap();
      for (const auto& g : program_.globals) out_ << type(g.type) << " " << g.name << ";\n";
    }
    for (size_t i = 0; i < program_.functions.size();) {
      gap();
      const Function& f = program_.functions[i];
      if (f.owner.empty()) {
        function(f, 0);
        ++i;
        continue;
      }
      requireTag("methods");
      out_ << "impl " << f.owner << " {\n";
      size_t j = i;
      for (; j < program_.functions.size() && program_.functions[j].owner == f.owner; ++j) {
        if (j != i) out_ << "\n";
        function(program_.functions[j], 1);
      }
      out_ << "}\n";
      i = j;
    }
    return out_.str();
  }

 private:
  const Program& program_;
  Dialect dialect_;
  std::ostringstream out_;

  void requireTag(const std::string& what) const {
    if (dialect_ != Dialect::MiniTag)
      throw DiagnosticError({Diagnostic{Diagnostic::Kind::Dialect, {}, what + " cannot be emitted as MiniC"}});
  }

  static std::string pad(int depth) { return std::string(static_cast<size_t>(depth) * 2, ' '); }

  std::string type(const TypePtr& t) const {
    switch (t->kind) {
      case Type::Kind::Pointer: return type(t->pointee) + "*";
      case Type::Kind::Named: {
        const TypeDef* def = program_.findType(t->name);
        if (dialect_ == Dialect::MiniC && def && !def->anonymous) {
          if (def->kind == TypeDefKind::Struct) return "struct " + t->name;
          if (def->kind == TypeDefKind::Union) return "union " + t->name;
        }
        return t->name;
      }
      default: return t->str();
    }
  }

  void fields(const std::vector<FieldDecl>& fs, int depth) {
    for (const auto& f : fs) {
      const TypeDef* def = f.type->isNamed() ? program_.findType(f.type->name) : nullptr;
      if (def && def->anonymous) {
        out_ << pad(depth) << "union {\n";
        fields(def->fields, depth + 1);
        out_ << pad(depth) << "} " << f.name << ";\n";
        continue;
      }
      out_ << pad(depth) << type(f.type) << " " << f.name << ";\n";
    }
  }

  void typeDef(const TypeDef& def) {
    switch (def.kind) {
      case TypeDefKind::Struct:
      case TypeDefKind::Union:
        out_ << (def.kind == TypeDefKind::Struct ? "struct " : "union ") << def.name << " {\n";
        fields(def.fields, 1);
        out_ << "};\n";
        return;
      case TypeDefKind::ConstGroup:
        out_ << "enum {";
        for (size_t i = 0; i < def.constants.size(); ++i)
          out_ << (i ? ", " : " ") << def.constants[i].first << " = " << def.constants[i].second;
        out_ << " };\n";
        return;
      case TypeDefKind::Enum:
        requireTag("enum types");
        out_ << "enum " << def.name << " {\n";
        for (size_t i = 0; i < def.variants.size(); ++i) {
          const auto& v = def.variants[i];
          out_ << "  " << v.name;
          if (v.payload) out_ << "(" << type(v.payload) << ")";
          out_ << (i + 1 < def.variants.size() ? ",\n" : "\n");
        }
        out_ << "}\n";
        return;
    }
  }

  void function(const Function& f, int depth) {
    out_ << pad(depth) << type(f.returnType) << " " << f.name << "(";
    for (size_t i = 0; i < f.params.size(); ++i)
      out_ << (i ? ", " : "") << type(f.params[i].type) << " " << f.params[i].name;
    out_ << ") {\n";
    stmts(f.body, depth + 1);
    out_ << pad(depth) << "}\n";
  }

  void stmts(const std::vector<StmtPtr>& body, int depth) {
    for (const auto& s : body) stmt(*s, depth);
  }

  std::string pattern(const Pattern& p) const {
    std::string s = p.enumName + "::" + p.variant;
    if (p.binding == Pattern::Binding::Ref) s += "(ref " + p.bindName + ")";
    if (p.binding == Pattern::Binding::Wildcard) s += "(_)";
    return s;
  }

  std::string patterns(const std::vector<Pattern>& ps) const {
    std::string s;
    for (size_t i = 0; i < ps.size(); ++i) s += (i ? " | " : "") + pattern(ps[i]);
    return s;
  }

  void ifChain(const Stmt& s, int depth) {
    out_ << "if (" << expr(*s.expr) << ") {\n";
    stmts(s.body, depth + 1);
    out_ << pad(depth) << "}";
    if (!s.hasElse) {
      out_ << "\n";
      return;
    }
    if (s.elseBody.size() == 1 && s.elseBody[0]->kind == StmtKind::If) {
      out_ << " else ";
      ifChain(*s.elseBody[0], depth);
      return;
    }
    out_ << " else {\n";
    stmts(s.elseBody, depth + 1);
    out_ << pad(depth) << "}\n";
  }

  void stmt(const Stmt& s, int depth) {
    std::string ind = pad(depth);
    switch (s.kind) {
      case StmtKind::Block:
        out_ << ind << "{\n";
        stmts(s.body, depth + 1);
        out_ << ind << "}\n";
        return;
      case StmtKind::VarDecl:
        out_ << ind << type(s.typeArg) << " " << s.name;
        if (s.expr) out_ << " = " << expr(*s.expr);
        out_ << ";\n";
        return;
      case StmtKind::Assign:
        out_ << ind << expr(*s.lhs) << " " << s.assignOp << "= " << expr(*s.expr) << ";\n";
        return;
      case StmtKind::ExprStmt:
        out_ << ind << expr(*s.expr) << ";\n";
        return;
      case StmtKind::If:
        out_ << ind;
        ifChain(s, depth);
        return;
      case StmtKind::IfLet:
        requireTag("if-let");
        out_ << ind << "if let " << patterns(s.patterns) << " = " << expr(*s.expr) << " {\n";
        stmts(s.body, depth + 1);
        out_ << ind << "}";
        if (s.hasElse) {
          out_ << " else {\n";
          stmts(s.elseBody, depth + 1);
          out_ << ind << "}";
        }
        out_ << "\n";
        return;
      case StmtKind::While:
        out_ << ind << "while (" << expr(*s.expr) << ") {\n";
        stmts(s.body, depth + 1);
        out_ << ind << "}\n";
        return;
      case StmtKind::Switch:
        out_ << ind << "switch (" << expr(*s.expr) << ") {\n";
        for (const auto& c : s.cases) {
          for (size_t i = 0; i < c.values.size(); ++i) {
            out_ << ind << "  case ";
            if (i < c.valueNames.size() && !c.valueNames[i].empty())
              out_ << c.valueNames[i];
            else
              out_ << c.values[i];
            out_ << ":" << (i + 1 < c.values.size() ? "\n" : " {\n");
          }
          stmts(c.body, depth + 2);
          out_ << ind << "  }\n";
        }
        if (s.defaultBody) {
          out_ << ind << "  default: {\n";
          stmts(*s.defaultBody, depth + 2);
          out_ << ind << "  }\n";
        }
        out_ << ind << "}\n";
        return;
      case StmtKind::Match:
        requireTag("match");
        out_ << ind << "match (" << expr(*s.expr) << ") {\n";
        for (const auto& a : s.arms) {
          out_ << ind << "  " << (a.patterns.empty() ? "_" : patterns(a.patterns)) << " => {\n";
          stmts(a.body, depth + 2);
          out_ << ind << "  }\n";
        }
        out_ << ind << "}\n";
        return;
      case StmtKind::Return:
        out_ << ind << "return";
        if (s.expr) out_ << " " << expr(*s.expr);
        out_ << ";\n";
        return;
      case StmtKind::Print:
        out_ << ind << "print(" << expr(*s.expr) << ");\n";
        return;
      case StmtKind::Abort:
        out_ << ind << "abort();\n";
        return;
    }
  }

  std::string wrap(const Expr& e, int minPrec) {
    std::string s = expr(e);
    return precedence(e) < minPrec ? "(" + s + ")" : s;
  }

  std::string args(const Expr& e, size_t first) {
    std::string s = "(";
    for (size_t i = first; i < e.operands.size(); ++i) s += (i > first ? ", " : "") + expr(*e.operands[i]);
    return s + ")";
  }

  // Receiver of `.`/`->`: an arrow access prints the pointer, otherwise the
  // record itself (parenthesised when it is an explicit dereference).
  std::string receiver(const Expr& e) {
    const Expr& base = *e.operands[0];
    if (e.arrow) return wrap(*base.operands[0], 8) + "->";
    return wrap(base, 8) + ".";
  }

  std::string expr(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return e.name.empty() ? std::to_string(e.value) : e.name;
      case ExprKind::NullLit: return "null";
      case ExprKind::Var: return e.name;
      case ExprKind::New: return "new " + type(e.typeArg);
      case ExprKind::AddrOf: return "&" + wrap(*e.operands[0], 7);
      case ExprKind::Deref: return "*" + wrap(*e.operands[0], 7);
      case ExprKind::Field: return receiver(e) + e.name;
      case ExprKind::Call: return e.name + args(e, 0);
      case ExprKind::MethodCall: requireTag("method calls"); return receiver(e) + e.name + args(e, 1);
      case ExprKind::VariantCtor:
        requireTag("variant constructors");
        return e.enumName + "::" + e.variant + (e.operands.empty() ? "" : "(" + expr(*e.operands[0]) + ")");
      case ExprKind::Unary: {
        std::string inner = wrap(*e.operands[0], 7);
        std::string op = opSpelling(e.op);
        if (!inner.empty() && inner[0] == '-') op += " ";
        return op + inner;
      }
      case ExprKind::Binary: {
        int p = precedence(e);
        return wrap(*e.operands[0], p) + " " + opSpelling(e.op) + " " + wrap(*e.operands[1], p + 1);
      }
    }
    return "?";
  }
};

}  // namespace

std::string emit(const Program& program, Dialect dialect) { return Emitter(program, dialect).run(); }

}  // namespace untag
