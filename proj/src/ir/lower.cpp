#include <functional>
#include <set>
#include <sstream>
#include <stdexcept>

#include "untag/cfg.hpp"

namespace untag {

std::string IrPlace::str() const {
  std::string s = base;
  for (const auto& p : projs) {
    if (p.kind == Proj::Kind::Deref)
      s = "(*" + s + ")";
    else
      s += "." + p.field;
  }
  return s;
}

Operand Operand::constant(int64_t v) {
  Operand o;
  o.kind = Kind::Const;
  o.value = v;
  return o;
}
Operand Operand::null() {
  Operand o;
  o.kind = Kind::Null;
  return o;
}
Operand Operand::copy(IrPlace p) {
  Operand o;
  o.kind = Kind::Copy;
  o.place = std::move(p);
  return o;
}
Operand Operand::function(std::string n) {
  Operand o;
  o.kind = Kind::Function;
  o.name = std::move(n);
  return o;
}

std::string Operand::str() const {
  switch (kind) {
    case Kind::Const: return std::to_string(value);
    case Kind::Null: return "null";
    case Kind::Copy: return place.str();
    case Kind::Function: return "fn " + name;
  }
  return "?";
}

std::string Rvalue::str() const {
  switch (kind) {
    case Kind::Use: return operands[0].str();
    case Kind::AddrOf: return "&" + place.str();
    case Kind::New: return "new " + type->str();
    case Kind::Unary: return std::string(opSpelling(op)) + operands[0].str();
    case Kind::Binary: return operands[0].str() + " " + opSpelling(op) + " " + operands[1].str();
    case Kind::Zero: return "zero " + type->str();
  }
  return "?";
}

std::string Instr::str() const {
  std::string s;
  switch (kind) {
    case Kind::Assign: return dest->str() + " = " + rvalue.str();
    case Kind::CompoundAssign: return dest->str() + " " + opSpelling(op) + "= " + value.str();
    case Kind::Call:
      if (dest) s = dest->str() + " = ";
      s += "call " + callee.str() + "(";
      for (size_t i = 0; i < args.size(); ++i) s += (i ? ", " : "") + args[i].str();
      return s + ")";
    case Kind::Print: return "print " + value.str();
  }
  return s;
}

std::vector<const IrPlace*> Instr::places() const {
  std::vector<const IrPlace*> out;
  if (dest) out.push_back(&*dest);
  auto add = [&](const Operand& o) {
    if (o.kind == Operand::Kind::Copy) out.push_back(&o.place);
  };
  switch (kind) {
    case Kind::Assign:
      for (const auto& o : rvalue.operands) add(o);
      if (rvalue.kind == Rvalue::Kind::AddrOf) out.push_back(&rvalue.place);
      break;
    case Kind::CompoundAssign:
    case Kind::Print: add(value); break;
    case Kind::Call:
      add(callee);
      for (const auto& a : args) add(a);
      break;
  }
  return out;
}

std::vector<int> Terminator::successors() const {
  switch (kind) {
    case Kind::Goto: return {target};
    case Kind::Branch: return {thenTarget, elseTarget};
    case Kind::Switch: {
      std::vector<int> out;
      for (const auto& c : cases) out.push_back(c.second);
      out.push_back(defaultTarget);
      return out;
    }
    default: return {};
  }
}

std::string Terminator::str() const {
  std::ostringstream s;
  switch (kind) {
    case Kind::Goto: s << "goto bb" << target; break;
    case Kind::Branch:
      if (cmp)
        s << "if " << cmp->lhs.str() << " " << opSpelling(cmp->op) << " " << cmp->rhs.str();
      else
        s << "if " << cond.str();
      s << " then bb" << thenTarget << " else bb" << elseTarget;
      break;
    case Kind::Switch:
      s << "switch " << discriminee.str() << " [";
      for (const auto& [vals, t] : cases) {
        for (auto v : vals) s << v << ",";
        s << "->bb" << t << "; ";
      }
      s << "default->bb" << defaultTarget << "]";
      break;
    case Kind::Return:
      s << "return";
      if (value) s << " " << value->str();
      break;
    case Kind::Abort: s << "abort"; break;
  }
  return s.str();
}

std::map<std::string, TypePtr> CfgFunction::variableTypes() const {
  std::map<std::string, TypePtr> m;
  for (const auto& p : params) m[p.name] = p.type;
  for (const auto& l : locals) m[l.name] = l.type;
  return m;
}

std::vector<std::vector<int>> CfgFunction::predecessors() const {
  std::vector<std::vector<int>> preds(blocks.size());
  for (const auto& b : blocks)
    for (int s : b.term.successors()) preds[s].push_back(b.id);
  return preds;
}

bool CfgFunction::hasLoop() const {
  std::vector<int> state(blocks.size(), 0);
  std::function<bool(int)> dfs = [&](int b) {
    state[b] = 1;
    for (int s : blocks[b].term.successors()) {
      if (state[s] == 1) return true;
      if (state[s] == 0 && dfs(s)) return true;
    }
    state[b] = 2;
    return false;
  };
  return !blocks.empty() && dfs(0);
}

std::string CfgFunction::str() const {
  std::ostringstream s;
  s << "fn " << name << "\n";
  for (const auto& b : blocks) {
    s << "bb" << b.id << ":\n";
    for (const auto& i : b.instrs) s << "  " << i.str() << "\n";
    s << "  " << b.term.str() << "\n";
  }
  return s.str();
}

const CfgFunction* LoweredProgram::find(const std::string& name) const {
  for (const auto& f : functions)
    if (f.name == name) return &f;
  return nullptr;
}

namespace {

bool isPlaceExpr(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Var: return !e.fnValue;
    case ExprKind::Deref: return true;
    case ExprKind::Field: return isPlaceExpr(*e.operands[0]);
    default: return false;
  }
}

bool isComparison(Op op) {
  return op == Op::Eq || op == Op::Ne || op == Op::Lt || op == Op::Le || op == Op::Gt || op == Op::Ge;
}

class Lowerer {
 public:
  Lowerer(const Program& p, const Function& f) : program_(p), fn_(f) {}

  CfgFunction run() {
    out_.name = fn_.name;
    out_.returnType = fn_.returnType;
    out_.params = fn_.params;
    cur_ = newBlock();
    stmts(fn_.body);
    if (!closed_[cur_]) {
      Terminator t;
      t.kind = Terminator::Kind::Return;
      close(t);
    }
    return std::move(out_);
  }

 private:
  const Program& program_;
  const Function& fn_;
  CfgFunction out_;
  std::vector<bool> closed_;
  int cur_ = 0;
  int temps_ = 0;
  SourceLoc loc_;

  int newBlock() {
    BasicBlock b;
    b.id = static_cast<int>(out_.blocks.size());
    b.term.kind = Terminator::Kind::Abort;
    out_.blocks.push_back(std::move(b));
    closed_.push_back(false);
    return out_.blocks.back().id;
  }

  // Statements after a return or abort land in a fresh, unreachable block.
  void open() {
    if (closed_[cur_]) cur_ = newBlock();
  }

  void close(Terminator t) {
    open();
    out_.blocks[cur_].term = std::move(t);
    closed_[cur_] = true;
  }

  void gotoBlock(int target) {
    Terminator t;
    t.kind = Terminator::Kind::Goto;
    t.target = target;
    if (!closed_[cur_]) close(t);
  }

  void add(Instr i) {
    open();
    i.loc = loc_;
    out_.blocks[cur_].instrs.push_back(std::move(i));
  }

  IrPlace temp(const TypePtr& type) {
    std::string name = "$t" + std::to_string(++temps_);
    out_.locals.push_back(Param{name, type});
    return IrPlace{name, {}, type};
  }

  void assign(IrPlace dest, Rvalue rv) {
    Instr i;
    i.kind = Instr::Kind::Assign;
    i.dest = std::move(dest);
    i.rvalue = std::move(rv);
    add(std::move(i));
  }

  static Rvalue use(Operand o) {
    Rvalue r;
    r.kind = Rvalue::Kind::Use;
    r.operands.push_back(std::move(o));
    return r;
  }

  IrPlace place(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Var: return IrPlace{e.name, {}, e.type};
      case ExprKind::Field: {
        IrPlace p = place(*e.operands[0]);
        p.projs.push_back(Proj{Proj::Kind::Field, e.name, e.id});
        p.type = e.type;
        return p;
      }
      case ExprKind::Deref: {
        const Expr& inner = *e.operands[0];
        IrPlace p = isPlaceExpr(inner) ? place(inner) : materialize(inner);
        p.projs.push_back(Proj{Proj::Kind::Deref, {}, e.id});
        p.type = e.type;
        return p;
      }
      default: return materialize(e);
    }
  }

  IrPlace materialize(const Expr& e) {
    if (e.kind == ExprKind::Call) {
      IrPlace t = temp(e.type);
      call(e, t);
      return t;
    }
    Rvalue rv = rvalue(e);
    IrPlace t = temp(e.type);
    assign(t, std::move(rv));
    return t;
  }

  // A value operand. Place reads are copied into a temporary at this point so
  // later side effects in the same expression cannot change what was read.
  Operand operand(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Operand::constant(e.value);
      case ExprKind::NullLit: return Operand::null();
      case ExprKind::Var:
        if (e.fnValue) return Operand::function(e.name);
        break;
      default: break;
    }
    return Operand::copy(materialize(e));
  }

  void call(const Expr& e, std::optional<IrPlace> dest) {
    Instr i;
    i.kind = Instr::Kind::Call;
    if (e.indirectCall)
      i.callee = Operand::copy(IrPlace{e.name, {}, Type::Fn()});
    else
      i.callee = Operand::function(e.name);
    for (const auto& a : e.operands) i.args.push_back(operand(*a));
    if (dest && dest->type->kind == Type::Kind::Void) dest.reset();
    i.dest = std::move(dest);
    add(std::move(i));
  }

  Rvalue rvalue(const Expr& e) {
    if (isPlaceExpr(e)) return use(Operand::copy(place(e)));
    switch (e.kind) {
      case ExprKind::IntLit:
      case ExprKind::NullLit:
      case ExprKind::Var: return use(operand(e));
      case ExprKind::AddrOf: {
        Rvalue r;
        r.kind = Rvalue::Kind::AddrOf;
        r.place = place(*e.operands[0]);
        return r;
      }
      case ExprKind::New: {
        Rvalue r;
        r.kind = Rvalue::Kind::New;
        r.type = e.typeArg;
        return r;
      }
      case ExprKind::Unary: {
        Rvalue r;
        r.kind = Rvalue::Kind::Unary;
        r.op = e.op;
        r.operands.push_back(operand(*e.operands[0]));
        return r;
      }
      case ExprKind::Binary: {
        if (e.op == Op::And || e.op == Op::Or) return use(Operand::copy(logical(e)));
        Rvalue r;
        r.kind = Rvalue::Kind::Binary;
        r.op = e.op;
        r.operands.push_back(operand(*e.operands[0]));
        r.operands.push_back(operand(*e.operands[1]));
        return r;
      }
      case ExprKind::Call: return use(Operand::copy(materialize(e)));
      default: throw std::logic_error("cannot lower MiniTag expression");
    }
  }

  IrPlace logical(const Expr& e) {
    IrPlace t = temp(Type::Int());
    int yes = newBlock();
    int no = newBlock();
    int join = newBlock();
    condition(e, yes, no);
    cur_ = yes;
    assign(t, use(Operand::constant(1)));
    gotoBlock(join);
    cur_ = no;
    assign(t, use(Operand::constant(0)));
    gotoBlock(join);
    cur_ = join;
    return t;
  }

  void condition(const Expr& e, int thenB, int elseB) {
    if (e.kind == ExprKind::Binary && (e.op == Op::And || e.op == Op::Or)) {
      int mid = newBlock();
      if (e.op == Op::And)
        condition(*e.operands[0], mid, elseB);
      else
        condition(*e.operands[0], thenB, mid);
      cur_ = mid;
      condition(*e.operands[1], thenB, elseB);
      return;
    }
    if (e.kind == ExprKind::Unary && e.op == Op::Not) {
      condition(*e.operands[0], elseB, thenB);
      return;
    }
    Terminator t;
    t.kind = Terminator::Kind::Branch;
    t.thenTarget = thenB;
    t.elseTarget = elseB;
    if (e.kind == ExprKind::Binary && isComparison(e.op)) {
      Cmp c;
      c.lhs = operand(*e.operands[0]);
      c.op = e.op;
      c.rhs = operand(*e.operands[1]);
      t.cmp = std::move(c);
    } else {
      t.cond = operand(e);
    }
    close(std::move(t));
  }

  void stmts(const std::vector<StmtPtr>& body) {
    for (const auto& s : body) stmt(*s);
  }

  void assignFrom(const Expr& rhs, const Expr& lhs) {
    if (rhs.kind == ExprKind::Call) {
      // Arguments are evaluated before the destination place.
      Instr i;
      i.kind = Instr::Kind::Call;
      if (rhs.indirectCall)
        i.callee = Operand::copy(IrPlace{rhs.name, {}, Type::Fn()});
      else
        i.callee = Operand::function(rhs.name);
      for (const auto& a : rhs.operands) i.args.push_back(operand(*a));
      i.dest = place(lhs);
      add(std::move(i));
      return;
    }
    Rvalue rv = rvalue(rhs);
    IrPlace dest = place(lhs);
    assign(std::move(dest), std::move(rv));
  }

  void stmt(const Stmt& s) {
    loc_ = s.loc;
    switch (s.kind) {
      case StmtKind::Block: stmts(s.body); return;
      case StmtKind::VarDecl: {
        out_.locals.push_back(Param{s.name, s.typeArg});
        if (s.expr) {
          Expr var;
          var.kind = ExprKind::Var;
          var.name = s.name;
          var.type = s.typeArg;
          assignFrom(*s.expr, var);
        } else {
          Rvalue z;
          z.kind = Rvalue::Kind::Zero;
          z.type = s.typeArg;
          assign(IrPlace{s.name, {}, s.typeArg}, z);
        }
        return;
      }
      case StmtKind::Assign: {
        if (s.assignOp.empty()) {
          assignFrom(*s.expr, *s.lhs);
          return;
        }
        Instr i;
        i.kind = Instr::Kind::CompoundAssign;
        i.value = operand(*s.expr);
        i.dest = place(*s.lhs);
        const std::string& o = s.assignOp;
        i.op = o == "+" ? Op::Add : o == "-" ? Op::Sub : o == "*" ? Op::Mul : o == "/" ? Op::Div : Op::Mod;
        add(std::move(i));
        return;
      }
      case StmtKind::ExprStmt:
        if (s.expr->kind == ExprKind::Call)
          call(*s.expr, std::nullopt);
        else
          (void)rvalue(*s.expr);
        return;
      case StmtKind::If: {
        open();
        int thenB = newBlock();
        int elseB = s.hasElse ? newBlock() : -1;
        int join = newBlock();
        condition(*s.expr, thenB, s.hasElse ? elseB : join);
        cur_ = thenB;
        stmts(s.body);
        gotoBlock(join);
        if (s.hasElse) {
          cur_ = elseB;
          stmts(s.elseBody);
          gotoBlock(join);
        }
        cur_ = join;
        return;
      }
      case StmtKind::While: {
        open();
        int header = newBlock();
        gotoBlock(header);
        int body = newBlock();
        int exit = newBlock();
        cur_ = header;
        condition(*s.expr, body, exit);
        cur_ = body;
        stmts(s.body);
        gotoBlock(header);
        cur_ = exit;
        return;
      }
      case StmtKind::Switch: {
        Operand disc = operand(*s.expr);
        Terminator t;
        t.kind = Terminator::Kind::Switch;
        t.discriminee = disc;
        std::vector<int> caseBlocks;
        for (const auto& c : s.cases) {
          int b = newBlock();
          caseBlocks.push_back(b);
          t.cases.emplace_back(c.values, b);
        }
        int defaultB = s.defaultBody ? newBlock() : -1;
        int join = newBlock();
        t.defaultTarget = s.defaultBody ? defaultB : join;
        close(std::move(t));
        for (size_t i = 0; i < s.cases.size(); ++i) {
          cur_ = caseBlocks[i];
          stmts(s.cases[i].body);
          gotoBlock(join);
        }
        if (s.defaultBody) {
          cur_ = defaultB;
          stmts(*s.defaultBody);
          gotoBlock(join);
        }
        cur_ = join;
        return;
      }
      case StmtKind::Return: {
        Terminator t;
        t.kind = Terminator::Kind::Return;
        if (s.expr) t.value = operand(*s.expr);
        close(std::move(t));
        return;
      }
      case StmtKind::Print: {
        Instr i;
        i.kind = Instr::Kind::Print;
        i.value = operand(*s.expr);
        add(std::move(i));
        return;
      }
      case StmtKind::Abort: {
        Terminator t;
        t.kind = Terminator::Kind::Abort;
        close(std::move(t));
        return;
      }
      default: throw std::logic_error("cannot lower MiniTag statement");
    }
  }
};

}  // namespace

CfgFunction lowerFunction(const Program& program, const Function& fn) { return Lowerer(program, fn).run(); }

LoweredProgram lower(const Program& program) {
  if (program.dialect != Dialect::MiniC) throw std::invalid_argument("only MiniC programs can be lowered");
  LoweredProgram out;
  out.program = &program;
  for (const auto& f : program.functions) out.functions.push_back(lowerFunction(program, f));
  return out;
}

}  // namespace untag
