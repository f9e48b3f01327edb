#include <map>

#include "store.hpp"

namespace untag {

const char* terminationName(Termination t) {
  switch (t) {
    case Termination::Normal: return "normal";
    case Termination::Abort: return "abort";
    case Termination::ReinterpretationFault: return "reinterpretation-fault";
    case Termination::StepLimit: return "step-limit";
  }
  return "?";
}

std::optional<Termination> parseTermination(const std::string& s) {
  for (auto t : {Termination::Normal, Termination::Abort, Termination::ReinterpretationFault, Termination::StepLimit})
    if (s == terminationName(t)) return t;
  return std::nullopt;
}

namespace oracle {

namespace {

constexpr size_t kMaxDepth = 4000;

class Interpreter {
 public:
  Interpreter(const Program& program, RunOptions options)
      : program_(program), options_(options), store_(program, options.strict) {
    for (const auto& g : program.globals) globals_[g.name] = store_.alloc(store_.zero(g.type));
  }

  Outcome run(const std::string& entry, const std::vector<int64_t>& inputs) {
    const Function* f = program_.findFunction(entry);
    if (!f) {
      out_.termination = Termination::Abort;
      out_.message = "no function '" + entry + "'";
      return out_;
    }
    if (f->params.size() != inputs.size()) {
      out_.termination = Termination::Abort;
      out_.message = "entry expects " + std::to_string(f->params.size()) + " arguments";
      return out_;
    }
    std::vector<Value> args;
    for (auto v : inputs) args.push_back(Value::Int(v));
    try {
      call(*f, std::move(args), std::nullopt);
    } catch (const Halt& h) {
      out_.termination = h.termination;
      out_.message = h.message;
      out_.site = site();
    } catch (const Reinterpret& r) {
      out_.termination = Termination::ReinterpretationFault;
      out_.message = "read of union member '" + r.member + "' after another member was written";
      out_.site = site();
    }
    return out_;
  }

 private:
  struct Frame {
    const Function* fn;
    std::vector<std::map<std::string, int>> scopes;
  };
  enum class Flow { Next, Return };

  const Program& program_;
  RunOptions options_;
  Store store_;
  Outcome out_;
  std::map<std::string, int> globals_;
  std::vector<Frame> frames_;
  uint64_t steps_ = 0;
  Value ret_;

  std::string caller() const {
    for (auto it = frames_.rbegin(); it != frames_.rend(); ++it)
      if (it->fn->owner.empty()) return it->fn->name;
    return "";
  }

  std::string site() const {
    if (frames_.empty()) return "";
    const Function* f = frames_.back().fn;
    return f->owner.empty() ? f->name : caller() + "/" + f->name;
  }

  void tick() {
    if (++steps_ > options_.stepLimit) throw Halt{Termination::StepLimit, "step limit exceeded"};
  }

  Value& at(const ConcreteLoc& loc, Access mode) {
    std::vector<std::string> re;
    try {
      Value& v = store_.at(loc, mode, &re);
      for (const auto& m : re) out_.reinterpretations.push_back(caller() + "/" + m);
      return v;
    } catch (const Reinterpret& r) {
      out_.reinterpretations.push_back(caller() + "/" + r.member);
      throw;
    }
  }

  int declare(const std::string& name, Value v) {
    int obj = store_.alloc(std::move(v));
    frames_.back().scopes.back()[name] = obj;
    return obj;
  }

  std::optional<int> lookup(const std::string& name) const {
    if (!frames_.empty()) {
      const auto& scopes = frames_.back().scopes;
      for (auto it = scopes.rbegin(); it != scopes.rend(); ++it) {
        auto f = it->find(name);
        if (f != it->end()) return f->second;
      }
    }
    auto g = globals_.find(name);
    if (g != globals_.end()) return g->second;
    return std::nullopt;
  }

  Value call(const Function& f, std::vector<Value> args, std::optional<ConcreteLoc> self) {
    if (frames_.size() >= kMaxDepth) throw Halt{Termination::StepLimit, "call depth exceeded"};
    frames_.push_back(Frame{&f, {{}}});
    if (self) declare("self", Value::Ptr(*self));
    for (size_t i = 0; i < f.params.size(); ++i) declare(f.params[i].name, std::move(args[i]));
    ret_ = Value();
    Value result = block(f.body) == Flow::Return ? ret_ : store_.zero(f.returnType);
    frames_.pop_back();
    return result;
  }

  Flow block(const std::vector<StmtPtr>& body) {
    frames_.back().scopes.emplace_back();
    Flow flow = Flow::Next;
    for (const auto& s : body) {
      flow = exec(*s);
      if (flow == Flow::Return) break;
    }
    frames_.back().scopes.pop_back();
    return flow;
  }

  // Binds `ref` patterns for the arm matching the enum at `loc`; false when
  // no pattern matches.
  bool matches(const std::vector<Pattern>& patterns, const ConcreteLoc& loc) {
    const Value& v = at(loc, Access::Read);
    for (const auto& p : patterns) {
      if (p.variant != v.variant) continue;
      if (p.binding == Pattern::Binding::Ref) {
        ConcreteLoc payload = loc;
        payload.path.push_back(kPayload);
        declare(p.bindName, Value::Ptr(payload));
      }
      return true;
    }
    return false;
  }

  ConcreteLoc scrutinee(const Expr& e) {
    if (isPlace(e)) return place(e);
    return ConcreteLoc{store_.alloc(eval(e)), {}};
  }

  Flow exec(const Stmt& s) {
    tick();
    switch (s.kind) {
      case StmtKind::Block: return block(s.body);
      case StmtKind::VarDecl: {
        Value v = s.expr ? eval(*s.expr) : store_.zero(s.typeArg);
        declare(s.name, std::move(v));
        return Flow::Next;
      }
      case StmtKind::Assign: {
        Value rhs = eval(*s.expr);
        ConcreteLoc loc = place(*s.lhs);
        if (s.assignOp.empty()) {
          at(loc, Access::Write) = std::move(rhs);
        } else {
          int64_t cur = at(loc, Access::Read).i;
          Op op = s.assignOp == "+"   ? Op::Add
                  : s.assignOp == "-" ? Op::Sub
                  : s.assignOp == "*" ? Op::Mul
                  : s.assignOp == "/" ? Op::Div
                                      : Op::Mod;
          int64_t v = arith(op, cur, rhs.i);
          at(loc, Access::Write) = Value::Int(v);
        }
        return Flow::Next;
      }
      case StmtKind::ExprStmt: eval(*s.expr); return Flow::Next;
      case StmtKind::If: {
        if (eval(*s.expr).truthy()) return block(s.body);
        if (s.hasElse) return block(s.elseBody);
        return Flow::Next;
      }
      case StmtKind::IfLet: {
        ConcreteLoc loc = scrutinee(*s.expr);
        frames_.back().scopes.emplace_back();
        Flow flow = Flow::Next;
        if (matches(s.patterns, loc))
          flow = block(s.body);
        else if (s.hasElse)
          flow = block(s.elseBody);
        frames_.back().scopes.pop_back();
        return flow;
      }
      case StmtKind::While:
        while (eval(*s.expr).truthy()) {
          tick();
          if (block(s.body) == Flow::Return) return Flow::Return;
        }
        return Flow::Next;
      case StmtKind::Switch: {
        int64_t v = eval(*s.expr).i;
        for (const auto& c : s.cases)
          for (auto cv : c.values)
            if (cv == v) return block(c.body);
        if (s.defaultBody) return block(*s.defaultBody);
        return Flow::Next;
      }
      case StmtKind::Match: {
        ConcreteLoc loc = scrutinee(*s.expr);
        for (const auto& arm : s.arms) {
          frames_.back().scopes.emplace_back();
          bool hit = arm.patterns.empty() || matches(arm.patterns, loc);
          Flow flow = hit ? block(arm.body) : Flow::Next;
          frames_.back().scopes.pop_back();
          if (hit) return flow;
        }
        return Flow::Next;
      }
      case StmtKind::Return:
        ret_ = s.expr ? eval(*s.expr) : Value();
        return Flow::Return;
      case StmtKind::Print: out_.output.push_back(eval(*s.expr).i); return Flow::Next;
      case StmtKind::Abort: throw Halt{Termination::Abort, "abort() called"};
    }
    return Flow::Next;
  }

  bool isPlace(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Var: return !e.fnValue;
      case ExprKind::Deref: return true;
      case ExprKind::Field: return isPlace(*e.operands[0]);
      default: return false;
    }
  }

  ConcreteLoc place(const Expr& e) {
    switch (e.kind) {
      case ExprKind::Var: {
        auto obj = lookup(e.name);
        if (!obj) throw Halt{Termination::Abort, "unknown variable '" + e.name + "'"};
        return ConcreteLoc{*obj, {}};
      }
      case ExprKind::Deref: {
        Value p = eval(*e.operands[0]);
        if (p.kind != Value::Kind::Ptr || p.ptr.object < 0) throw Halt{Termination::Abort, "null pointer dereference"};
        return p.ptr;
      }
      case ExprKind::Field: {
        ConcreteLoc l = place(*e.operands[0]);
        l.path.push_back(e.name);
        return l;
      }
      default: throw Halt{Termination::Abort, "expression is not a place"};
    }
  }

  Value eval(const Expr& e) {
    switch (e.kind) {
      case ExprKind::IntLit: return Value::Int(e.value);
      case ExprKind::NullLit: return Value::Null();
      case ExprKind::Var:
        if (e.fnValue) {
          Value v;
          v.kind = Value::Kind::Fn;
          v.fn = e.name;
          return v;
        }
        return at(place(e), Access::Read);
      case ExprKind::New: return Value::Ptr(ConcreteLoc{store_.alloc(store_.zero(e.typeArg)), {}});
      case ExprKind::AddrOf: return Value::Ptr(place(*e.operands[0]));
      case ExprKind::Deref: return at(place(e), Access::Read);
      case ExprKind::Field: {
        if (isPlace(e)) return at(place(e), Access::Read);
        Value base = eval(*e.operands[0]);
        Value* f = base.field(e.name);
        if (!f) throw Halt{Termination::Abort, "bad field"};
        return *f;
      }
      case ExprKind::Call: {
        std::string name = e.name;
        if (e.indirectCall) {
          auto obj = lookup(e.name);
          if (!obj) throw Halt{Termination::Abort, "unknown variable '" + e.name + "'"};
          Value fv = at(ConcreteLoc{*obj, {}}, Access::Read);
          if (fv.fn.empty()) throw Halt{Termination::Abort, "call through a null function value"};
          name = fv.fn;
        }
        std::vector<Value> args;
        for (const auto& a : e.operands) args.push_back(eval(*a));
        const Function* f = program_.findFunction(name);
        if (!f) throw Halt{Termination::Abort, "no function '" + name + "'"};
        return call(*f, std::move(args), std::nullopt);
      }
      case ExprKind::MethodCall: {
        const Expr& recv = *e.operands[0];
        ConcreteLoc self = scrutinee(recv);
        std::vector<Value> args;
        for (size_t i = 1; i < e.operands.size(); ++i) args.push_back(eval(*e.operands[i]));
        const Function* m = program_.findMethod(recv.type->name, e.name);
        if (!m) throw Halt{Termination::Abort, "no method '" + e.name + "'"};
        return call(*m, std::move(args), self);
      }
      case ExprKind::VariantCtor: {
        Value v;
        v.kind = Value::Kind::Enum;
        v.variant = e.variant;
        if (!e.operands.empty()) v.payload.push_back(eval(*e.operands[0]));
        return v;
      }
      case ExprKind::Unary: {
        Value v = eval(*e.operands[0]);
        if (e.op == Op::Neg) return Value::Int(wrap(-static_cast<__int128>(v.i)));
        return Value::Int(!v.truthy());
      }
      case ExprKind::Binary: {
        if (e.op == Op::And || e.op == Op::Or) {
          bool l = eval(*e.operands[0]).truthy();
          if (e.op == Op::And && !l) return Value::Int(0);
          if (e.op == Op::Or && l) return Value::Int(1);
          return Value::Int(eval(*e.operands[1]).truthy());
        }
        Value a = eval(*e.operands[0]);
        Value b = eval(*e.operands[1]);
        if (e.op == Op::Eq) return Value::Int(a == b);
        if (e.op == Op::Ne) return Value::Int(!(a == b));
        return Value::Int(arith(e.op, a.i, b.i));
      }
    }
    return Value();
  }
};

}  // namespace

}  // namespace oracle

Outcome run(const Program& program, const std::string& entry, const std::vector<int64_t>& inputs,
            RunOptions options) {
  Outcome out;
  oracle::onLargeStack([&] { out = oracle::Interpreter(program, options).run(entry, inputs); });
  return out;
}

}  // namespace untag
