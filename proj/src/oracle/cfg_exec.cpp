#include <map>

#include "store.hpp"

namespace untag {

namespace {

using oracle::Access;
using oracle::Halt;
using oracle::Store;
using oracle::Value;

constexpr size_t kMaxDepth = 4000;

class CfgMachine final : public ConcreteState {
 public:
  CfgMachine(const LoweredProgram& lp, const Observer& observer, uint64_t stepLimit)
      : lp_(lp), observer_(observer), stepLimit_(stepLimit), store_(*lp.program, false) {
    for (const auto& g : lp.program->globals) globals_[g.name] = store_.alloc(store_.zero(g.type));
  }

  Outcome run(const std::string& entry, const std::vector<int64_t>& inputs) {
    const CfgFunction* f = lp_.find(entry);
    try {
      if (!f) throw Halt{Termination::Abort, "no function '" + entry + "'"};
      if (f->params.size() != inputs.size()) throw Halt{Termination::Abort, "wrong number of inputs"};
      std::vector<Value> args;
      for (auto v : inputs) args.push_back(Value::Int(v));
      call(*f, std::move(args));
    } catch (const Halt& h) {
      out_.termination = h.termination;
      out_.message = h.message;
      if (!frames_.empty()) out_.site = frames_.back().fn->name;
    }
    return out_;
  }

  std::optional<ConcreteLoc> variable(const std::string& name) const override {
    if (!frames_.empty()) {
      auto it = frames_.back().vars.find(name);
      if (it != frames_.back().vars.end()) return ConcreteLoc{it->second, {}};
    }
    auto g = globals_.find(name);
    if (g != globals_.end()) return ConcreteLoc{g->second, {}};
    return std::nullopt;
  }

  std::optional<Scalar> scalar(const ConcreteLoc& loc) const override {
    const Value* v = store_.peek(loc);
    if (!v) return std::nullopt;
    Scalar s;
    switch (v->kind) {
      case Value::Kind::Int:
        s.isInt = true;
        s.value = v->i;
        return s;
      case Value::Kind::Ptr:
        if (v->ptr.object < 0)
          s.isNull = true;
        else
          s.target = v->ptr;
        return s;
      case Value::Kind::Fn:
        s.function = v->fn;
        s.isNull = v->fn.empty();
        return s;
      default: return std::nullopt;
    }
  }

  std::optional<std::string> unionMarker(const ConcreteLoc& loc) const override {
    const Value* v = store_.peek(loc);
    if (!v || v->kind != Value::Kind::Union || v->marker.empty()) return std::nullopt;
    return v->marker;
  }

 private:
  struct Frame {
    const CfgFunction* fn;
    std::map<std::string, int> vars;
  };

  const LoweredProgram& lp_;
  const Observer& observer_;
  uint64_t stepLimit_;
  Store store_;
  Outcome out_;
  std::map<std::string, int> globals_;
  std::vector<Frame> frames_;
  uint64_t steps_ = 0;

  void tick() {
    if (++steps_ > stepLimit_) throw Halt{Termination::StepLimit, "step limit exceeded"};
  }

  void observe(int block, int index) {
    if (observer_) observer_(*frames_.back().fn, block, index, *this);
  }

  Value& at(const ConcreteLoc& loc, Access mode) {
    std::vector<std::string> re;
    Value& v = store_.at(loc, mode, &re);
    for (const auto& m : re) out_.reinterpretations.push_back(frames_.back().fn->name + "/" + m);
    return v;
  }

  ConcreteLoc locate(const IrPlace& p) {
    auto base = variable(p.base);
    if (!base) throw Halt{Termination::Abort, "unknown variable " + p.base};
    ConcreteLoc loc = *base;
    for (const auto& proj : p.projs) {
      if (proj.kind == Proj::Kind::Field) {
        loc.path.push_back(proj.field);
        continue;
      }
      const Value& ptr = at(loc, Access::Read);
      if (ptr.kind != Value::Kind::Ptr || ptr.ptr.object < 0) throw Halt{Termination::Abort, "null pointer dereference"};
      loc = ptr.ptr;
    }
    return loc;
  }

  Value operand(const Operand& o) {
    switch (o.kind) {
      case Operand::Kind::Const: return Value::Int(o.value);
      case Operand::Kind::Null: return Value::Null();
      case Operand::Kind::Function: {
        Value v;
        v.kind = Value::Kind::Fn;
        v.fn = o.name;
        return v;
      }
      case Operand::Kind::Copy: return at(locate(o.place), Access::Read);
    }
    return Value{};
  }

  Value rvalue(const Rvalue& r) {
    switch (r.kind) {
      case Rvalue::Kind::Use: return operand(r.operands[0]);
      case Rvalue::Kind::AddrOf: return Value::Ptr(locate(r.place));
      case Rvalue::Kind::New: return Value::Ptr(ConcreteLoc{store_.alloc(store_.zero(r.type)), {}});
      case Rvalue::Kind::Zero: return store_.zero(r.type);
      case Rvalue::Kind::Unary: {
        Value v = operand(r.operands[0]);
        if (r.op == Op::Neg) return Value::Int(oracle::wrap(-static_cast<__int128>(v.i)));
        return Value::Int(!v.truthy());
      }
      case Rvalue::Kind::Binary: {
        Value a = operand(r.operands[0]);
        Value b = operand(r.operands[1]);
        return Value::Int(binary(r.op, a, b));
      }
    }
    return Value{};
  }

  static int64_t binary(Op op, const Value& a, const Value& b) {
    if (op == Op::Eq) return a == b;
    if (op == Op::Ne) return !(a == b);
    return oracle::arith(op, a.i, b.i);
  }

  void store(const IrPlace& dest, Value v) {
    ConcreteLoc loc = locate(dest);
    at(loc, Access::Write) = std::move(v);
  }

  Value call(const CfgFunction& f, std::vector<Value> args) {
    if (frames_.size() >= kMaxDepth) throw Halt{Termination::StepLimit, "call depth exceeded"};
    Frame frame{&f, {}};
    for (size_t i = 0; i < f.params.size(); ++i) frame.vars[f.params[i].name] = store_.alloc(std::move(args[i]));
    for (const auto& l : f.locals) frame.vars[l.name] = store_.alloc(store_.zero(l.type));
    frames_.push_back(std::move(frame));
    Value result = exec(f);
    frames_.pop_back();
    return result;
  }

  Value exec(const CfgFunction& f) {
    int b = 0;
    while (true) {
      const BasicBlock& block = f.blocks[b];
      for (size_t i = 0; i < block.instrs.size(); ++i) {
        tick();
        observe(b, static_cast<int>(i));
        instr(block.instrs[i]);
      }
      tick();
      observe(b, static_cast<int>(block.instrs.size()));
      const Terminator& t = block.term;
      switch (t.kind) {
        case Terminator::Kind::Goto: b = t.target; break;
        case Terminator::Kind::Branch: {
          bool taken = t.cmp ? binary(t.cmp->op, operand(t.cmp->lhs), operand(t.cmp->rhs)) != 0
                             : operand(t.cond).truthy();
          b = taken ? t.thenTarget : t.elseTarget;
          break;
        }
        case Terminator::Kind::Switch: {
          int64_t v = operand(t.discriminee).i;
          b = t.defaultTarget;
          for (const auto& [values, target] : t.cases)
            for (auto c : values)
              if (c == v) b = target;
          break;
        }
        case Terminator::Kind::Return: return t.value ? operand(*t.value) : Value{};
        case Terminator::Kind::Abort: throw Halt{Termination::Abort, "abort()"};
      }
    }
  }

  void instr(const Instr& in) {
    switch (in.kind) {
      case Instr::Kind::Assign: {
        Value v = rvalue(in.rvalue);
        store(*in.dest, std::move(v));
        return;
      }
      case Instr::Kind::CompoundAssign: {
        Value rhs = operand(in.value);
        ConcreteLoc loc = locate(*in.dest);
        int64_t old = at(loc, Access::Read).i;
        at(loc, Access::Write) = Value::Int(oracle::arith(in.op, old, rhs.i));
        return;
      }
      case Instr::Kind::Print: out_.output.push_back(operand(in.value).i); return;
      case Instr::Kind::Call: {
        Value callee = operand(in.callee);
        if (callee.fn.empty()) throw Halt{Termination::Abort, "call through null function pointer"};
        const CfgFunction* f = lp_.find(callee.fn);
        if (!f) throw Halt{Termination::Abort, "no function '" + callee.fn + "'"};
        std::vector<Value> args;
        for (const auto& a : in.args) args.push_back(operand(a));
        Value r = call(*f, std::move(args));
        if (in.dest) store(*in.dest, std::move(r));
        return;
      }
    }
  }
};

}  // namespace

Outcome runCfg(const LoweredProgram& program, const std::string& entry, const std::vector<int64_t>& inputs,
               const Observer& observer, uint64_t stepLimit) {
  Outcome out;
  oracle::onLargeStack([&] { out = CfgMachine(program, observer, stepLimit).run(entry, inputs); });
  return out;
}

std::vector<std::vector<int64_t>> enumerateInputs(size_t arity, const std::vector<int64_t>& domain) {
  if (domain.size() > 4) throw std::invalid_argument("input domain larger than 4 values");
  std::vector<std::vector<int64_t>> out{{}};
  for (size_t k = 0; k < arity; ++k) {
    std::vector<std::vector<int64_t>> next;
    for (const auto& prefix : out)
      for (auto v : domain) {
        next.push_back(prefix);
        next.back().push_back(v);
      }
    out = std::move(next);
  }
  return out;
}

}  // namespace untag
