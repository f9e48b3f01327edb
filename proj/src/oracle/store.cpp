#include <pthread.h>

#include <exception>
#include <stdexcept>

#include "store.hpp"

namespace untag::oracle {

namespace {

struct Job {
  const std::function<void()>* f;
  std::exception_ptr error;
};

void* runJob(void* arg) {
  auto* job = static_cast<Job*>(arg);
  try {
    (*job->f)();
  } catch (...) {
    job->error = std::current_exception();
  }
  return nullptr;
}

}  // namespace

void onLargeStack(const std::function<void()>& f) {
  constexpr size_t kStack = size_t{64} << 20;
  Job job{&f, nullptr};
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, kStack);
  pthread_t thread;
  int rc = pthread_create(&thread, &attr, runJob, &job);
  pthread_attr_destroy(&attr);
  if (rc != 0) throw std::runtime_error("cannot start interpreter thread");
  pthread_join(thread, nullptr);
  if (job.error) std::rethrow_exception(job.error);
}

int64_t wrap(__int128 v) { return static_cast<int64_t>(static_cast<uint64_t>(v)); }

int64_t arith(Op op, int64_t a, int64_t b) {
  switch (op) {
    case Op::Add: return wrap(static_cast<__int128>(a) + b);
    case Op::Sub: return wrap(static_cast<__int128>(a) - b);
    case Op::Mul: return wrap(static_cast<__int128>(a) * b);
    case Op::Div:
    case Op::Mod:
      if (b == 0) throw Halt{Termination::Abort, "division by zero"};
      if (a == INT64_MIN && b == -1) return op == Op::Div ? a : 0;
      return op == Op::Div ? a / b : a % b;
    case Op::Lt: return a < b;
    case Op::Le: return a <= b;
    case Op::Gt: return a > b;
    case Op::Ge: return a >= b;
    default: return 0;
  }
}

bool Value::operator==(const Value& o) const {
  if (kind != o.kind) return isNull() && o.isNull();
  switch (kind) {
    case Kind::Int: return i == o.i;
    case Kind::Ptr: return ptr == o.ptr;
    case Kind::Fn: return fn == o.fn;
    case Kind::Record:
    case Kind::Union: return fields == o.fields && marker == o.marker;
    case Kind::Enum: return variant == o.variant && payload == o.payload;
  }
  return false;
}

// Scalars of one kind, or records with the same field names.
static bool sameShape(const Value& a, const Value& b) {
  if (a.kind != b.kind) return false;
  if (a.kind != Value::Kind::Record && a.kind != Value::Kind::Union) return a.kind != Value::Kind::Enum;
  if (a.fields.size() != b.fields.size()) return false;
  for (size_t i = 0; i < a.fields.size(); ++i)
    if (a.fields[i].first != b.fields[i].first || !sameShape(a.fields[i].second, b.fields[i].second)) return false;
  return true;
}

Value Store::zero(const TypePtr& t) const {
  Value v;
  switch (t->kind) {
    case Type::Kind::Pointer:
    case Type::Kind::Null: return Value::Null();
    case Type::Kind::Fn: v.kind = Value::Kind::Fn; return v;
    case Type::Kind::Named: {
      const TypeDef* def = program_.findType(t->name);
      if (!def) return v;
      switch (def->kind) {
        case TypeDefKind::Struct:
        case TypeDefKind::Union:
          v.kind = def->kind == TypeDefKind::Struct ? Value::Kind::Record : Value::Kind::Union;
          for (const auto& f : def->fields) v.fields.emplace_back(f.name, zero(f.type));
          return v;
        case TypeDefKind::Enum:
          v.kind = Value::Kind::Enum;
          if (!def->variants.empty()) {
            v.variant = def->variants[0].name;
            if (def->variants[0].payload) v.payload.push_back(zero(def->variants[0].payload));
          }
          return v;
        case TypeDefKind::ConstGroup: return v;
      }
      return v;
    }
    default: return v;
  }
}

Value& Store::at(const ConcreteLoc& loc, Access mode, std::vector<std::string>* reinterpreted) {
  if (loc.object < 0 || static_cast<size_t>(loc.object) >= objects_.size())
    throw Halt{Termination::Abort, "null pointer dereference"};
  Value* v = &objects_[loc.object];
  for (const auto& step : loc.path) {
    if (step == kPayload) {
      if (v->kind != Value::Kind::Enum || v->payload.empty())
        throw Halt{Termination::Abort, "reference to a payload that no longer exists"};
      v = &v->payload[0];
      continue;
    }
    if (v->kind == Value::Kind::Union && mode != Access::Raw) {
      if (mode == Access::Write) {
        v->marker = step;
      } else if (!v->marker.empty() && v->marker != step) {
        if (reinterpreted) reinterpreted->push_back(step);
        if (strict_) throw Reinterpret{step};
        // Members with the same representation share storage, as in C.
        Value* last = v->field(v->marker);
        Value* asked = v->field(step);
        if (last && asked && sameShape(*last, *asked)) {
          v = last;
          continue;
        }
      }
    }
    Value* next = v->field(step);
    if (!next) throw Halt{Termination::Abort, "bad field path"};
    v = next;
  }
  return *v;
}

const Value* Store::peek(const ConcreteLoc& loc) const {
  if (loc.object < 0 || static_cast<size_t>(loc.object) >= objects_.size()) return nullptr;
  const Value* v = &objects_[loc.object];
  for (const auto& step : loc.path) {
    if (step == kPayload) {
      if (v->kind != Value::Kind::Enum || v->payload.empty()) return nullptr;
      v = &v->payload[0];
      continue;
    }
    auto member = [&](const std::string& name) -> const Value* {
      for (const auto& [n, f] : v->fields)
        if (n == name) return &f;
      return nullptr;
    };
    const Value* next = member(step);
    if (!next) return nullptr;
    if (v->kind == Value::Kind::Union && !v->marker.empty() && v->marker != step) {
      const Value* last = member(v->marker);
      if (last && sameShape(*last, *next)) next = last;
    }
    v = next;
  }
  return v;
}

}  // namespace untag::oracle
