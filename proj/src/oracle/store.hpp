#pragma once

#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "untag/oracle.hpp"

namespace untag::oracle {

/// Step name for an enum payload inside a location path.
inline const std::string kPayload = "#payload";

struct Value {
  enum class Kind { Int, Ptr, Fn, Record, Union, Enum };
  Kind kind = Kind::Int;
  int64_t i = 0;
  ConcreteLoc ptr;                                     // Ptr; object -1 is null
  std::string fn;                                      // Fn; empty is null
  std::vector<std::pair<std::string, Value>> fields;  // Record, Union
  std::string marker;                                  // Union: last-written member
  std::string variant;                                 // Enum
  std::vector<Value> payload;                          // Enum: zero or one value

  static Value Int(int64_t v) {
    Value x;
    x.i = v;
    return x;
  }
  static Value Ptr(ConcreteLoc l) {
    Value x;
    x.kind = Kind::Ptr;
    x.ptr = std::move(l);
    return x;
  }
  static Value Null() { return Ptr(ConcreteLoc{}); }

  Value* field(const std::string& name) {
    for (auto& [n, v] : fields)
      if (n == name) return &v;
    return nullptr;
  }
  bool isNull() const { return (kind == Kind::Ptr && ptr.object < 0) || (kind == Kind::Fn && fn.empty()); }
  bool truthy() const { return kind == Kind::Int ? i != 0 : !isNull(); }
  bool operator==(const Value& o) const;
};

/// Ends a run early.
struct Halt {
  Termination termination;
  std::string message;
};

/// Thrown by a reinterpreting read in strict mode.
struct Reinterpret {
  std::string member;
};

/// Two's-complement integer arithmetic and ordering; division by zero halts.
int64_t wrap(__int128 v);
int64_t arith(Op op, int64_t a, int64_t b);

/// Runs `f` on a thread whose stack fits the interpreters' deepest call
/// chains, rethrowing anything it throws.
void onLargeStack(const std::function<void()>& f);

enum class Access { Read, Write, Raw };

/// Objects of one run. Locations are typed paths into object values.
class Store {
 public:
  Store(const Program& program, bool strict) : program_(program), strict_(strict) {}

  Value zero(const TypePtr& t) const;
  int alloc(Value v) {
    objects_.push_back(std::move(v));
    return static_cast<int>(objects_.size()) - 1;
  }
  size_t objectCount() const { return objects_.size(); }

  /// The value slot at `loc`. Passing a union member records it as written
  /// (Write) or checks it against the last write (Read). Raw does neither.
  /// Reinterpreting reads are appended to `reinterpreted` (member names).
  /// When not strict they see the last-written member if it has the same
  /// shape, and the member's own stale slot otherwise.
  Value& at(const ConcreteLoc& loc, Access mode, std::vector<std::string>* reinterpreted = nullptr);
  /// What a non-strict read of `loc` sees, without recording anything; null
  /// when the path does not resolve.
  const Value* peek(const ConcreteLoc& loc) const;

 private:
  const Program& program_;
  bool strict_;
  std::vector<Value> objects_;
};

}  // namespace untag::oracle
