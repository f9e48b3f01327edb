#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "untag/ast.hpp"

namespace untag {

/// One projection step of an IR place. `exprId` is the AST expression that
/// produced the step, so analyses can report facts per source access.
struct Proj {
  enum class Kind { Deref, Field };
  Kind kind = Kind::Field;
  std::string field;
  int exprId = 0;

  bool operator==(const Proj& o) const { return kind == o.kind && field == o.field; }
};

/// A memory location: a variable (local, parameter, temporary or global)
/// followed by dereference and field projections.
struct IrPlace {
  std::string base;
  std::vector<Proj> projs;
  TypePtr type;  // type of the whole place

  std::string str() const;
  bool operator==(const IrPlace& o) const { return base == o.base && projs == o.projs; }
};

struct Operand {
  enum class Kind { Const, Null, Copy, Function };
  Kind kind = Kind::Const;
  int64_t value = 0;
  IrPlace place;     // Copy
  std::string name;  // Function

  static Operand constant(int64_t v);
  static Operand null();
  static Operand copy(IrPlace p);
  static Operand function(std::string n);
  std::string str() const;
};

struct Rvalue {
  enum class Kind { Use, AddrOf, New, Unary, Binary, Zero };
  Kind kind = Kind::Use;
  Op op = Op::Add;
  std::vector<Operand> operands;
  IrPlace place;  // AddrOf
  TypePtr type;   // New / Zero

  std::string str() const;
};

struct Instr {
  enum class Kind { Assign, CompoundAssign, Call, Print };
  Kind kind = Kind::Assign;
  std::optional<IrPlace> dest;  // Call dest is optional
  Rvalue rvalue;                // Assign
  Op op = Op::Add;              // CompoundAssign
  Operand value;                // CompoundAssign rhs / Print value
  Operand callee;               // Function(name) or Copy(fn-typed place)
  std::vector<Operand> args;
  SourceLoc loc;

  std::string str() const;
  /// Every place the instruction reads or writes (dest first).
  std::vector<const IrPlace*> places() const;
};

struct Cmp {
  Operand lhs;
  Op op = Op::Eq;
  Operand rhs;
};

struct Terminator {
  enum class Kind { Goto, Branch, Switch, Return, Abort };
  Kind kind = Kind::Return;
  int target = -1;           // Goto
  Operand cond;              // Branch without cmp: taken when nonzero
  std::optional<Cmp> cmp;    // Branch comparing two operands
  int thenTarget = -1;
  int elseTarget = -1;
  Operand discriminee;       // Switch
  std::vector<std::pair<std::vector<int64_t>, int>> cases;
  int defaultTarget = -1;
  std::optional<Operand> value;  // Return

  std::vector<int> successors() const;
  std::string str() const;
};

struct BasicBlock {
  int id = 0;
  std::vector<Instr> instrs;
  Terminator term;
};

struct CfgFunction {
  std::string name;
  TypePtr returnType;
  std::vector<Param> params;
  std::vector<Param> locals;  // declared locals and temporaries, params excluded
  std::vector<BasicBlock> blocks;  // blocks[0] is the entry

  std::map<std::string, TypePtr> variableTypes() const;
  std::vector<std::vector<int>> predecessors() const;
  bool hasLoop() const;
  std::string str() const;
};

struct LoweredProgram {
  const Program* program = nullptr;
  std::vector<CfgFunction> functions;

  const CfgFunction* find(const std::string& name) const;
};

/// Lowers every free function of a type-checked MiniC program.
LoweredProgram lower(const Program& program);

CfgFunction lowerFunction(const Program& program, const Function& fn);

}  // namespace untag
