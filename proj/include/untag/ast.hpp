#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace untag {

enum class Dialect { MiniC, MiniTag };

struct SourceLoc {
  int line = 0;
  int column = 0;
};

struct Type;
using TypePtr = std::shared_ptr<const Type>;

/// A MiniC/MiniTag type. All integers share one width.
struct Type {
  enum class Kind { Int, Void, Null, Fn, Named, Pointer };

  Kind kind = Kind::Int;
  std::string name;  // Named only
  TypePtr pointee;   // Pointer only

  static TypePtr Int();
  static TypePtr Void();
  static TypePtr NullT();
  static TypePtr Fn();
  static TypePtr Named(std::string name);
  static TypePtr PointerTo(TypePtr pointee);

  bool isInt() const { return kind == Kind::Int; }
  bool isPointer() const { return kind == Kind::Pointer; }
  bool isNamed() const { return kind == Kind::Named; }
  bool isScalar() const { return kind != Kind::Named && kind != Kind::Void; }

  std::string str() const;
};

bool sameType(const TypePtr& a, const TypePtr& b);

enum class TypeDefKind { Struct, Union, Enum, ConstGroup };

struct FieldDecl {
  std::string name;
  TypePtr type;
  SourceLoc loc;
};

struct VariantDecl {
  std::string name;
  TypePtr payload;  // null for payload-less variants
};

struct TypeDef {
  std::string name;
  TypeDefKind kind = TypeDefKind::Struct;
  std::vector<FieldDecl> fields;
  std::vector<VariantDecl> variants;                          // Enum
  std::vector<std::pair<std::string, int64_t>> constants;     // ConstGroup
  bool anonymous = false;  // union declared inline in a struct field
  SourceLoc loc;

  const FieldDecl* field(const std::string& f) const;
  int fieldIndex(const std::string& f) const;
  int variantIndex(const std::string& v) const;
};

// ---------------------------------------------------------------------------
// Expressions

enum class ExprKind {
  IntLit,      // value (name = constant name when written symbolically)
  NullLit,
  Var,         // name
  New,         // typeArg
  AddrOf,      // operands[0]
  Deref,       // operands[0]
  Field,       // operands[0].name ; arrow => operands[0] is a Deref
  Call,        // name(operands...)
  MethodCall,  // operands[0] receiver, name, operands[1..] args; arrow like Field
  Unary,       // op, operands[0]
  Binary,      // op, operands[0], operands[1]
  VariantCtor  // enumName::variant(operands[0]?)
};

enum class Op { Neg, Not, Add, Sub, Mul, Div, Mod, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

const char* opSpelling(Op op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
  ExprKind kind = ExprKind::IntLit;
  int id = 0;
  SourceLoc loc;

  int64_t value = 0;
  std::string name;
  std::string enumName;
  std::string variant;
  TypePtr typeArg;
  Op op = Op::Add;
  bool arrow = false;
  std::vector<ExprPtr> operands;

  // Filled by the type checker.
  TypePtr type;
  bool indirectCall = false;  // Call through a local/global of type fn
  bool fnValue = false;       // Var naming a function

  ExprPtr clone() const;
};

// ---------------------------------------------------------------------------
// Statements

enum class StmtKind {
  Block,
  VarDecl,   // typeArg name [= expr]
  Assign,    // lhs op rhs (assignOp empty for '=')
  ExprStmt,
  If,        // cond, body[0] then, body[1] else (optional)
  IfLet,     // patterns = scrutinee, then/else
  While,
  Switch,
  Match,
  Return,
  Print,
  Abort
};

/// A single alternative of a MiniTag pattern: `Enum::variant`,
/// `Enum::variant(_)` or `Enum::variant(ref x)`.
struct Pattern {
  std::string enumName;
  std::string variant;
  enum class Binding { None, Wildcard, Ref } binding = Binding::None;
  std::string bindName;
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct SwitchCase {
  std::vector<int64_t> values;
  std::vector<std::string> valueNames;  // symbolic spelling per value, may be empty
  std::vector<StmtPtr> body;
  SourceLoc loc;
};

struct MatchArm {
  std::vector<Pattern> patterns;  // empty => `_`
  std::vector<StmtPtr> body;
};

struct Stmt {
  StmtKind kind = StmtKind::Block;
  int id = 0;
  SourceLoc loc;

  TypePtr typeArg;
  std::string name;
  std::string assignOp;  // "" for '=', else "+", "-", ...
  ExprPtr lhs;
  ExprPtr expr;  // rhs / init / condition / scrutinee / value

  std::vector<StmtPtr> body;      // Block, While body, If then
  std::vector<StmtPtr> elseBody;  // If/IfLet else
  bool hasElse = false;
  std::vector<Pattern> patterns;  // IfLet
  std::vector<SwitchCase> cases;  // Switch
  std::optional<std::vector<StmtPtr>> defaultBody;
  std::vector<MatchArm> arms;     // Match

  StmtPtr clone() const;
};

struct Param {
  std::string name;
  TypePtr type;
};

struct Function {
  std::string name;
  std::string owner;  // impl target for MiniTag methods, empty for free functions
  TypePtr returnType;
  std::vector<Param> params;
  std::vector<StmtPtr> body;
  SourceLoc loc;

  Function clone() const;
};

struct GlobalVar {
  std::string name;
  TypePtr type;
  SourceLoc loc;
};

struct Program {
  Dialect dialect = Dialect::MiniC;
  std::vector<TypeDef> types;
  std::vector<GlobalVar> globals;
  std::vector<Function> functions;

  const TypeDef* findType(const std::string& name) const;
  TypeDef* findType(const std::string& name);
  const Function* findFunction(const std::string& name) const;
  const Function* findMethod(const std::string& owner, const std::string& name) const;
  const GlobalVar* findGlobal(const std::string& name) const;
  std::optional<int64_t> findConstant(const std::string& name) const;

  Program clone() const;
};

/// Type of `type.path[0].path[1]...`; null when the path does not resolve.
TypePtr fieldPathType(const Program& program, TypePtr type, const std::vector<std::string>& path);

/// Zero-initialised value description helper: true when `type` is a named
/// union/struct/enum.
bool isAggregate(const Program& program, const TypePtr& type);

/// Every scalar subpath of `type` (a struct expands to its fields,
/// recursively). A union is not expanded: its whole storage is one slot.
std::vector<std::vector<std::string>> scalarSlots(const Program& program, const TypePtr& type);

/// Truncates `path` after the first step that lands in a union's storage, so
/// overlapping union members share one canonical path.
std::vector<std::string> canonicalPath(const Program& program, TypePtr type,
                                       const std::vector<std::string>& path);

std::string joinPath(const std::vector<std::string>& path);

/// Pre-order walk over every statement, including nested bodies.
void visitStmts(const std::vector<StmtPtr>& body, const std::function<void(const Stmt&)>& fn);

/// Pre-order walk over every expression appearing in `body`.
void visitExprs(const std::vector<StmtPtr>& body, const std::function<void(const Expr&)>& fn);
void visitExpr(const Expr& e, const std::function<void(const Expr&)>& fn);

}  // namespace untag
