#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "untag/ast.hpp"

namespace untag {

struct Diagnostic {
  enum class Kind { Lexical, Syntax, UnknownType, Duplicate, Type, Dialect };
  Kind kind = Kind::Syntax;
  SourceLoc loc;
  std::string message;

  std::string str() const;
};

class DiagnosticError : public std::runtime_error {
 public:
  explicit DiagnosticError(std::vector<Diagnostic> diags);
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::vector<Diagnostic> diags_;
};

struct ParseResult {
  std::optional<Program> program;
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
};

/// Parses and type-checks `source` in the given dialect.
ParseResult parse(const std::string& source, Dialect dialect = Dialect::MiniC);

/// Parses or throws DiagnosticError.
Program parseOrThrow(const std::string& source, Dialect dialect = Dialect::MiniC);

/// Re-runs name resolution and type checking, annotating expression types.
/// Returns the diagnostics found (empty when well-typed).
std::vector<Diagnostic> typecheck(Program& program);

/// Canonical source text. Throws DiagnosticError on a dialect violation
/// (MiniTag-only constructs emitted as MiniC).
std::string emit(const Program& program, Dialect dialect);

/// Assigns fresh, dense node ids to every expression and statement.
void renumber(Program& program);

}  // namespace untag
