#pragma once

#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "untag/ast.hpp"
#include "untag/heuristic.hpp"

namespace untag {

struct Analysis;

enum class Strategy {
  IdiomaticMatch,
  IdiomaticIfLet,
  IdiomaticOrPattern,
  ConsolidateConstruction,
  NaiveReadTag,
  NaiveGet,
  NaiveSetTag,
  NaiveDerefMut
};

const char* strategyName(Strategy s);
bool isIdiomatic(Strategy s);

struct Variant {
  int64_t tag = 0;
  std::string name;
  std::string field;  // empty for payload-less variants
  TypePtr payload;
};

/// How one tagged union becomes an enum.
struct VariantScheme {
  std::string structName;
  std::string unionField;
  std::string enumName;
  std::string tagField;
  std::vector<Variant> variants;  // ascending tag order

  const Variant* byTag(int64_t tag) const;
  std::vector<const Variant*> ofField(const std::string& field) const;
};

VariantScheme makeScheme(const Program& program, const UnionReport& report);

/// One rewritten source site.
struct SiteRecord {
  std::string function;
  SourceLoc loc;
  Strategy strategy = Strategy::NaiveReadTag;
  std::string structName;
};

struct TransformOptions {
  bool naiveOnly = false;
};

struct TransformResult {
  Program program;  // MiniTag, re-parsed and type-checked
  std::string text;
  std::vector<VariantScheme> schemes;
  std::vector<SiteRecord> sites;
  std::map<std::string, int> helperCalls;  // helper method -> call sites outside the helpers

  int totalHelperCalls() const;
  nlohmann::json logJson() const;
};

/// MiniTag source of the helper methods for one scheme.
std::string helperSource(const Program& program, const VariantScheme& scheme);

/// Rewrites every union with an identified tag field into an enum. Programs
/// without one are emitted unchanged.
TransformResult transform(const Program& program, const Analysis& analysis, TransformOptions options = {});

}  // namespace untag
