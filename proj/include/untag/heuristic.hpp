#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "untag/candidates.hpp"
#include "untag/must_pta.hpp"

namespace untag {

using TagSet = std::set<int64_t>;

/// Tag values associated with the fields of one union.
struct TagAssociation {
  std::map<std::string, TagSet> fieldTags;  // union field -> tags
  TagSet accessTags;
  TagSet structTags;
  TagSet allTags;
  TagSet remTags;

  /// Every tag that maps to some union field.
  TagSet fieldTagUnion() const;
};

struct FieldOutcome {
  std::string field;
  bool identified = false;
  std::string reason;  // rejection reason
  std::optional<TagAssociation> association;
};

struct UnionReport {
  std::string structName;
  std::string unionField;
  std::string unionType;
  std::optional<std::string> tagField;
  TagAssociation association;  // of the chosen field
  std::vector<FieldOutcome> outcomes;
};

struct TagReport {
  std::vector<UnionReport> unions;

  const UnionReport* find(const std::string& structName, const std::string& unionField) const;
  /// Unions with a chosen tag field.
  std::vector<const UnionReport*> tagged() const;
  nlohmann::json toJson() const;
};

/// Must-analysis label observed at one source-level union access.
struct AccessObservation {
  std::string function;
  int exprId = 0;           // the Field expression naming the union member
  std::string member;       // union member accessed
  std::optional<IntLabel> tag;
};

/// Reads tag associations out of per-function must-analysis results.
class TagHeuristic {
 public:
  TagHeuristic(const Program& program, const std::vector<FunctionAnalysis>& analyses);

  struct AccessResult {
    std::map<std::string, TagSet> fieldTags;
    TagSet accessTags;
  };

  /// Associations at union accesses guarded by a branch on `tagField`;
  /// nullopt when one value would map to two members. `conflict` names it.
  std::optional<AccessResult> collectFromAccesses(const std::string& s, const std::string& unionField,
                                                  const std::string& tagField,
                                                  std::string* conflict = nullptr) const;
  /// Tag values seen at block ends, keyed by the last-written member.
  std::map<std::string, TagSet> collectFromStructs(const std::string& s, const std::string& unionField,
                                                   const std::string& tagField) const;
  /// Every labeled value of `tagField` anywhere.
  TagSet collectAllTags(const std::string& s, const std::string& unionField, const std::string& tagField) const;

  std::optional<TagAssociation> identify(const std::string& s, const std::string& unionField,
                                         const std::string& tagField, std::string* reason = nullptr) const;

  UnionReport select(const std::string& s, const std::string& unionField,
                     const std::vector<std::string>& eligible) const;

  /// Each access to a member of `unionField` inside a value of struct `s`,
  /// with the label of `tagField` on that same value just before the access.
  std::vector<AccessObservation> accesses(const std::string& s, const std::string& unionField,
                                          const std::string& tagField) const;

 private:
  const Program& program_;
  const std::vector<FunctionAnalysis>& analyses_;

  // (node, path) of every embedded value of struct `s` reachable in `g`.
  std::vector<std::pair<int, FieldPath>> structValues(const PointsToGraph& g, const std::string& s) const;
  std::optional<IntLabel> tagLabel(const PointsToGraph& g, int node, const FieldPath& path,
                                   const std::string& tagField) const;
};

TagReport identifyTagFields(const Program& program, const CandidateSet& candidates,
                            const std::vector<FunctionAnalysis>& analyses);

}  // namespace untag
