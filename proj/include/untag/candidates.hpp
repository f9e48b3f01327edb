#pragma once

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "untag/ast.hpp"

namespace untag {

/// Structs, unions and functions worth analysing for tag fields.
struct CandidateSet {
  std::vector<std::string> structs;                             // declaration order
  std::vector<std::pair<std::string, std::string>> unions;      // (struct, union field)
  std::map<std::string, std::vector<std::string>> eligibleFields;
  std::set<std::string> functions;

  bool empty() const { return structs.empty(); }
  bool isStruct(const std::string& s) const;
};

/// Integer fields of `def` that are only ever assigned with plain `=` and
/// whose address is never taken, in declaration order.
std::vector<std::string> tagEligibleFields(const TypeDef& def, const Program& program);

CandidateSet collectCandidates(const Program& program);

}  // namespace untag
