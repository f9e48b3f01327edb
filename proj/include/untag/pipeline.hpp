#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "untag/candidates.hpp"
#include "untag/cfg.hpp"
#include "untag/heuristic.hpp"
#include "untag/may_pta.hpp"
#include "untag/must_pta.hpp"

namespace untag {

/// Everything computed for one MiniC program. Analyses point into `lowered`,
/// so the object is neither copied nor moved.
struct Analysis {
  const Program* program = nullptr;
  CandidateSet candidates;
  LoweredProgram lowered;
  MayPointsTo may;
  std::vector<FunctionAnalysis> functions;  // candidate functions only
  TagReport report;
  std::map<std::string, double> seconds;  // per phase

  Analysis() = default;
  Analysis(const Analysis&) = delete;
  Analysis& operator=(const Analysis&) = delete;

  const FunctionAnalysis* function(const std::string& name) const;
  TagHeuristic heuristic() const { return TagHeuristic(*program, functions); }

  /// The analysis report (see docs/report-schema.md).
  nlohmann::json toJson(bool includeMay = false) const;
};

/// Runs candidate selection, both points-to analyses and the tag heuristic.
/// `program` must outlive the result.
std::unique_ptr<Analysis> analyze(const Program& program, MustOptions options = {});

}  // namespace untag
