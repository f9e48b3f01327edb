#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "untag/oracle.hpp"
#include "untag/pipeline.hpp"

namespace untag::testing {

inline bool intParams(const CfgFunction& f) {
  for (const auto& p : f.params)
    if (p.type->kind != Type::Kind::Int) return false;
  return f.params.size() <= 3;
}

struct Checked {
  size_t states = 0;
  std::set<std::string> functions;  // functions whose states were observed
  std::vector<Violation> violations;
};

// Runs every integer-parameter function over a small domain and checks each
// observed state against the must-graph computed for that point.
inline Checked checkProgram(const Program& p) {
  LoweredProgram lp = lower(p);
  MayPointsTo may = computeMay(lp);
  MustAnalyzer must(lp, may);
  std::map<std::string, FunctionAnalysis> states;
  for (const auto& f : lp.functions) states.emplace(f.name, must.analyze(f));
  Checked out;
  Observer obs = [&](const CfgFunction& fn, int block, int index, const ConcreteState& st) {
    const auto& g = states.at(fn.name).before(block, index);
    if (!g) {
      out.violations.push_back(Violation{fn.name, block, index, "executed point judged unreachable"});
      return;
    }
    ++out.states;
    out.functions.insert(fn.name);
    for (auto& v : checkState(p, fn, block, index, *g, st)) out.violations.push_back(std::move(v));
  };
  for (const auto& f : lp.functions) {
    if (!intParams(f)) continue;
    for (const auto& in : enumerateInputs(f.params.size(), {0, 1, 2, 3}))
      runCfg(lp, f.name, in, obs, 200000);
  }
  return out;
}

}  // namespace untag::testing
