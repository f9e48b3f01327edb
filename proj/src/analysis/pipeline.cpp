#include "untag/pipeline.hpp"

#include <chrono>

namespace untag {

const FunctionAnalysis* Analysis::function(const std::string& name) const {
  for (const auto& f : functions)
    if (f.function->name == name) return &f;
  return nullptr;
}

nlohmann::json Analysis::toJson(bool includeMay) const {
  nlohmann::json eligible = nlohmann::json::object();
  for (const auto& [s, fs] : candidates.eligibleFields) eligible[s] = fs;
  nlohmann::json unions = nlohmann::json::array();
  for (const auto& [s, u] : candidates.unions) unions.push_back({{"struct", s}, {"union_field", u}});
  size_t total = 0;
  for (const auto& f : program->functions)
    if (f.owner.empty()) ++total;
  nlohmann::json fns = nlohmann::json::array();
  for (const auto& f : functions)
    fns.push_back({{"name", f.function->name},
                   {"blocks", f.function->blocks.size()},
                   {"iterations", f.iterations}});
  nlohmann::json out = {{"candidates",
                         {{"structs", candidates.structs},
                          {"unions", unions},
                          {"eligible_fields", eligible},
                          {"functions", candidates.functions}}},
                        {"functions", fns},
                        {"analyzed_functions",
                         {{"count", functions.size()},
                          {"total", total},
                          {"percent", total ? 100.0 * static_cast<double>(functions.size()) / static_cast<double>(total) : 0.0}}},
                        {"unions", report.toJson()}};
  if (includeMay) out["may_points_to"] = may.toJson();
  return out;
}

std::unique_ptr<Analysis> analyze(const Program& program, MustOptions options) {
  using Clock = std::chrono::steady_clock;
  auto a = std::make_unique<Analysis>();
  auto t = Clock::now();
  auto lap = [&](const char* phase) {
    auto now = Clock::now();
    a->seconds[phase] = std::chrono::duration<double>(now - t).count();
    t = now;
  };
  a->program = &program;
  a->candidates = collectCandidates(program);
  a->lowered = lower(program);
  lap("candidates");
  if (!a->candidates.empty()) {
    a->may = computeMay(a->lowered);
    lap("may_points_to");
    MustAnalyzer must(a->lowered, a->may, options);
    for (const auto& f : a->lowered.functions)
      if (a->candidates.functions.count(f.name)) a->functions.push_back(must.analyze(f));
    lap("must_points_to");
  }
  a->report = identifyTagFields(program, a->candidates, a->functions);
  lap("heuristic");
  return a;
}

}  // namespace untag
