#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "untag/oracle.hpp"

namespace untag {

std::vector<TestCase> parseManifest(const nlohmann::json& j) {
  if (!j.is_array()) throw std::invalid_argument("manifest must be a JSON array");
  std::vector<TestCase> out;
  auto termination = [](const nlohmann::json& v) {
    auto t = parseTermination(v.get<std::string>());
    if (!t) throw std::invalid_argument("unknown termination '" + v.get<std::string>() + "'");
    return *t;
  };
  for (const auto& c : j) {
    TestCase tc;
    tc.entry = c.value("entry", "main");
    tc.inputs = c.value("inputs", std::vector<int64_t>{});
    if (c.contains("expected_output")) tc.expectedOutput = c["expected_output"].get<std::vector<int64_t>>();
    if (c.contains("expected_termination")) tc.expectedTermination = termination(c["expected_termination"]);
    if (c.contains("transformed_termination")) tc.transformedTermination = termination(c["transformed_termination"]);
    if (c.contains("abort_site")) tc.abortSite = c["abort_site"].get<std::string>();
    tc.strict = c.value("strict", true);
    out.push_back(std::move(tc));
  }
  return out;
}

std::vector<TestCase> loadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read manifest " + path);
  return parseManifest(nlohmann::json::parse(in));
}

static std::string outputStr(const std::vector<int64_t>& v) {
  std::string s = "[";
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s + "]";
}

Verdict diffTest(const Program& original, const Program& transformed, const TestCase& tc) {
  Verdict v;
  RunOptions opts;
  opts.strict = tc.strict;
  v.original = run(original, tc.entry, tc.inputs, opts);
  v.transformed = run(transformed, tc.entry, tc.inputs, opts);
  const Outcome& a = v.original;
  const Outcome& b = v.transformed;
  bool sameTermination = a.termination == b.termination ||
                         (a.termination == Termination::ReinterpretationFault && b.termination == Termination::Abort);
  v.equal = sameTermination && a.output == b.output;

  std::vector<std::string> problems;
  if (tc.expectedOutput && a.output != *tc.expectedOutput)
    problems.push_back("original printed " + outputStr(a.output) + ", expected " + outputStr(*tc.expectedOutput));
  Termination wantOriginal = tc.expectedTermination.value_or(Termination::Normal);
  if (a.termination != wantOriginal)
    problems.push_back(std::string("original ended ") + terminationName(a.termination) + ", expected " +
                       terminationName(wantOriginal) + (a.message.empty() ? "" : " (" + a.message + " at " + a.site + ")"));
  if (tc.transformedTermination) {
    if (b.termination != *tc.transformedTermination)
      problems.push_back(std::string("transformed ended ") + terminationName(b.termination) + ", expected " +
                         terminationName(*tc.transformedTermination));
    if (tc.abortSite && b.site != *tc.abortSite)
      problems.push_back("transformed stopped at '" + b.site + "', expected '" + *tc.abortSite + "'");
    // The transformed run must agree with the original up to where it stopped.
    if (b.output.size() > a.output.size() ||
        !std::equal(b.output.begin(), b.output.end(), a.output.begin()))
      problems.push_back("transformed output " + outputStr(b.output) + " diverges from " + outputStr(a.output));
  } else if (!v.equal) {
    problems.push_back(std::string("original ") + terminationName(a.termination) + " " + outputStr(a.output) +
                       ", transformed " + terminationName(b.termination) + " " + outputStr(b.output) +
                       (b.message.empty() ? "" : " (" + b.message + " at " + b.site + ")"));
  }
  v.expected = problems.empty();
  for (const auto& p : problems) v.detail += (v.detail.empty() ? "" : "; ") + p;
  return v;
}

}  // namespace untag
