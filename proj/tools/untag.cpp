#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "untag/frontend.hpp"
#include "untag/oracle.hpp"
#include "untag/pipeline.hpp"
#include "untag/transform.hpp"

using namespace untag;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string readFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw UsageError("cannot write " + path);
  out << text;
}

Program load(const std::string& path) {
  auto r = parse(readFile(path), Dialect::MiniC);
  if (!r.ok()) {
    std::ostringstream msg;
    for (const auto& d : r.diagnostics) msg << path << ":" << d.str() << "\n";
    throw UsageError(msg.str());
  }
  return std::move(*r.program);
}

double since(std::chrono::steady_clock::time_point t) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t).count();
}

void dumpGraphs(const Analysis& a) {
  for (const auto& fa : a.functions)
    for (const auto& b : fa.function->blocks) {
      std::cerr << fa.function->name << " bb" << b.id << " exit:";
      const auto& st = fa.exit(b.id);
      std::cerr << (st ? " " + st->str() : " unreachable\n");
    }
}

nlohmann::json strategyCounts(const TransformResult& t) {
  int idiomatic = 0;
  int naive = 0;
  for (const auto& s : t.sites) (isIdiomatic(s.strategy) ? idiomatic : naive)++;
  nlohmann::json j = t.logJson()["strategy_counts"];
  return {{"idiomatic", idiomatic}, {"naive", naive}, {"by_strategy", j}, {"helper_calls", t.totalHelperCalls()}};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finds the tag fields of C unions and rewrites them into tagged unions"};
  app.require_subcommand(1);

  std::string file;
  std::string jsonOut;
  std::string out;
  std::string logOut;
  std::string manifest;
  size_t maxIntSet = 64;
  bool naiveOnly = false;
  bool dumpGraphsFlag = false;
  bool dumpMay = false;

  auto* analyzeCmd = app.add_subcommand("analyze", "Identify tag fields and print the report");
  analyzeCmd->add_option("file", file, "MiniC source")->required();
  analyzeCmd->add_option("--json", jsonOut, "Write the report here instead of stdout");
  analyzeCmd->add_option("--max-int-set", maxIntSet, "Largest integer set a label may hold");
  analyzeCmd->add_flag("--dump-may", dumpMay, "Include may-points-to facts in the report");

  auto* transformCmd = app.add_subcommand("transform", "Rewrite tagged unions into enums");
  transformCmd->add_option("file", file, "MiniC source")->required();
  transformCmd->add_option("-o,--output", out, "MiniTag output file")->required();
  transformCmd->add_option("--log", logOut, "Strategy log (default: <output>.log.json)");
  transformCmd->add_flag("--naive-only", naiveOnly, "Use helper methods at every site");
  transformCmd->add_option("--max-int-set", maxIntSet, "Largest integer set a label may hold");
  transformCmd->add_flag("--dump-graphs", dumpGraphsFlag, "Print block-exit must graphs to stderr");
  transformCmd->add_flag("--dump-may", dumpMay, "Print may-points-to facts to stderr");

  auto* checkCmd = app.add_subcommand("check", "Run manifest cases on the original and transformed program");
  checkCmd->add_option("file", file, "MiniC source")->required();
  checkCmd->add_option("--manifest", manifest, "JSON test manifest")->required();
  checkCmd->add_option("--max-int-set", maxIntSet, "Largest integer set a label may hold");

  CLI11_PARSE(app, argc, argv);

  try {
    auto start = std::chrono::steady_clock::now();
    Program program = load(file);
    double parseSeconds = since(start);
    MustOptions options;
    options.maxIntSet = maxIntSet;
    auto analysis = analyze(program, options);

    if (*analyzeCmd) {
      nlohmann::json report = analysis->toJson(dumpMay);
      report["file"] = file;
      auto t0 = std::chrono::steady_clock::now();
      TransformResult t = transform(program, *analysis);
      report["sites"] = strategyCounts(t);
      nlohmann::json timing = analysis->seconds;
      timing["parse"] = parseSeconds;
      timing["transform"] = since(t0);
      report["timing"] = timing;
      std::string text = report.dump(2) + "\n";
      if (jsonOut.empty())
        std::cout << text;
      else
        writeFile(jsonOut, text);
      return 0;
    }

    if (*transformCmd) {
      if (dumpGraphsFlag) dumpGraphs(*analysis);
      if (dumpMay) std::cerr << analysis->may.toJson().dump(2) << "\n";
      TransformOptions topts;
      topts.naiveOnly = naiveOnly;
      TransformResult t = transform(program, *analysis, topts);
      writeFile(out, t.text);
      writeFile(logOut.empty() ? out + ".log.json" : logOut, t.logJson().dump(2) + "\n");
      std::cout << out << ": " << t.schemes.size() << " union(s) rewritten, " << t.sites.size() << " site(s), "
                << t.totalHelperCalls() << " helper call(s)\n";
      return 0;
    }

    std::vector<TestCase> cases = loadManifest(manifest);
    TransformResult t = transform(program, *analysis);
    int failed = 0;
    for (size_t i = 0; i < cases.size(); ++i) {
      Verdict v = diffTest(program, t.program, cases[i]);
      std::cout << "case " << i << " " << cases[i].entry << "(";
      for (size_t k = 0; k < cases[i].inputs.size(); ++k) std::cout << (k ? "," : "") << cases[i].inputs[k];
      std::cout << "): " << (v.expected ? (v.equal ? "equal" : "expected-mismatch") : "UNEXPECTED");
      if (!v.detail.empty()) std::cout << " - " << v.detail;
      std::cout << "\n";
      if (!v.expected) ++failed;
    }
    std::cout << cases.size() - failed << "/" << cases.size() << " case(s) as expected\n";
    return failed ? 1 : 0;
  } catch (const UsageError& e) {
    std::cerr << e.what() << (std::string(e.what()).ends_with("\n") ? "" : "\n");
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
