#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "untag/ast.hpp"
#include "untag/cfg.hpp"
#include "untag/must_pta.hpp"

namespace untag {

enum class Termination { Normal, Abort, ReinterpretationFault, StepLimit };

const char* terminationName(Termination t);
std::optional<Termination> parseTermination(const std::string& s);

struct Outcome {
  std::vector<int64_t> output;
  Termination termination = Termination::Normal;
  std::string message;
  /// Where an abort or fault happened: `function`, or `function/method` when
  /// it happened inside a method called (directly or not) from `function`.
  std::string site;
  /// Reads of a union member other than the last-written one, as
  /// `function/member`, in execution order (recorded when not strict).
  std::vector<std::string> reinterpretations;
};

struct RunOptions {
  bool strict = true;  // a reinterpreting read faults
  uint64_t stepLimit = 1000000;
};

/// Runs `entry` of a MiniC or MiniTag program with integer arguments.
Outcome run(const Program& program, const std::string& entry, const std::vector<int64_t>& inputs,
            RunOptions options = {});

/// One manifest entry.
struct TestCase {
  std::string entry = "main";
  std::vector<int64_t> inputs;
  std::optional<std::vector<int64_t>> expectedOutput;
  std::optional<Termination> expectedTermination;     // of the original program
  std::optional<Termination> transformedTermination;  // when it differs on purpose
  std::optional<std::string> abortSite;               // expected site of that termination
  bool strict = true;
};

std::vector<TestCase> parseManifest(const nlohmann::json& j);
std::vector<TestCase> loadManifest(const std::string& path);

struct Verdict {
  Outcome original;
  Outcome transformed;
  bool equal = false;     // same output and matching termination
  bool expected = false;  // equal, or differing exactly as annotated
  std::string detail;
};

/// Runs one case on both programs. A reinterpretation fault in the original
/// matches an abort in the transformed program.
Verdict diffTest(const Program& original, const Program& transformed, const TestCase& tc);

// ---------------------------------------------------------------------------
// Concrete execution of lowered MiniC, for checking the must analysis.

/// A concrete location: an object and a field path inside it.
struct ConcreteLoc {
  int object = -1;
  std::vector<std::string> path;
  auto operator<=>(const ConcreteLoc&) const = default;
};

/// Read access to the machine state at an observed point.
class ConcreteState {
 public:
  virtual ~ConcreteState() = default;
  /// Storage of a variable visible in the current frame.
  virtual std::optional<ConcreteLoc> variable(const std::string& name) const = 0;
  /// The scalar stored at `loc`: an integer, a location, a function, or null.
  /// Empty when the location does not hold a scalar.
  struct Scalar {
    bool isInt = false;
    int64_t value = 0;
    std::optional<ConcreteLoc> target;
    std::string function;
    bool isNull = false;
  };
  virtual std::optional<Scalar> scalar(const ConcreteLoc& loc) const = 0;
  /// Last-written member of the union at `loc`, empty when unset.
  virtual std::optional<std::string> unionMarker(const ConcreteLoc& loc) const = 0;
};

/// Called before each instruction (index < instruction count) and before the
/// terminator (index == instruction count) of every executed block.
using Observer = std::function<void(const CfgFunction& fn, int block, int index, const ConcreteState& state)>;

/// Executes lowered code from `entry`. Union reads never fault.
Outcome runCfg(const LoweredProgram& program, const std::string& entry, const std::vector<int64_t>& inputs,
               const Observer& observer = nullptr, uint64_t stepLimit = 1000000);

/// Every input vector drawn from `domain` for each of `arity` parameters.
/// Refuses (throws std::invalid_argument) when the domain exceeds 4 values.
std::vector<std::vector<int64_t>> enumerateInputs(size_t arity, const std::vector<int64_t>& domain);

/// A must-graph fact contradicted by a concrete state.
struct Violation {
  std::string function;
  int block = 0;
  int index = 0;
  std::string fact;
};

/// Checks every edge, label and union marker of `graph` against `state`.
std::vector<Violation> checkState(const Program& program, const CfgFunction& fn, int block, int index,
                                  const PointsToGraph& graph, const ConcreteState& state);

}  // namespace untag
