#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "untag/cfg.hpp"
#include "untag/may_pta.hpp"

namespace untag {

using FieldPath = std::vector<std::string>;

/// Known integer values of a node: the value is one of `values`.
struct IntLabel {
  enum class Provenance { Branch, Assignment };
  std::set<int64_t> values;
  Provenance provenance = Provenance::Assignment;

  bool operator==(const IntLabel&) const = default;
};

struct GraphNode {
  TypePtr type;                                // type of the location, when known
  std::optional<IntLabel> label;               // absent: any integer
  std::map<FieldPath, std::string> written;    // union path -> last written member

  bool operator==(const GraphNode& o) const;
};

/// Must-points-to graph. An edge (v, path) -> w states that the scalar
/// stored at location(v).path equals location(w); integers are treated as
/// imaginary addresses, so a node may stand for a value rather than storage.
/// Every (node, path) pair has at most one edge.
class PointsToGraph {
 public:
  std::vector<GraphNode> nodes;
  std::map<std::pair<int, FieldPath>, int> edges;
  std::map<std::string, int> roots;  // variable -> node of its storage

  int addNode(TypePtr type = nullptr);
  std::optional<int> target(int node, const FieldPath& path) const;
  void setEdge(int node, const FieldPath& path, int to) { edges[{node, path}] = to; }
  std::optional<int> root(const std::string& var) const;

  /// Renumbers nodes in breadth-first order from the roots (sorted by name,
  /// edges in path order) and drops unreachable nodes. Two canonical graphs
  /// are isomorphic iff they compare equal.
  void canonicalize();
  bool operator==(const PointsToGraph& o) const;

  /// Every node reachable from the roots.
  std::set<int> reachable() const;

  std::string str() const;
  std::string dot(const std::string& name) const;
};

/// Graph join: edges are intersected, labels unioned when both sides carry
/// one. Labels larger than `maxIntSet` are dropped. The result is canonical.
PointsToGraph join(const PointsToGraph& a, const PointsToGraph& b, size_t maxIntSet = 64);

/// Location of a place prefix (first `projCount` projections) without
/// creating any node: the base node and the trailing field path.
std::optional<std::pair<int, FieldPath>> resolvePlace(const PointsToGraph& g, const IrPlace& place,
                                                      size_t projCount);

/// Target node of the scalar at a place, if the graph knows it.
std::optional<int> placeValue(const PointsToGraph& g, const IrPlace& place);

struct MustOptions {
  size_t maxIntSet = 64;
  size_t maxIterations = 100000;
};

/// States of one function. `states[b][i]` is the state before instruction i
/// of block b; `states[b][n]` (n = instruction count) is the block-exit state.
/// A missing state marks an unreachable point.
struct FunctionAnalysis {
  const CfgFunction* function = nullptr;
  std::vector<std::vector<std::optional<PointsToGraph>>> states;
  size_t iterations = 0;

  const std::optional<PointsToGraph>& before(int block, int index) const { return states[block][index]; }
  const std::optional<PointsToGraph>& exit(int block) const { return states[block].back(); }
};

class MustAnalyzer {
 public:
  MustAnalyzer(const LoweredProgram& program, const MayPointsTo& may, MustOptions options = {});

  FunctionAnalysis analyze(const CfgFunction& fn) const;

  /// One instruction's effect.
  void transfer(const CfgFunction& fn, int block, int index, PointsToGraph& g) const;

  /// Refines the state flowing along the edge from `block`'s terminator to
  /// successor `succIndex` (position in Terminator::successors()). Returns
  /// nullopt when the edge is infeasible under the current labels.
  std::optional<PointsToGraph> edgeState(const CfgFunction& fn, int block, size_t succIndex,
                                         const PointsToGraph& exit) const;

  /// Removes every edge and union marker that may denote a location in `written`.
  void invalidate(const CfgFunction& fn, PointsToGraph& g, const LocationSet& written) const;

 private:
  const LoweredProgram& program_;
  const Program& prog_;
  const MayPointsTo& may_;
  MustOptions options_;

  TypePtr variableType(const CfgFunction& fn, const std::string& var) const;
  int rootOf(const CfgFunction& fn, PointsToGraph& g, const std::string& var) const;
  std::pair<int, FieldPath> locate(const CfgFunction& fn, PointsToGraph& g, const IrPlace& place) const;
  int readScalar(PointsToGraph& g, int node, const FieldPath& path, const TypePtr& type) const;
  std::map<int, std::vector<Cell>> mayLocations(const CfgFunction& fn, const PointsToGraph& g) const;
  void writeValue(const CfgFunction& fn, PointsToGraph& g, const std::pair<int, FieldPath>& dest,
                  const TypePtr& type, const std::map<FieldPath, int>& slots,
                  const std::map<FieldPath, std::string>& markers) const;
  void removeOverlapping(PointsToGraph& g, int node, const FieldPath& path) const;
  void refine(const CfgFunction& fn, PointsToGraph& g, const Operand& operand, const std::set<int64_t>& values,
              bool& infeasible) const;
};

}  // namespace untag
