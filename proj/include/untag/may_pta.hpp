#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "untag/cfg.hpp"

namespace untag {

struct AbstractObject {
  enum class Kind { Local, Global, Alloc, Function };
  Kind kind = Kind::Local;
  std::string function;  // Local, Alloc
  std::string name;      // Local variable, Global, Function
  int block = -1;        // Alloc
  int index = -1;        // Alloc
  TypePtr type;

  std::string str() const;
};

/// A storage cell: an object plus a canonical field path (see canonicalPath).
struct Cell {
  int object = 0;
  std::vector<std::string> path;
};

/// A set of cells, or every location in the program.
struct LocationSet {
  bool universal = false;
  std::set<int> cells;
};

/// Program point of an instruction.
struct InstrKey {
  std::string function;
  int block = 0;
  int index = 0;

  auto operator<=>(const InstrKey&) const = default;
};

/// Flow-insensitive, field-sensitive inclusion-based points-to facts.
class MayPointsTo {
 public:
  const std::vector<AbstractObject>& objects() const { return objects_; }
  const Cell& cell(int id) const { return cells_[id]; }
  size_t cellCount() const { return cells_.size(); }

  std::optional<int> findObject(const AbstractObject& o) const;
  /// Object for variable `var` as seen from `function` (locals shadow globals).
  std::optional<int> variableObject(const std::string& function, const std::string& var) const;
  std::optional<int> findCell(int object, const std::vector<std::string>& path) const;

  /// Cells the pointer stored at `cell` (extended by `extra`) may address.
  std::set<int> pointsTo(int cell, const std::vector<std::string>& extra = {}) const;

  /// Two cells overlap when they share an object and one path prefixes the other.
  bool overlaps(int a, int b) const;
  bool overlaps(int a, const LocationSet& s) const;

  /// Cells the destination of the instruction may denote.
  const LocationSet& destWrites(const InstrKey& k) const;
  /// Cells the callee(s) of a call instruction may write, transitively.
  const LocationSet& mayWritten(const InstrKey& k) const;
  /// Functions an indirect call may reach.
  std::set<std::string> callees(const InstrKey& k) const;

  std::string cellStr(int id) const;
  nlohmann::json toJson() const;

 private:
  friend class MaySolver;
  const Program* program_ = nullptr;
  std::vector<AbstractObject> objects_;
  std::map<std::tuple<int, std::string, std::string, int, int>, int> objectIndex_;
  std::vector<Cell> cells_;
  std::map<std::pair<int, std::vector<std::string>>, int> cellIndex_;
  std::vector<std::set<int>> pts_;  // per cell
  std::map<InstrKey, LocationSet> dest_;
  std::map<InstrKey, LocationSet> callWrites_;
  std::map<InstrKey, std::set<std::string>> callees_;
};

MayPointsTo computeMay(const LoweredProgram& program);

}  // namespace untag
