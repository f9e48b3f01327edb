#include "untag/may_pta.hpp"

#include <algorithm>
#include <deque>

namespace untag {

std::string AbstractObject::str() const {
  switch (kind) {
    case Kind::Local: return function + "::" + name;
    case Kind::Global: return name;
    case Kind::Alloc: return "alloc@" + function + ":bb" + std::to_string(block) + ":" + std::to_string(index);
    case Kind::Function: return "fn " + name;
  }
  return "?";
}

std::optional<int> MayPointsTo::findObject(const AbstractObject& o) const {
  auto it = objectIndex_.find({static_cast<int>(o.kind), o.function, o.name, o.block, o.index});
  if (it == objectIndex_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> MayPointsTo::variableObject(const std::string& function, const std::string& var) const {
  AbstractObject local{AbstractObject::Kind::Local, function, var, -1, -1, nullptr};
  if (auto o = findObject(local)) return o;
  AbstractObject global{AbstractObject::Kind::Global, "", var, -1, -1, nullptr};
  return findObject(global);
}

std::optional<int> MayPointsTo::findCell(int object, const std::vector<std::string>& path) const {
  auto canon = canonicalPath(*program_, objects_[object].type, path);
  auto it = cellIndex_.find({object, canon});
  if (it == cellIndex_.end()) return std::nullopt;
  return it->second;
}

std::set<int> MayPointsTo::pointsTo(int cell, const std::vector<std::string>& extra) const {
  if (extra.empty()) return pts_[cell];
  std::vector<std::string> path = cells_[cell].path;
  path.insert(path.end(), extra.begin(), extra.end());
  auto c = findCell(cells_[cell].object, path);
  return c ? pts_[*c] : std::set<int>{};
}

bool MayPointsTo::overlaps(int a, int b) const {
  const Cell& x = cells_[a];
  const Cell& y = cells_[b];
  if (x.object != y.object) return false;
  size_t n = std::min(x.path.size(), y.path.size());
  for (size_t i = 0; i < n; ++i)
    if (x.path[i] != y.path[i]) return false;
  return true;
}

bool MayPointsTo::overlaps(int a, const LocationSet& s) const {
  if (s.universal) return true;
  for (int c : s.cells)
    if (overlaps(a, c)) return true;
  return false;
}

static const LocationSet kEmpty;

const LocationSet& MayPointsTo::destWrites(const InstrKey& k) const {
  auto it = dest_.find(k);
  return it == dest_.end() ? kEmpty : it->second;
}

const LocationSet& MayPointsTo::mayWritten(const InstrKey& k) const {
  auto it = callWrites_.find(k);
  return it == callWrites_.end() ? kEmpty : it->second;
}

std::set<std::string> MayPointsTo::callees(const InstrKey& k) const {
  auto it = callees_.find(k);
  return it == callees_.end() ? std::set<std::string>{} : it->second;
}

std::string MayPointsTo::cellStr(int id) const {
  return objects_[cells_[id].object].str() + joinPath(cells_[id].path);
}

nlohmann::json MayPointsTo::toJson() const {
  std::map<std::string, std::set<std::string>> sorted;
  for (size_t c = 0; c < cells_.size(); ++c) {
    if (cells_[c].object < 0 || pts_[c].empty()) continue;
    auto& out = sorted[cellStr(static_cast<int>(c))];
    for (int t : pts_[c]) out.insert(cellStr(t));
  }
  nlohmann::json j = nlohmann::json::object();
  for (const auto& [k, v] : sorted) j[k] = v;
  return j;
}

// ---------------------------------------------------------------------------

class MaySolver {
 public:
  MaySolver(const LoweredProgram& lp, MayPointsTo& out) : lp_(lp), prog_(*lp.program), out_(out) {
    out_.program_ = &prog_;
  }

  void run() {
    for (const auto& g : prog_.globals)
      object({AbstractObject::Kind::Global, "", g.name, -1, -1, g.type});
    for (const auto& f : lp_.functions) {
      object({AbstractObject::Kind::Function, "", f.name, -1, -1, Type::Fn()});
      for (const auto& p : f.params) object({AbstractObject::Kind::Local, f.name, p.name, -1, -1, p.type});
      for (const auto& l : f.locals) object({AbstractObject::Kind::Local, f.name, l.name, -1, -1, l.type});
      object({AbstractObject::Kind::Local, f.name, "$ret", -1, -1, f.returnType});
    }
    for (const auto& f : lp_.functions) generate(f);
    solve();
    summarise();
    out_.pts_.resize(out_.cells_.size());
    for (size_t i = 0; i < out_.cells_.size(); ++i) out_.pts_[i] = nodes_[i].pts;
  }

 private:
  using Path = std::vector<std::string>;

  struct Node {
    std::set<int> pts;
    std::vector<int> delta;
    std::set<int> copyTo;
    std::vector<std::pair<int, Path>> loads;   // dst ⊇ *(this).path
    std::vector<std::pair<int, Path>> stores;  // *(this).path ⊇ src
    std::vector<std::pair<int, Path>> geps;    // dst ⊇ &(*this).path
    std::vector<int> calls;                    // indirect call sites using this node as callee
    bool queued = false;
  };

  // A place either names a cell directly or is reached through the pointer
  // held by an auxiliary node.
  struct Loc {
    bool direct = true;
    int object = -1;
    int aux = -1;
    Path path;
    TypePtr type;
  };

  struct CallSite {
    const CfgFunction* fn;
    InstrKey key;
    std::vector<Operand> args;
    std::optional<Loc> dest;
    std::set<std::string> wired;
  };

  const LoweredProgram& lp_;
  const Program& prog_;
  MayPointsTo& out_;
  std::vector<Node> nodes_;  // cells first (same ids as out_.cells_), aux nodes interleaved
  std::deque<int> work_;
  std::vector<CallSite> calls_;
  std::vector<bool> isCell_;

  int object(AbstractObject o) {
    auto key = std::make_tuple(static_cast<int>(o.kind), o.function, o.name, o.block, o.index);
    auto it = out_.objectIndex_.find(key);
    if (it != out_.objectIndex_.end()) return it->second;
    int id = static_cast<int>(out_.objects_.size());
    out_.objects_.push_back(std::move(o));
    out_.objectIndex_[key] = id;
    return id;
  }

  int newNode(bool cell) {
    nodes_.emplace_back();
    isCell_.push_back(cell);
    if (!cell) {
      // Aux nodes occupy an id in the cell table too, kept as a placeholder.
      out_.cells_.push_back(Cell{-1, {}});
    }
    return static_cast<int>(nodes_.size()) - 1;
  }

  int cell(int obj, const Path& path) {
    Path canon = canonicalPath(prog_, out_.objects_[obj].type, path);
    auto key = std::make_pair(obj, canon);
    auto it = out_.cellIndex_.find(key);
    if (it != out_.cellIndex_.end()) return it->second;
    int id = static_cast<int>(nodes_.size());
    nodes_.emplace_back();
    isCell_.push_back(true);
    out_.cells_.push_back(Cell{obj, canon});
    out_.cellIndex_[key] = id;
    return id;
  }

  int aux() { return newNode(false); }

  void addPts(int n, int target) {
    if (nodes_[n].pts.insert(target).second) {
      nodes_[n].delta.push_back(target);
      enqueue(n);
    }
  }

  void enqueue(int n) {
    if (!nodes_[n].queued) {
      nodes_[n].queued = true;
      work_.push_back(n);
    }
  }

  void addCopy(int from, int to) {
    if (from == to || !nodes_[from].copyTo.insert(to).second) return;
    for (int t : std::set<int>(nodes_[from].pts)) addPts(to, t);
  }

  int offsetCell(int target, const Path& path) {
    const Cell c = out_.cells_[target];
    Path p = c.path;
    p.insert(p.end(), path.begin(), path.end());
    return cell(c.object, p);
  }

  void addLoad(int ptr, int dst, const Path& path) {
    nodes_[ptr].loads.emplace_back(dst, path);
    for (int t : std::set<int>(nodes_[ptr].pts)) addCopy(offsetCell(t, path), dst);
  }

  void addStore(int ptr, int src, const Path& path) {
    nodes_[ptr].stores.emplace_back(src, path);
    for (int t : std::set<int>(nodes_[ptr].pts)) addCopy(src, offsetCell(t, path));
  }

  void addGep(int ptr, int dst, const Path& path) {
    nodes_[ptr].geps.emplace_back(dst, path);
    for (int t : std::set<int>(nodes_[ptr].pts)) addPts(dst, offsetCell(t, path));
  }

  int varObject(const CfgFunction& f, const std::string& var) {
    if (auto o = out_.findObject({AbstractObject::Kind::Local, f.name, var, -1, -1, nullptr})) return *o;
    return *out_.findObject({AbstractObject::Kind::Global, "", var, -1, -1, nullptr});
  }

  int valueOf(const Loc& l, const Path& slot) {
    Path p = l.path;
    p.insert(p.end(), slot.begin(), slot.end());
    if (l.direct) return cell(l.object, p);
    int n = aux();
    addLoad(l.aux, n, p);
    return n;
  }

  void writeTo(const Loc& l, const Path& slot, int src) {
    Path p = l.path;
    p.insert(p.end(), slot.begin(), slot.end());
    if (l.direct)
      addCopy(src, cell(l.object, p));
    else
      addStore(l.aux, src, p);
  }

  Loc locOf(const CfgFunction& f, const IrPlace& place) {
    Loc l;
    l.object = varObject(f, place.base);
    for (const auto& pr : place.projs) {
      if (pr.kind == Proj::Kind::Field) {
        l.path.push_back(pr.field);
        continue;
      }
      int n = valueOf(l, {});
      l = Loc{false, -1, n, {}, nullptr};
    }
    l.type = place.type;
    return l;
  }

  Loc objectLoc(int obj) { return Loc{true, obj, -1, {}, out_.objects_[obj].type}; }

  void copyValue(const Loc& dst, const Loc& src, const TypePtr& type) {
    for (const auto& slot : scalarSlots(prog_, type)) writeTo(dst, slot, valueOf(src, slot));
  }

  // Writes an operand into `dst`.
  void copyOperand(const CfgFunction& f, const Loc& dst, const Operand& o, const TypePtr& type) {
    switch (o.kind) {
      case Operand::Kind::Copy: copyValue(dst, locOf(f, o.place), type); return;
      case Operand::Kind::Function: {
        int n = aux();
        addPts(n, cell(varFunction(o.name), {}));
        writeTo(dst, {}, n);
        return;
      }
      default: return;
    }
  }

  int varFunction(const std::string& name) {
    return *out_.findObject({AbstractObject::Kind::Function, "", name, -1, -1, nullptr});
  }

  void wire(CallSite& site, const std::string& callee) {
    if (!site.wired.insert(callee).second) return;
    const CfgFunction* g = lp_.find(callee);
    if (!g) return;
    const CfgFunction& f = *site.fn;
    for (size_t i = 0; i < site.args.size() && i < g->params.size(); ++i) {
      Loc param = objectLoc(varObject(*g, g->params[i].name));
      copyOperand(f, param, site.args[i], g->params[i].type);
    }
    if (site.dest) {
      Loc ret = objectLoc(varObject(*g, "$ret"));
      copyValue(*site.dest, ret, g->returnType);
    }
  }

  void generate(const CfgFunction& f) {
    for (const auto& b : f.blocks) {
      for (size_t idx = 0; idx < b.instrs.size(); ++idx) {
        const Instr& in = b.instrs[idx];
        InstrKey key{f.name, b.id, static_cast<int>(idx)};
        switch (in.kind) {
          case Instr::Kind::Assign: {
            Loc dst = locOf(f, *in.dest);
            const Rvalue& rv = in.rvalue;
            recordDest(key, dst);
            switch (rv.kind) {
              case Rvalue::Kind::Use: copyOperand(f, dst, rv.operands[0], in.dest->type); break;
              case Rvalue::Kind::AddrOf: {
                Loc src = locOf(f, rv.place);
                int n = aux();
                if (src.direct)
                  addPts(n, cell(src.object, src.path));
                else
                  addGep(src.aux, n, src.path);
                writeTo(dst, {}, n);
                break;
              }
              case Rvalue::Kind::New: {
                int obj = object({AbstractObject::Kind::Alloc, f.name, "", b.id, static_cast<int>(idx), rv.type});
                int n = aux();
                addPts(n, cell(obj, {}));
                writeTo(dst, {}, n);
                break;
              }
              default: break;  // integer results carry no addresses
            }
            break;
          }
          case Instr::Kind::CompoundAssign: recordDest(key, locOf(f, *in.dest)); break;
          case Instr::Kind::Print: break;
          case Instr::Kind::Call: {
            CallSite site;
            site.fn = &f;
            site.key = key;
            site.args = in.args;
            if (in.dest) {
              site.dest = locOf(f, *in.dest);
              recordDest(key, *site.dest);
            }
            calls_.push_back(std::move(site));
            int ci = static_cast<int>(calls_.size()) - 1;
            if (in.callee.kind == Operand::Kind::Function) {
              wire(calls_[ci], in.callee.name);
            } else {
              int n = valueOf(locOf(f, in.callee.place), {});
              nodes_[n].calls.push_back(ci);
              for (int t : std::set<int>(nodes_[n].pts)) resolve(ci, t);
            }
            break;
          }
        }
      }
      if (b.term.kind == Terminator::Kind::Return && b.term.value)
        copyOperand(f, objectLoc(varObject(f, "$ret")), *b.term.value, f.returnType);
    }
  }

  // Destinations are resolved after solving; remember the location for now.
  std::vector<std::pair<InstrKey, Loc>> pendingDest_;
  void recordDest(const InstrKey& key, const Loc& l) { pendingDest_.emplace_back(key, l); }

  void resolve(int callIndex, int target) {
    const Cell& c = out_.cells_[target];
    if (c.object < 0) return;
    const AbstractObject& o = out_.objects_[c.object];
    if (o.kind == AbstractObject::Kind::Function && c.path.empty()) wire(calls_[callIndex], o.name);
  }

  void solve() {
    while (!work_.empty()) {
      int n = work_.front();
      work_.pop_front();
      nodes_[n].queued = false;
      std::vector<int> delta;
      delta.swap(nodes_[n].delta);
      if (delta.empty()) continue;
      // Complex constraints may add edges to this node; iterate over copies.
      auto loads = nodes_[n].loads;
      auto stores = nodes_[n].stores;
      auto geps = nodes_[n].geps;
      auto callsHere = nodes_[n].calls;
      for (int t : delta) {
        for (const auto& [dst, path] : loads) addCopy(offsetCell(t, path), dst);
        for (const auto& [src, path] : stores) addCopy(src, offsetCell(t, path));
        for (const auto& [dst, path] : geps) addPts(dst, offsetCell(t, path));
        for (int ci : callsHere) resolve(ci, t);
      }
      for (int s : std::set<int>(nodes_[n].copyTo))
        for (int t : delta) addPts(s, t);
    }
  }

  LocationSet cellsOf(const Loc& l) {
    LocationSet s;
    if (l.direct) {
      s.cells.insert(cell(l.object, l.path));
      return s;
    }
    for (int t : std::set<int>(nodes_[l.aux].pts)) s.cells.insert(offsetCell(t, l.path));
    return s;
  }

  void summarise() {
    for (const auto& [key, loc] : pendingDest_) out_.dest_[key] = cellsOf(loc);
    // Indirect call targets.
    std::map<InstrKey, const CallSite*> siteOf;
    for (const auto& site : calls_) {
      siteOf[site.key] = &site;
      out_.callees_[site.key] = site.wired;
    }
    // Per-function write summaries, closed over the call graph. Direct writes
    // to the callee's own locals are dropped because every call gets a fresh frame.
    std::map<std::string, LocationSet> summary;
    for (const auto& f : lp_.functions) summary[f.name];
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& f : lp_.functions) {
        LocationSet& s = summary[f.name];
        if (s.universal) continue;
        size_t before = s.cells.size();
        for (const auto& b : f.blocks) {
          for (size_t idx = 0; idx < b.instrs.size(); ++idx) {
            const Instr& in = b.instrs[idx];
            InstrKey key{f.name, b.id, static_cast<int>(idx)};
            if (in.dest) {
              for (int c : out_.dest_[key].cells) {
                const AbstractObject& o = out_.objects_[out_.cells_[c].object];
                bool ownLocal = o.kind == AbstractObject::Kind::Local && o.function == f.name;
                bool directWrite = in.dest->projs.empty() ||
                                   std::none_of(in.dest->projs.begin(), in.dest->projs.end(),
                                                [](const Proj& p) { return p.kind == Proj::Kind::Deref; });
                if (ownLocal && directWrite) continue;
                s.cells.insert(c);
              }
            }
            if (in.kind != Instr::Kind::Call) continue;
            const CallSite* site = siteOf[key];
            if (site->wired.empty()) {
              s.universal = true;
              break;
            }
            for (const auto& callee : site->wired) {
              const LocationSet& cs = summary[callee];
              if (cs.universal) {
                s.universal = true;
                break;
              }
              s.cells.insert(cs.cells.begin(), cs.cells.end());
            }
            if (s.universal) break;
          }
          if (s.universal) break;
        }
        if (s.universal || s.cells.size() != before) changed = true;
      }
    }
    for (const auto& site : calls_) {
      LocationSet w;
      if (site.wired.empty()) {
        w.universal = true;
      } else {
        for (const auto& callee : site.wired) {
          const LocationSet& cs = summary[callee];
          if (cs.universal) {
            w.universal = true;
            w.cells.clear();
            break;
          }
          w.cells.insert(cs.cells.begin(), cs.cells.end());
        }
      }
      out_.callWrites_[site.key] = std::move(w);
    }
  }
};

MayPointsTo computeMay(const LoweredProgram& program) {
  MayPointsTo out;
  MaySolver(program, out).run();
  return out;
}

}  // namespace untag
