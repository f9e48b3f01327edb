#include <algorithm>
#include <deque>
#include <stdexcept>

#include "untag/must_pta.hpp"

namespace untag {

namespace {

bool prefixRelated(const FieldPath& a, const FieldPath& b) {
  size_t n = std::min(a.size(), b.size());
  return std::equal(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(n), b.begin());
}

FieldPath concat(FieldPath a, const FieldPath& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

// Type a fresh node gets when it stands for the value of a slot of `slotType`:
// pointers denote their pointee's storage, everything else denotes itself.
TypePtr valueNodeType(const TypePtr& slotType) {
  if (!slotType) return nullptr;
  if (slotType->isPointer()) return slotType->pointee;
  return slotType;
}

}  // namespace

MustAnalyzer::MustAnalyzer(const LoweredProgram& program, const MayPointsTo& may, MustOptions options)
    : program_(program), prog_(*program.program), may_(may), options_(options) {}

TypePtr MustAnalyzer::variableType(const CfgFunction& fn, const std::string& var) const {
  for (const auto& p : fn.params)
    if (p.name == var) return p.type;
  for (const auto& l : fn.locals)
    if (l.name == var) return l.type;
  if (const GlobalVar* g = prog_.findGlobal(var)) return g->type;
  return nullptr;
}

int MustAnalyzer::rootOf(const CfgFunction& fn, PointsToGraph& g, const std::string& var) const {
  if (auto r = g.root(var)) return *r;
  int n = g.addNode(variableType(fn, var));
  g.roots[var] = n;
  return n;
}

int MustAnalyzer::readScalar(PointsToGraph& g, int node, const FieldPath& path, const TypePtr& type) const {
  if (auto t = g.target(node, path)) return *t;
  int n = g.addNode(valueNodeType(type));
  g.setEdge(node, path, n);
  return n;
}

std::pair<int, FieldPath> MustAnalyzer::locate(const CfgFunction& fn, PointsToGraph& g,
                                               const IrPlace& place) const {
  int node = rootOf(fn, g, place.base);
  FieldPath path;
  for (const auto& p : place.projs) {
    if (p.kind == Proj::Kind::Field) {
      path.push_back(p.field);
      continue;
    }
    TypePtr ptrType = g.nodes[node].type ? fieldPathType(prog_, g.nodes[node].type, path) : nullptr;
    node = readScalar(g, node, path, ptrType);
    path.clear();
  }
  return {node, path};
}

std::map<int, std::vector<Cell>> MustAnalyzer::mayLocations(const CfgFunction& fn, const PointsToGraph& g) const {
  std::map<int, std::vector<Cell>> locs;
  std::deque<int> q;
  for (const auto& [var, r] : g.roots) {
    if (locs.count(r)) continue;
    auto obj = may_.variableObject(fn.name, var);
    locs[r] = obj ? std::vector<Cell>{Cell{*obj, {}}} : std::vector<Cell>{};
    q.push_back(r);
  }
  while (!q.empty()) {
    int v = q.front();
    q.pop_front();
    for (auto it = g.edges.lower_bound({v, {}}); it != g.edges.end() && it->first.first == v; ++it) {
      int w = it->second;
      if (locs.count(w)) continue;
      std::set<std::pair<int, FieldPath>> found;
      for (const auto& c : locs[v]) {
        auto cell = may_.findCell(c.object, concat(c.path, it->first.second));
        if (!cell) continue;
        for (int t : may_.pointsTo(*cell)) found.insert({may_.cell(t).object, may_.cell(t).path});
      }
      std::vector<Cell> out;
      for (const auto& [o, p] : found) out.push_back(Cell{o, p});
      locs[w] = std::move(out);
      q.push_back(w);
    }
  }
  return locs;
}

void MustAnalyzer::invalidate(const CfgFunction& fn, PointsToGraph& g, const LocationSet& written) const {
  if (written.universal) {
    g.edges.clear();
    for (auto& n : g.nodes) n.written.clear();
    return;
  }
  if (written.cells.empty()) return;
  std::vector<Cell> w;
  for (int c : written.cells) w.push_back(may_.cell(c));
  auto hits = [&](const Cell& base, const FieldPath& path) {
    FieldPath full = canonicalPath(prog_, may_.objects()[base.object].type, concat(base.path, path));
    for (const auto& c : w)
      if (c.object == base.object && prefixRelated(c.path, full)) return true;
    return false;
  };
  auto locs = mayLocations(fn, g);
  for (auto it = g.edges.begin(); it != g.edges.end();) {
    bool kill = false;
    auto l = locs.find(it->first.first);
    if (l != locs.end())
      for (const auto& c : l->second)
        if (hits(c, it->first.second)) {
          kill = true;
          break;
        }
    it = kill ? g.edges.erase(it) : std::next(it);
  }
  for (auto& [node, cells] : locs) {
    auto& written = g.nodes[node].written;
    for (auto it = written.begin(); it != written.end();) {
      bool kill = std::any_of(cells.begin(), cells.end(), [&](const Cell& c) { return hits(c, it->first); });
      it = kill ? written.erase(it) : std::next(it);
    }
  }
}

void MustAnalyzer::removeOverlapping(PointsToGraph& g, int node, const FieldPath& path) const {
  const TypePtr& t = g.nodes[node].type;
  auto canon = [&](const FieldPath& p) { return t ? canonicalPath(prog_, t, p) : FieldPath(p.begin(), p.begin() + std::min<size_t>(p.size(), 1)); };
  FieldPath cp = canon(path);
  for (auto it = g.edges.lower_bound({node, {}}); it != g.edges.end() && it->first.first == node;)
    it = prefixRelated(canon(it->first.second), cp) ? g.edges.erase(it) : std::next(it);
  auto& written = g.nodes[node].written;
  for (auto it = written.begin(); it != written.end();)
    it = prefixRelated(canon(it->first), cp) ? written.erase(it) : std::next(it);
}

void MustAnalyzer::writeValue(const CfgFunction&, PointsToGraph& g, const std::pair<int, FieldPath>& dest,
                              const TypePtr&, const std::map<FieldPath, int>& slots,
                              const std::map<FieldPath, std::string>& markers) const {
  auto [node, path] = dest;
  for (const auto& [s, n] : slots) g.setEdge(node, concat(path, s), n);
  for (const auto& [k, m] : markers) g.nodes[node].written[concat(path, k)] = m;
  // A write through a union member records that member as last written.
  const TypePtr& t = g.nodes[node].type;
  if (!t) return;
  TypePtr cur = t;
  for (size_t i = 0; i < path.size(); ++i) {
    const TypeDef* def = cur && cur->isNamed() ? prog_.findType(cur->name) : nullptr;
    if (!def) return;
    if (def->kind == TypeDefKind::Union) {
      g.nodes[node].written[FieldPath(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(i))] = path[i];
      return;
    }
    const FieldDecl* fd = def->field(path[i]);
    if (!fd) return;
    cur = fd->type;
  }
}

void MustAnalyzer::transfer(const CfgFunction& fn, int block, int index, PointsToGraph& g) const {
  const Instr& in = fn.blocks[block].instrs[index];
  InstrKey key{fn.name, block, index};
  std::map<FieldPath, int> slots;
  std::map<FieldPath, std::string> markers;

  auto constant = [&](int64_t v) {
    int n = g.addNode(Type::Int());
    g.nodes[n].label = IntLabel{{v}, IntLabel::Provenance::Assignment};
    return n;
  };

  // Reads every scalar slot of an aggregate at `src`; union storage is copied
  // as whatever edges and last-written markers are currently known.
  auto copyFrom = [&](std::pair<int, FieldPath> src, const TypePtr& type) {
    for (const auto& slot : scalarSlots(prog_, type)) {
      TypePtr st = fieldPathType(prog_, type, slot);
      const TypeDef* def = st && st->isNamed() ? prog_.findType(st->name) : nullptr;
      FieldPath full = concat(src.second, slot);
      if (def && def->kind == TypeDefKind::Union) {
        for (auto it = g.edges.lower_bound({src.first, full});
             it != g.edges.end() && it->first.first == src.first; ++it) {
          const FieldPath& p = it->first.second;
          if (p.size() < full.size() || !std::equal(full.begin(), full.end(), p.begin())) break;
          slots[FieldPath(p.begin() + static_cast<std::ptrdiff_t>(src.second.size()), p.end())] = it->second;
        }
        auto m = g.nodes[src.first].written.find(full);
        if (m != g.nodes[src.first].written.end()) markers[slot] = m->second;
        continue;
      }
      slots[slot] = readScalar(g, src.first, full, st);
    }
  };

  switch (in.kind) {
    case Instr::Kind::Assign: {
      const Rvalue& rv = in.rvalue;
      const TypePtr& dtype = in.dest->type;
      switch (rv.kind) {
        case Rvalue::Kind::Use: {
          const Operand& o = rv.operands[0];
          if (o.kind == Operand::Kind::Const) {
            slots[{}] = constant(o.value);
          } else if (o.kind == Operand::Kind::Copy) {
            auto src = locate(fn, g, o.place);
            if (isAggregate(prog_, dtype))
              copyFrom(src, dtype);
            else
              slots[{}] = readScalar(g, src.first, src.second, dtype);
          } else {
            slots[{}] = g.addNode(valueNodeType(dtype));
          }
          break;
        }
        case Rvalue::Kind::AddrOf: {
          auto loc = locate(fn, g, rv.place);
          slots[{}] = loc.second.empty() ? loc.first : g.addNode(rv.place.type);
          break;
        }
        case Rvalue::Kind::New: slots[{}] = g.addNode(rv.type); break;
        case Rvalue::Kind::Unary:
        case Rvalue::Kind::Binary: slots[{}] = g.addNode(Type::Int()); break;
        case Rvalue::Kind::Zero:
          for (const auto& slot : scalarSlots(prog_, rv.type)) {
            TypePtr st = fieldPathType(prog_, rv.type, slot);
            if (st && st->isInt()) slots[slot] = constant(0);
          }
          break;
      }
      auto dest = locate(fn, g, *in.dest);
      invalidate(fn, g, may_.destWrites(key));
      removeOverlapping(g, dest.first, dest.second);
      writeValue(fn, g, dest, dtype, slots, markers);
      return;
    }
    case Instr::Kind::CompoundAssign: {
      auto dest = locate(fn, g, *in.dest);
      invalidate(fn, g, may_.destWrites(key));
      removeOverlapping(g, dest.first, dest.second);
      return;
    }
    case Instr::Kind::Call: {
      invalidate(fn, g, may_.mayWritten(key));
      if (!in.dest) return;
      auto dest = locate(fn, g, *in.dest);
      invalidate(fn, g, may_.destWrites(key));
      removeOverlapping(g, dest.first, dest.second);
      if (!isAggregate(prog_, in.dest->type)) slots[{}] = g.addNode(valueNodeType(in.dest->type));
      writeValue(fn, g, dest, in.dest->type, slots, markers);
      return;
    }
    case Instr::Kind::Print: return;
  }
}

void MustAnalyzer::refine(const CfgFunction& fn, PointsToGraph& g, const Operand& operand,
                          const std::set<int64_t>& values, bool& infeasible) const {
  if (operand.kind == Operand::Kind::Const) {
    if (!values.count(operand.value)) infeasible = true;
    return;
  }
  if (operand.kind != Operand::Kind::Copy) return;
  auto loc = locate(fn, g, operand.place);
  int n = readScalar(g, loc.first, loc.second, operand.place.type);
  auto& label = g.nodes[n].label;
  std::set<int64_t> next = values;
  if (label) {
    next.clear();
    std::set_intersection(label->values.begin(), label->values.end(), values.begin(), values.end(),
                          std::inserter(next, next.end()));
  }
  if (next.empty()) {
    infeasible = true;
    return;
  }
  label = IntLabel{std::move(next), IntLabel::Provenance::Branch};
}

std::optional<PointsToGraph> MustAnalyzer::edgeState(const CfgFunction& fn, int block, size_t succIndex,
                                                     const PointsToGraph& exit) const {
  const Terminator& t = fn.blocks[block].term;
  PointsToGraph g = exit;
  bool infeasible = false;
  if (t.kind == Terminator::Kind::Branch && t.cmp && succIndex == 0 && t.cmp->op == Op::Eq) {
    const Cmp& c = *t.cmp;
    if (c.rhs.kind == Operand::Kind::Const)
      refine(fn, g, c.lhs, {c.rhs.value}, infeasible);
    else if (c.lhs.kind == Operand::Kind::Const)
      refine(fn, g, c.rhs, {c.lhs.value}, infeasible);
  } else if (t.kind == Terminator::Kind::Switch && succIndex < t.cases.size()) {
    const auto& vals = t.cases[succIndex].first;
    refine(fn, g, t.discriminee, std::set<int64_t>(vals.begin(), vals.end()), infeasible);
  }
  if (infeasible) return std::nullopt;
  return g;
}

FunctionAnalysis MustAnalyzer::analyze(const CfgFunction& fn) const {
  FunctionAnalysis fa;
  fa.function = &fn;
  size_t n = fn.blocks.size();
  fa.states.resize(n);
  for (size_t b = 0; b < n; ++b) fa.states[b].resize(fn.blocks[b].instrs.size() + 1);

  // Reverse post-order priorities keep the iteration count low.
  std::vector<int> rpo(n, static_cast<int>(n));
  {
    std::vector<int> post;
    std::vector<bool> seen(n, false);
    std::vector<std::pair<int, size_t>> stack{{0, 0}};
    seen[0] = true;
    while (!stack.empty()) {
      auto& [b, i] = stack.back();
      auto succ = fn.blocks[b].term.successors();
      if (i < succ.size()) {
        int s = succ[i++];
        if (!seen[s]) {
          seen[s] = true;
          stack.emplace_back(s, 0);
        }
      } else {
        post.push_back(b);
        stack.pop_back();
      }
    }
    for (size_t i = 0; i < post.size(); ++i) rpo[post[post.size() - 1 - i]] = static_cast<int>(i);
  }

  std::vector<std::optional<PointsToGraph>> in(n);
  std::vector<std::vector<std::optional<PointsToGraph>>> out(n);
  std::vector<std::vector<std::pair<int, size_t>>> incoming(n);
  for (const auto& b : fn.blocks) {
    auto succ = b.term.successors();
    out[b.id].resize(succ.size());
    for (size_t k = 0; k < succ.size(); ++k) incoming[succ[k]].emplace_back(b.id, k);
  }
  in[0] = PointsToGraph{};
  std::set<std::pair<int, int>> work{{rpo[0], 0}};
  while (!work.empty()) {
    int b = work.begin()->second;
    work.erase(work.begin());
    if (++fa.iterations > options_.maxIterations)
      throw std::runtime_error("must analysis of '" + fn.name + "' did not converge");
    PointsToGraph g = *in[b];
    const BasicBlock& bb = fn.blocks[b];
    for (size_t i = 0; i < bb.instrs.size(); ++i) {
      fa.states[b][i] = g;
      transfer(fn, b, static_cast<int>(i), g);
    }
    g.canonicalize();
    fa.states[b][bb.instrs.size()] = g;
    auto succ = bb.term.successors();
    for (size_t k = 0; k < succ.size(); ++k) {
      auto e = edgeState(fn, b, k, g);
      if (e) e->canonicalize();
      out[b][k] = std::move(e);
    }
    std::set<int> targets(succ.begin(), succ.end());
    for (int s : targets) {
      std::optional<PointsToGraph> joined;
      for (const auto& [p, k] : incoming[s]) {
        const auto& e = out[p][k];
        if (!e) continue;
        joined = joined ? join(*joined, *e, options_.maxIntSet) : *e;
      }
      if (s == 0) joined = PointsToGraph{};
      if (joined && !(in[s] && *in[s] == *joined)) {
        in[s] = std::move(joined);
        work.insert({rpo[s], s});
      }
    }
  }
  return fa;
}

}  // namespace untag
