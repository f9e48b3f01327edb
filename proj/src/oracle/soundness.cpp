#include <deque>
#include <map>
#include <variant>

#include "untag/oracle.hpp"

namespace untag {

namespace {

struct Null {
  bool operator==(const Null&) const = default;
};
struct FnValue {
  std::string name;
  bool operator==(const FnValue&) const = default;
};
/// What a graph node stands for in one concrete state.
using Denotation = std::variant<ConcreteLoc, int64_t, Null, FnValue>;

std::string show(const Denotation& d) {
  if (auto* l = std::get_if<ConcreteLoc>(&d)) {
    std::string s = "obj" + std::to_string(l->object);
    for (const auto& f : l->path) s += "." + f;
    return s;
  }
  if (auto* i = std::get_if<int64_t>(&d)) return std::to_string(*i);
  if (auto* f = std::get_if<FnValue>(&d)) return "fn " + f->name;
  return "null";
}

ConcreteLoc extend(ConcreteLoc l, const FieldPath& p) {
  l.path.insert(l.path.end(), p.begin(), p.end());
  return l;
}

}  // namespace

std::vector<Violation> checkState(const Program&, const CfgFunction& fn, int block, int index,
                                  const PointsToGraph& graph, const ConcreteState& state) {
  std::vector<Violation> out;
  auto report = [&](std::string fact) { out.push_back(Violation{fn.name, block, index, std::move(fact)}); };

  std::map<int, Denotation> meaning;
  std::deque<int> work;
  auto assign = [&](int node, Denotation d, const std::string& via) {
    auto it = meaning.find(node);
    if (it == meaning.end()) {
      meaning.emplace(node, d);
      work.push_back(node);
    } else if (!(it->second == d)) {
      report("n" + std::to_string(node) + " is " + show(it->second) + " but " + via + " gives " + show(d));
    }
  };

  for (const auto& [var, node] : graph.roots) {
    auto loc = state.variable(var);
    if (!loc) continue;
    assign(node, *loc, "root " + var);
  }

  while (!work.empty()) {
    int n = work.front();
    work.pop_front();
    const Denotation d = meaning.at(n);
    const auto* loc = std::get_if<ConcreteLoc>(&d);
    for (auto it = graph.edges.lower_bound({n, {}}); it != graph.edges.end() && it->first.first == n; ++it) {
      if (!loc) continue;
      const FieldPath& path = it->first.second;
      ConcreteLoc at = extend(*loc, path);
      auto s = state.scalar(at);
      std::string via = "edge n" + std::to_string(n) + "." + joinPath(path);
      if (!s) {
        report(via + " reads no scalar at " + show(at));
        continue;
      }
      if (s->isInt)
        assign(it->second, s->value, via);
      else if (s->isNull)
        assign(it->second, Null{}, via);
      else if (!s->function.empty())
        assign(it->second, FnValue{s->function}, via);
      else
        assign(it->second, *s->target, via);
    }
  }

  for (const auto& [n, d] : meaning) {
    const GraphNode& node = graph.nodes[n];
    if (node.label) {
      if (auto* v = std::get_if<int64_t>(&d); v && !node.label->values.count(*v))
        report("label of n" + std::to_string(n) + " excludes " + std::to_string(*v));
    }
    const auto* loc = std::get_if<ConcreteLoc>(&d);
    if (!loc) continue;
    for (const auto& [prefix, member] : node.written) {
      auto actual = state.unionMarker(extend(*loc, prefix));
      if (actual && *actual != member)
        report("n" + std::to_string(n) + "." + joinPath(prefix) + " last written " + *actual + ", graph says " + member);
    }
  }
  return out;
}

}  // namespace untag
