#pragma once

#include <deque>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "untag/must_pta.hpp"

// Random must-graphs and a pairwise check of their join, shared by the unit
// test and the acceptance run.
namespace untag::testing {

inline const std::vector<std::string> kVars{"a", "b", "c", "d"};
inline const std::vector<FieldPath> kPaths{{}, {"f"}, {"g"}, {"v", "e"}, {"v", "b"}};

inline std::optional<IntLabel> randomLabel(std::mt19937& rng) {
  if (rng() % 3 == 0) return std::nullopt;
  IntLabel l;
  int n = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < n; ++i) l.values.insert(static_cast<int64_t>(rng() % 6));
  l.provenance = rng() % 2 ? IntLabel::Provenance::Branch : IntLabel::Provenance::Assignment;
  return l;
}

inline PointsToGraph randomGraph(std::mt19937& rng) {
  PointsToGraph g;
  int nodes = 1 + static_cast<int>(rng() % 7);
  for (int i = 0; i < nodes; ++i) {
    int id = g.addNode();
    g.nodes[id].label = randomLabel(rng);
    if (rng() % 4 == 0) g.nodes[id].written[{"v"}] = rng() % 2 ? "e" : "b";
  }
  for (const auto& v : kVars)
    if (rng() % 4) g.roots[v] = static_cast<int>(rng() % nodes);
  int edges = static_cast<int>(rng() % (2 * nodes + 1));
  for (int i = 0; i < edges; ++i)
    g.setEdge(static_cast<int>(rng() % nodes), kPaths[rng() % kPaths.size()], static_cast<int>(rng() % nodes));
  return g;
}

// A copy of `g` with a few edges, labels and roots changed, so joins share structure.
inline PointsToGraph mutate(PointsToGraph g, std::mt19937& rng) {
  int n = static_cast<int>(g.nodes.size());
  int changes = 1 + static_cast<int>(rng() % 3);
  for (int i = 0; i < changes; ++i) {
    switch (rng() % 4) {
      case 0: g.nodes[rng() % n].label = randomLabel(rng); break;
      case 1: g.setEdge(static_cast<int>(rng() % n), kPaths[rng() % kPaths.size()], static_cast<int>(rng() % n)); break;
      case 2:
        if (!g.edges.empty()) {
          auto it = g.edges.begin();
          std::advance(it, rng() % g.edges.size());
          g.edges.erase(it);
        }
        break;
      default: g.roots[kVars[rng() % kVars.size()]] = static_cast<int>(rng() % n); break;
    }
  }
  return g;
}

inline std::optional<IntLabel> expectedLabel(const GraphNode& x, const GraphNode& y) {
  if (!x.label || !y.label) return std::nullopt;
  IntLabel l;
  l.values = x.label->values;
  l.values.insert(y.label->values.begin(), y.label->values.end());
  bool branch = x.label->provenance == IntLabel::Provenance::Branch &&
                y.label->provenance == IntLabel::Provenance::Branch;
  l.provenance = branch ? IntLabel::Provenance::Branch : IntLabel::Provenance::Assignment;
  return l;
}

// Walks `out` from its roots alongside both inputs. Every output node must
// correspond to exactly one input pair, every output edge must exist on that
// pair in both inputs, every edge common to both must appear, and labels must
// be the union of the pair's labels. Returns a description of the first
// counterexample.
inline std::string checkJoin(const PointsToGraph& a, const PointsToGraph& b, const PointsToGraph& out) {
  std::map<int, std::pair<int, int>> pairOf;
  std::deque<int> work;
  for (const auto& [var, o] : out.roots) {
    auto x = a.root(var);
    auto y = b.root(var);
    if (!x || !y) return "root " + var + " missing from an input";
    auto [it, fresh] = pairOf.emplace(o, std::make_pair(*x, *y));
    if (!fresh && it->second != std::make_pair(*x, *y)) return "output node stands for two input pairs";
    if (fresh) work.push_back(o);
  }
  for (const auto& var : kVars)
    if (a.root(var) && b.root(var) && !out.root(var)) return "common root " + var + " dropped";
  while (!work.empty()) {
    int o = work.front();
    work.pop_front();
    auto [x, y] = pairOf.at(o);
    if (out.nodes[o].label != expectedLabel(a.nodes[x], b.nodes[y])) return "label mismatch";
    for (const auto& p : kPaths) {
      auto to = out.target(o, p);
      auto tx = a.target(x, p);
      auto ty = b.target(y, p);
      if (to && (!tx || !ty)) return "output edge absent from an input";
      if (!to && tx && ty) return "common edge dropped";
      if (!to) continue;
      auto [it, fresh] = pairOf.emplace(*to, std::make_pair(*tx, *ty));
      if (!fresh && it->second != std::make_pair(*tx, *ty)) return "output node stands for two input pairs";
      if (fresh) work.push_back(*to);
    }
  }
  return "";
}

inline PointsToGraph canonical(PointsToGraph g) {
  g.canonicalize();
  return g;
}

/// Runs `pairs` random joins; returns the first counterexample, or "".
inline std::string joinCounterexample(int pairs, unsigned seed) {
  std::mt19937 rng(seed);
  for (int i = 0; i < pairs; ++i) {
    PointsToGraph g1 = randomGraph(rng);
    PointsToGraph g2 = i % 2 ? mutate(g1, rng) : randomGraph(rng);
    if (!(join(g1, g1) == canonical(g1))) return "join(g,g) differs from g restricted to reachable nodes\n" + g1.str();
    PointsToGraph j12 = join(g1, g2);
    if (!(j12 == join(g2, g1))) return "join is not commutative\n" + g1.str() + g2.str();
    std::string why = checkJoin(g1, g2, j12);
    if (!why.empty()) return why + "\n" + g1.str() + g2.str() + j12.str();
  }
  return "";
}

}  // namespace untag::testing
