#include <deque>
#include <sstream>

#include "untag/must_pta.hpp"

namespace untag {

bool GraphNode::operator==(const GraphNode& o) const {
  return sameType(type, o.type) && label == o.label && written == o.written;
}

int PointsToGraph::addNode(TypePtr type) {
  nodes.push_back(GraphNode{std::move(type), std::nullopt, {}});
  return static_cast<int>(nodes.size()) - 1;
}

std::optional<int> PointsToGraph::target(int node, const FieldPath& path) const {
  auto it = edges.find({node, path});
  if (it == edges.end()) return std::nullopt;
  return it->second;
}

std::optional<int> PointsToGraph::root(const std::string& var) const {
  auto it = roots.find(var);
  if (it == roots.end()) return std::nullopt;
  return it->second;
}

template <typename F>
static void forEachEdge(const PointsToGraph& g, int node, F&& f) {
  for (auto it = g.edges.lower_bound({node, {}}); it != g.edges.end() && it->first.first == node; ++it)
    f(it->first.second, it->second);
}

std::set<int> PointsToGraph::reachable() const {
  std::set<int> seen;
  std::deque<int> q;
  for (const auto& [_, r] : roots)
    if (seen.insert(r).second) q.push_back(r);
  while (!q.empty()) {
    int n = q.front();
    q.pop_front();
    forEachEdge(*this, n, [&](const FieldPath&, int t) {
      if (seen.insert(t).second) q.push_back(t);
    });
  }
  return seen;
}

void PointsToGraph::canonicalize() {
  std::map<int, int> renum;
  std::vector<int> order;
  std::deque<int> q;
  auto visit = [&](int n) {
    if (renum.count(n)) return;
    renum[n] = static_cast<int>(order.size());
    order.push_back(n);
    q.push_back(n);
  };
  for (const auto& [_, r] : roots) {
    visit(r);
    while (!q.empty()) {
      int n = q.front();
      q.pop_front();
      forEachEdge(*this, n, [&](const FieldPath&, int t) { visit(t); });
    }
  }
  PointsToGraph out;
  out.nodes.reserve(order.size());
  for (int old : order) out.nodes.push_back(nodes[old]);
  for (const auto& [key, t] : edges) {
    auto from = renum.find(key.first);
    if (from == renum.end()) continue;
    out.edges[{from->second, key.second}] = renum.at(t);
  }
  for (const auto& [v, r] : roots) out.roots[v] = renum.at(r);
  *this = std::move(out);
}

bool PointsToGraph::operator==(const PointsToGraph& o) const {
  return roots == o.roots && edges == o.edges && nodes == o.nodes;
}

static std::string labelStr(const GraphNode& n) {
  if (!n.label) return "";
  std::string s = "@{";
  bool first = true;
  for (auto v : n.label->values) {
    s += (first ? "" : ",") + std::to_string(v);
    first = false;
  }
  s += n.label->provenance == IntLabel::Provenance::Branch ? "}b" : "}a";
  return s;
}

std::string PointsToGraph::str() const {
  std::ostringstream s;
  for (const auto& [v, r] : roots) s << v << "=n" << r << " ";
  s << "\n";
  for (size_t i = 0; i < nodes.size(); ++i) {
    s << "  n" << i;
    if (nodes[i].type) s << ":" << nodes[i].type->str();
    s << labelStr(nodes[i]);
    for (const auto& [p, m] : nodes[i].written) s << " [" << joinPath(p) << " last " << m << "]";
    forEachEdge(*this, static_cast<int>(i), [&](const FieldPath& p, int t) {
      s << " " << (p.empty() ? std::string("ε") : joinPath(p)) << "->n" << t;
    });
    s << "\n";
  }
  return s.str();
}

std::string PointsToGraph::dot(const std::string& name) const {
  std::ostringstream s;
  s << "digraph \"" << name << "\" {\n";
  for (const auto& [v, r] : roots) {
    s << "  \"var_" << v << "\" [shape=plaintext,label=\"" << v << "\"];\n";
    s << "  \"var_" << v << "\" -> n" << r << ";\n";
  }
  for (size_t i = 0; i < nodes.size(); ++i) {
    std::string label = labelStr(nodes[i]);
    for (const auto& [p, m] : nodes[i].written) label += " " + joinPath(p) + "=" + m;
    s << "  n" << i << " [label=\"" << label << "\"];\n";
  }
  for (const auto& [key, t] : edges)
    s << "  n" << key.first << " -> n" << t << " [label=\"" << joinPath(key.second) << "\"];\n";
  s << "}\n";
  return s.str();
}

PointsToGraph join(const PointsToGraph& a, const PointsToGraph& b, size_t maxIntSet) {
  PointsToGraph out;
  std::map<std::pair<int, int>, int> ids;
  std::deque<std::pair<int, int>> work;
  auto pairNode = [&](int x, int y) {
    auto it = ids.find({x, y});
    if (it != ids.end()) return it->second;
    int id = out.addNode();
    ids[{x, y}] = id;
    work.emplace_back(x, y);
    return id;
  };
  for (const auto& [var, r1] : a.roots) {
    auto r2 = b.root(var);
    if (r2) out.roots[var] = pairNode(r1, *r2);
  }
  while (!work.empty()) {
    auto [x, y] = work.front();
    work.pop_front();
    int id = ids.at({x, y});
    forEachEdge(a, x, [&](const FieldPath& p, int tx) {
      if (auto ty = b.target(y, p)) {
        int t = pairNode(tx, *ty);
        out.edges[{id, p}] = t;
      }
    });
    const GraphNode& na = a.nodes[x];
    const GraphNode& nb = b.nodes[y];
    GraphNode& n = out.nodes[id];
    if (sameType(na.type, nb.type)) n.type = na.type;
    if (na.label && nb.label) {
      IntLabel l;
      l.values = na.label->values;
      l.values.insert(nb.label->values.begin(), nb.label->values.end());
      l.provenance = na.label->provenance == IntLabel::Provenance::Branch &&
                             nb.label->provenance == IntLabel::Provenance::Branch
                         ? IntLabel::Provenance::Branch
                         : IntLabel::Provenance::Assignment;
      if (l.values.size() <= maxIntSet) n.label = std::move(l);
    }
    for (const auto& [p, m] : na.written) {
      auto it = nb.written.find(p);
      if (it != nb.written.end() && it->second == m) n.written[p] = m;
    }
  }
  out.canonicalize();
  return out;
}

std::optional<std::pair<int, FieldPath>> resolvePlace(const PointsToGraph& g, const IrPlace& place,
                                                      size_t projCount) {
  auto r = g.root(place.base);
  if (!r) return std::nullopt;
  int node = *r;
  FieldPath path;
  for (size_t i = 0; i < projCount && i < place.projs.size(); ++i) {
    const Proj& p = place.projs[i];
    if (p.kind == Proj::Kind::Field) {
      path.push_back(p.field);
      continue;
    }
    auto t = g.target(node, path);
    if (!t) return std::nullopt;
    node = *t;
    path.clear();
  }
  return std::make_pair(node, path);
}

std::optional<int> placeValue(const PointsToGraph& g, const IrPlace& place) {
  auto loc = resolvePlace(g, place, place.projs.size());
  if (!loc) return std::nullopt;
  return g.target(loc->first, loc->second);
}

}  // namespace untag
