#include <algorithm>
#include <functional>

#include "untag/heuristic.hpp"

namespace untag {

namespace {

FieldPath concat(FieldPath a, const FieldPath& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

TagSet labelValues(const std::optional<IntLabel>& l) { return l ? l->values : TagSet{}; }

bool intersects(const TagSet& a, const TagSet& b) {
  for (auto v : a)
    if (b.count(v)) return true;
  return false;
}

// Operand places read by a terminator.
std::vector<const IrPlace*> terminatorPlaces(const Terminator& t) {
  std::vector<const IrPlace*> out;
  auto add = [&](const Operand& o) {
    if (o.kind == Operand::Kind::Copy) out.push_back(&o.place);
  };
  switch (t.kind) {
    case Terminator::Kind::Branch:
      if (t.cmp) {
        add(t.cmp->lhs);
        add(t.cmp->rhs);
      } else {
        add(t.cond);
      }
      break;
    case Terminator::Kind::Switch: add(t.discriminee); break;
    case Terminator::Kind::Return:
      if (t.value) add(*t.value);
      break;
    default: break;
  }
  return out;
}

}  // namespace

TagSet TagAssociation::fieldTagUnion() const {
  TagSet out;
  for (const auto& [_, s] : fieldTags) out.insert(s.begin(), s.end());
  return out;
}

const UnionReport* TagReport::find(const std::string& structName, const std::string& unionField) const {
  for (const auto& u : unions)
    if (u.structName == structName && u.unionField == unionField) return &u;
  return nullptr;
}

std::vector<const UnionReport*> TagReport::tagged() const {
  std::vector<const UnionReport*> out;
  for (const auto& u : unions)
    if (u.tagField) out.push_back(&u);
  return out;
}

static nlohmann::json associationJson(const TagAssociation& a) {
  nlohmann::json fields = nlohmann::json::object();
  for (const auto& [f, tags] : a.fieldTags) fields[f] = tags;
  return {{"field_tags", fields},
          {"access_tags", a.accessTags},
          {"struct_tags", a.structTags},
          {"all_tags", a.allTags},
          {"rem_tags", a.remTags}};
}

nlohmann::json TagReport::toJson() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& u : unions) {
    nlohmann::json j = {{"struct", u.structName},
                        {"union_field", u.unionField},
                        {"union_type", u.unionType},
                        {"tag_field", u.tagField ? nlohmann::json(*u.tagField) : nlohmann::json(nullptr)}};
    if (u.tagField) j["association"] = associationJson(u.association);
    nlohmann::json fields = nlohmann::json::array();
    for (const auto& o : u.outcomes) {
      nlohmann::json f = {{"field", o.field}, {"identified", o.identified}};
      if (!o.identified) f["reason"] = o.reason;
      if (o.association) f["tag_count"] = o.association->fieldTagUnion().size();
      fields.push_back(std::move(f));
    }
    j["candidates"] = std::move(fields);
    out.push_back(std::move(j));
  }
  return out;
}

TagHeuristic::TagHeuristic(const Program& program, const std::vector<FunctionAnalysis>& analyses)
    : program_(program), analyses_(analyses) {}

std::vector<std::pair<int, FieldPath>> TagHeuristic::structValues(const PointsToGraph& g,
                                                                  const std::string& s) const {
  // Paths of embedded `s` values per type, memoized across nodes.
  std::map<std::string, std::vector<FieldPath>> memo;
  std::function<const std::vector<FieldPath>&(const std::string&)> pathsIn =
      [&](const std::string& type) -> const std::vector<FieldPath>& {
    auto it = memo.find(type);
    if (it != memo.end()) return it->second;
    std::vector<FieldPath> out;
    if (type == s) out.push_back({});
    if (const TypeDef* def = program_.findType(type))
      if (def->kind == TypeDefKind::Struct || def->kind == TypeDefKind::Union)
        for (const auto& f : def->fields)
          if (f.type && f.type->isNamed())
            for (const auto& p : pathsIn(f.type->name)) out.push_back(concat({f.name}, p));
    return memo[type] = std::move(out);
  };
  std::vector<std::pair<int, FieldPath>> out;
  for (int n : g.reachable()) {
    const TypePtr& t = g.nodes[n].type;
    if (!t || !t->isNamed()) continue;
    for (const auto& p : pathsIn(t->name)) out.emplace_back(n, p);
  }
  return out;
}

std::optional<IntLabel> TagHeuristic::tagLabel(const PointsToGraph& g, int node, const FieldPath& path,
                                               const std::string& tagField) const {
  auto t = g.target(node, concat(path, {tagField}));
  if (!t) return std::nullopt;
  return g.nodes[*t].label;
}

std::vector<AccessObservation> TagHeuristic::accesses(const std::string& s, const std::string& unionField,
                                                      const std::string& tagField) const {
  std::vector<AccessObservation> out;
  for (const auto& fa : analyses_) {
    const CfgFunction& fn = *fa.function;
    auto vars = fn.variableTypes();
    auto scan = [&](const PointsToGraph& g, const IrPlace& place) {
      auto it = vars.find(place.base);
      TypePtr t;
      if (it != vars.end()) {
        t = it->second;
      } else if (const GlobalVar* gv = program_.findGlobal(place.base)) {
        t = gv->type;
      }
      for (size_t j = 0; j < place.projs.size() && t; ++j) {
        const Proj& p = place.projs[j];
        if (p.kind == Proj::Kind::Deref) {
          t = t->isPointer() ? t->pointee : nullptr;
          continue;
        }
        if (t->isNamed() && t->name == s && p.field == unionField && j + 1 < place.projs.size() &&
            place.projs[j + 1].kind == Proj::Kind::Field) {
          AccessObservation obs{fn.name, place.projs[j + 1].exprId, place.projs[j + 1].field, std::nullopt};
          if (auto loc = resolvePlace(g, place, j)) obs.tag = tagLabel(g, loc->first, loc->second, tagField);
          out.push_back(std::move(obs));
        }
        t = fieldPathType(program_, t, {p.field});
      }
    };
    for (const auto& b : fn.blocks) {
      for (size_t i = 0; i < b.instrs.size(); ++i) {
        const auto& st = fa.before(b.id, static_cast<int>(i));
        if (!st) continue;
        for (const IrPlace* p : b.instrs[i].places()) scan(*st, *p);
      }
      const auto& st = fa.exit(b.id);
      if (!st) continue;
      for (const IrPlace* p : terminatorPlaces(b.term)) scan(*st, *p);
    }
  }
  return out;
}

std::optional<TagHeuristic::AccessResult> TagHeuristic::collectFromAccesses(const std::string& s,
                                                                            const std::string& unionField,
                                                                            const std::string& tagField,
                                                                            std::string* conflict) const {
  AccessResult r;
  for (const auto& obs : accesses(s, unionField, tagField)) {
    if (!obs.tag || obs.tag->provenance != IntLabel::Provenance::Branch) continue;
    TagSet& mine = r.fieldTags[obs.member];
    TagSet tags;
    for (auto v : obs.tag->values)
      if (!mine.count(v)) tags.insert(v);
    if (intersects(r.accessTags, tags)) {
      if (conflict) {
        for (auto v : tags)
          if (r.accessTags.count(v)) {
            *conflict = "tag " + std::to_string(v) + " guards accesses to more than one member (" + obs.member +
                        " in " + obs.function + ")";
            break;
          }
      }
      return std::nullopt;
    }
    mine.insert(tags.begin(), tags.end());
    r.accessTags.insert(tags.begin(), tags.end());
  }
  for (auto it = r.fieldTags.begin(); it != r.fieldTags.end();)
    it = it->second.empty() ? r.fieldTags.erase(it) : std::next(it);
  return r;
}

std::map<std::string, TagSet> TagHeuristic::collectFromStructs(const std::string& s, const std::string& unionField,
                                                               const std::string& tagField) const {
  std::map<std::string, TagSet> out;
  for (const auto& fa : analyses_) {
    for (const auto& b : fa.function->blocks) {
      const auto& st = fa.exit(b.id);
      if (!st) continue;
      for (const auto& [node, path] : structValues(*st, s)) {
        const auto& written = st->nodes[node].written;
        auto m = written.find(concat(path, {unionField}));
        if (m == written.end()) continue;
        TagSet n = labelValues(tagLabel(*st, node, path, tagField));
        out[m->second].insert(n.begin(), n.end());
      }
    }
  }
  return out;
}

TagSet TagHeuristic::collectAllTags(const std::string& s, const std::string&, const std::string& tagField) const {
  TagSet out;
  for (const auto& fa : analyses_)
    for (const auto& block : fa.states)
      for (const auto& st : block) {
        if (!st) continue;
        for (const auto& [node, path] : structValues(*st, s)) {
          TagSet n = labelValues(tagLabel(*st, node, path, tagField));
          out.insert(n.begin(), n.end());
        }
      }
  return out;
}

std::optional<TagAssociation> TagHeuristic::identify(const std::string& s, const std::string& unionField,
                                                     const std::string& tagField, std::string* reason) const {
  auto res = collectFromAccesses(s, unionField, tagField, reason);
  if (!res) return std::nullopt;
  TagAssociation a;
  a.fieldTags = std::move(res->fieldTags);
  a.accessTags = std::move(res->accessTags);
  auto fromStructs = collectFromStructs(s, unionField, tagField);
  const TypeDef* sdef = program_.findType(s);
  const FieldDecl* uf = sdef ? sdef->field(unionField) : nullptr;
  const TypeDef* udef = uf && uf->type->isNamed() ? program_.findType(uf->type->name) : nullptr;
  if (udef) {
    for (const auto& f : udef->fields) {
      TagSet tags;
      for (auto v : fromStructs[f.name])
        if (!a.accessTags.count(v)) tags.insert(v);
      if (intersects(a.structTags, tags)) {
        if (reason) *reason = "block-end states associate one tag with several members";
        return std::nullopt;
      }
      if (!tags.empty()) a.fieldTags[f.name].insert(tags.begin(), tags.end());
      a.structTags.insert(tags.begin(), tags.end());
    }
  }
  if (a.fieldTags.empty()) {
    if (reason) *reason = "no tag value is associated with any member";
    return std::nullopt;
  }
  a.allTags = collectAllTags(s, unionField, tagField);
  for (auto v : a.allTags)
    if (!a.accessTags.count(v) && !a.structTags.count(v)) a.remTags.insert(v);
  return a;
}

UnionReport TagHeuristic::select(const std::string& s, const std::string& unionField,
                                 const std::vector<std::string>& eligible) const {
  UnionReport r;
  r.structName = s;
  r.unionField = unionField;
  if (const TypeDef* def = program_.findType(s))
    if (const FieldDecl* f = def->field(unionField)) r.unionType = f->type->name;
  size_t best = 0;
  for (const auto& f : eligible) {
    FieldOutcome o;
    o.field = f;
    o.association = identify(s, unionField, f, &o.reason);
    o.identified = o.association.has_value();
    if (o.identified) {
      size_t count = o.association->fieldTagUnion().size();
      if (!r.tagField || count > best) {
        r.tagField = f;
        r.association = *o.association;
        best = count;
      }
    }
    r.outcomes.push_back(std::move(o));
  }
  return r;
}

TagReport identifyTagFields(const Program& program, const CandidateSet& candidates,
                            const std::vector<FunctionAnalysis>& analyses) {
  TagHeuristic h(program, analyses);
  TagReport report;
  for (const auto& [s, u] : candidates.unions) {
    auto it = candidates.eligibleFields.find(s);
    static const std::vector<std::string> none;
    report.unions.push_back(h.select(s, u, it == candidates.eligibleFields.end() ? none : it->second));
  }
  return report;
}

}  // namespace untag
