#include <algorithm>
#include <functional>
#include <set>
#include <stdexcept>

#include "untag/frontend.hpp"
#include "untag/pipeline.hpp"
#include "untag/transform.hpp"

namespace untag {

int TransformResult::totalHelperCalls() const {
  int n = 0;
  for (const auto& [_, c] : helperCalls) n += c;
  return n;
}

nlohmann::json TransformResult::logJson() const {
  nlohmann::json sitesJson = nlohmann::json::array();
  std::map<std::string, int> counts;
  for (const auto& s : sites) {
    sitesJson.push_back({{"function", s.function},
                         {"line", s.loc.line},
                         {"column", s.loc.column},
                         {"struct", s.structName},
                         {"strategy", strategyName(s.strategy)}});
    ++counts[strategyName(s.strategy)];
  }
  nlohmann::json schemesJson = nlohmann::json::array();
  for (const auto& sc : schemes) {
    nlohmann::json vs = nlohmann::json::array();
    for (const auto& v : sc.variants)
      vs.push_back({{"tag", v.tag},
                    {"name", v.name},
                    {"field", v.field.empty() ? nlohmann::json(nullptr) : nlohmann::json(v.field)}});
    schemesJson.push_back({{"struct", sc.structName},
                           {"union_field", sc.unionField},
                           {"enum", sc.enumName},
                           {"tag_field", sc.tagField},
                           {"variants", vs}});
  }
  return {{"schemes", schemesJson},
          {"sites", sitesJson},
          {"strategy_counts", counts},
          {"helper_calls", helperCalls},
          {"total_helper_calls", totalHelperCalls()}};
}

namespace {

ExprPtr makeExpr(ExprKind k, SourceLoc loc) {
  auto e = std::make_unique<Expr>();
  e->kind = k;
  e->loc = loc;
  return e;
}

StmtPtr makeStmt(StmtKind k, SourceLoc loc) {
  auto s = std::make_unique<Stmt>();
  s->kind = k;
  s->loc = loc;
  return s;
}

bool sameExpr(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.name != b.name || a.value != b.value || a.operands.size() != b.operands.size())
    return false;
  for (size_t i = 0; i < a.operands.size(); ++i)
    if (!sameExpr(*a.operands[i], *b.operands[i])) return false;
  return true;
}

void varsOf(const Expr& e, std::set<std::string>& out) {
  visitExpr(e, [&](const Expr& x) {
    if (x.kind == ExprKind::Var) out.insert(x.name);
  });
}

bool hasCall(const Expr& e) {
  bool found = false;
  visitExpr(e, [&](const Expr& x) {
    if (x.kind == ExprKind::Call || x.kind == ExprKind::MethodCall) found = true;
  });
  return found;
}

// Pre-order walk over every expression slot; `fn` returns true to skip the
// subtree it was given.
void forEachSlot(ExprPtr& slot, const std::function<bool(ExprPtr&)>& fn) {
  if (!slot || fn(slot)) return;
  for (auto& o : slot->operands) forEachSlot(o, fn);
}

void forEachSlot(std::vector<StmtPtr>& body, const std::function<bool(ExprPtr&)>& fn) {
  for (auto& s : body) {
    forEachSlot(s->lhs, fn);
    forEachSlot(s->expr, fn);
    forEachSlot(s->body, fn);
    forEachSlot(s->elseBody, fn);
    for (auto& c : s->cases) forEachSlot(c.body, fn);
    if (s->defaultBody) forEachSlot(*s->defaultBody, fn);
    for (auto& a : s->arms) forEachSlot(a.body, fn);
  }
}

enum class Mode { Read, Write };

class Rewriter {
 public:
  Rewriter(const Program& program, const std::vector<VariantScheme>& schemes, const Analysis& analysis,
           TransformOptions options, TransformResult& out)
      : program_(program), options_(options), out_(out) {
    for (const auto& s : schemes) {
      schemes_[s.structName] = &s;
      TagHeuristic h = analysis.heuristic();
      for (auto& obs : h.accesses(s.structName, s.unionField, s.tagField))
        observations_[{obs.function, obs.exprId}].push_back(obs);
    }
  }

  void function(Function& f) {
    fn_ = f.name;
    used_.clear();
    for (const auto& g : program_.globals) used_.insert(g.name);
    for (const auto& p : f.params) used_.insert(p.name);
    visitStmts(f.body, [&](const Stmt& s) {
      if (s.kind == StmtKind::VarDecl) used_.insert(s.name);
    });
    stmts(f.body);
  }

 private:
  const Program& program_;
  TransformOptions options_;
  TransformResult& out_;
  std::map<std::string, const VariantScheme*> schemes_;
  std::map<std::pair<std::string, int>, std::vector<AccessObservation>> observations_;
  std::string fn_;
  std::set<std::string> used_;
  std::set<const Expr*> derefMut_;  // Deref nodes wrapping a deref_f_mut call

  const VariantScheme* schemeOf(const TypePtr& t) const {
    if (!t || !t->isNamed()) return nullptr;
    auto it = schemes_.find(t->name);
    return it == schemes_.end() ? nullptr : it->second;
  }

  const VariantScheme* tagRead(const Expr& e) const {
    if (e.kind != ExprKind::Field) return nullptr;
    const VariantScheme* s = schemeOf(e.operands[0]->type);
    return s && e.name == s->tagField ? s : nullptr;
  }

  // `X.u` naming a tagged union as a whole.
  const VariantScheme* unionRef(const Expr& e) const {
    if (e.kind != ExprKind::Field) return nullptr;
    const VariantScheme* s = schemeOf(e.operands[0]->type);
    return s && e.name == s->unionField ? s : nullptr;
  }

  // `X.u.f`.
  const VariantScheme* memberAccess(const Expr& e) const {
    if (e.kind != ExprKind::Field) return nullptr;
    return unionRef(*e.operands[0]);
  }

  // Side-effect-free place built from variables, derefs and ordinary fields.
  bool purePath(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::Var: return !e.fnValue;
      case ExprKind::Deref: return purePath(*e.operands[0]);
      case ExprKind::Field: return !unionRef(e) && !memberAccess(e) && !tagRead(e) && purePath(*e.operands[0]);
      default: return false;
    }
  }

  std::string fresh(const std::string& base) {
    std::string n = base;
    for (int i = 1; used_.count(n); ++i) n = base + std::to_string(i);
    used_.insert(n);
    return n;
  }

  void site(SourceLoc loc, Strategy s, const VariantScheme& sc) { out_.sites.push_back({fn_, loc, s, sc.structName}); }

  ExprPtr helperCall(const std::string& name, ExprPtr receiver, bool arrow, SourceLoc loc) {
    ++out_.helperCalls[name];
    auto m = makeExpr(ExprKind::MethodCall, loc);
    m->name = name;
    m->arrow = arrow;
    m->operands.push_back(std::move(receiver));
    return m;
  }

  // ---------------------------------------------------------------------
  // Naive rewriting

  ExprPtr rewrite(ExprPtr e, Mode mode) {
    if (!e) return e;
    if (const VariantScheme* s = tagRead(*e)) {
      site(e->loc, Strategy::NaiveReadTag, *s);
      ExprPtr recv = rewrite(std::move(e->operands[0]), Mode::Read);
      return helperCall(s->tagField, std::move(recv), e->arrow, e->loc);
    }
    if (const VariantScheme* s = memberAccess(*e)) {
      ExprPtr u = std::move(e->operands[0]);
      u->operands[0] = rewrite(std::move(u->operands[0]), mode);
      if (mode == Mode::Read) {
        site(e->loc, Strategy::NaiveGet, *s);
        return helperCall("get_" + e->name, std::move(u), false, e->loc);
      }
      site(e->loc, Strategy::NaiveDerefMut, *s);
      auto d = makeExpr(ExprKind::Deref, e->loc);
      d->operands.push_back(helperCall("deref_" + e->name + "_mut", std::move(u), false, e->loc));
      derefMut_.insert(d.get());
      return d;
    }
    switch (e->kind) {
      case ExprKind::Field: e->operands[0] = rewrite(std::move(e->operands[0]), mode); return e;
      case ExprKind::AddrOf: {
        ExprPtr inner = rewrite(std::move(e->operands[0]), Mode::Write);
        if (derefMut_.count(inner.get())) return std::move(inner->operands[0]);
        e->operands[0] = std::move(inner);
        return e;
      }
      default:
        for (auto& o : e->operands) o = rewrite(std::move(o), Mode::Read);
        return e;
    }
  }

  void stmts(std::vector<StmtPtr>& body) {
    if (!options_.naiveOnly) consolidate(body);
    for (auto& s : body) stmt(s);
  }

  void stmt(StmtPtr& s) {
    switch (s->kind) {
      case StmtKind::Assign:
        if (const VariantScheme* sc = s->assignOp.empty() ? tagRead(*s->lhs) : nullptr) {
          site(s->loc, Strategy::NaiveSetTag, *sc);
          auto call = helperCall("set_" + sc->tagField, rewrite(std::move(s->lhs->operands[0]), Mode::Write),
                                 s->lhs->arrow, s->loc);
          call->operands.push_back(rewrite(std::move(s->expr), Mode::Read));
          auto es = makeStmt(StmtKind::ExprStmt, s->loc);
          es->expr = std::move(call);
          s = std::move(es);
          return;
        }
        s->lhs = rewrite(std::move(s->lhs), Mode::Write);
        s->expr = rewrite(std::move(s->expr), Mode::Read);
        return;
      case StmtKind::If:
        if (!options_.naiveOnly && ifLet(s)) return;
        s->expr = rewrite(std::move(s->expr), Mode::Read);
        stmts(s->body);
        stmts(s->elseBody);
        return;
      case StmtKind::Switch:
        if (!options_.naiveOnly && match(s)) return;
        s->expr = rewrite(std::move(s->expr), Mode::Read);
        for (auto& c : s->cases) stmts(c.body);
        if (s->defaultBody) stmts(*s->defaultBody);
        return;
      default:
        s->expr = rewrite(std::move(s->expr), Mode::Read);
        stmts(s->body);
        stmts(s->elseBody);
        return;
    }
  }

  // ---------------------------------------------------------------------
  // Idiomatic rewriting

  // Checks that the union accesses in `body` all go through `x` to one member
  // whose variants are exactly `variants`, that the must analysis knows the
  // tag at each of them to lie in `tags`, and that nothing else touches the
  // union or its tag. Collects the access slots.
  bool guardedBody(std::vector<StmtPtr>& body, const VariantScheme& sc, const Expr& x, const std::set<int64_t>& tags,
                   const std::vector<const Variant*>& variants, std::vector<ExprPtr*>& accesses) {
    bool ok = true;
    std::string member;
    visitStmts(body, [&](const Stmt& s) {
      if (s.kind == StmtKind::Assign && tagRead(*s.lhs) == &sc) ok = false;
    });
    forEachSlot(body, [&](ExprPtr& slot) {
      if (!ok) return true;
      const Expr& e = *slot;
      if (memberAccess(e) == &sc) {
        const Expr& base = *e.operands[0]->operands[0];
        if (!sameExpr(base, x) || (!member.empty() && member != e.name)) {
          ok = false;
          return true;
        }
        member = e.name;
        auto it = observations_.find({fn_, e.id});
        if (it == observations_.end()) {
          ok = false;
          return true;
        }
        for (const auto& obs : it->second)
          if (!obs.tag || !std::includes(tags.begin(), tags.end(), obs.tag->values.begin(), obs.tag->values.end()))
            ok = false;
        accesses.push_back(&slot);
        return true;
      }
      if (unionRef(e) == &sc) ok = false;
      return false;
    });
    if (!ok) return false;
    if (!member.empty())
      for (const Variant* v : variants)
        if (v->field != member) return false;
    return true;
  }

  // Replaces each guarded access with `*binding`.
  void bind(const std::vector<ExprPtr*>& accesses, const std::string& binding) {
    for (ExprPtr* slot : accesses) {
      SourceLoc loc = (*slot)->loc;
      auto v = makeExpr(ExprKind::Var, loc);
      v->name = binding;
      auto d = makeExpr(ExprKind::Deref, loc);
      d->operands.push_back(std::move(v));
      *slot = std::move(d);
    }
  }

  std::vector<Pattern> patternsFor(const VariantScheme& sc, const std::vector<const Variant*>& vs, bool bound,
                                   const std::string& binding) {
    std::vector<Pattern> out;
    for (const Variant* v : vs) {
      Pattern p;
      p.enumName = sc.enumName;
      p.variant = v->name;
      if (v->payload) {
        p.binding = bound ? Pattern::Binding::Ref : Pattern::Binding::Wildcard;
        if (bound) p.bindName = binding;
      }
      out.push_back(p);
    }
    return out;
  }

  ExprPtr scrutinee(const Expr& tagExpr, const VariantScheme& sc) {
    auto u = makeExpr(ExprKind::Field, tagExpr.loc);
    u->name = sc.unionField;
    u->arrow = tagExpr.arrow;
    u->operands.push_back(tagExpr.operands[0]->clone());
    return u;
  }

  bool match(StmtPtr& s) {
    const VariantScheme* sc = tagRead(*s->expr);
    if (!sc) return false;
    const Expr& x = *s->expr->operands[0];
    if (!purePath(x)) return false;
    struct Arm {
      std::vector<const Variant*> variants;
      std::vector<ExprPtr*> accesses;
    };
    std::vector<Arm> arms;
    std::set<int64_t> covered;
    for (auto& c : s->cases) {
      Arm a;
      for (auto v : c.values) {
        const Variant* var = sc->byTag(v);
        if (!var) return false;
        a.variants.push_back(var);
        covered.insert(v);
      }
      if (!guardedBody(c.body, *sc, x, std::set<int64_t>(c.values.begin(), c.values.end()), a.variants, a.accesses))
        return false;
      arms.push_back(std::move(a));
    }
    auto m = makeStmt(StmtKind::Match, s->loc);
    m->expr = scrutinee(*s->expr, *sc);
    for (size_t i = 0; i < s->cases.size(); ++i) {
      std::string binding = arms[i].accesses.empty() ? "" : fresh("x");
      bind(arms[i].accesses, binding);
      MatchArm arm{patternsFor(*sc, arms[i].variants, !arms[i].accesses.empty(), binding),
                   std::move(s->cases[i].body)};
      stmts(arm.body);
      m->arms.push_back(std::move(arm));
    }
    if (s->defaultBody || covered.size() < sc->variants.size()) {
      MatchArm arm;
      if (s->defaultBody) arm.body = std::move(*s->defaultBody);
      stmts(arm.body);
      m->arms.push_back(std::move(arm));
    }
    site(s->loc, Strategy::IdiomaticMatch, *sc);
    s = std::move(m);
    return true;
  }

  // Collects `X.tag == c` terms of a condition built from `||`.
  bool equalities(const Expr& c, const VariantScheme*& sc, const Expr*& x, const Expr*& tagExpr,
                  std::vector<int64_t>& values) {
    if (c.kind == ExprKind::Binary && c.op == Op::Or)
      return equalities(*c.operands[0], sc, x, tagExpr, values) && equalities(*c.operands[1], sc, x, tagExpr, values);
    if (c.kind != ExprKind::Binary || c.op != Op::Eq) return false;
    const Expr* t = c.operands[0].get();
    const Expr* k = c.operands[1].get();
    if (k->kind != ExprKind::IntLit) std::swap(t, k);
    if (k->kind != ExprKind::IntLit) return false;
    const VariantScheme* s = tagRead(*t);
    if (!s || (sc && s != sc)) return false;
    const Expr& base = *t->operands[0];
    if (x && !sameExpr(*x, base)) return false;
    sc = s;
    x = &base;
    if (!tagExpr) tagExpr = t;
    if (std::find(values.begin(), values.end(), k->value) == values.end()) values.push_back(k->value);
    return true;
  }

  bool ifLet(StmtPtr& s) {
    const VariantScheme* sc = nullptr;
    const Expr* x = nullptr;
    const Expr* tagExpr = nullptr;
    std::vector<int64_t> values;
    if (!equalities(*s->expr, sc, x, tagExpr, values) || !purePath(*x)) return false;
    std::vector<const Variant*> variants;
    for (auto v : values) {
      const Variant* var = sc->byTag(v);
      if (!var) return false;
      variants.push_back(var);
    }
    std::vector<ExprPtr*> accesses;
    if (!guardedBody(s->body, *sc, *x, std::set<int64_t>(values.begin(), values.end()), variants, accesses))
      return false;
    auto l = makeStmt(StmtKind::IfLet, s->loc);
    std::string binding = accesses.empty() ? "" : fresh("x");
    bind(accesses, binding);
    l->patterns = patternsFor(*sc, variants, !accesses.empty(), binding);
    l->expr = scrutinee(*tagExpr, *sc);
    l->body = std::move(s->body);
    l->hasElse = s->hasElse;
    l->elseBody = std::move(s->elseBody);
    stmts(l->body);
    stmts(l->elseBody);
    site(s->loc, values.size() == 1 ? Strategy::IdiomaticIfLet : Strategy::IdiomaticOrPattern, *sc);
    s = std::move(l);
    return true;
  }

  // ---------------------------------------------------------------------
  // Consolidation of a tag write and a member write into one construction

  struct WriteInfo {
    const VariantScheme* scheme = nullptr;
    const Expr* x = nullptr;
    bool isTag = false;
    int64_t tag = 0;
    std::string member;
    const Expr* rhs = nullptr;
  };

  bool touchesTagged(const Expr& e) const {
    bool found = false;
    visitExpr(e, [&](const Expr& x) {
      if (tagRead(x) || unionRef(x)) found = true;
    });
    return found;
  }

  std::optional<WriteInfo> classify(const Stmt& s) const {
    if (s.kind != StmtKind::Assign || !s.assignOp.empty()) return std::nullopt;
    WriteInfo w;
    if ((w.scheme = tagRead(*s.lhs))) {
      if (s.expr->kind != ExprKind::IntLit) return std::nullopt;
      w.isTag = true;
      w.tag = s.expr->value;
      w.x = s.lhs->operands[0].get();
    } else if ((w.scheme = memberAccess(*s.lhs))) {
      if (hasCall(*s.expr) || touchesTagged(*s.expr)) return std::nullopt;
      w.member = s.lhs->name;
      w.rhs = s.expr.get();
      w.x = s.lhs->operands[0]->operands[0].get();
    } else {
      return std::nullopt;
    }
    if (!purePath(*w.x)) return std::nullopt;
    return w;
  }

  // A statement that may sit between the two writes: no calls, no access
  // to any tagged struct's tag or union, no write to the variables the
  // construction depends on, and no write to a field named on its path or
  // read by its payload.
  bool inert(const Stmt& s, const std::set<std::string>& protectedVars,
             const std::set<std::string>& protectedFields) const {
    auto clean = [&](const ExprPtr& e) { return !e || (!hasCall(*e) && !touchesTagged(*e)); };
    switch (s.kind) {
      case StmtKind::VarDecl: return clean(s.expr) && !protectedVars.count(s.name);
      case StmtKind::Assign:
        if (!clean(s.expr) || !clean(s.lhs)) return false;
        if (s.lhs->kind == ExprKind::Var) return !protectedVars.count(s.lhs->name);
        return s.lhs->kind == ExprKind::Field && !protectedFields.count(s.lhs->name);
      case StmtKind::Print:
      case StmtKind::ExprStmt: return clean(s.expr);
      default: return false;
    }
  }

  static void fieldsOf(const Expr& e, std::set<std::string>& out) {
    visitExpr(e, [&](const Expr& x) {
      if (x.kind == ExprKind::Field) out.insert(x.name);
    });
  }

  void consolidate(std::vector<StmtPtr>& body) {
    for (size_t i = 0; i < body.size(); ++i) {
      auto first = classify(*body[i]);
      if (!first) continue;
      for (size_t j = i + 1; j < body.size(); ++j) {
        auto second = classify(*body[j]);
        if (second && second->scheme == first->scheme && second->isTag != first->isTag &&
            sameExpr(*first->x, *second->x)) {
          const WriteInfo& tag = first->isTag ? *first : *second;
          const WriteInfo& mem = first->isTag ? *second : *first;
          const Variant* v = tag.scheme->byTag(tag.tag);
          if (!v || v->field != mem.member) break;
          const Stmt& tagStmt = first->isTag ? *body[i] : *body[j];
          auto lhs = makeExpr(ExprKind::Field, body[j]->loc);
          lhs->name = tag.scheme->unionField;
          lhs->arrow = tagStmt.lhs->arrow;
          lhs->operands.push_back(tag.x->clone());
          auto ctor = makeExpr(ExprKind::VariantCtor, body[j]->loc);
          ctor->enumName = tag.scheme->enumName;
          ctor->variant = v->name;
          ctor->operands.push_back(mem.rhs->clone());
          auto a = makeStmt(StmtKind::Assign, body[j]->loc);
          a->lhs = std::move(lhs);
          a->expr = std::move(ctor);
          site(body[j]->loc, Strategy::ConsolidateConstruction, *tag.scheme);
          body[j] = std::move(a);
          body.erase(body.begin() + static_cast<std::ptrdiff_t>(i));
          --i;
          break;
        }
        std::set<std::string> deps;
        varsOf(*first->x, deps);
        if (first->rhs) varsOf(*first->rhs, deps);
        if (second && second->rhs) varsOf(*second->rhs, deps);
        std::set<std::string> fields;
        fieldsOf(*first->x, fields);
        if (first->rhs) fieldsOf(*first->rhs, fields);
        if (second && second->rhs) fieldsOf(*second->rhs, fields);
        if (!inert(*body[j], deps, fields)) break;
      }
    }
  }
};

// A union member the program touches that no tag maps to, or nullopt.
std::optional<std::string> unmappedMember(const Program& program, const VariantScheme& sc) {
  std::optional<std::string> out;
  for (const auto& f : program.functions)
    visitExprs(f.body, [&](const Expr& e) {
      if (out || e.kind != ExprKind::Field) return;
      const Expr& u = *e.operands[0];
      if (u.kind != ExprKind::Field || u.name != sc.unionField) return;
      const TypePtr& t = u.operands[0]->type;
      if (!t || !t->isNamed() || t->name != sc.structName) return;
      if (sc.ofField(e.name).empty()) out = e.name;
    });
  return out;
}

}  // namespace

TransformResult transform(const Program& program, const Analysis& analysis, TransformOptions options) {
  TransformResult result;
  std::set<std::pair<std::string, std::string>> usedTags;
  for (const UnionReport* u : analysis.report.tagged()) {
    if (!usedTags.insert({u->structName, *u->tagField}).second) continue;
    VariantScheme sc = makeScheme(program, *u);
    if (unmappedMember(program, sc)) continue;
    result.schemes.push_back(std::move(sc));
  }
  if (result.schemes.empty()) {
    result.text = emit(program, Dialect::MiniC);
    result.program = parseOrThrow(result.text, Dialect::MiniTag);
    return result;
  }

  Program p = program.clone();
  p.dialect = Dialect::MiniTag;
  Rewriter rw(program, result.schemes, analysis, options, result);
  for (auto& f : p.functions) rw.function(f);

  for (const auto& sc : result.schemes) {
    TypeDef* u = p.findType(sc.enumName);
    u->kind = TypeDefKind::Enum;
    u->anonymous = false;
    u->fields.clear();
    for (const auto& v : sc.variants) u->variants.push_back(VariantDecl{v.name, v.payload});
    TypeDef* s = p.findType(sc.structName);
    s->fields.erase(std::remove_if(s->fields.begin(), s->fields.end(),
                                   [&](const FieldDecl& f) { return f.name == sc.tagField; }),
                    s->fields.end());
    // Place the enum right after its struct.
    auto ui = std::find_if(p.types.begin(), p.types.end(), [&](const TypeDef& d) { return d.name == sc.enumName; });
    TypeDef moved = std::move(*ui);
    p.types.erase(ui);
    auto si = std::find_if(p.types.begin(), p.types.end(), [&](const TypeDef& d) { return d.name == sc.structName; });
    p.types.insert(si + 1, std::move(moved));
  }

  // Helpers are parsed against the rewritten types and placed first.
  Program typesOnly;
  typesOnly.dialect = Dialect::MiniTag;
  for (const auto& t : p.types) typesOnly.types.push_back(t);
  std::string helperText = emit(typesOnly, Dialect::MiniTag);
  for (const auto& sc : result.schemes) helperText += "\n" + helperSource(program, sc);
  auto helpers = parse(helperText, Dialect::MiniTag);
  if (!helpers.ok())
    throw std::logic_error("generated helpers do not type-check: " + helpers.diagnostics[0].str() + "\n" +
                           helperText);
  std::vector<Function> fns;
  for (auto& f : helpers.program->functions) fns.push_back(std::move(f));
  for (auto& f : p.functions) fns.push_back(std::move(f));
  p.functions = std::move(fns);

  result.text = emit(p, Dialect::MiniTag);
  auto reparsed = parse(result.text, Dialect::MiniTag);
  if (!reparsed.ok())
    throw std::logic_error("transformed program does not type-check: " + reparsed.diagnostics[0].str() + "\n" +
                           result.text);
  result.program = std::move(*reparsed.program);
  return result;
}

}  // namespace untag
