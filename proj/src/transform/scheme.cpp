#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

#include "untag/transform.hpp"

namespace untag {

const char* strategyName(Strategy s) {
  switch (s) {
    case Strategy::IdiomaticMatch: return "idiomatic-match";
    case Strategy::IdiomaticIfLet: return "idiomatic-if-let";
    case Strategy::IdiomaticOrPattern: return "idiomatic-or-pattern";
    case Strategy::ConsolidateConstruction: return "consolidate-construction";
    case Strategy::NaiveReadTag: return "naive-read-tag";
    case Strategy::NaiveGet: return "naive-get";
    case Strategy::NaiveSetTag: return "naive-set-tag";
    case Strategy::NaiveDerefMut: return "naive-deref-mut";
  }
  return "?";
}

bool isIdiomatic(Strategy s) {
  return s == Strategy::IdiomaticMatch || s == Strategy::IdiomaticIfLet || s == Strategy::IdiomaticOrPattern ||
         s == Strategy::ConsolidateConstruction;
}

const Variant* VariantScheme::byTag(int64_t tag) const {
  for (const auto& v : variants)
    if (v.tag == tag) return &v;
  return nullptr;
}

std::vector<const Variant*> VariantScheme::ofField(const std::string& field) const {
  std::vector<const Variant*> out;
  for (const auto& v : variants)
    if (v.field == field) out.push_back(&v);
  return out;
}

// Negative tags cannot appear in an identifier, so -3 is spelled n3.
static std::string tagSpelling(int64_t t) { return t < 0 ? "n" + std::to_string(-t) : std::to_string(t); }

VariantScheme makeScheme(const Program& program, const UnionReport& report) {
  VariantScheme s;
  s.structName = report.structName;
  s.unionField = report.unionField;
  s.enumName = report.unionType;
  s.tagField = *report.tagField;
  const TypeDef* udef = program.findType(report.unionType);
  std::map<int64_t, Variant> byTag;
  for (const auto& [field, tags] : report.association.fieldTags) {
    const FieldDecl* fd = udef ? udef->field(field) : nullptr;
    for (auto t : tags) byTag[t] = Variant{t, field + tagSpelling(t), field, fd ? fd->type : nullptr};
  }
  for (auto t : report.association.remTags) byTag[t] = Variant{t, "Empty" + tagSpelling(t), "", nullptr};
  std::set<std::string> names;
  for (auto& [_, v] : byTag) {
    if (!names.insert(v.name).second) throw std::logic_error("duplicate variant name " + v.name);
    s.variants.push_back(std::move(v));
  }
  return s;
}

namespace {

std::string patternOf(const VariantScheme& s, const Variant& v, const std::string& binding) {
  std::string p = s.enumName + "::" + v.name;
  if (v.payload) p += "(" + binding + ")";
  return p;
}

std::string alternatives(const VariantScheme& s, const std::vector<const Variant*>& vs, const std::string& binding) {
  std::string out;
  for (size_t i = 0; i < vs.size(); ++i) out += (i ? " | " : "") + patternOf(s, *vs[i], binding);
  return out;
}

}  // namespace

std::string helperSource(const Program& program, const VariantScheme& s) {
  std::ostringstream o;
  const std::string& E = s.enumName;
  o << "impl " << s.structName << " {\n";
  o << "  int " << s.tagField << "() {\n";
  o << "    match (self->" << s.unionField << ") {\n";
  for (const auto& v : s.variants)
    o << "      " << patternOf(s, v, "_") << " => {\n        return " << v.tag << ";\n      }\n";
  o << "    }\n  }\n\n";
  o << "  void set_" << s.tagField << "(int t) {\n";
  o << "    switch (t) {\n";
  for (const auto& v : s.variants) {
    o << "      case " << v.tag << ": {\n";
    if (!v.payload) {
      o << "        self->" << s.unionField << " = " << E << "::" << v.name << ";\n";
    } else {
      // Variants of the same member share the payload, so it is kept.
      o << "        " << v.payload->str() << " p;\n";
      o << "        if let " << alternatives(s, s.ofField(v.field), "ref x") << " = self->" << s.unionField
        << " {\n          p = *x;\n        }\n";
      o << "        self->" << s.unionField << " = " << E << "::" << v.name << "(p);\n";
    }
    o << "      }\n";
  }
  o << "      default: {\n        abort();\n      }\n";
  o << "    }\n  }\n}\n\n";

  const TypeDef* udef = program.findType(s.enumName);
  o << "impl " << E << " {\n";
  bool first = true;
  for (const auto& f : udef->fields) {
    auto vs = s.ofField(f.name);
    if (vs.empty()) continue;
    if (!first) o << "\n";
    first = false;
    std::string T = f.type->str();
    o << "  " << T << " get_" << f.name << "() {\n";
    o << "    if let " << alternatives(s, vs, "ref x") << " = *self {\n      return *x;\n    }\n";
    o << "    abort();\n  }\n\n";
    o << "  " << T << "* deref_" << f.name << "_mut() {\n";
    o << "    if let " << alternatives(s, vs, "_") << " = *self {\n    } else {\n";
    o << "      " << T << " d;\n      *self = " << E << "::" << vs[0]->name << "(d);\n    }\n";
    o << "    if let " << alternatives(s, vs, "ref x") << " = *self {\n      return x;\n    }\n";
    o << "    abort();\n  }\n";
  }
  o << "}\n";
  return o.str();
}

}  // namespace untag
