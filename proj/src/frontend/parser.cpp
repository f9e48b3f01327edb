#include <cctype>
#include <set>
#include <sstream>

#include "untag/frontend.hpp"

namespace untag {

std::string Diagnostic::str() const {
  static const char* names[] = {"lexical error", "syntax error", "unknown type", "duplicate definition",
                                "type error", "dialect violation"};
  std::ostringstream os;
  os << loc.line << ":" << loc.column << ": " << names[static_cast<int>(kind)] << ": " << message;
  return os.str();
}

static std::string joinDiags(const std::vector<Diagnostic>& diags) {
  std::string s;
  for (const auto& d : diags) {
    if (!s.empty()) s += "\n";
    s += d.str();
  }
  return s;
}

DiagnosticError::DiagnosticError(std::vector<Diagnostic> diags)
    : std::runtime_error(joinDiags(diags)), diags_(std::move(diags)) {}

namespace {

enum class Tok { Int, Ident, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  int64_t value = 0;
  SourceLoc loc;
};

[[noreturn]] void fail(Diagnostic::Kind kind, SourceLoc loc, std::string msg) {
  throw DiagnosticError({Diagnostic{kind, loc, std::move(msg)}});
}

std::vector<Token> lex(const std::string& src) {
  static const char* puncts[] = {"::", "->", "+=", "-=", "*=", "/=", "%=", "==", "!=", "<=", ">=", "&&", "||",
                                 "=>", "{",  "}",  "(",  ")",  ";",  ",",  ":",  ".",  "*",  "&",  "+",  "-",
                                 "/",  "%",  "=",  "<",  ">",  "!",  "|"};
  std::vector<Token> out;
  size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](size_t n) {
    for (size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '*') {
      SourceLoc start{line, col};
      advance(2);
      while (i + 1 < src.size() && !(src[i] == '*' && src[i + 1] == '/')) advance(1);
      if (i + 1 >= src.size()) fail(Diagnostic::Kind::Lexical, start, "unterminated comment");
      advance(2);
      continue;
    }
    Token t;
    t.loc = {line, col};
    if (std::isdigit(static_cast<unsigned char>(c))) {
      size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Tok::Int;
      t.text = src.substr(i, j - i);
      try {
        t.value = std::stoll(t.text);
      } catch (...) {
        fail(Diagnostic::Kind::Lexical, t.loc, "integer literal out of range: " + t.text);
      }
      advance(j - i);
      out.push_back(t);
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      t.kind = Tok::Ident;
      t.text = src.substr(i, j - i);
      advance(j - i);
      out.push_back(t);
      continue;
    }
    bool matched = false;
    for (const char* p : puncts) {
      size_t n = std::char_traits<char>::length(p);
      if (src.compare(i, n, p) == 0) {
        t.kind = Tok::Punct;
        t.text = p;
        advance(n);
        out.push_back(t);
        matched = true;
        break;
      }
    }
    if (!matched) fail(Diagnostic::Kind::Lexical, t.loc, std::string("unexpected character '") + c + "'");
  }
  Token end;
  end.kind = Tok::End;
  end.loc = {line, col};
  out.push_back(end);
  return out;
}

const std::set<std::string> kKeywords = {"struct", "union", "enum",  "impl",  "int",   "void",
                                         "fn",     "if",    "else",  "while", "switch", "case",
                                         "default", "match", "return", "print", "abort", "new",
                                         "null",   "let",   "ref"};

class Parser {
 public:
  Parser(std::vector<Token> toks, Dialect dialect) : toks_(std::move(toks)) { program_.dialect = dialect; }

  Program run() {
    prescan();
    while (!at(Tok::End)) topLevel();
    return std::move(program_);
  }

 private:
  std::vector<Token> toks_;
  size_t pos_ = 0;
  Program program_;
  std::set<std::string> typeNames_;
  int constGroups_ = 0;

  const Token& peek(size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at(Tok k) const { return peek().kind == k; }
  bool isPunct(const char* p, size_t k = 0) const { return peek(k).kind == Tok::Punct && peek(k).text == p; }
  bool isWord(const char* w, size_t k = 0) const { return peek(k).kind == Tok::Ident && peek(k).text == w; }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void syntax(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    fail(Diagnostic::Kind::Syntax, t.loc, msg + ", got " + got);
  }

  void expect(const char* p) {
    if (!isPunct(p)) syntax(std::string("expected '") + p + "'");
    take();
  }
  bool accept(const char* p) {
    if (!isPunct(p)) return false;
    take();
    return true;
  }
  void expectWord(const char* w) {
    if (!isWord(w)) syntax(std::string("expected '") + w + "'");
    take();
  }

  std::string ident(const char* what) {
    if (!at(Tok::Ident) || kKeywords.count(peek().text)) syntax(std::string("expected ") + what);
    return take().text;
  }

  void prescan() {
    for (size_t i = 0; i + 2 < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.kind == Tok::Ident && (t.text == "struct" || t.text == "union" || t.text == "enum") &&
          toks_[i + 1].kind == Tok::Ident && toks_[i + 2].kind == Tok::Punct && toks_[i + 2].text == "{")
        typeNames_.insert(toks_[i + 1].text);
    }
  }

  bool startsType(size_t k = 0) const {
    const Token& t = peek(k);
    if (t.kind != Tok::Ident) return false;
    if (t.text == "int" || t.text == "void" || t.text == "fn" || t.text == "struct" || t.text == "union")
      return true;
    return typeNames_.count(t.text) && !(peek(k + 1).kind == Tok::Punct && peek(k + 1).text == "::");
  }

  TypePtr type() {
    TypePtr t;
    if (isWord("int")) {
      take();
      t = Type::Int();
    } else if (isWord("void")) {
      take();
      t = Type::Void();
    } else if (isWord("fn")) {
      take();
      t = Type::Fn();
    } else {
      if (isWord("struct") || isWord("union")) take();
      t = Type::Named(ident("type name"));
    }
    while (accept("*")) t = Type::PointerTo(t);
    return t;
  }

  void addType(TypeDef def) {
    for (const auto& existing : program_.types)
      if (existing.name == def.name)
        fail(Diagnostic::Kind::Duplicate, def.loc, "duplicate type '" + def.name + "'");
    typeNames_.insert(def.name);
    program_.types.push_back(std::move(def));
  }

  std::vector<FieldDecl> fieldList(const std::string& owner) {
    std::vector<FieldDecl> fields;
    expect("{");
    while (!accept("}")) {
      SourceLoc loc = peek().loc;
      if (isWord("union") && isPunct("{", 1)) {
        take();
        std::vector<FieldDecl> inner = fieldList("");
        std::string fname = ident("field name");
        expect(";");
        TypeDef u;
        u.name = owner + "_" + fname;
        u.kind = TypeDefKind::Union;
        u.fields = std::move(inner);
        u.anonymous = true;
        u.loc = loc;
        if (owner.empty()) fail(Diagnostic::Kind::Syntax, loc, "nested anonymous unions are not supported");
        addType(std::move(u));
        fields.push_back(FieldDecl{fname, Type::Named(owner + "_" + fname), loc});
        continue;
      }
      TypePtr t = type();
      std::string fname = ident("field name");
      expect(";");
      fields.push_back(FieldDecl{fname, t, loc});
    }
    accept(";");
    for (size_t i = 0; i < fields.size(); ++i)
      for (size_t j = 0; j < i; ++j)
        if (fields[i].name == fields[j].name)
          fail(Diagnostic::Kind::Duplicate, fields[i].loc, "duplicate field '" + fields[i].name + "'");
    return fields;
  }

  void topLevel() {
    SourceLoc loc = peek().loc;
    if ((isWord("struct") || isWord("union")) && peek(1).kind == Tok::Ident && isPunct("{", 2)) {
      bool isUnion = isWord("union");
      take();
      TypeDef def;
      def.name = ident("type name");
      def.kind = isUnion ? TypeDefKind::Union : TypeDefKind::Struct;
      def.loc = loc;
      def.fields = fieldList(isUnion ? "" : def.name);
      addType(std::move(def));
      return;
    }
    if (isWord("enum") && isPunct("{", 1)) {
      take();
      TypeDef def;
      def.name = "consts" + std::to_string(constGroups_++);
      def.kind = TypeDefKind::ConstGroup;
      def.loc = loc;
      expect("{");
      int64_t next = 0;
      while (!accept("}")) {
        std::string n = ident("constant name");
        if (accept("=")) next = signedInt();
        def.constants.emplace_back(n, next++);
        if (!accept(",")) {
          expect("}");
          break;
        }
      }
      accept(";");
      addType(std::move(def));
      return;
    }
    if (isWord("enum")) {
      requireTag(loc, "enum type definitions");
      take();
      TypeDef def;
      def.name = ident("enum name");
      def.kind = TypeDefKind::Enum;
      def.loc = loc;
      expect("{");
      while (!accept("}")) {
        VariantDecl v;
        v.name = ident("variant name");
        if (accept("(")) {
          v.payload = type();
          expect(")");
        }
        def.variants.push_back(v);
        if (!accept(",")) {
          expect("}");
          break;
        }
      }
      accept(";");
      addType(std::move(def));
      return;
    }
    if (isWord("impl")) {
      requireTag(loc, "method definitions");
      take();
      std::string owner = ident("type name");
      expect("{");
      while (!accept("}")) {
        Function f = function();
        f.owner = owner;
        program_.functions.push_back(std::move(f));
      }
      return;
    }
    if (!startsType()) syntax("expected a declaration");
    size_t save = pos_;
    type();
    ident("declaration name");
    bool isFunction = isPunct("(");
    pos_ = save;
    if (isFunction) {
      program_.functions.push_back(function());
      return;
    }
    GlobalVar g;
    g.loc = loc;
    g.type = type();
    g.name = ident("global name");
    expect(";");
    program_.globals.push_back(g);
  }

  void requireTag(SourceLoc loc, const std::string& what) const {
    if (program_.dialect != Dialect::MiniTag)
      fail(Diagnostic::Kind::Dialect, loc, what + " are only allowed in MiniTag");
  }

  int64_t signedInt() {
    bool neg = accept("-");
    if (!at(Tok::Int)) syntax("expected integer");
    int64_t v = take().value;
    return neg ? -v : v;
  }

  Function function() {
    Function f;
    f.loc = peek().loc;
    f.returnType = type();
    f.name = ident("function name");
    expect("(");
    if (!isPunct(")")) {
      do {
        Param p;
        p.type = type();
        p.name = ident("parameter name");
        f.params.push_back(p);
      } while (accept(","));
    }
    expect(")");
    f.body = block();
    return f;
  }

  std::vector<StmtPtr> block() {
    expect("{");
    std::vector<StmtPtr> out;
    while (!accept("}")) {
      if (at(Tok::End)) syntax("expected '}'");
      out.push_back(statement());
    }
    return out;
  }

  StmtPtr make(StmtKind k, SourceLoc loc) {
    auto s = std::make_unique<Stmt>();
    s->kind = k;
    s->loc = loc;
    return s;
  }

  Pattern pattern() {
    Pattern p;
    p.enumName = ident("enum name");
    expect("::");
    p.variant = ident("variant name");
    if (accept("(")) {
      if (isWord("ref")) {
        take();
        p.binding = Pattern::Binding::Ref;
        p.bindName = ident("binding name");
      } else if (isWord("_")) {
        take();
        p.binding = Pattern::Binding::Wildcard;
      } else {
        syntax("expected 'ref' binding or '_'");
      }
      expect(")");
    }
    return p;
  }

  std::vector<Pattern> patternList() {
    std::vector<Pattern> ps;
    ps.push_back(pattern());
    while (accept("|")) ps.push_back(pattern());
    return ps;
  }

  std::vector<StmtPtr> caseBody() {
    std::vector<StmtPtr> out;
    while (!isWord("case") && !isWord("default") && !isPunct("}")) {
      if (at(Tok::End)) syntax("expected '}'");
      out.push_back(statement());
    }
    if (out.size() == 1 && out[0]->kind == StmtKind::Block) {
      auto inner = std::move(out[0]->body);
      return inner;
    }
    return out;
  }

  StmtPtr statement() {
    SourceLoc loc = peek().loc;
    if (isPunct("{")) {
      auto s = make(StmtKind::Block, loc);
      s->body = block();
      return s;
    }
    if (isWord("if") && isWord("let", 1)) {
      requireTag(loc, "if-let statements");
      take();
      take();
      auto s = make(StmtKind::IfLet, loc);
      s->patterns = patternList();
      expect("=");
      s->expr = expression();
      s->body = block();
      if (isWord("else")) {
        take();
        s->hasElse = true;
        s->elseBody = block();
      }
      return s;
    }
    if (isWord("if")) {
      take();
      auto s = make(StmtKind::If, loc);
      expect("(");
      s->expr = expression();
      expect(")");
      s->body = block();
      if (isWord("else")) {
        take();
        s->hasElse = true;
        if (isWord("if"))
          s->elseBody.push_back(statement());
        else
          s->elseBody = block();
      }
      return s;
    }
    if (isWord("while")) {
      take();
      auto s = make(StmtKind::While, loc);
      expect("(");
      s->expr = expression();
      expect(")");
      s->body = block();
      return s;
    }
    if (isWord("switch")) {
      take();
      auto s = make(StmtKind::Switch, loc);
      expect("(");
      s->expr = expression();
      expect(")");
      expect("{");
      while (!accept("}")) {
        if (isWord("case")) {
          SwitchCase c;
          c.loc = peek().loc;
          while (isWord("case")) {
            take();
            if (at(Tok::Ident)) {
              c.valueNames.push_back(ident("case constant"));
              c.values.push_back(0);
            } else {
              c.valueNames.emplace_back();
              c.values.push_back(signedInt());
            }
            expect(":");
          }
          c.body = caseBody();
          s->cases.push_back(std::move(c));
        } else if (isWord("default")) {
          take();
          expect(":");
          if (s->defaultBody) syntax("duplicate default label");
          s->defaultBody = caseBody();
        } else {
          syntax("expected 'case' or 'default'");
        }
      }
      return s;
    }
    if (isWord("match")) {
      requireTag(loc, "match statements");
      take();
      auto s = make(StmtKind::Match, loc);
      expect("(");
      s->expr = expression();
      expect(")");
      expect("{");
      while (!accept("}")) {
        MatchArm arm;
        if (isWord("_")) {
          take();
        } else {
          arm.patterns = patternList();
        }
        expect("=>");
        arm.body = block();
        s->arms.push_back(std::move(arm));
      }
      return s;
    }
    if (isWord("return")) {
      take();
      auto s = make(StmtKind::Return, loc);
      if (!isPunct(";")) s->expr = expression();
      expect(";");
      return s;
    }
    if (isWord("print")) {
      take();
      auto s = make(StmtKind::Print, loc);
      expect("(");
      s->expr = expression();
      expect(")");
      expect(";");
      return s;
    }
    if (isWord("abort")) {
      take();
      auto s = make(StmtKind::Abort, loc);
      expect("(");
      expect(")");
      expect(";");
      return s;
    }
    if (startsType()) {
      auto s = make(StmtKind::VarDecl, loc);
      s->typeArg = type();
      s->name = ident("variable name");
      if (accept("=")) s->expr = expression();
      expect(";");
      return s;
    }
    ExprPtr e = expression();
    static const char* assignOps[] = {"=", "+=", "-=", "*=", "/=", "%="};
    for (const char* op : assignOps) {
      if (isPunct(op)) {
        take();
        auto s = make(StmtKind::Assign, loc);
        std::string o = op;
        s->assignOp = o == "=" ? "" : o.substr(0, 1);
        s->lhs = std::move(e);
        s->expr = expression();
        expect(";");
        return s;
      }
    }
    auto s = make(StmtKind::ExprStmt, loc);
    s->expr = std::move(e);
    expect(";");
    return s;
  }

  ExprPtr node(ExprKind k, SourceLoc loc) {
    auto e = std::make_unique<Expr>();
    e->kind = k;
    e->loc = loc;
    return e;
  }

  ExprPtr binary(ExprPtr l, Op op, ExprPtr r, SourceLoc loc) {
    auto e = node(ExprKind::Binary, loc);
    e->op = op;
    e->operands.push_back(std::move(l));
    e->operands.push_back(std::move(r));
    return e;
  }

  ExprPtr expression() { return orExpr(); }

  ExprPtr orExpr() {
    auto l = andExpr();
    while (isPunct("||")) {
      SourceLoc loc = take().loc;
      l = binary(std::move(l), Op::Or, andExpr(), loc);
    }
    return l;
  }
  ExprPtr andExpr() {
    auto l = eqExpr();
    while (isPunct("&&")) {
      SourceLoc loc = take().loc;
      l = binary(std::move(l), Op::And, eqExpr(), loc);
    }
    return l;
  }
  ExprPtr eqExpr() {
    auto l = relExpr();
    while (isPunct("==") || isPunct("!=")) {
      Token t = take();
      l = binary(std::move(l), t.text == "==" ? Op::Eq : Op::Ne, relExpr(), t.loc);
    }
    return l;
  }
  ExprPtr relExpr() {
    auto l = addExpr();
    while (isPunct("<") || isPunct("<=") || isPunct(">") || isPunct(">=")) {
      Token t = take();
      Op op = t.text == "<" ? Op::Lt : t.text == "<=" ? Op::Le : t.text == ">" ? Op::Gt : Op::Ge;
      l = binary(std::move(l), op, addExpr(), t.loc);
    }
    return l;
  }
  ExprPtr addExpr() {
    auto l = mulExpr();
    while (isPunct("+") || isPunct("-")) {
      Token t = take();
      l = binary(std::move(l), t.text == "+" ? Op::Add : Op::Sub, mulExpr(), t.loc);
    }
    return l;
  }
  ExprPtr mulExpr() {
    auto l = unary();
    while (isPunct("*") || isPunct("/") || isPunct("%")) {
      Token t = take();
      Op op = t.text == "*" ? Op::Mul : t.text == "/" ? Op::Div : Op::Mod;
      l = binary(std::move(l), op, unary(), t.loc);
    }
    return l;
  }
  ExprPtr unary() {
    SourceLoc loc = peek().loc;
    if (accept("-")) {
      if (at(Tok::Int)) {
        // Negative literals stay literals so `x = -1` round-trips as a constant.
        auto e = node(ExprKind::IntLit, loc);
        e->value = -take().value;
        return postfix(std::move(e));
      }
      auto e = node(ExprKind::Unary, loc);
      e->op = Op::Neg;
      e->operands.push_back(unary());
      return e;
    }
    if (accept("!")) {
      auto e = node(ExprKind::Unary, loc);
      e->op = Op::Not;
      e->operands.push_back(unary());
      return e;
    }
    if (accept("*")) {
      auto e = node(ExprKind::Deref, loc);
      e->operands.push_back(unary());
      return e;
    }
    if (accept("&")) {
      auto e = node(ExprKind::AddrOf, loc);
      e->operands.push_back(unary());
      return e;
    }
    return postfix(primary());
  }

  ExprPtr postfix(ExprPtr e) {
    for (;;) {
      SourceLoc loc = peek().loc;
      if (isPunct(".") || isPunct("->")) {
        bool arrow = take().text == "->";
        std::string name = ident("field name");
        ExprPtr base = std::move(e);
        if (arrow) {
          auto d = node(ExprKind::Deref, loc);
          d->operands.push_back(std::move(base));
          base = std::move(d);
        }
        if (isPunct("(")) {
          requireTag(loc, "method calls");
          take();
          auto m = node(ExprKind::MethodCall, loc);
          m->name = name;
          m->arrow = arrow;
          m->operands.push_back(std::move(base));
          if (!isPunct(")")) {
            do m->operands.push_back(expression());
            while (accept(","));
          }
          expect(")");
          e = std::move(m);
        } else {
          auto f = node(ExprKind::Field, loc);
          f->name = name;
          f->arrow = arrow;
          f->operands.push_back(std::move(base));
          e = std::move(f);
        }
        continue;
      }
      return e;
    }
  }

  ExprPtr primary() {
    SourceLoc loc = peek().loc;
    if (at(Tok::Int)) {
      auto e = node(ExprKind::IntLit, loc);
      e->value = take().value;
      return e;
    }
    if (accept("(")) {
      auto e = expression();
      expect(")");
      return e;
    }
    if (isWord("null")) {
      take();
      return node(ExprKind::NullLit, loc);
    }
    if (isWord("new")) {
      take();
      auto e = node(ExprKind::New, loc);
      e->typeArg = type();
      return e;
    }
    if (at(Tok::Ident) && isPunct("::", 1)) {
      requireTag(loc, "variant constructors");
      auto e = node(ExprKind::VariantCtor, loc);
      e->enumName = take().text;
      take();
      e->variant = ident("variant name");
      if (accept("(")) {
        e->operands.push_back(expression());
        expect(")");
      }
      return e;
    }
    std::string name = ident("expression");
    if (accept("(")) {
      auto e = node(ExprKind::Call, loc);
      e->name = name;
      if (!isPunct(")")) {
        do e->operands.push_back(expression());
        while (accept(","));
      }
      expect(")");
      return e;
    }
    auto e = node(ExprKind::Var, loc);
    e->name = name;
    return e;
  }
};

}  // namespace

ParseResult parse(const std::string& source, Dialect dialect) {
  ParseResult result;
  try {
    Program p = Parser(lex(source), dialect).run();
    renumber(p);
    auto diags = typecheck(p);
    if (!diags.empty()) {
      result.diagnostics = std::move(diags);
      return result;
    }
    result.program = std::move(p);
  } catch (const DiagnosticError& e) {
    result.diagnostics = e.diagnostics();
  }
  return result;
}

Program parseOrThrow(const std::string& source, Dialect dialect) {
  auto r = parse(source, dialect);
  if (!r.ok()) throw DiagnosticError(r.diagnostics);
  return std::move(*r.program);
}

}  // namespace untag
