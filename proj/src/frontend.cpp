#include "relloc/frontend.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

namespace relloc {

std::string Diagnostic::str() const {
  return span.str() + ": " + (severity == Severity::Error ? "error: " : "warning: ") + message;
}

namespace {

std::string join_messages(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    if (!out.empty()) out += '\n';
    out += d.str();
  }
  return out;
}

}  // namespace

FrontendError::FrontendError(std::vector<Diagnostic> diags)
    : std::runtime_error(join_messages(diags)), diags_(std::move(diags)) {}

// ---------------------------------------------------------------------------
// Lexer

namespace {

const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {
      "sig",   "one",   "lone", "some",  "set", "no",   "all", "fact", "pred", "assert",
      "check", "run",   "for",  "in",    "not", "and",  "or",  "none", "univ", "iden"};
  return kw;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view src, const std::string& file) {
  std::vector<Token> out;
  int line = 1, col = 1;
  bool newline = true;
  std::size_t i = 0;
  auto span_at = [&](int l, int c, int len) {
    return SourceSpan{file, l, c, l, c + std::max(len, 1) - 1};
  };
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
        newline = true;
      } else {
        ++col;
      }
      ++i;
    }
  };
  auto push = [&](TokenKind kind, std::size_t len) {
    Token t{kind, std::string(src.substr(i, len)), span_at(line, col, static_cast<int>(len)), newline};
    newline = false;
    out.push_back(std::move(t));
    advance(len);
  };

  static const char* const kOps[] = {"<=>", "=>", "!=", "&&", "||", "->", "=", "!", "+", "-",
                                     "&",   ".",  "~",  "*",  "^",  ":",  ",", "|", "{", "}",
                                     "(",   ")"};
  while (i < src.size()) {
    const char c = src[i];
    if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (ident_start(c)) {
      std::size_t n = 1;
      while (i + n < src.size() && ident_char(src[i + n])) ++n;
      const std::string word(src.substr(i, n));
      push(keywords().count(word) ? TokenKind::Keyword : TokenKind::Identifier, n);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t n = 1;
      while (i + n < src.size() && std::isdigit(static_cast<unsigned char>(src[i + n]))) ++n;
      push(TokenKind::Integer, n);
      continue;
    }
    if (src.substr(i, 3) == "!in" && (i + 3 >= src.size() || !ident_char(src[i + 3]))) {
      push(TokenKind::Operator, 3);
      continue;
    }
    bool matched = false;
    for (const char* op : kOps) {
      const std::string_view o(op);
      if (src.substr(i, o.size()) == o) {
        push(TokenKind::Operator, o.size());
        matched = true;
        break;
      }
    }
    if (matched) continue;
    std::string shown = std::isprint(static_cast<unsigned char>(c))
                            ? std::string(1, c)
                            : "\\x" + std::to_string(static_cast<unsigned char>(c));
    throw FrontendError({{Severity::Error, "unrecognized character '" + shown + "'",
                          span_at(line, col, 1)}});
  }
  // End token sits on the last character of the input (or 1:1 when empty).
  SourceSpan end{file, 1, 1, 1, 1};
  if (!out.empty()) {
    end = out.back().span;
    end.start_line = end.end_line;
    end.start_col = end.end_col;
  }
  out.push_back({TokenKind::End, "", end, true});
  return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct ParseError {
  Diagnostic diag;
};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& toks) : toks_(toks) {}

  Model parse_model() {
    Model m;
    m.file = toks_.front().span.file;
    while (!at_end()) {
      const std::size_t start = pos_;
      try {
        parse_declaration(m);
      } catch (const ParseError& e) {
        diags_.push_back(e.diag);
        if (pos_ == start) ++pos_;
        resync();
      }
    }
    if (!diags_.empty()) throw FrontendError(diags_);
    return m;
  }

  FormPtr parse_single_formula() {
    try {
      FormPtr f = parse_formula();
      if (!at_end()) fail("unexpected '" + cur().text + "' after formula");
      return f;
    } catch (const ParseError& e) {
      throw FrontendError({e.diag});
    }
  }

 private:
  // -- token helpers -------------------------------------------------------
  const Token& cur() const { return toks_[pos_]; }
  const Token& peek(std::size_t k) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return cur().kind == TokenKind::End; }
  bool is(const char* text) const {
    return cur().kind != TokenKind::End && cur().kind != TokenKind::Identifier &&
           cur().text == text;
  }
  bool is_at(std::size_t k, const char* text) const {
    const Token& t = peek(k);
    return t.kind != TokenKind::End && t.kind != TokenKind::Identifier && t.text == text;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError{{Severity::Error, msg, cur().span}};
  }
  const Token& expect(const char* text) {
    if (!is(text)) fail(std::string("expected '") + text + "' but found " + describe(cur()));
    return toks_[pos_++];
  }
  const Token& expect_ident(const char* what) {
    if (cur().kind != TokenKind::Identifier)
      fail(std::string("expected ") + what + " but found " + describe(cur()));
    return toks_[pos_++];
  }
  static std::string describe(const Token& t) {
    return t.kind == TokenKind::End ? std::string("end of input") : "'" + t.text + "'";
  }
  /// Binary operators may not start a new line outside parentheses.
  bool continues_line() const { return !(cur().newline_before && depth_ == 0); }
  SourceSpan span_from(const SourceSpan& start) const {
    return SourceSpan::merge(start, toks_[pos_ == 0 ? 0 : pos_ - 1].span);
  }

  bool starts_declaration(std::size_t k = 0) const {
    const Token& t = peek(k);
    if (t.kind != TokenKind::Keyword) return false;
    if (t.text == "sig" || t.text == "fact" || t.text == "pred" || t.text == "assert" ||
        t.text == "check" || t.text == "run")
      return true;
    if (t.text == "one" || t.text == "lone" || t.text == "some")
      return peek(k + 1).kind == TokenKind::Keyword && peek(k + 1).text == "sig";
    return false;
  }

  void resync() {
    while (!at_end() && !starts_declaration()) ++pos_;
    depth_ = 0;
  }

  // -- declarations ---------------------------------------------------------
  void parse_declaration(Model& m) {
    if (starts_declaration()) {
      const std::string& kw = cur().text;
      if (kw == "fact") return parse_fact(m);
      if (kw == "pred") return parse_pred(m);
      if (kw == "assert") return parse_assert(m);
      if (kw == "check" || kw == "run") return parse_command(m);
      return parse_sig(m);
    }
    fail("expected a declaration but found " + describe(cur()));
  }

  static Multiplicity mult_of(const std::string& kw) {
    if (kw == "one") return Multiplicity::One;
    if (kw == "lone") return Multiplicity::Lone;
    if (kw == "some") return Multiplicity::Some;
    return Multiplicity::Set;
  }

  void parse_sig(Model& m) {
    const SourceSpan start = cur().span;
    Multiplicity mult = Multiplicity::Set;
    if (!is("sig")) mult = mult_of(toks_[pos_++].text);
    expect("sig");
    std::vector<Token> names{expect_ident("signature name")};
    while (is(",")) {
      ++pos_;
      names.push_back(expect_ident("signature name"));
    }
    expect("{");
    std::vector<FieldDecl> fields;
    while (!is("}")) {
      std::vector<Token> fnames{expect_ident("field name")};
      while (is(",")) {
        ++pos_;
        fnames.push_back(expect_ident("field name"));
      }
      expect(":");
      Multiplicity fm = Multiplicity::Set;
      if (is("one") || is("lone") || is("some") || is("set")) fm = mult_of(toks_[pos_++].text);
      const Token& target = expect_ident("target signature");
      if (is("->")) fail("only binary fields (owner -> target) are supported");
      for (const Token& fn : fnames)
        fields.push_back({fn.text, "", target.text, fm, SourceSpan::merge(fn.span, target.span)});
      if (is(",")) ++pos_;
    }
    expect("}");
    for (const Token& n : names) {
      SigDecl s{n.text, mult, fields, span_from(start)};
      for (auto& f : s.fields) f.owner = n.text;
      m.sigs.push_back(std::move(s));
    }
  }

  std::vector<Conjunct> parse_block(const std::string& owner) {
    expect("{");
    std::vector<Conjunct> out;
    while (!is("}")) {
      if (at_end()) fail("unterminated block '" + owner + "'");
      if (is("&&")) {
        ++pos_;
        continue;
      }
      FormPtr f = parse_formula();
      split_conjuncts(f, owner, out);
      if (!is("}") && !is("&&") && !cur().newline_before)
        fail("expected end of formula but found " + describe(cur()));
    }
    expect("}");
    return out;
  }

  void split_conjuncts(const FormPtr& f, const std::string& owner, std::vector<Conjunct>& out) {
    if (f->kind == FormulaKind::And && !grouped_.count(f.get())) {
      split_conjuncts(f->sub, owner, out);
      split_conjuncts(f->sub2, owner, out);
      return;
    }
    out.push_back({owner, static_cast<int>(out.size()), f, f->span});
  }

  void parse_fact(Model& m) {
    const Token& kw = expect("fact");
    std::string name = "fact@" + std::to_string(kw.span.start_line);
    if (cur().kind == TokenKind::Identifier) name = toks_[pos_++].text;
    for (auto& c : parse_block(name)) m.facts.push_back(std::move(c));
  }

  void parse_pred(Model& m) {
    expect("pred");
    const Token& name = expect_ident("predicate name");
    if (is("[") || is("("))
      fail("parameterized predicates are not supported");
    if (m.preds.count(name.text))
      throw ParseError{{Severity::Error, "duplicate predicate '" + name.text + "'", name.span}};
    m.preds[name.text] = parse_block(name.text);
  }

  void parse_assert(Model& m) {
    const SourceSpan start = cur().span;
    expect("assert");
    const Token& name = expect_ident("assertion name");
    auto body = parse_block(name.text);
    FormPtr f;
    for (const auto& c : body) {
      if (!f) {
        f = c.formula;
        continue;
      }
      auto node = std::make_shared<Formula>();
      node->kind = FormulaKind::And;
      node->sub = f;
      node->sub2 = c.formula;
      node->span = SourceSpan::merge(f->span, c.formula->span);
      f = node;
    }
    if (!f) {
      auto node = std::make_shared<Formula>();
      node->kind = FormulaKind::Mult;
      node->mult = MultTest::No;
      auto none = std::make_shared<RelExpr>();
      none->kind = RelKind::None;
      none->span = name.span;
      node->left = none;
      node->span = name.span;
      f = node;
    }
    if (m.asserts.count(name.text))
      throw ParseError{{Severity::Error, "duplicate assertion '" + name.text + "'", name.span}};
    m.asserts[name.text] = {name.text, f, span_from(start)};
  }

  void parse_command(Model& m) {
    const SourceSpan start = cur().span;
    Command c;
    c.kind = cur().text == "check" ? CommandKind::Check : CommandKind::Run;
    ++pos_;
    c.target = expect_ident("command target").text;
    if (is("for")) {
      ++pos_;
      if (cur().kind != TokenKind::Integer) fail("expected scope after 'for'");
      const Token& n = toks_[pos_++];
      int scope = 0;
      try {
        scope = std::stoi(n.text);
      } catch (const std::exception&) {
        throw ParseError{{Severity::Error, "scope out of range", n.span}};
      }
      if (scope < 1) throw ParseError{{Severity::Error, "scope must be at least 1", n.span}};
      c.scope = scope;
      c.explicit_scope = true;
    }
    c.span = span_from(start);
    m.commands.push_back(std::move(c));
  }

  // -- formulas -------------------------------------------------------------
  static FormPtr binary(FormulaKind k, FormPtr l, FormPtr r) {
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->span = SourceSpan::merge(l->span, r->span);
    f->sub = std::move(l);
    f->sub2 = std::move(r);
    return f;
  }

  FormPtr parse_formula() { return parse_iff(); }

  FormPtr parse_iff() {
    FormPtr l = parse_implies();
    while (continues_line() && is("<=>")) {
      ++pos_;
      l = binary(FormulaKind::Iff, l, parse_implies());
    }
    return l;
  }

  FormPtr parse_implies() {
    FormPtr l = parse_or();
    if (continues_line() && is("=>")) {
      ++pos_;
      return binary(FormulaKind::Implies, l, parse_implies());
    }
    return l;
  }

  FormPtr parse_or() {
    FormPtr l = parse_and();
    while (continues_line() && (is("||") || is("or"))) {
      ++pos_;
      l = binary(FormulaKind::Or, l, parse_and());
    }
    return l;
  }

  FormPtr parse_and() {
    FormPtr l = parse_not();
    while (continues_line() && (is("&&") || is("and"))) {
      ++pos_;
      l = binary(FormulaKind::And, l, parse_not());
    }
    return l;
  }

  FormPtr parse_not() {
    if (is("!") || (is("not") && !is_at(1, "in"))) {
      const SourceSpan start = cur().span;
      ++pos_;
      auto f = std::make_shared<Formula>();
      f->kind = FormulaKind::Not;
      f->sub = parse_not();
      f->span = SourceSpan::merge(start, f->sub->span);
      return f;
    }
    return parse_primary_formula();
  }

  bool at_quantifier() const {
    if (is("all")) return true;
    if (!(is("some") || is("no"))) return false;
    return peek(1).kind == TokenKind::Identifier && (is_at(2, ":") || is_at(2, ","));
  }

  FormPtr parse_primary_formula() {
    if (at_quantifier()) return parse_quantifier();
    if (is("no") || is("some") || is("lone") || is("one")) {
      const Token& kw = toks_[pos_++];
      auto f = std::make_shared<Formula>();
      f->kind = FormulaKind::Mult;
      f->mult = kw.text == "no"     ? MultTest::No
                : kw.text == "some" ? MultTest::Some
                : kw.text == "lone" ? MultTest::Lone
                                    : MultTest::One;
      f->left = parse_expr();
      f->span = SourceSpan::merge(kw.span, f->left->span);
      return f;
    }
    if (!is("(")) return parse_comparison();

    const std::size_t save = pos_;
    const int save_depth = depth_;
    try {
      return parse_comparison();
    } catch (const ParseError&) {
      pos_ = save;
      depth_ = save_depth;
    }
    const SourceSpan open = cur().span;
    ++pos_;
    ++depth_;
    FormPtr inner = parse_formula();
    --depth_;
    const Token& close = expect(")");
    // Re-span to include the parentheses; keep the node itself for identity.
    auto f = std::make_shared<Formula>(*inner);
    f->span = SourceSpan::merge(open, close.span);
    grouped_.insert(f.get());
    return f;
  }

  FormPtr parse_comparison() {
    RelPtr l = parse_expr();
    FormulaKind k;
    if (is("in")) {
      k = FormulaKind::Subset;
      ++pos_;
    } else if (is("!in")) {
      k = FormulaKind::NotSubset;
      ++pos_;
    } else if ((is("!") || is("not")) && is_at(1, "in")) {
      k = FormulaKind::NotSubset;
      pos_ += 2;
    } else if (is("=")) {
      k = FormulaKind::Equal;
      ++pos_;
    } else if (is("!=")) {
      k = FormulaKind::NotEqual;
      ++pos_;
    } else {
      fail("expected a comparison operator but found " + describe(cur()));
    }
    RelPtr r = parse_expr();
    auto f = std::make_shared<Formula>();
    f->kind = k;
    f->span = SourceSpan::merge(l->span, r->span);
    f->left = std::move(l);
    f->right = std::move(r);
    return f;
  }

  FormPtr parse_quantifier() {
    const Token& kw = toks_[pos_++];
    const Quantifier q = kw.text == "all" ? Quantifier::All
                         : kw.text == "some" ? Quantifier::Some
                                             : Quantifier::No;
    std::vector<std::pair<Token, RelPtr>> vars;
    while (true) {
      std::vector<Token> names{expect_ident("variable name")};
      while (is(",")) {
        ++pos_;
        names.push_back(expect_ident("variable name"));
      }
      expect(":");
      RelPtr bound = parse_expr();
      for (const auto& n : names) vars.emplace_back(n, bound);
      if (is(",") && peek(1).kind == TokenKind::Identifier) {
        ++pos_;
        continue;
      }
      break;
    }
    expect("|");
    FormPtr body = parse_formula();
    // Nest innermost first. `no a, b | f` means `no a | some b | f`.
    for (std::size_t i = vars.size(); i-- > 0;) {
      auto f = std::make_shared<Formula>();
      f->kind = FormulaKind::Quant;
      f->quant = (i == 0 || q != Quantifier::No) ? q : Quantifier::Some;
      f->continues = i > 0;
      f->var.name = vars[i].first.text;
      f->var.bound = vars[i].second;
      f->span = SourceSpan::merge(i == 0 ? kw.span : vars[i].first.span, body->span);
      f->sub = body;
      body = f;
    }
    return body;
  }

  // -- relational expressions ----------------------------------------------
  static RelPtr rel_binary(RelKind k, RelPtr l, RelPtr r) {
    auto e = std::make_shared<RelExpr>();
    e->kind = k;
    e->span = SourceSpan::merge(l->span, r->span);
    e->lhs = std::move(l);
    e->rhs = std::move(r);
    return e;
  }

  RelPtr parse_expr() {
    RelPtr l = parse_intersect();
    while (continues_line() && (is("+") || is("-"))) {
      const RelKind k = cur().text == "+" ? RelKind::Union : RelKind::Difference;
      ++pos_;
      l = rel_binary(k, l, parse_intersect());
    }
    return l;
  }

  RelPtr parse_intersect() {
    RelPtr l = parse_product();
    while (continues_line() && is("&")) {
      ++pos_;
      l = rel_binary(RelKind::Intersect, l, parse_product());
    }
    return l;
  }

  RelPtr parse_product() {
    RelPtr l = parse_join();
    while (continues_line() && is("->")) {
      ++pos_;
      l = rel_binary(RelKind::Product, l, parse_join());
    }
    return l;
  }

  RelPtr parse_join() {
    RelPtr l = parse_unary();
    while (continues_line() && is(".")) {
      ++pos_;
      l = rel_binary(RelKind::Join, l, parse_unary());
    }
    return l;
  }

  RelPtr parse_unary() {
    if (is("~") || is("*") || is("^")) {
      const Token& op = toks_[pos_++];
      auto e = std::make_shared<RelExpr>();
      e->kind = op.text == "~"   ? RelKind::Transpose
                : op.text == "^" ? RelKind::Closure
                                 : RelKind::ReflexiveClosure;
      e->lhs = parse_unary();
      e->span = SourceSpan::merge(op.span, e->lhs->span);
      return e;
    }
    return parse_atom();
  }

  RelPtr parse_atom() {
    auto e = std::make_shared<RelExpr>();
    e->span = cur().span;
    if (cur().kind == TokenKind::Identifier) {
      e->kind = RelKind::Name;
      e->name = toks_[pos_++].text;
      return e;
    }
    if (is("none") || is("univ") || is("iden")) {
      e->kind = cur().text == "none" ? RelKind::None
                : cur().text == "univ" ? RelKind::Univ
                                       : RelKind::Iden;
      ++pos_;
      return e;
    }
    if (is("(")) {
      const SourceSpan open = cur().span;
      ++pos_;
      ++depth_;
      RelPtr inner = parse_expr();
      --depth_;
      const Token& close = expect(")");
      auto copy = std::make_shared<RelExpr>(*inner);
      copy->span = SourceSpan::merge(open, close.span);
      return copy;
    }
    fail("expected an expression but found " + describe(cur()));
  }

  const std::vector<Token>& toks_;
  std::size_t pos_ = 0;
  int depth_ = 0;
  std::vector<Diagnostic> diags_;
  std::set<const Formula*> grouped_;
};

// ---------------------------------------------------------------------------
// Resolver

struct ResolveFailure {
  Diagnostic diag;
};

class Resolver {
 public:
  explicit Resolver(Model& out) : m_(out) {}

  FormPtr formula(const Formula& f) {
    auto n = std::make_shared<Formula>(f);
    switch (f.kind) {
      case FormulaKind::Subset:
      case FormulaKind::NotSubset:
      case FormulaKind::Equal:
      case FormulaKind::NotEqual:
        n->left = rel(*f.left);
        n->right = rel(*f.right);
        if (n->left->arity != n->right->arity)
          error("comparison of arity " + std::to_string(n->left->arity) + " with arity " +
                    std::to_string(n->right->arity),
                f.span);
        break;
      case FormulaKind::Mult: n->left = rel(*f.left); break;
      case FormulaKind::Quant: {
        n->var.bound = rel(*f.var.bound);
        if (n->var.bound->arity != 1)
          error("quantifier bound for '" + f.var.name + "' must be unary", f.var.bound->span);
        n->var.sigs = column_sigs(*n->var.bound, m_, current_var_sigs())[0];
        scope_.emplace_back(f.var.name, n->var.sigs);
        n->sub = formula(*f.sub);
        scope_.pop_back();
        break;
      }
      case FormulaKind::Not: n->sub = formula(*f.sub); break;
      default:
        n->sub = formula(*f.sub);
        n->sub2 = formula(*f.sub2);
        break;
    }
    return n;
  }

  RelPtr rel(const RelExpr& e) {
    auto n = std::make_shared<RelExpr>(e);
    if (e.kind == RelKind::Name) {
      for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
        if (it->first == e.name) {
          n->kind = RelKind::Var;
          n->arity = 1;
          return n;
        }
      }
      if (m_.find_sig(e.name)) {
        n->ref = NameKind::Sig;
      } else if (m_.find_field(e.name)) {
        n->ref = NameKind::Field;
      } else {
        error("unknown name '" + e.name + "'", e.span);
      }
    }
    if (e.lhs) n->lhs = rel(*e.lhs);
    if (e.rhs) n->rhs = rel(*e.rhs);
    try {
      n->arity = arity_of(*n);
    } catch (const ResolutionError& err) {
      error(err.what(), err.span());
    }
    return n;
  }

 private:
  [[noreturn]] static void error(const std::string& msg, const SourceSpan& span) {
    throw ResolveFailure{{Severity::Error, msg, span}};
  }

  std::map<std::string, std::set<std::string>> current_var_sigs() const {
    std::map<std::string, std::set<std::string>> out;
    for (const auto& [name, sigs] : scope_) out[name] = sigs;  // innermost last wins
    return out;
  }

  Model& m_;
  std::vector<std::pair<std::string, std::set<std::string>>> scope_;
};

}  // namespace

Model parse(const std::vector<Token>& tokens) { return Parser(tokens).parse_model(); }

Model resolve(const Model& in) {
  Model out;
  out.file = in.file;
  std::vector<Diagnostic> diags;
  auto err = [&](const std::string& msg, const SourceSpan& span) {
    diags.push_back({Severity::Error, msg, span});
  };

  std::set<std::string> names;
  for (const auto& s : in.sigs) {
    if (!names.insert(s.name).second) {
      err("duplicate declaration '" + s.name + "'", s.span);
      continue;
    }
    out.sigs.push_back(s);
  }
  for (auto& s : out.sigs) {
    std::vector<FieldDecl> kept;
    for (const auto& f : s.fields) {
      if (!names.insert(f.name).second) {
        err("duplicate declaration '" + f.name + "'", f.span);
        continue;
      }
      if (!in.find_sig(f.target)) {
        err("unknown signature '" + f.target + "'", f.span);
        continue;
      }
      kept.push_back(f);
    }
    s.fields = std::move(kept);
  }

  Resolver r(out);
  auto resolve_conjuncts = [&](const std::vector<Conjunct>& cs) {
    std::vector<Conjunct> res;
    for (const auto& c : cs) {
      try {
        Conjunct rc = c;
        rc.formula = r.formula(*c.formula);
        res.push_back(std::move(rc));
      } catch (const ResolveFailure& f) {
        diags.push_back(f.diag);
      }
    }
    return res;
  };

  out.facts = resolve_conjuncts(in.facts);
  for (const auto& [name, cs] : in.preds) out.preds[name] = resolve_conjuncts(cs);
  for (const auto& [name, a] : in.asserts) {
    try {
      out.asserts[name] = {a.name, r.formula(*a.body), a.span};
    } catch (const ResolveFailure& f) {
      diags.push_back(f.diag);
    }
  }
  for (const auto& c : in.commands) {
    if (c.kind == CommandKind::Check && !in.asserts.count(c.target)) {
      err("unknown assertion '" + c.target + "'", c.span);
      continue;
    }
    if (c.kind == CommandKind::Run && !in.preds.count(c.target)) {
      err("unknown predicate '" + c.target + "'", c.span);
      continue;
    }
    out.commands.push_back(c);
  }
  if (!diags.empty()) throw FrontendError(std::move(diags));
  return out;
}

Model load_model(std::string_view source, const std::string& file) {
  return resolve(parse(tokenize(source, file)));
}

Model load_model_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FrontendError({{Severity::Error, "cannot open file", {path, 1, 1, 1, 1}}});
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_model(ss.str(), path);
}

FormPtr parse_formula(const Model& m, std::string_view source) {
  auto toks = tokenize(source, m.file);
  FormPtr raw = Parser(toks).parse_single_formula();
  Model copy = m;
  Resolver r(copy);
  try {
    return r.formula(*raw);
  } catch (const ResolveFailure& f) {
    throw FrontendError({f.diag});
  }
}

}  // namespace relloc
