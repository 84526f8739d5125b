#include <charconv>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "ruleve/ingest.hpp"

namespace ruleve {

namespace {

enum class Tok { ident, number, lbrace, rbrace, comma, colon, pipe, amp, equals, arrow, end };

struct Token {
  Tok kind = Tok::end;
  std::string text;
  double number = 0.0;
  int line = 1;
  int col = 1;
};

const char* tok_name(Tok t) {
  switch (t) {
    case Tok::ident: return "identifier";
    case Tok::number: return "number";
    case Tok::lbrace: return "'{'";
    case Tok::rbrace: return "'}'";
    case Tok::comma: return "','";
    case Tok::colon: return "':'";
    case Tok::pipe: return "'|'";
    case Tok::amp: return "'&'";
    case Tok::equals: return "'='";
    case Tok::arrow: return "'<-'";
    case Tok::end: return "end of input";
  }
  return "?";
}

class Lexer {
public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

private:
  void advance() {
    skip_blank();
    tok_ = Token{};
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_.kind = Tok::end;
      return;
    }
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
        bump();
      tok_.kind = Tok::ident;
      tok_.text = std::string(text_.substr(start, pos_ - start));
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                                     text_[pos_] == '.'))
        bump();
      if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
        bump();
        if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) bump();
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) bump();
      }
      std::string_view s = text_.substr(start, pos_ - start);
      double value = 0.0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
      if (ec != std::errc{} || p != s.data() + s.size())
        throw ParseError(tok_.line, tok_.col, "malformed number '" + std::string(s) + "'");
      tok_.kind = Tok::number;
      tok_.text = std::string(s);
      tok_.number = value;
      return;
    }
    switch (c) {
      case '{': bump(); tok_.kind = Tok::lbrace; return;
      case '}': bump(); tok_.kind = Tok::rbrace; return;
      case ',': bump(); tok_.kind = Tok::comma; return;
      case ':': bump(); tok_.kind = Tok::colon; return;
      case '|': bump(); tok_.kind = Tok::pipe; return;
      case '&': bump(); tok_.kind = Tok::amp; return;
      case '=': bump(); tok_.kind = Tok::equals; return;
      case '<':
        bump();
        if (pos_ < text_.size() && text_[pos_] == '-') {
          bump();
          tok_.kind = Tok::arrow;
          return;
        }
        throw ParseError(tok_.line, tok_.col, "expected '<-'");
      default: {
        char buf[64];
        std::snprintf(buf, sizeof buf, "unexpected character '%c'", c);
        throw ParseError(line_, col_, buf);
      }
    }
  }

  void skip_blank() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  Token tok_;
};

class Parser {
public:
  explicit Parser(std::string_view text) : lex_(text) {}

  ModelDocument run() {
    while (lex_.peek().kind != Tok::end) {
      Token t = expect(Tok::ident, "'variable', 'rule', or 'cpt'");
      if (t.text == "variable") parse_variable();
      else if (t.text == "rule") parse_rule();
      else if (t.text == "cpt") parse_cpt();
      else throw ParseError(t.line, t.col, "expected 'variable', 'rule', or 'cpt', got '" + t.text + "'");
    }
    return finish();
  }

private:
  Token expect(Tok kind, const char* what) {
    const Token& t = lex_.peek();
    if (t.kind != kind) {
      std::string msg = std::string("expected ") + what + ", got ";
      msg += t.kind == Tok::ident || t.kind == Tok::number ? "'" + t.text + "'" : tok_name(t.kind);
      throw ParseError(t.line, t.col, msg);
    }
    return lex_.take();
  }

  void parse_variable() {
    Token name = expect(Tok::ident, "a variable name");
    expect(Tok::lbrace, "'{'");
    std::vector<std::string> values;
    values.push_back(expect(Tok::ident, "a value name").text);
    while (lex_.peek().kind == Tok::comma) {
      lex_.take();
      values.push_back(expect(Tok::ident, "a value name").text);
    }
    expect(Tok::rbrace, "'}'");
    try {
      vars_->add(name.text, std::move(values));
    } catch (const InvalidArgument& e) {
      throw SemanticError(name.line, name.col, e.what());
    }
    decl_line_[static_cast<std::size_t>(vars_->size() - 1)] = {name.line, name.col};
  }

  Assignment parse_assign() {
    Token var = expect(Tok::ident, "a variable name");
    auto id = vars_->find(var.text);
    if (!id) throw SemanticError(var.line, var.col, "variable '" + var.text + "' not declared");
    expect(Tok::equals, "'='");
    Token val = expect(Tok::ident, "a value name");
    auto ix = (*vars_)[*id].value_index(val.text);
    if (!ix)
      throw SemanticError(val.line, val.col,
                          "'" + val.text + "' is not a value of '" + var.text + "'");
    return {*id, *ix};
  }

  double parse_probability() {
    Token t = expect(Tok::number, "a probability");
    if (!(t.number >= 0.0 && t.number <= 1.0))
      throw SemanticError(t.line, t.col, "probability '" + t.text + "' outside [0, 1]");
    return t.number;
  }

  void parse_rule() {
    Token at = lex_.peek();
    Context head;
    head = extend(head, parse_assign(), at);
    while (lex_.peek().kind == Tok::amp) {
      lex_.take();
      Token p = lex_.peek();
      head = extend(head, parse_assign(), p);
    }
    expect(Tok::arrow, "'<-'");
    Context body;
    while (lex_.peek().kind != Tok::colon) {
      Token p = lex_.peek();
      Assignment a = parse_assign();
      if (head.assigns(a.var))
        throw SemanticError(p.line, p.col, "head and body share variable '" +
                                               (*vars_)[a.var].name + "'");
      body = extend(body, a, p);
      if (lex_.peek().kind == Tok::amp) lex_.take();
      else break;
    }
    Token colon = expect(Tok::colon, "':'");
    (void)colon;
    double lo = parse_probability();
    double hi = lo;
    if (lex_.peek().kind == Tok::comma) {
      lex_.take();
      Token second = lex_.peek();
      hi = parse_probability();
      if (lo > hi) throw SemanticError(second.line, second.col, "lower bound exceeds upper bound");
    }
    Rule r;
    r.id = static_cast<RuleId>(rules_.size());
    r.head = std::move(head);
    r.body = std::move(body);
    r.prob = {lo, hi};
    rules_.push_back(std::move(r));
    if (lo < hi) saw_interval_ = true;
    if (first_rule_line_ < 0) first_rule_line_ = at.line;
  }

  Context extend(const Context& ctx, Assignment a, const Token& at) {
    if (ctx.assigns(a.var))
      throw SemanticError(at.line, at.col,
                          "variable '" + (*vars_)[a.var].name + "' assigned twice");
    return ctx.with(a.var, a.value);
  }

  void parse_cpt() {
    Token child_tok = expect(Tok::ident, "a variable name");
    auto child = vars_->find(child_tok.text);
    if (!child)
      throw SemanticError(child_tok.line, child_tok.col,
                          "variable '" + child_tok.text + "' not declared");
    if (cpts_.count(*child))
      throw SemanticError(child_tok.line, child_tok.col,
                          "duplicate cpt for '" + child_tok.text + "'");
    expect(Tok::pipe, "'|'");
    std::vector<VarId> parents;
    while (lex_.peek().kind == Tok::ident) {
      Token p = lex_.take();
      auto pid = vars_->find(p.text);
      if (!pid) throw SemanticError(p.line, p.col, "variable '" + p.text + "' not declared");
      if (*pid >= *child)
        throw SemanticError(p.line, p.col,
                            "parent '" + p.text + "' must be declared before '" +
                                child_tok.text + "'");
      for (VarId q : parents)
        if (q == *pid)
          throw SemanticError(p.line, p.col, "parent '" + p.text + "' listed twice");
      parents.push_back(*pid);
    }
    expect(Tok::lbrace, "'{'");

    std::uint64_t n_rows = 1;
    for (VarId p : parents) n_rows *= static_cast<std::uint64_t>((*vars_)[p].domain_size());
    int n_vals = (*vars_)[*child].domain_size();

    Cpt cpt;
    cpt.child = *child;
    cpt.parents = parents;
    cpt.rows.assign(n_rows, {});

    while (lex_.peek().kind != Tok::rbrace) {
      // one row: parent values, ':', one probability per child value
      std::uint64_t row_ix = 0;
      for (std::size_t k = 0; k < parents.size(); ++k) {
        Token v = expect(Tok::ident, "a parent value");
        auto ix = (*vars_)[parents[k]].value_index(v.text);
        if (!ix)
          throw SemanticError(v.line, v.col, "'" + v.text + "' is not a value of '" +
                                                 (*vars_)[parents[k]].name + "'");
        row_ix = row_ix * static_cast<std::uint64_t>((*vars_)[parents[k]].domain_size()) +
                 static_cast<std::uint64_t>(*ix);
      }
      Token colon = expect(Tok::colon, "':'");
      if (!cpt.rows[row_ix].empty())
        throw SemanticError(colon.line, colon.col, "duplicate cpt row");
      std::vector<double> probs;
      double sum = 0.0;
      for (int k = 0; k < n_vals; ++k) {
        double p = parse_probability();
        probs.push_back(p);
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6)
        throw SemanticError(colon.line, colon.col, "cpt row does not sum to one");
      cpt.rows[row_ix] = std::move(probs);
    }
    expect(Tok::rbrace, "'}'");
    for (std::uint64_t r = 0; r < n_rows; ++r)
      if (cpt.rows[r].empty())
        throw SemanticError(child_tok.line, child_tok.col,
                            "cpt for '" + child_tok.text + "' is missing a row");
    cpts_.emplace(*child, std::move(cpt));
    if (first_cpt_line_ < 0) first_cpt_line_ = child_tok.line;
  }

  ModelDocument finish() {
    if (!rules_.empty() && !cpts_.empty())
      throw SemanticError(std::max(first_rule_line_, first_cpt_line_), 1,
                          "a document may hold rules or cpts, not both");
    ModelDocument doc;
    doc.vars = vars_;
    if (!cpts_.empty()) {
      TabularNetwork net;
      net.vars = vars_;
      for (VarId v = 0; v < vars_->size(); ++v) {
        auto it = cpts_.find(v);
        if (it == cpts_.end()) {
          auto [line, col] = decl_line_.count(static_cast<std::size_t>(v))
                                 ? decl_line_[static_cast<std::size_t>(v)]
                                 : std::pair<int, int>{1, 1};
          throw SemanticError(line, col,
                              "variable '" + (*vars_)[v].name + "' has no cpt");
        }
        net.cpts.push_back(std::move(it->second));
      }
      doc.network = std::move(net);
      return doc;
    }
    RuleBase rb;
    rb.vars = vars_;
    rb.rules = std::move(rules_);
    rb.kind = saw_interval_ ? RuleBaseKind::approximating : RuleBaseKind::exact;
    rb.next_id = static_cast<RuleId>(rb.rules.size());
    doc.rules = std::move(rb);
    return doc;
  }

  Lexer lex_;
  std::shared_ptr<VariableTable> vars_ = std::make_shared<VariableTable>();
  std::vector<Rule> rules_;
  std::map<VarId, Cpt> cpts_;
  std::map<std::size_t, std::pair<int, int>> decl_line_;
  bool saw_interval_ = false;
  int first_rule_line_ = -1;
  int first_cpt_line_ = -1;
};

}  // namespace

ModelDocument parse_model(std::string_view text, std::string_view origin) {
  (void)origin;
  return Parser(text).run();
}

}  // namespace ruleve
