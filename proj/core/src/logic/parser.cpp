#include "liftpdb/logic/parser.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "liftpdb/errors.hpp"

namespace liftpdb::logic {

namespace {

enum class Tok { Ident, Quoted, LParen, RParen, Comma, Dot, Equals, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t line;
  std::size_t column;
};

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1, i = 0;
  auto advance = [&](std::size_t n = 1) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    auto uc = static_cast<unsigned char>(c);
    if (std::isspace(uc)) {
      advance();
      continue;
    }
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance();
      continue;
    }
    std::size_t tl = line, tc = col;
    switch (c) {
      case '(': out.push_back({Tok::LParen, "(", tl, tc}); advance(); continue;
      case ')': out.push_back({Tok::RParen, ")", tl, tc}); advance(); continue;
      case ',': out.push_back({Tok::Comma, ",", tl, tc}); advance(); continue;
      case '.': out.push_back({Tok::Dot, ".", tl, tc}); advance(); continue;
      case '=': out.push_back({Tok::Equals, "=", tl, tc}); advance(); continue;
      default: break;
    }
    if (c == '"') {
      advance();
      std::string text;
      bool closed = false;
      while (i < src.size()) {
        char d = src[i];
        if (d == '\\' && i + 1 < src.size()) {
          advance();
          text += src[i];
          advance();
          continue;
        }
        if (d == '"') {
          advance();
          closed = true;
          break;
        }
        text += d;
        advance();
      }
      if (!closed) throw SyntaxError("unterminated string", tl, tc);
      if (text.empty()) throw SyntaxError("empty quoted name", tl, tc);
      out.push_back({Tok::Quoted, std::move(text), tl, tc});
      continue;
    }
    if (std::isalpha(uc) || c == '_') {
      std::string text;
      while (i < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[i])) || src[i] == '_')) {
        text += src[i];
        advance();
      }
      out.push_back({Tok::Ident, std::move(text), tl, tc});
      continue;
    }
    throw SyntaxError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

bool is_variable_name(const std::string& s) {
  auto c = static_cast<unsigned char>(s.front());
  return std::islower(c) || c == '_';
}

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  ParsedQuery parse() {
    std::string name, free_var;
    if (has_head()) {
      name = next().text;
      expect(Tok::LParen, "'('");
      const Token& v = expect(Tok::Ident, "answer variable");
      if (!is_variable_name(v.text)) fail("answer variable must start lowercase", v);
      free_var = v.text;
      expect(Tok::RParen, "')'");
      expect(Tok::Equals, "'='");
    }
    UCQ body = parse_ucq(free_var);
    if (peek().kind != Tok::End) fail("unexpected trailing input", peek());
    if (free_var.empty()) return body;
    bool found = std::any_of(body.disjuncts.begin(), body.disjuncts.end(), [&](const CQ& cq) {
      return std::any_of(cq.atoms.begin(), cq.atoms.end(), [&](const Atom& a) { return a.mentions(free_var); });
    });
    if (!found) throw QueryError("answer variable '" + free_var + "' does not occur in the query");
    return QueryTemplate{name, free_var, std::move(body)};
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Token& next() { return toks_[std::min(pos_++, toks_.size() - 1)]; }

  [[noreturn]] static void fail(const std::string& msg, const Token& t) {
    throw SyntaxError(msg, t.line, t.column);
  }

  const Token& expect(Tok kind, const char* what) {
    const Token& t = peek();
    if (t.kind != kind)
      fail(std::string("expected ") + what + (t.kind == Tok::End ? " at end of input" : ", got '" + t.text + "'"), t);
    return next();
  }

  bool is_keyword(const Token& t, std::string_view kw) const {
    return t.kind == Tok::Ident && t.text == kw;
  }

  bool has_head() const {
    return peek(0).kind == Tok::Ident && peek(1).kind == Tok::LParen &&
           peek(2).kind == Tok::Ident && peek(3).kind == Tok::RParen &&
           peek(4).kind == Tok::Equals;
  }

  UCQ parse_ucq(const std::string& free_var) {
    UCQ q;
    q.disjuncts.push_back(parse_cq(free_var));
    while (is_keyword(peek(), "OR")) {
      next();
      q.disjuncts.push_back(parse_cq(free_var));
    }
    return q;
  }

  CQ parse_cq(const std::string& free_var) {
    const Token& start = peek();
    if (is_keyword(start, "FORALL"))
      fail("universal quantification is not supported", start);
    bool declared = false;
    std::set<std::string> bound;
    if (is_keyword(start, "EXISTS")) {
      next();
      declared = true;
      do {
        const Token& v = expect(Tok::Ident, "variable");
        if (!is_variable_name(v.text)) fail("'" + v.text + "' is not a variable name", v);
        if (v.text == free_var) fail("answer variable '" + v.text + "' cannot be quantified", v);
        if (!bound.insert(v.text).second) fail("variable '" + v.text + "' declared twice", v);
      } while (peek().kind == Tok::Comma && (next(), true));
      expect(Tok::Dot, "'.'");
    }
    CQ cq;
    cq.atoms.push_back(parse_atom(declared, bound, free_var));
    while (is_keyword(peek(), "AND")) {
      next();
      cq.atoms.push_back(parse_atom(declared, bound, free_var));
    }
    return cq;
  }

  Atom parse_atom(bool declared, const std::set<std::string>& bound, const std::string& free_var) {
    const Token& p = peek();
    if (p.kind != Tok::Ident && p.kind != Tok::Quoted) fail("expected an atom", p);
    if (p.kind == Tok::Ident && (p.text == "EXISTS" || p.text == "AND" || p.text == "OR"))
      fail("unexpected keyword '" + p.text + "'", p);
    if (is_keyword(p, "FORALL")) fail("universal quantification is not supported", p);
    const Token pred = p;
    Atom atom{next().text, {}};
    expect(Tok::LParen, "'('");
    if (peek().kind != Tok::RParen) {
      while (true) {
        const Token& t = next();
        if (t.kind == Tok::Quoted) {
          if (t.text.front() == '$') fail("constants may not start with '$'", t);
          atom.args.push_back(Term::constant(t.text));
        } else if (t.kind == Tok::Ident) {
          if (is_variable_name(t.text)) {
            if (declared && t.text != free_var && !bound.count(t.text))
              fail("free variable '" + t.text + "'", t);
            atom.args.push_back(Term::var(t.text));
          } else {
            atom.args.push_back(Term::constant(t.text));
          }
        } else {
          fail("expected a term", t);
        }
        if (peek().kind == Tok::Comma) {
          next();
          continue;
        }
        break;
      }
    }
    expect(Tok::RParen, "')'");
    auto [it, fresh] = arities_.emplace(atom.predicate, atom.arity());
    if (!fresh && it->second != atom.arity())
      fail("predicate '" + atom.predicate + "' used with arity " + std::to_string(atom.arity()) + " and " +
               std::to_string(it->second),
           pred);
    return atom;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> arities_;
};

}  // namespace

ParsedQuery parse_query(std::string_view text) { return Parser(tokenize(text)).parse(); }

UCQ parse_ucq(std::string_view text) {
  auto parsed = parse_query(text);
  if (auto* q = std::get_if<UCQ>(&parsed)) return std::move(*q);
  throw QueryError("expected a Boolean query, got a template with an answer variable");
}

QueryTemplate parse_template(std::string_view text) {
  auto parsed = parse_query(text);
  if (auto* t = std::get_if<QueryTemplate>(&parsed)) return std::move(*t);
  throw QueryError("expected a query template of the form Name(t) = ...");
}

}  // namespace liftpdb::logic
