#pragma once

#include <cctype>
#include <charconv>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "lelma/logic/clause.hpp"
#include "lelma/logic/term.hpp"

namespace lelma::logic {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, std::size_t column, std::string expected, std::string found)
      : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": expected " +
                           expected + ", found " + found),
        line_(line),
        column_(column),
        expected_(std::move(expected)) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  const std::string& expected() const { return expected_; }

 private:
  std::size_t line_;
  std::size_t column_;
  std::string expected_;
};

// A `%! key: value` structured comment.
struct MetadataLine {
  std::string key;
  std::string value;
  std::size_t line = 0;
};

struct Program {
  std::vector<Clause> clauses;
  std::vector<MetadataLine> metadata;
};

struct ParseOptions {
  // Accept capitalised functor names ("Higher(1,3)") by lower-casing them.
  bool lenient_functors = false;
};

namespace detail {

enum class Tok { atom, qatom, var, integer, lparen, rparen, comma, end, neck, naf, equals, eof };

struct Token {
  Tok kind = Tok::eof;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

inline std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::eof: return "end of input";
    case Tok::qatom: return "'" + t.text + "'";
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<MetadataLine> metadata;

  Token next() {
    skip_layout();
    Token t;
    t.line = line_;
    t.column = col_;
    if (pos_ >= src_.size()) return t;
    const char c = src_[pos_];
    if (std::islower(static_cast<unsigned char>(c))) {
      t.kind = Tok::atom;
      t.text = ident();
    } else if (std::isupper(static_cast<unsigned char>(c)) || c == '_') {
      t.kind = Tok::var;
      t.text = ident();
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && pos_ + 1 < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      t.kind = Tok::integer;
      t.text += c;
      advance();
      while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
        t.text += src_[pos_];
        advance();
      }
    } else if (c == '\'') {
      t.kind = Tok::qatom;
      t.text = quoted(t);
    } else if (c == '(') {
      single(t, Tok::lparen);
    } else if (c == ')') {
      single(t, Tok::rparen);
    } else if (c == ',') {
      single(t, Tok::comma);
    } else if (c == '.') {
      single(t, Tok::end);
    } else if (c == '=') {
      single(t, Tok::equals);
    } else if (c == ':' && peek(1) == '-') {
      t.kind = Tok::neck;
      t.text = ":-";
      advance();
      advance();
    } else if (c == '\\' && peek(1) == '+') {
      t.kind = Tok::naf;
      t.text = "\\+";
      advance();
      advance();
    } else {
      throw ParseError(line_, col_, "a term", "'" + std::string(1, c) + "'");
    }
    return t;
  }

 private:
  char peek(std::size_t off) const { return pos_ + off < src_.size() ? src_[pos_ + off] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void single(Token& t, Tok kind) {
    t.kind = kind;
    t.text = std::string(1, src_[pos_]);
    advance();
  }

  std::string ident() {
    std::string out;
    while (pos_ < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_')) {
      out += src_[pos_];
      advance();
    }
    return out;
  }

  std::string quoted(const Token& start) {
    advance();
    std::string out;
    for (;;) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') throw ParseError(start.line, start.column, "closing quote", "end of line");
      char c = src_[pos_];
      if (c == '\\') {
        advance();
        if (pos_ >= src_.size()) throw ParseError(line_, col_, "escaped character", "end of input");
        out += src_[pos_];
        advance();
      } else if (c == '\'') {
        if (peek(1) == '\'') {
          out += '\'';
          advance();
          advance();
        } else {
          advance();
          return out;
        }
      } else {
        out += c;
        advance();
      }
    }
  }

  void skip_layout() {
    while (pos_ < src_.size()) {
      const char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '%') {
        const std::size_t line = line_;
        std::string comment;
        while (pos_ < src_.size() && src_[pos_] != '\n') {
          comment += src_[pos_];
          advance();
        }
        record_metadata(comment, line);
      } else {
        break;
      }
    }
  }

  void record_metadata(std::string_view comment, std::size_t line) {
    if (comment.size() < 2 || comment[1] != '!') return;
    comment.remove_prefix(2);
    auto colon = comment.find(':');
    if (colon == std::string_view::npos) return;
    metadata.push_back({trim(comment.substr(0, colon)), trim(comment.substr(colon + 1)), line});
  }

  static std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  Parser(std::string_view src, ParseOptions opts) : lex_(src), opts_(opts) { shift(); }

  Program program() {
    Program p;
    while (tok_.kind != Tok::eof) {
      anon_ = 0;
      p.clauses.push_back(clause());
    }
    p.metadata = std::move(lex_.metadata);
    return p;
  }

  Clause clause() {
    const Token at = tok_;
    Term head = term();
    if (!head.is_callable()) throw ParseError(at.line, at.column, "an atom or compound clause head", describe(at));
    Clause c{std::move(head), {}};
    if (tok_.kind == Tok::neck) {
      shift();
      c.body = body();
    } else if (tok_.kind == Tok::equals) {
      throw ParseError(tok_.line, tok_.column, "':-' or '.'", describe(tok_));
    }
    expect(Tok::end, "'.'");
    return c;
  }

  // Comma-separated literals with an optional final period.
  std::vector<Literal> goal() {
    anon_ = 0;
    auto lits = body();
    if (tok_.kind == Tok::end) shift();
    if (tok_.kind != Tok::eof) throw ParseError(tok_.line, tok_.column, "',' or end of goal", describe(tok_));
    return lits;
  }

  Term single_term() {
    anon_ = 0;
    Term t = term();
    if (tok_.kind == Tok::end) shift();
    if (tok_.kind != Tok::eof) throw ParseError(tok_.line, tok_.column, "end of term", describe(tok_));
    return t;
  }

 private:
  void shift() { tok_ = lex_.next(); }

  void expect(Tok kind, const char* what) {
    if (tok_.kind != kind) throw ParseError(tok_.line, tok_.column, what, describe(tok_));
    shift();
  }

  std::vector<Literal> body() {
    std::vector<Literal> lits;
    lits.push_back(literal());
    while (tok_.kind == Tok::comma) {
      shift();
      lits.push_back(literal());
    }
    return lits;
  }

  Literal literal() {
    if (tok_.kind == Tok::naf) {
      shift();
      return Literal::negated(callable());
    }
    const Token at = tok_;
    Term lhs = term();
    if (tok_.kind == Tok::equals) {
      shift();
      Term rhs = term();
      return Literal{LiteralKind::unify, compound("=", std::move(lhs), std::move(rhs))};
    }
    if (!lhs.is_callable()) throw ParseError(at.line, at.column, "a callable goal", describe(at));
    return Literal::from_term(std::move(lhs));
  }

  Term callable() {
    const Token at = tok_;
    Term t = term();
    if (!t.is_callable()) throw ParseError(at.line, at.column, "a callable goal", describe(at));
    return t;
  }

  Term term() {
    Token t = tok_;
    switch (t.kind) {
      case Tok::integer: {
        shift();
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc{}) throw ParseError(t.line, t.column, "an integer in range", t.text);
        return Term::integer(v);
      }
      case Tok::var:
        shift();
        if (opts_.lenient_functors && tok_.kind == Tok::lparen) return arguments(lower(t.text));
        if (t.text == "_") return Term::var("_@" + std::to_string(++anon_));
        return Term::var(t.text);
      case Tok::atom:
      case Tok::qatom:
        shift();
        if (tok_.kind == Tok::lparen) return arguments(opts_.lenient_functors ? lower(t.text) : t.text);
        return Term::atom(t.text);
      default: throw ParseError(t.line, t.column, "a term", describe(t));
    }
  }

  Term arguments(std::string functor) {
    expect(Tok::lparen, "'('");
    std::vector<Term> args;
    args.push_back(term());
    while (tok_.kind == Tok::comma) {
      shift();
      args.push_back(term());
    }
    expect(Tok::rparen, "',' or ')'");
    return Term::compound(std::move(functor), std::move(args));
  }

  static std::string lower(std::string s) {
    for (auto& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
  }

  Lexer lex_;
  ParseOptions opts_;
  Token tok_;
  std::uint64_t anon_ = 0;
};

}  // namespace detail

/// Parses a sequence of clauses (`Head.` or `Head :- L1, ..., Ln.`) and collects `%!` metadata.
inline Program parse_program(std::string_view src, ParseOptions opts = {}) { return detail::Parser(src, opts).program(); }

inline std::vector<Clause> parse_clauses(std::string_view src, ParseOptions opts = {}) {
  return parse_program(src, opts).clauses;
}

/// Parses a conjunctive goal such as `game(s0,F), finally(goal(p1,5),F)`.
inline std::vector<Literal> parse_goal(std::string_view src, ParseOptions opts = {}) {
  return detail::Parser(src, opts).goal();
}

inline Term parse_term(std::string_view src, ParseOptions opts = {}) { return detail::Parser(src, opts).single_term(); }

}  // namespace lelma::logic
