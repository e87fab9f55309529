#include "qhom/expr.hpp"

#include <cctype>
#include <string>

#include "qhom/error.hpp"

namespace qhom {

namespace {

struct Token {
  enum Kind { Number, Name, Star, Plus, Minus, LParen, RParen, Caret, LBrace, RBrace, End };
  Kind kind = End;
  std::string text;
  Rational value;
  std::size_t pos = 0;
};

[[noreturn]] void parse_fail(const std::string& what, std::size_t pos) {
  fail(ErrorKind::ParseError, what + " at position " + std::to_string(pos));
}

class Lexer {
 public:
  explicit Lexer(const std::string& s) : s_(s) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
    tok_ = Token{};
    tok_.pos = i_;
    if (i_ >= s_.size()) {
      tok_.kind = Token::End;
      return;
    }
    const char c = s_[i_];
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < s_.size() && std::isdigit(static_cast<unsigned char>(s_[j]))) ++j;
      if (j < s_.size() && s_[j] == '/') {
        std::size_t k = j + 1;
        while (k < s_.size() && std::isdigit(static_cast<unsigned char>(s_[k]))) ++k;
        if (k == j + 1) parse_fail("malformed rational literal", i_);
        j = k;
      }
      tok_.kind = Token::Number;
      tok_.text = s_.substr(i_, j - i_);
      tok_.value = rat_parse(tok_.text);
      i_ = j;
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t j = i_;
      while (j < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[j])) || s_[j] == '_')) {
        ++j;
      }
      tok_.kind = Token::Name;
      tok_.text = s_.substr(i_, j - i_);
      i_ = j;
      return;
    }
    switch (c) {
      case '*':
        tok_.kind = Token::Star;
        break;
      case '+':
        tok_.kind = Token::Plus;
        break;
      case '-':
        tok_.kind = Token::Minus;
        break;
      case '(':
        tok_.kind = Token::LParen;
        break;
      case ')':
        tok_.kind = Token::RParen;
        break;
      case '^':
        tok_.kind = Token::Caret;
        break;
      case '{':
        tok_.kind = Token::LBrace;
        break;
      case '}':
        tok_.kind = Token::RBrace;
        break;
      default:
        parse_fail(std::string("unexpected character '") + c + "'", i_);
    }
    ++i_;
  }

  const std::string& s_;
  std::size_t i_ = 0;
  Token tok_;
};

class Parser {
 public:
  Parser(const Algebra& alg, const std::string& text) : alg_(alg), lex_(text) {}

  QuantumClass run() {
    QuantumClass v = expr();
    if (lex_.peek().kind != Token::End) parse_fail("trailing input", lex_.peek().pos);
    return v;
  }

 private:
  const ManifoldPreset& preset() const { return alg_.preset(); }

  void expect(Token::Kind kind, const char* what) {
    if (lex_.peek().kind != kind) parse_fail(std::string("expected ") + what, lex_.peek().pos);
    lex_.take();
  }

  QuantumClass expr() {
    QuantumClass v = term();
    for (;;) {
      if (lex_.peek().kind == Token::Plus) {
        lex_.take();
        v = sum(preset(), v, term());
      } else if (lex_.peek().kind == Token::Minus) {
        lex_.take();
        v = sub(preset(), v, term());
      } else {
        return v;
      }
    }
  }

  QuantumClass term() {
    QuantumClass v = unary();
    while (lex_.peek().kind == Token::Star) {
      lex_.take();
      v = quantum_product(alg_, v, unary());
    }
    return v;
  }

  QuantumClass unary() {
    if (lex_.peek().kind == Token::Minus) {
      lex_.take();
      return -unary();
    }
    return primary();
  }

  QuantumClass primary() {
    const Token t = lex_.take();
    switch (t.kind) {
      case Token::Number:
        return QuantumClass::term(BasisId::M, LatticeVector{Rational(0), Rational(0)}, t.value);
      case Token::Name:
        if (t.text == "q") {
          expect(Token::Caret, "'^' after q");
          return monomial();
        }
        return QuantumClass::term(basis_from_name(preset(), t.text),
                                  LatticeVector{Rational(0), Rational(0)}, Rational(1));
      case Token::LParen: {
        QuantumClass v = expr();
        expect(Token::RParen, "')'");
        return v;
      }
      default:
        parse_fail("expected a value", t.pos);
    }
  }

  QuantumClass monomial() {
    if (lex_.peek().kind == Token::Number) {
      const Token t = lex_.take();
      if (!is_zero(t.value)) parse_fail("only q^0 is valid without braces", t.pos);
      return QuantumClass::unit();
    }
    expect(Token::LBrace, "'{' or 0 after 'q^'");
    const LatticeVector v = vector_body();
    expect(Token::RBrace, "'}'");
    return QuantumClass::term(BasisId::M, v, Rational(1));
  }

  LatticeVector vector_body() {
    LatticeVector acc{Rational(0), Rational(0)};
    int sign = 1;
    if (lex_.peek().kind == Token::Minus) {
      lex_.take();
      sign = -1;
    }
    for (;;) {
      acc = acc + vec_item(sign);
      if (lex_.peek().kind == Token::Plus) {
        lex_.take();
        sign = 1;
      } else if (lex_.peek().kind == Token::Minus) {
        lex_.take();
        sign = -1;
      } else {
        return acc;
      }
    }
  }

  LatticeVector vec_item(int sign) {
    Token t = lex_.take();
    Rational c = Rational(sign);
    if (t.kind == Token::Number) {
      c = c * t.value;
      if (lex_.peek().kind == Token::Star) {
        lex_.take();
        t = lex_.take();
      } else {
        if (!is_zero(t.value)) parse_fail("bare scalar in an exponent (only 0 is valid)", t.pos);
        return LatticeVector{Rational(0), Rational(0)};
      }
    }
    if (t.kind != Token::Name) parse_fail("expected a vector name", t.pos);
    LatticeVector base{Rational(0), Rational(0)};
    if (t.text == "e1") {
      base = LatticeVector{Rational(1), Rational(0)};
    } else if (t.text == "e2") {
      base = LatticeVector{Rational(0), Rational(1)};
    } else {
      base = preset().named_exponent(t.text);
    }
    return base.scaled(c);
  }

  const Algebra& alg_;
  Lexer lex_;
};

}  // namespace

QuantumClass eval_expression(const Algebra& alg, const std::string& text) {
  Parser parser(alg, text);
  return parser.run();
}

}  // namespace qhom
