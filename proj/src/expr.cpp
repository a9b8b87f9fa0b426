#include "fracosc/expr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <functional>

#include "fracosc/errors.hpp"
#include "fracosc/numfmt.hpp"
#include "fracosc/specfun.hpp"

namespace fracosc {

using NodeP = std::shared_ptr<const Expr::Node>;

namespace {

NodeP make(Expr::Kind k, std::vector<NodeP> kids = {}, double value = 0.0) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = k;
  n->kids = std::move(kids);
  n->value = value;
  return n;
}

enum class Tok { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok kind;
  std::string text;
  double num = 0.0;
  std::size_t line = 1, col = 1;
};

class Lexer {
public:
  explicit Lexer(const std::string& s) : s_(s) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_space();
      Token t;
      t.line = line_;
      t.col = col_;
      if (pos_ >= s_.size()) {
        t.kind = Tok::End;
        out.push_back(t);
        return out;
      }
      const char c = s_[pos_];
      if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < s_.size() &&
                                                          std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
        t.kind = Tok::Num;
        lex_number(t);
      } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
        t.kind = Tok::Ident;
        while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
          t.text += advance();
      } else {
        switch (c) {
          case '+': t.kind = Tok::Plus; break;
          case '-': t.kind = Tok::Minus; break;
          case '*': t.kind = Tok::Star; break;
          case '/': t.kind = Tok::Slash; break;
          case '^': t.kind = Tok::Caret; break;
          case '(': t.kind = Tok::LParen; break;
          case ')': t.kind = Tok::RParen; break;
          case ',': t.kind = Tok::Comma; break;
          default:
            throw SyntaxError(std::string("unexpected character '") + c + "' at line " + std::to_string(line_) +
                                  ", column " + std::to_string(col_),
                              line_, col_, "number, identifier, '(', '-'");
        }
        t.text = std::string(1, advance());
      }
      out.push_back(t);
    }
  }

private:
  char advance() {
    const char c = s_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_space() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) advance();
  }

  void lex_number(Token& t) {
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) advance();
    };
    digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      advance();
      digits();
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < s_.size() && (s_[look] == '+' || s_[look] == '-')) ++look;
      if (look < s_.size() && std::isdigit(static_cast<unsigned char>(s_[look]))) {
        while (pos_ < look) advance();
        digits();
      }
    }
    t.text = s_.substr(start, pos_ - start);
    auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), t.num);
    if (res.ec != std::errc())
      throw SyntaxError("malformed number '" + t.text + "'", t.line, t.col, "number");
  }

  const std::string& s_;
  std::size_t pos_ = 0, line_ = 1, col_ = 1;
};

class Parser {
public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  NodeP run() {
    NodeP e = expr();
    expect(Tok::End, "operator or end of input");
    return e;
  }

private:
  const Token& peek() const { return toks_[i_]; }
  Token next() { return toks_[i_++]; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    const std::string got = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError("syntax error at line " + std::to_string(t.line) + ", column " + std::to_string(t.col) +
                          ": expected " + expected + ", got " + got,
                      t.line, t.col, expected);
  }

  void expect(Tok k, const std::string& expected) {
    if (peek().kind != k) fail(expected);
    ++i_;
  }

  NodeP expr() {
    NodeP l = term();
    while (peek().kind == Tok::Plus || peek().kind == Tok::Minus) {
      const Tok op = next().kind;
      NodeP r = term();
      l = make(op == Tok::Plus ? Expr::Kind::Add : Expr::Kind::Sub, {l, r});
    }
    return l;
  }

  NodeP term() {
    NodeP l = unary();
    while (peek().kind == Tok::Star || peek().kind == Tok::Slash) {
      const Tok op = next().kind;
      NodeP r = unary();
      l = make(op == Tok::Star ? Expr::Kind::Mul : Expr::Kind::Div, {l, r});
    }
    return l;
  }

  NodeP unary() {
    if (peek().kind == Tok::Minus) {
      next();
      return make(Expr::Kind::Neg, {unary()});
    }
    if (peek().kind == Tok::Plus) {
      next();
      return unary();
    }
    return power();
  }

  NodeP power() {
    NodeP base = primary();
    if (peek().kind != Tok::Caret) return base;
    next();
    return make(Expr::Kind::Pow, {base}, exponent_literal());
  }

  double exponent_literal() {
    bool paren = false;
    if (peek().kind == Tok::LParen) {
      paren = true;
      next();
    }
    double sign = 1.0;
    while (peek().kind == Tok::Minus || peek().kind == Tok::Plus) {
      if (next().kind == Tok::Minus) sign = -sign;
    }
    if (peek().kind != Tok::Num) fail("numeric literal exponent");
    const double v = sign * next().num;
    if (paren) expect(Tok::RParen, "')'");
    return v;
  }

  NodeP primary() {
    const Token t = peek();
    switch (t.kind) {
      case Tok::Num:
        next();
        return make(Expr::Kind::Num, {}, t.num);
      case Tok::LParen: {
        next();
        NodeP e = expr();
        expect(Tok::RParen, "')'");
        return e;
      }
      case Tok::Ident: {
        next();
        if (t.text == "gamma" || t.text == "ml") return call(t);
        Var v;
        if (!parse_var_name(t.text, v))
          throw SyntaxError("unknown identifier '" + t.text + "' at line " + std::to_string(t.line) + ", column " +
                                std::to_string(t.col),
                            t.line, t.col, "t, x<i>, y<i>_<a>, gamma, ml");
        auto n = std::make_shared<Expr::Node>();
        n->kind = Expr::Kind::Var;
        n->var = v;
        return n;
      }
      default:
        fail("number, identifier or '('");
    }
  }

  NodeP call(const Token& name) {
    expect(Tok::LParen, "'(' after " + name.text);
    std::vector<NodeP> args{expr()};
    while (peek().kind == Tok::Comma) {
      next();
      args.push_back(expr());
    }
    expect(Tok::RParen, "',' or ')'");
    const std::size_t want = name.text == "gamma" ? 1 : 2;
    if (args.size() != want)
      throw SyntaxError(name.text + " takes " + std::to_string(want) + " argument(s), got " +
                            std::to_string(args.size()) + " (line " + std::to_string(name.line) + ", column " +
                            std::to_string(name.col) + ")",
                        name.line, name.col, std::to_string(want) + " argument(s)");
    return make(name.text == "gamma" ? Expr::Kind::Gamma : Expr::Kind::ML, std::move(args));
  }

  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

int prec(const Expr::Node& n) {
  switch (n.kind) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    default: return 5;
  }
}

std::string print_node(const Expr::Node& n);

std::string wrap(const Expr::Node& n, int min_prec) {
  std::string s = print_node(n);
  return prec(n) < min_prec ? "(" + s + ")" : s;
}

std::string print_node(const Expr::Node& n) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::Num: return fmt_double(n.value);
    case K::Var: return n.var.name();
    case K::Neg: return "-" + wrap(*n.kids[0], 3);
    case K::Add: return wrap(*n.kids[0], 1) + " + " + wrap(*n.kids[1], 2);
    case K::Sub: return wrap(*n.kids[0], 1) + " - " + wrap(*n.kids[1], 2);
    case K::Mul: return wrap(*n.kids[0], 2) + "*" + wrap(*n.kids[1], 3);
    case K::Div: return wrap(*n.kids[0], 2) + "/" + wrap(*n.kids[1], 3);
    case K::Pow: return wrap(*n.kids[0], 5) + "^" + fmt_double(n.value);
    case K::Gamma: return "gamma(" + print_node(*n.kids[0]) + ")";
    case K::ML: return "ml(" + print_node(*n.kids[0]) + ", " + print_node(*n.kids[1]) + ")";
  }
  return "";
}

double eval_node(const Expr::Node& n, const VarLookup& look) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::Num: return n.value;
    case K::Var: return look(n.var);
    case K::Neg: return -eval_node(*n.kids[0], look);
    case K::Add: return eval_node(*n.kids[0], look) + eval_node(*n.kids[1], look);
    case K::Sub: return eval_node(*n.kids[0], look) - eval_node(*n.kids[1], look);
    case K::Mul: return eval_node(*n.kids[0], look) * eval_node(*n.kids[1], look);
    case K::Div: {
      const double d = eval_node(*n.kids[1], look);
      if (d == 0.0) throw EvalError("division by zero");
      return eval_node(*n.kids[0], look) / d;
    }
    case K::Pow: {
      const double b = eval_node(*n.kids[0], look);
      if (b == 0.0 && n.value < 0.0) throw EvalError("division by zero: 0 raised to a negative power");
      const double r = std::pow(b, n.value);
      if (std::isnan(r)) throw EvalError("negative base " + fmt_double(b) + " raised to non-integer power");
      return r;
    }
    case K::Gamma: {
      const double x = eval_node(*n.kids[0], look);
      if (is_gamma_pole(x)) throw EvalError("gamma: pole at " + fmt_double(x));
      return gamma(x);
    }
    case K::ML: {
      const double a = eval_node(*n.kids[0], look);
      const double z = eval_node(*n.kids[1], look);
      try {
        return mittag_leffler(a, z);
      } catch (const DomainError& e) {
        throw EvalError(e.what());
      }
    }
  }
  return 0.0;
}

Poly lower(const Expr::Node& n) {
  using K = Expr::Kind;
  switch (n.kind) {
    case K::Num: return Poly(n.value);
    case K::Var: return Poly::var(n.var);
    case K::Neg: return -lower(*n.kids[0]);
    case K::Add: return lower(*n.kids[0]) + lower(*n.kids[1]);
    case K::Sub: return lower(*n.kids[0]) - lower(*n.kids[1]);
    case K::Mul: return lower(*n.kids[0]) * lower(*n.kids[1]);
    case K::Div: {
      const Poly d = lower(*n.kids[1]);
      if (d.is_zero()) throw EvalError("division by zero");
      if (!d.is_monomial()) throw UnsupportedForm("division by a sum leaves the monomial fragment");
      return lower(*n.kids[0]) * d.pow(-1.0);
    }
    case K::Pow: return lower(*n.kids[0]).pow(n.value);
    case K::Gamma:
    case K::ML: {
      for (const auto& k : n.kids)
        if (!lower(*k).is_constant())
          throw UnsupportedForm(std::string(n.kind == K::Gamma ? "gamma" : "ml") +
                                "() of a variable expression is numeric-only");
      return Poly(eval_node(n, [](Var) -> double { return 0.0; }));
    }
  }
  return Poly();
}

void collect(const Expr::Node& n, std::set<Var>& out) {
  if (n.kind == Expr::Kind::Var) out.insert(n.var);
  for (const auto& k : n.kids) collect(*k, out);
}

}  // namespace

Expr Expr::parse(const std::string& source) {
  Lexer lx(source);
  Parser p(lx.run());
  return Expr(p.run());
}

Expr Expr::number(double v) {
  if (v < 0.0) return Expr(make(Kind::Neg, {make(Kind::Num, {}, -v)}));
  return Expr(make(Kind::Num, {}, v));
}

Expr Expr::variable(Var v) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Var;
  n->var = v;
  return Expr(n);
}

Expr Expr::from_poly(const Poly& p) { return parse(p.to_string()); }

std::string Expr::print() const { return print_node(*root_); }

double Expr::eval(const VarBinding& env) const {
  return eval_node(*root_, [&](Var v) {
    auto it = env.find(v.name());
    if (it == env.end()) throw EvalError("unbound variable " + v.name());
    return it->second;
  });
}

double Expr::eval(const VarLookup& lookup) const { return eval_node(*root_, lookup); }

Poly Expr::to_poly() const { return lower(*root_); }

bool Expr::is_poly() const {
  try {
    (void)to_poly();
    return true;
  } catch (const UnsupportedForm&) {
    return false;
  }
}

std::set<Var> Expr::vars() const {
  std::set<Var> out;
  collect(*root_, out);
  return out;
}

Expr frac_partial(const Expr& e, const std::string& var, double alpha) {
  Var v;
  if (!parse_var_name(var, v)) throw DomainError("frac_partial: '" + var + "' is not a variable name");
  Poly p;
  try {
    p = e.to_poly();
  } catch (const UnsupportedForm& u) {
    throw UnsupportedForm(std::string(u.what()) + "; use fracnum::numeric_frac_partial along " + var +
                          " for a pointwise value");
  }
  return Expr::from_poly(frac_partial(p, v, alpha));
}

void check_vars(const Expr& e, int n, int k, bool allow_t) {
  for (const Var& v : e.vars()) {
    if (v.order < 0) {
      if (!allow_t) throw DomainError("variable t is not allowed here");
      continue;
    }
    if (v.index > n) throw DomainError("variable " + v.name() + " exceeds dimension n = " + std::to_string(n));
    if (v.order > k) throw DomainError("variable " + v.name() + " exceeds jet order k = " + std::to_string(k));
  }
}

}  // namespace fracosc
