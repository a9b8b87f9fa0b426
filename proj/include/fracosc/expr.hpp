#pragma once

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "fracosc/poly.hpp"

namespace fracosc {

using VarBinding = std::map<std::string, double>;

/// Immutable expression tree over t, x<i>, y<i>_<a>, real literals, + - * /,
/// power by a literal exponent, gamma(e) and ml(alpha, e). Grammar in docs/expr-grammar.md.
class Expr {
public:
  enum class Kind { Num, Var, Neg, Add, Sub, Mul, Div, Pow, Gamma, ML };

  struct Node {
    Kind kind;
    double value = 0.0;  // Num literal or Pow exponent
    Var var{};
    std::vector<std::shared_ptr<const Node>> kids;
  };

  Expr() : Expr(number(0.0)) {}

  /// Throws SyntaxError (1-based line/column, expected-token set).
  static Expr parse(const std::string& source);
  static Expr number(double v);
  static Expr variable(Var v);
  static Expr from_poly(const Poly& p);

  const Node& root() const { return *root_; }
  /// The i-th operand of the root node as an expression.
  Expr child(std::size_t i) const { return Expr(root_->kids.at(i)); }

  /// Canonical text form; parse(print()) reproduces the same tree.
  std::string print() const;

  double eval(const VarBinding& env) const;
  double eval(const VarLookup& lookup) const;

  /// Lower to the monomial fragment, or throw UnsupportedForm.
  Poly to_poly() const;
  bool is_poly() const;

  std::set<Var> vars() const;

private:
  explicit Expr(std::shared_ptr<const Node> n) : root_(std::move(n)) {}
  std::shared_ptr<const Node> root_;
};

/// Exact reviewed fractional partial on the monomial fragment. Outside the fragment
/// throws UnsupportedForm; use fracnum::numeric_frac_partial at a point instead.
Expr frac_partial(const Expr& e, const std::string& var, double alpha);

/// Check every variable is t, x1..xn or y<i>_<a> with i <= n, a <= k. Throws DomainError.
void check_vars(const Expr& e, int n, int k, bool allow_t = false);

}  // namespace fracosc
