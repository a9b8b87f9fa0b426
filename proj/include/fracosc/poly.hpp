#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace fracosc {

/// A chart or jet variable: t (order -1), x<i> (order 0) or y<i>_<a> (order a >= 1).
/// Indices are 1-based, as in the text syntax.
struct Var {
  int order = 0;
  int index = 1;

  static Var t() { return {-1, 0}; }
  static Var x(int i) { return {0, i}; }
  static Var y(int i, int a) { return {a, i}; }

  std::string name() const;
  auto operator<=>(const Var&) const = default;
};

/// Parse "t", "x3" or "y2_1". Returns false on anything else.
bool parse_var_name(const std::string& s, Var& out);

/// Product of variables raised to real exponents; exponents equal within 1e-9 compare equal.
class Monomial {
public:
  static constexpr double kTol = 1e-9;

  Monomial() = default;
  Monomial(Var v, double e);

  const std::vector<std::pair<Var, double>>& factors() const noexcept { return f_; }
  double exponent(Var v) const;
  bool is_one() const noexcept { return f_.empty(); }

  Monomial operator*(const Monomial& o) const;
  Monomial pow(double p) const;
  Monomial with_exponent(Var v, double e) const;

  std::string to_string() const;

private:
  std::vector<std::pair<Var, double>> f_;  // sorted by Var, no zero exponents
};

struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

/// Values of variables at a point.
using VarLookup = std::function<double(Var)>;

/// Finite sum of coef * Monomial: the exactly differentiable fragment.
class Poly {
public:
  using TermMap = std::map<Monomial, double, MonomialLess>;

  Poly() = default;
  Poly(double c);  // NOLINT: implicit constant promotion is intended
  static Poly var(Var v, double e = 1.0);
  static Poly term(double c, Monomial m);

  const TermMap& terms() const noexcept { return t_; }
  bool is_zero() const noexcept { return t_.empty(); }
  bool is_constant() const;
  double constant_value() const;
  bool depends_on(Var v) const;
  /// Single term with nonzero coefficient.
  bool is_monomial() const { return t_.size() == 1; }

  Poly operator+(const Poly& o) const;
  Poly operator-(const Poly& o) const;
  Poly operator-() const;
  Poly operator*(const Poly& o) const;
  Poly& operator+=(const Poly& o);
  Poly& operator-=(const Poly& o);
  Poly& operator*=(const Poly& o);

  /// Real power. Sums only accept non-negative integer powers; otherwise UnsupportedForm.
  Poly pow(double p) const;

  /// Evaluate with `lookup` supplying variable values.
  double eval(const VarLookup& lookup) const;

  /// Substitute a constant for one variable.
  Poly substitute(Var v, double value) const;

  /// Drop terms with |coef| <= tol.
  Poly pruned(double tol) const;

  /// Largest |coef|; convenient for exact zero checks.
  double max_abs_coef() const;

  std::string to_string() const;

private:
  void add_term(const Monomial& m, double c);
  TermMap t_;
};

/// Fractional partial of order alpha in v by the reviewed power rule: v-free terms
/// vanish, c v^g -> c G(1+g)/G(1+g-alpha) v^(g-alpha). DomainError if 1+g is a pole;
/// a term whose 1+g-alpha is a pole vanishes.
Poly frac_partial(const Poly& p, Var v, double alpha);

/// Classical partial derivative in v.
Poly partial(const Poly& p, Var v);

/// Dense square matrix of polynomials.
struct PolyMatrix {
  std::size_t n = 0;
  std::vector<Poly> a;

  PolyMatrix() = default;
  explicit PolyMatrix(std::size_t n_) : n(n_), a(n_ * n_) {}
  static PolyMatrix identity(std::size_t n);

  Poly& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  const Poly& operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }

  PolyMatrix operator+(const PolyMatrix& o) const;
  PolyMatrix operator-(const PolyMatrix& o) const;
  PolyMatrix operator*(const PolyMatrix& o) const;
  PolyMatrix scaled(const Poly& s) const;
  bool is_zero() const;
};

Poly determinant(const PolyMatrix& m);

/// Symbolic inverse by adjugate. The determinant must be a single monomial so that
/// the result stays in the fragment; otherwise UnsupportedForm. Zero determinant
/// gives RankError.
PolyMatrix inverse(const PolyMatrix& m);

}  // namespace fracosc
