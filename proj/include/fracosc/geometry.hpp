#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fracosc/expr.hpp"
#include "fracosc/poly.hpp"

namespace fracosc {

/// Coordinate change on the positive orthant. `forward[i]` gives xbar^i in terms of
/// x1..xn; `inverse[i]` gives x^i in terms of xbar, also written x1..xn.
struct ChartMap {
  int n = 1;
  double alpha = 0.5;
  std::vector<Expr> forward;
  std::vector<Expr> inverse;

  void validate() const;
  ChartMap inverted() const { return {n, alpha, inverse, forward}; }
  Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  Eigen::VectorXd apply_inverse(const Eigen::VectorXd& xbar) const;
  /// True when every forward and inverse component is a single monomial.
  bool is_monomial() const;
};

/// Forward = J(xbar, x), mapping y to ybar. Inverse = J(x, xbar).
enum class JacobianDirection { Forward, Inverse };

/// Classical Jacobian d f^i / d x^j at x: exact on the monomial fragment, otherwise
/// central differences with step 1e-6.
Eigen::MatrixXd classical_jacobian(const std::vector<Expr>& f, const Eigen::VectorXd& x);

/// (u^i)^(alpha-1) * du^i/dv^j * (v^j)^(1-alpha), with u the target and v the source
/// coordinates of the chosen direction, at the source-side point `x`.
/// SingularityError for non-positive coordinates, RankError for a singular map.
Eigen::MatrixXd frac_jacobian(const ChartMap& m, const Eigen::VectorXd& x, JacobianDirection dir);

/// max |J(x, xbar) J(xbar, x) - I|.
double jacobian_identity_residual(const ChartMap& m, const Eigen::VectorXd& x);

/// Symbolic J(xbar, x) for monomial maps, as polynomials in x.
PolyMatrix frac_jacobian_symbolic(const ChartMap& m);

/// Compares the power-weighted closed form of J(x, xbar) with the Gamma-normalized
/// form D^alpha_{xbar^j} (x^i)^alpha / G(1 + alpha) on monomial maps.
struct JacobianCrossCheck {
  Eigen::MatrixXd closed_form;
  Eigen::MatrixXd gamma_form;
  double max_abs_discrepancy = 0.0;
};
JacobianCrossCheck jacobian_cross_check(const ChartMap& m, const Eigen::VectorXd& x);

enum class FormBasis { FracDifferential, Differential };  // d(x^j)^alpha or d(x^j)

struct FracOneForm {
  int n = 1;
  FormBasis basis = FormBasis::FracDifferential;
  std::vector<Poly> a;
};

/// d^alpha f = D^alpha_{x^i} f d(x^i)^alpha.
FracOneForm exterior_d0(const Poly& f, int n, double alpha);

/// Coefficients c(i, j) = D^alpha_{x^i} b_j - D^alpha_{x^j} b_i of d(x^i)^alpha ^ d(x^j)^alpha.
/// A d(x^j)-basis form is first rewritten with b_j = a_j (x^j)^(1-alpha) / alpha.
PolyMatrix exterior_d1(const FracOneForm& w, double alpha);

}  // namespace fracosc
