#include <cmath>

#include "doctest.h"
#include "fracosc/errors.hpp"
#include "fracosc/geometry.hpp"

using namespace fracosc;

namespace {

// xbar1 = x1^2 x2, xbar2 = x2^3; inverse x1 = xbar1^0.5 xbar2^(-1/6), x2 = xbar2^(1/3)
ChartMap cubic_chart(double alpha) {
  ChartMap m;
  m.n = 2;
  m.alpha = alpha;
  m.forward = {Expr::parse("x1^2 * x2"), Expr::parse("x2^3")};
  m.inverse = {Expr::parse("x1^0.5 * x2^-0.16666666666666666"), Expr::parse("x2^0.3333333333333333")};
  return m;
}

}  // namespace

TEST_CASE("chart map application round trips") {
  const ChartMap m = cubic_chart(0.5);
  Eigen::VectorXd x(2);
  x << 1.3, 0.7;
  const Eigen::VectorXd back = m.apply_inverse(m.apply(x));
  CHECK(back(0) == doctest::Approx(1.3).epsilon(1e-13));
  CHECK(back(1) == doctest::Approx(0.7).epsilon(1e-13));
  CHECK(m.is_monomial());
}

TEST_CASE("classical Jacobian of a monomial map") {
  const ChartMap m = cubic_chart(0.5);
  Eigen::VectorXd x(2);
  x << 1.5, 2.0;
  const Eigen::MatrixXd J = classical_jacobian(m.forward, x);
  CHECK(J(0, 0) == doctest::Approx(2 * 1.5 * 2.0));
  CHECK(J(0, 1) == doctest::Approx(1.5 * 1.5));
  CHECK(J(1, 0) == doctest::Approx(0.0));
  CHECK(J(1, 1) == doctest::Approx(3 * 4.0));
  // numeric fallback on a non-monomial component
  const Eigen::MatrixXd Jn = classical_jacobian({Expr::parse("gamma(1 + x1) * x2")}, x);
  CHECK(Jn(0, 1) == doctest::Approx(std::tgamma(2.5)).epsilon(1e-8));
}

TEST_CASE("fractional Jacobian matches its closed form") {
  const double a = 0.6;
  const ChartMap m = cubic_chart(a);
  Eigen::VectorXd x(2);
  x << 1.5, 2.0;
  const Eigen::MatrixXd F = frac_jacobian(m, x, JacobianDirection::Forward);
  const Eigen::VectorXd xb = m.apply(x);
  const Eigen::MatrixXd J = classical_jacobian(m.forward, x);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      CHECK(F(i, j) == doctest::Approx(std::pow(xb(i), a - 1) * J(i, j) * std::pow(x(j), 1 - a)).epsilon(1e-13));
  CHECK(jacobian_identity_residual(m, x) < 1e-12);
  // symbolic form agrees with the numeric one
  const PolyMatrix S = frac_jacobian_symbolic(m);
  const VarLookup at = [&](Var v) { return x(v.index - 1); };
  for (std::size_t i = 0; i < 2; ++i)
    for (std::size_t j = 0; j < 2; ++j) CHECK(S(i, j).eval(at) == doctest::Approx(F(i, j)).epsilon(1e-12));
}

TEST_CASE("fractional Jacobian errors") {
  const ChartMap m = cubic_chart(0.5);
  Eigen::VectorXd bad(2);
  bad << -1.0, 1.0;
  CHECK_THROWS_AS(frac_jacobian(m, bad, JacobianDirection::Forward), SingularityError);
  ChartMap s;
  s.n = 2;
  s.alpha = 0.5;
  s.forward = {Expr::parse("x1 * x2"), Expr::parse("2 * x1 * x2")};
  s.inverse = s.forward;
  Eigen::VectorXd x(2);
  x << 1.0, 2.0;
  CHECK_THROWS_AS(frac_jacobian(s, x, JacobianDirection::Forward), RankError);
}

TEST_CASE("Gamma-normalized cross-check agrees on linear permutation maps") {
  ChartMap m;
  m.n = 2;
  m.alpha = 0.4;
  m.forward = {Expr::parse("2 * x2"), Expr::parse("x1")};
  m.inverse = {Expr::parse("x2"), Expr::parse("0.5 * x1")};
  Eigen::VectorXd x(2);
  x << 0.8, 1.7;
  CHECK(jacobian_cross_check(m, x).max_abs_discrepancy < 1e-13);
  // with higher exponents the two normalizations differ by Gamma ratios
  CHECK(jacobian_cross_check(cubic_chart(0.4), x).max_abs_discrepancy > 1e-3);
}

TEST_CASE("d^alpha d^alpha = 0 on monomial 0-forms") {
  const double a = 0.35;
  const Poly f = Expr::parse("3 * x1^1.5 * x2^2.25 * x3 - x2^0.8").to_poly();
  const FracOneForm w = exterior_d0(f, 3, a);
  CHECK(w.basis == FormBasis::FracDifferential);
  const PolyMatrix c = exterior_d1(w, a);
  for (const Poly& p : c.a) CHECK(p.max_abs_coef() < 1e-12);
  // a generic 1-form is not closed
  FracOneForm g{2, FormBasis::FracDifferential, {Poly::var(Var::x(2), 2.0), Poly(0.0)}};
  CHECK_FALSE(exterior_d1(g, a).is_zero());
}
