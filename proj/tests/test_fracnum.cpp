#include <cmath>
#include <numbers>

#include "doctest.h"
#include "fracosc/errors.hpp"
#include "fracosc/fracnum.hpp"
#include "fracosc/oscbundle.hpp"
#include "fracosc/specfun.hpp"

using namespace fracosc;

TEST_CASE("GL weights are signed binomials") {
  const double a = 0.37;
  const std::vector<double> w = gl_weights(a, 12);
  for (std::size_t k = 0; k < w.size(); ++k)
    CHECK(w[k] == doctest::Approx(((k % 2) ? -1.0 : 1.0) * gen_binomial(a, k)).epsilon(1e-13));
}

TEST_CASE("GL and L1 against the power rule") {
  const double a = 0.5;
  const SampledFunction f = SampledFunction::from_function([](double t) { return t; }, 0.0, 1.0, 1e-3);
  const SampledFunction d = gl_derivative(f, a);
  CHECK(d.values.back() == doctest::Approx(2.0 / std::sqrt(std::numbers::pi)).epsilon(5e-3));
  CHECK(d.values.front() == 0.0);
  const double a2 = 0.3;
  const SampledFunction q = SampledFunction::from_function([](double t) { return t * t; }, 0.0, 1.0, 1e-3);
  const SampledFunction l = l1_derivative(q, a2);
  CHECK(l.values.back() == doctest::Approx(2.0 / std::tgamma(3.0 - a2)).epsilon(1e-3));
  // constants map to zero
  const SampledFunction c = SampledFunction::from_function([](double) { return 3.0; }, 0.0, 1.0, 0.01);
  for (double v : gl_derivative(c, a).values) CHECK(v == 0.0);
}

TEST_CASE("right-sided GL") {
  // g(t) = 1 - t on [0, 1]: the right derivative is (1 - t)^(1 - a) / Gamma(2 - a).
  const double a = 0.5;
  const SampledFunction f = SampledFunction::from_function([](double t) { return 1.0 - t; }, 0.0, 1.0, 1e-3);
  const SampledFunction d = gl_derivative(f, a, Side::Right);
  CHECK(d.values.front() == doctest::Approx(1.0 / std::tgamma(2.0 - a)).epsilon(5e-3));
  CHECK(d.values.back() == 0.0);
}

TEST_CASE("integration by parts holds discretely for boundary-vanishing pairs") {
  // Left and right GL are adjoint under the trapezoid sum when f1, f2 vanish at both ends.
  const double a = 0.3;
  auto f1 = [](double t) { return t * (1.0 - t); };
  auto f2 = [](double t) { return t * t * (1.0 - t); };
  for (double h : {1e-3, 5e-4}) {
    const IbpReport r = integration_by_parts(SampledFunction::from_function(f1, 0.0, 1.0, h),
                                             SampledFunction::from_function(f2, 0.0, 1.0, h), a);
    CHECK(r.residual < 1e-14);
    // the minus-sign reading would need both sides to vanish
    CHECK(r.literal_residual == doctest::Approx(2.0 * std::abs(r.lhs)));
    CHECK(std::abs(r.lhs) > 1e-2);
  }
  const SampledFunction g = SampledFunction::from_function(f1, 0.0, 1.0, 1e-3);
  const SampledFunction zero = SampledFunction::from_function([](double) { return 0.0; }, 0.0, 1.0, 1e-3);
  CHECK(integration_by_parts_residual(zero, g, 0.5) == 0.0);
  const SampledFunction coarse = SampledFunction::from_function(f1, 0.0, 1.0, 2e-3);
  CHECK_THROWS_AS(integration_by_parts_residual(g, coarse, 0.5), DomainError);
}

TEST_CASE("FODE solver against closed forms") {
  FodeProblem p;
  p.alpha = 0.5;
  p.rhs = {Expr::parse("x1")};
  p.x0 = {1.0};
  const Trajectory tr = solve_fode(p);
  CHECK(tr.t.back() == doctest::Approx(1.0));
  CHECK(tr.x.back()[0] == doctest::Approx(std::exp(1.0) * std::erfc(-1.0)).epsilon(5e-3));

  // D^a x1 = x2, D^a x2 = -x1, x(0) = (1, 0): x1 = E_{2a}(-t^{2a}) = exp(-t) at a = 1/2.
  FodeProblem s;
  s.alpha = 0.5;
  s.rhs = {Expr::parse("x2"), Expr::parse("-x1")};
  s.x0 = {1.0, 0.0};
  const Trajectory ts = solve_fode(s);
  CHECK(ts.x.back()[0] == doctest::Approx(std::exp(-1.0)).epsilon(5e-3));

  // time-dependent forcing: D^a x = t^(1-a) / Gamma(2-a) gives x = t
  FodeProblem f;
  f.alpha = 0.4;
  f.rhs = {Expr::parse("t^0.6 / gamma(1.6)")};
  f.x0 = {0.0};
  const Trajectory tf = solve_fode(f);
  CHECK(std::abs(tf.x.back()[0] - 1.0) < 2e-3);

  FodeProblem z;
  z.alpha = 0.7;
  z.rhs = {Expr::number(0.0)};
  z.x0 = {2.5};
  z.h = 0.05;
  for (const auto& row : solve_fode(z).x) CHECK(row[0] == 2.5);
}

TEST_CASE("FODE validation and blow-up") {
  FodeProblem p;
  p.rhs = {Expr::parse("x1")};
  p.x0 = {1.0, 2.0};
  CHECK_THROWS_AS(solve_fode(p), DomainError);
  p.x0 = {1.0};
  p.alpha = 1.0;
  CHECK_THROWS_AS(solve_fode(p), DomainError);
  FodeProblem b;
  b.alpha = 0.9;
  b.rhs = {Expr::parse("x1^2")};
  b.x0 = {10.0};
  b.t_end = 5.0;
  b.h = 1e-2;
  CHECK_THROWS_AS(solve_fode(b), SolverError);
}

TEST_CASE("numeric fractional partial matches the symbolic one") {
  const double a = 0.4;
  const Expr e = Expr::parse("x1^2 * x2");
  const VarLookup at = [](Var v) { return v == Var::x(1) ? 1.3 : 0.7; };
  const double exact = frac_partial(e.to_poly(), Var::x(1), a).eval(at);
  CHECK(numeric_frac_partial(e, Var::x(1), a, at) == doctest::Approx(exact).epsilon(1e-4));
  const Expr g = Expr::parse("gamma(1 + x1)");
  const double v = numeric_frac_partial(g, Var::x(1), 1.0, at);
  const double h = 1e-5;
  CHECK(v == doctest::Approx((std::tgamma(2.3 + h) - std::tgamma(2.3 - h)) / (2 * h)).epsilon(1e-6));
}

TEST_CASE("spray ODE residual vanishes on an exact extremal") {
  // G = -c x1 for k = 1 gives D^{2a} x = G(1 + a) c x, solved by x = E_{2a}(lambda t^{2a}).
  const double a = 0.45, c = 0.8;
  const FracSpray s = FracSpray::from_exprs(1, 1, a, {Expr::parse("-0.8*x1")});
  const double lambda = std::tgamma(1.0 + a) * c;
  std::vector<Term> terms;
  for (int m = 0; m < 40; ++m) terms.push_back({std::pow(lambda, m) / std::tgamma(1.0 + 2 * a * m), 2 * a * m});
  const std::vector<FracSeries> curve{FracSeries(terms)};
  CHECK(spray_ode_residual(s, curve, uniform_grid(0.05, 1.0, 20)) < 1e-10);
  const std::vector<FracSeries> wrong{FracSeries({{1.0, 0.0}, {1.0, 2 * a}})};
  CHECK(spray_ode_residual(s, wrong, uniform_grid(0.05, 1.0, 20)) > 1e-3);
}
