#include <cmath>

#include "doctest.h"
#include "fracosc/commands.hpp"
#include "fracosc/errors.hpp"
#include "fracosc/fracnum.hpp"
#include "fracosc/lagrange.hpp"
#include "fracosc/specfun.hpp"

using namespace fracosc;

namespace {

constexpr double kA = 0.3;  // example order; c = 1, gamma = 2, a_i = 1

double g(double x) { return std::tgamma(x); }

FracLagrangian lag(int n, int k, double a, const std::string& s) {
  return FracLagrangian::from_expr(n, k, a, Expr::parse(s));
}

FracLagrangian example_frac() {
  return lag(1, 3, kA, "x1^2 - y1_1^0.6 + gamma(1.9)/gamma(1.6)*y1_2^0.6 - gamma(2.2)/gamma(1.6)*y1_3^0.6");
}

FracLagrangian example_classical() {
  return lag(1, 3, kA,
             "gamma(3)/gamma(3.7)*x1^2.7 - gamma(1.6)/gamma(2.3)*y1_1^1.3 + gamma(1.9)/gamma(2.3)*y1_2^1.3 - "
             "gamma(2.2)/gamma(2.3)*y1_3^1.3");
}

Poly example_target() {
  return Expr::parse("gamma(3)/gamma(2.7)*x1^1.7 + gamma(1.6)*y1_2 + gamma(1.9)*y1_3 + gamma(2.2)*y1_4").to_poly();
}

double max_over_jets(const Poly& p, int n, int levels) {
  double m = 0.0;
  for (const JetPoint& q : sample_jets(n, levels, 25, 17)) m = std::max(m, std::abs(p.eval(q.lookup())));
  return m;
}

double max_diff(const PolyMatrix& a, const PolyMatrix& b, int n, int k) {
  double m = 0.0;
  for (const JetPoint& q : sample_jets(n, k, 25, 23))
    m = std::max(m, (eval_matrix(a, q) - eval_matrix(b, q)).cwiseAbs().maxCoeff());
  return m;
}

// x(t) = x0 E_{2a}(lambda t^{2a}) + v t^a E_{2a,1+a}(lambda t^{2a}), solving D^a D^a x = lambda x
FracSeries two_step_extremal(double a, double lambda, double x0, double v) {
  std::vector<Term> t;
  for (int m = 0; m < 45; ++m) {
    t.push_back({x0 * std::pow(lambda, m) / g(1 + 2 * a * m), 2 * a * m});
    t.push_back({v * std::pow(lambda, m) / g(1 + a + 2 * a * m), a + 2 * a * m});
  }
  return FracSeries(t);
}

}  // namespace

TEST_CASE("example Lagrangians reproduce the target equation") {
  const Poly target = example_target();
  const Poly rf = el_operator_frac(example_frac())[0] - target;
  const Poly rc = el_operator_classical(example_classical())[0] - target;
  CHECK(rf.max_abs_coef() < 1e-12);
  CHECK(rc.max_abs_coef() < 1e-12);
}

TEST_CASE("literal readings do not reproduce it") {
  const Poly target = example_target();
  // (y^a)^a read as y1^a
  const FracLagrangian lf = lag(1, 3, kA, "x1^2/1.7 - gamma(1.6)*y1_1^0.3 + gamma(1.9)*y1_2^0.3 - gamma(2.2)*y1_3^0.3");
  CHECK(max_over_jets(el_operator_frac(lf)[0] - target, 1, 4) > 1e-2);
  const FracLagrangian lc = lag(1, 3, kA, "gamma(3)/gamma(3.7)*x1^0.7 - 0.5*gamma(1.6)*y1_1^2 + 0.5*gamma(1.9)*y1_2^2 - 0.5*gamma(2.2)*y1_3^2");
  CHECK(max_over_jets(el_operator_classical(lc)[0] - target, 1, 4) > 1e-2);
  // the literal d_t range drops the chain-rule terms
  CHECK(max_over_jets(el_operator_frac(example_frac(), {DtRange::Literal})[0] - target, 1, 4) > 1e-2);
}

TEST_CASE("total derivative acts along the curve") {
  // d_t x1 at alpha = 1 is y1_1; d_t of a y-free polynomial uses only the x slot
  const Poly d = total_derivative(Poly::var(Var::x(1), 2.0), 1, 1, 1.0, 1, DtRange::Full);
  const VarLookup at = [](Var v) { return v == Var::x(1) ? 3.0 : 0.5; };
  CHECK(d.eval(at) == doctest::Approx(2 * 3.0 * 0.5));
}

TEST_CASE("fundamental tensor and regularity") {
  const FracLagrangian l = lag(2, 1, 0.4, "y1_1^0.8 + 3*y2_1^0.8 + x1*x2");
  const JetPoint p = sample_jets(2, 1, 1, 1).front();
  const FundamentalTensor f = fundamental_tensor(l, p);
  CHECK(f.regular);
  CHECK(f.g(0, 0) == doctest::Approx(0.5 * g(1.8)).epsilon(1e-13));
  CHECK(f.g(1, 1) == doctest::Approx(1.5 * g(1.8)).epsilon(1e-13));
  CHECK(f.g(0, 1) == 0.0);
  CHECK_FALSE(fundamental_tensor(lag(2, 1, 0.4, "y1_1^0.8 + x2"), p).regular);
}

TEST_CASE("Craig-Synge sum form versus the literal closed form") {
  const double a = 0.4;
  const FracLagrangian l = lag(1, 1, a, "y1_1^0.8");
  const Poly y2 = Poly::var(Var::y(1, 2));
  const Poly sum = craig_synge(l, 0)[0];
  const Poly closed = craig_synge_closed_form(l)[0];
  CHECK((sum - y2 * Poly(-g(1 + 2 * a) / g(1 + a))).max_abs_coef() < 1e-13);
  CHECK((closed - y2 * Poly(-0.5 * g(1 + 2 * a))).max_abs_coef() < 1e-13);
  // top level keeps only the a = k term
  const FracLagrangian l3 = example_frac();
  const Poly top = craig_synge(l3, 3)[0];
  const Poly ref = total_derivative(frac_partial(l3.L, Var::y(1, 3), kA), 1, 3, kA, 3, DtRange::Full) *
                   Poly(-rgamma(1 + 3 * kA));
  CHECK((top - ref).max_abs_coef() < 1e-14);
  CHECK_THROWS_AS(craig_synge(l3, 4), DomainError);
}

TEST_CASE("extracted spray of a free Lagrangian vanishes") {
  const FracSpray s = extract_spray(lag(2, 1, 0.6, "y1_1^1.2 + y2_1^1.2"));
  for (const Poly& G : s.G) CHECK(G.max_abs_coef() < 1e-14);
}

TEST_CASE("extracted spray closed loop") {
  const double a = 0.45, c = 0.7;
  const FracLagrangian l = lag(1, 1, a, "y1_1^0.9 + 0.7*x1^1.45");
  const FracSpray s = extract_spray(l);
  const double kappa = 2 * c * g(a) * g(2 + a) / (g(1 + a) * g(1 + a) * g(1 + 2 * a));
  const JetPoint p = sample_jets(1, 1, 1, 2).front();
  CHECK(s.G[0].eval(p.lookup()) == doctest::Approx(-kappa * p.x(0)).epsilon(1e-13));

  const double lambda = g(1 + a) * kappa, x0 = 1.0, v = 0.5;
  const std::vector<FracSeries> curve{two_step_extremal(a, lambda, x0, v)};
  CHECK(spray_ode_residual(s, curve, uniform_grid(0.05, 1.0, 20)) < 1e-8);

  // D^a x = G(1+a) y, D^a y = kappa x as a first-order system
  FodeProblem sys;
  sys.alpha = a;
  sys.rhs = {Expr::from_poly(Poly::var(Var::x(2)) * Poly(g(1 + a))), Expr::from_poly(Poly::var(Var::x(1)) * Poly(kappa))};
  sys.x0 = {x0, v / g(1 + a)};
  const Trajectory tr = solve_fode(sys);
  CHECK(tr.x.back()[0] == doctest::Approx(evaluate(curve[0], 1.0)).epsilon(5e-3));
}

TEST_CASE("Lagrange spray extremals satisfy the fractional EL operator") {
  const double a = 0.45, c = 0.7;
  const FracLagrangian l = lag(1, 1, a, "y1_1^0.9 + 0.7*x1^1.45");
  const std::vector<Poly> G = lagrange_spray(l);
  const JetPoint p = sample_jets(1, 1, 1, 3).front();
  CHECK(G[0].eval(p.lookup()) == doctest::Approx(-c * g(2 + a) / (2 * g(1 + 2 * a)) * p.x(0)).epsilon(1e-13));
  // y^{(2a)} = -2G, i.e. D^{2a} x = c G(2+a) x
  const ExtremalCurve curve{two_step_extremal(a, c * g(2 + a), 1.0, 0.3)};
  const auto res = el_residual_frac(l, curve, uniform_grid(0.05, 1.0, 20));
  double worst = 0.0;
  for (double r : res[0]) worst = std::max(worst, std::abs(r));
  CHECK(worst < 1e-8);
  // the same extremal from the integrator: D^a x = G(1+a) y1, D^a y1 = G(1+2a)/G(1+a) y2, y2 = -2G
  FodeProblem sys;
  sys.alpha = a;
  sys.rhs = {Expr::from_poly(Poly::var(Var::x(2)) * Poly(g(1 + a))),
             Expr::from_poly(G[0].substitute(Var::x(1), 1.0) * Poly::var(Var::x(1)) * Poly(-2.0 * g(1 + 2 * a) / g(1 + a)))};
  sys.x0 = {1.0, 0.3 / g(1 + a)};
  const Trajectory tr = solve_fode(sys);
  CHECK(tr.x.back()[0] == doctest::Approx(evaluate(curve[0], 1.0)).epsilon(5e-3));
  // the literal reading gives a different spray
  const std::vector<Poly> Gl = lagrange_spray(l, LagrangeSprayReading::Literal);
  CHECK(std::abs(Gl[0].eval(p.lookup()) - G[0].eval(p.lookup())) > 1e-3);
}

TEST_CASE("Riemann prolongation reproduces the corrected second-order display at alpha = 1") {
  const RiemannStructure r = RiemannStructure::from_exprs(1, 1.0, {Expr::parse("x1^3")});
  const DualCoefficients d = prolong_riemann(r, 2);
  for (const JetPoint& q : sample_jets(1, 2, 10, 8)) {
    const double x = q.x(0), y1 = q.y(0, 0), y2 = q.y(1, 0);
    const double gam = 1.5 / x, dgam = -1.5 / (x * x);
    CHECK(eval_matrix(d.M[0], q)(0, 0) == doctest::Approx(gam * y1).epsilon(1e-13));
    CHECK(eval_matrix(d.M[1], q)(0, 0) == doctest::Approx(gam * y2 + (dgam + gam * gam) * y1 * y1).epsilon(1e-13));
  }
}

TEST_CASE("Riemann, Finsler and Lagrange agree at alpha = 1") {
  const RiemannStructure r = RiemannStructure::from_exprs(2, 1.0, {Expr::parse("x1^2"), Expr::parse("0"), Expr::parse("0"), Expr::parse("x1*x2^2")});
  const FinslerStructure f = FinslerStructure::from_F(2, 1.0, Expr::parse("(x1^2*y1_1^2 + x1*x2^2*y2_1^2)^0.5"));
  const FracLagrangian l = lag(2, 1, 1.0, "x1^2*y1_1^2 + x1*x2^2*y2_1^2");
  for (int k = 1; k <= 3; ++k) {
    const DualCoefficients dr = prolong_riemann(r, k), df = prolong_finsler(f, k), dl = prolong_lagrange(l, k);
    for (int a = 0; a < k; ++a) {
      CHECK(max_diff(dr.M[a], df.M[a], 2, k) < 1e-8);
      CHECK(max_diff(dr.M[a], dl.M[a], 2, k) < 1e-8);
    }
  }
}

TEST_CASE("documented factors between constructors at alpha < 1") {
  const double a = 0.5;
  const RiemannStructure r = RiemannStructure::from_exprs(1, a, {Expr::parse("x1^2")});
  const FinslerStructure f = FinslerStructure::from_F2(1, a, Expr::parse("x1^2*y1_1^2"));
  const FracLagrangian l = FracLagrangian::from_expr(1, 1, a, Expr::parse("2*x1^2*y1_1^1/gamma(2)"));
  const DualCoefficients dr = prolong_riemann(r, 1), df = prolong_finsler(f, 1), dl = prolong_lagrange(l, 1);
  for (const JetPoint& q : sample_jets(1, 1, 10, 4)) {
    const double y = q.y(0, 0);
    const double mr = eval_matrix(dr.M[0], q)(0, 0);
    CHECK(eval_matrix(df.M[0], q)(0, 0) == doctest::Approx(mr * 2.0 * std::pow(y, 1 - a) / (2 * g(3 - a))).epsilon(1e-12));
    CHECK(eval_matrix(dl.M[0], q)(0, 0) == doctest::Approx(mr * ((1 + a) - std::pow(y, a - 1) / g(1 + a))).epsilon(1e-12));
  }
}

TEST_CASE("direct recursion agrees with the spray route") {
  // At a = 0.5 the third order needs D^a of x1^-1, where the reviewed derivative diverges.
  const RiemannStructure r5 = RiemannStructure::from_exprs(1, 0.5, {Expr::parse("x1^2")});
  CHECK_THROWS_AS(prolong_riemann(r5, 3), DomainError);
  for (int k = 1; k <= 2; ++k) {
    const DualCoefficients direct = prolong_riemann(r5, k);
    const DualCoefficients viaspray = spray_to_dual(geodesic_spray(r5, k));
    for (int b = 0; b < k; ++b) CHECK(max_diff(direct.M[b], viaspray.M[b], 1, k) < 1e-8);
  }
  const double a = 0.3;
  const RiemannStructure r = RiemannStructure::from_exprs(1, a, {Expr::parse("x1^2")});
  for (int k = 1; k <= 3; ++k) {
    const DualCoefficients direct = prolong_riemann(r, k);
    const DualCoefficients viaspray = spray_to_dual(geodesic_spray(r, k));
    for (int b = 0; b < k; ++b) CHECK(max_diff(direct.M[b], viaspray.M[b], 1, k) < 1e-8);
  }
  // the literal Liouville-field reading of the recursion operator differs from k = 2 on
  const DualCoefficients lit = prolong_riemann(r, 2, GammaOperator::LiouvilleField);
  CHECK(max_diff(lit.M[1], prolong_riemann(r, 2).M[1], 1, 2) > 1e-3);
}

TEST_CASE("constructor validation") {
  CHECK_THROWS_AS(prolong_lagrange(lag(1, 2, 0.5, "y1_2^2"), 2), DomainError);
  CHECK_THROWS_AS(RiemannStructure::from_exprs(2, 0.5, {Expr::parse("1")}), DomainError);
  CHECK_THROWS_AS(FracLagrangian::from_expr(1, 1, 0.5, Expr::parse("y1_2")), DomainError);
  CHECK_THROWS_AS(FracLagrangian::from_expr(1, 1, 1.5, Expr::parse("y1_1")), DomainError);
  CHECK_THROWS_AS(extract_spray(lag(1, 1, 0.5, "x1")), RankError);
}
