#include "fracosc/geometry.hpp"

#include <cmath>

#include "fracosc/errors.hpp"
#include "fracosc/specfun.hpp"

namespace fracosc {

namespace {

constexpr double kFdStep = 1e-6;

VarLookup point_lookup(const Eigen::VectorXd& x) {
  return [&x](Var v) -> double {
    if (v.order != 0 || v.index < 1 || v.index > x.size()) throw EvalError("chart maps use only x1..xn, got " + v.name());
    return x(v.index - 1);
  };
}

Eigen::VectorXd eval_all(const std::vector<Expr>& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd r(f.size());
  const VarLookup look = point_lookup(x);
  for (std::size_t i = 0; i < f.size(); ++i) r(static_cast<Eigen::Index>(i)) = f[i].eval(look);
  return r;
}

void require_positive(const Eigen::VectorXd& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!(v(i) > 0.0))
      throw SingularityError(std::string(what) + " coordinate " + std::to_string(i + 1) +
                             " is not positive; fractional Jacobians need the open positive orthant");
}

}  // namespace

void ChartMap::validate() const {
  if (n < 1) throw DomainError("chart map: n must be >= 1");
  if (static_cast<int>(forward.size()) != n || static_cast<int>(inverse.size()) != n)
    throw DomainError("chart map: need n forward and n inverse components");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("chart map: alpha must lie in (0, 1]");
  for (const auto& e : forward) check_vars(e, n, 0);
  for (const auto& e : inverse) check_vars(e, n, 0);
}

Eigen::VectorXd ChartMap::apply(const Eigen::VectorXd& x) const { return eval_all(forward, x); }
Eigen::VectorXd ChartMap::apply_inverse(const Eigen::VectorXd& xbar) const { return eval_all(inverse, xbar); }

bool ChartMap::is_monomial() const {
  auto mono = [](const Expr& e) {
    try {
      return e.to_poly().is_monomial();
    } catch (const UnsupportedForm&) {
      return false;
    }
  };
  for (const auto& e : forward)
    if (!mono(e)) return false;
  for (const auto& e : inverse)
    if (!mono(e)) return false;
  return true;
}

Eigen::MatrixXd classical_jacobian(const std::vector<Expr>& f, const Eigen::VectorXd& x) {
  const auto m = static_cast<Eigen::Index>(f.size());
  const Eigen::Index n = x.size();
  Eigen::MatrixXd J(m, n);
  const VarLookup look = point_lookup(x);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Expr& e = f[static_cast<std::size_t>(i)];
    if (e.is_poly()) {
      const Poly p = e.to_poly();
      for (Eigen::Index j = 0; j < n; ++j) J(i, j) = partial(p, Var::x(static_cast<int>(j + 1))).eval(look);
      continue;
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      Eigen::VectorXd xp = x, xm = x;
      xp(j) += kFdStep;
      xm(j) -= kFdStep;
      J(i, j) = (e.eval(point_lookup(xp)) - e.eval(point_lookup(xm))) / (2.0 * kFdStep);
    }
  }
  return J;
}

Eigen::MatrixXd frac_jacobian(const ChartMap& m, const Eigen::VectorXd& x, JacobianDirection dir) {
  m.validate();
  require_positive(x, "source");
  const Eigen::VectorXd xbar = m.apply(x);
  require_positive(xbar, "target");
  // Forward: u = xbar(x), v = x. Inverse: u = x(xbar), v = xbar.
  const bool fwd = dir == JacobianDirection::Forward;
  const Eigen::VectorXd& u = fwd ? xbar : x;
  const Eigen::VectorXd& v = fwd ? x : xbar;
  const Eigen::MatrixXd D = fwd ? classical_jacobian(m.forward, x) : classical_jacobian(m.inverse, xbar);
  const double det = D.determinant();
  if (!std::isfinite(det) || std::abs(det) < 1e-12 * std::max(1.0, D.cwiseAbs().maxCoeff()))
    throw RankError("chart map Jacobian is singular at the point");
  const double a = m.alpha;
  Eigen::MatrixXd J(m.n, m.n);
  for (int i = 0; i < m.n; ++i)
    for (int j = 0; j < m.n; ++j) J(i, j) = std::pow(u(i), a - 1.0) * D(i, j) * std::pow(v(j), 1.0 - a);
  return J;
}

double jacobian_identity_residual(const ChartMap& m, const Eigen::VectorXd& x) {
  const Eigen::MatrixXd P =
      frac_jacobian(m, x, JacobianDirection::Inverse) * frac_jacobian(m, x, JacobianDirection::Forward);
  return (P - Eigen::MatrixXd::Identity(m.n, m.n)).cwiseAbs().maxCoeff();
}

PolyMatrix frac_jacobian_symbolic(const ChartMap& m) {
  m.validate();
  PolyMatrix J(static_cast<std::size_t>(m.n));
  const double a = m.alpha;
  for (int i = 0; i < m.n; ++i) {
    Poly f;
    try {
      f = m.forward[static_cast<std::size_t>(i)].to_poly();
    } catch (const UnsupportedForm&) {
      throw UnsupportedForm("symbolic fractional Jacobian needs monomial chart maps");
    }
    if (!f.is_monomial()) throw UnsupportedForm("symbolic fractional Jacobian needs monomial chart maps");
    const Poly lead = f.pow(a - 1.0);
    for (int j = 0; j < m.n; ++j) {
      const Var xj = Var::x(j + 1);
      J(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) = lead * partial(f, xj) * Poly::var(xj, 1.0 - a);
    }
  }
  return J;
}

JacobianCrossCheck jacobian_cross_check(const ChartMap& m, const Eigen::VectorXd& x) {
  JacobianCrossCheck r;
  r.closed_form = frac_jacobian(m, x, JacobianDirection::Inverse);
  const Eigen::VectorXd xbar = m.apply(x);
  const VarLookup look = point_lookup(xbar);
  r.gamma_form.resize(m.n, m.n);
  for (int i = 0; i < m.n; ++i) {
    const Poly xi = m.inverse[static_cast<std::size_t>(i)].to_poly();
    if (!xi.is_monomial()) throw UnsupportedForm("Gamma-form Jacobian cross-check needs monomial maps");
    const Poly xa = xi.pow(m.alpha);
    for (int j = 0; j < m.n; ++j)
      r.gamma_form(i, j) = frac_partial(xa, Var::x(j + 1), m.alpha).eval(look) * rgamma(1.0 + m.alpha);
  }
  r.max_abs_discrepancy = (r.closed_form - r.gamma_form).cwiseAbs().maxCoeff();
  return r;
}

FracOneForm exterior_d0(const Poly& f, int n, double alpha) {
  FracOneForm w{n, FormBasis::FracDifferential, {}};
  for (int i = 1; i <= n; ++i) w.a.push_back(frac_partial(f, Var::x(i), alpha));
  return w;
}

PolyMatrix exterior_d1(const FracOneForm& w, double alpha) {
  if (static_cast<int>(w.a.size()) != w.n) throw DomainError("one-form: component count differs from n");
  std::vector<Poly> b = w.a;
  if (w.basis == FormBasis::Differential)
    for (int j = 0; j < w.n; ++j) b[j] = b[j] * Poly::var(Var::x(j + 1), 1.0 - alpha) * Poly(1.0 / alpha);
  const auto n = static_cast<std::size_t>(w.n);
  PolyMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      c(i, j) = frac_partial(b[j], Var::x(static_cast<int>(i + 1)), alpha) -
                frac_partial(b[i], Var::x(static_cast<int>(j + 1)), alpha);
    }
  return c;
}

}  // namespace fracosc
