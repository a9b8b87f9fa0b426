#include "fracosc/lagrange.hpp"

#include <algorithm>
#include <cmath>

#include "fracosc/errors.hpp"
#include "fracosc/specfun.hpp"

namespace fracosc {

namespace {

Var level_var(int level, int i) { return level == 0 ? Var::x(i) : Var::y(i, level); }

std::function<Poly(const Poly&)> gamma_operator(int n, int k, double alpha, GammaOperator op) {
  if (op == GammaOperator::TotalDerivation)
    return [=](const Poly& f) { return liouville_derivation(f, n, k, alpha); };
  // y^{i(alpha)} D_{y^{i(alpha k)}}
  return [=](const Poly& f) {
    Poly r;
    for (int i = 1; i <= n; ++i) r += Poly::var(Var::y(i, 1)) * frac_partial(f, Var::y(i, k), alpha);
    return r;
  };
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
}

}  // namespace

FracLagrangian FracLagrangian::from_expr(int n, int k, double alpha, const Expr& e) {
  check_vars(e, n, k);
  FracLagrangian l{n, k, alpha, e.to_poly()};
  l.validate();
  return l;
}

void FracLagrangian::validate() const {
  if (n < 1 || k < 1) throw DomainError("Lagrangian: need n >= 1 and k >= 1");
  check_alpha(alpha);
}

JetPoint jet_lift(const ExtremalCurve& c, double alpha, int levels, double t) {
  const int n = static_cast<int>(c.size());
  JetPoint p = JetPoint::zero(n, levels);
  for (int i = 0; i < n; ++i) {
    FracSeries f = c[static_cast<std::size_t>(i)];
    p.x(i) = evaluate(f, t);
    for (int a = 1; a <= levels; ++a) {
      f = frac_derive(f, alpha);
      p.y(a - 1, i) = evaluate(f, t) * rgamma(1.0 + alpha * a);
    }
  }
  return p;
}

PolyMatrix fundamental_tensor_symbolic(const FracLagrangian& lag) {
  const auto n = static_cast<std::size_t>(lag.n);
  PolyMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Poly di = frac_partial(lag.L, Var::y(static_cast<int>(i + 1), 1), lag.alpha);
    for (std::size_t j = 0; j < n; ++j)
      g(i, j) = frac_partial(di, Var::y(static_cast<int>(j + 1), 1), lag.alpha) * Poly(0.5);
  }
  return g;
}

FundamentalTensor fundamental_tensor(const FracLagrangian& lag, const JetPoint& at) {
  FundamentalTensor r;
  r.g = eval_matrix(fundamental_tensor_symbolic(lag), at);
  r.regular = Eigen::FullPivLU<Eigen::MatrixXd>(r.g).rank() == lag.n;
  return r;
}

Poly total_derivative(const Poly& F, int n, int k, double alpha, int a, DtRange range) {
  const int top = range == DtRange::Full ? k + 1 : a;
  Poly r;
  for (int b = 1; b <= top; ++b)
    for (int j = 1; j <= n; ++j) {
      const Poly d = frac_partial(F, level_var(b - 1, j), alpha);
      if (!d.is_zero()) r += Poly::var(Var::y(j, b)) * d;
    }
  return r;
}

std::vector<Poly> el_operator_frac(const FracLagrangian& lag, const ElOptions& opt) {
  lag.validate();
  std::vector<Poly> out;
  for (int i = 1; i <= lag.n; ++i) {
    Poly e = frac_partial(lag.L, Var::x(i), lag.alpha);
    for (int a = 1; a <= lag.k; ++a) {
      const Poly inner = frac_partial(lag.L, Var::y(i, a), lag.alpha);
      const Poly d = total_derivative(inner, lag.n, lag.k, lag.alpha, a, opt.range);
      e += (a % 2) ? -d : d;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<Poly> el_operator_classical(const FracLagrangian& lag, const ElOptions& opt) {
  lag.validate();
  std::vector<Poly> out;
  for (int i = 1; i <= lag.n; ++i) {
    Poly e = partial(lag.L, Var::x(i));
    for (int a = 1; a <= lag.k; ++a) {
      const Poly inner = partial(lag.L, Var::y(i, a));
      const Poly d = total_derivative(inner, lag.n, lag.k, lag.alpha, a, opt.range);
      e += (a % 2) ? -d : d;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<std::vector<double>> sample_along(const std::vector<Poly>& op, const ExtremalCurve& c, double alpha,
                                              int levels, const std::vector<double>& grid) {
  if (op.size() != c.size()) throw DomainError("curve dimension differs from the operator");
  std::vector<std::vector<double>> out(op.size(), std::vector<double>(grid.size()));
  for (std::size_t node = 0; node < grid.size(); ++node) {
    const JetPoint p = jet_lift(c, alpha, levels, grid[node]);
    const VarLookup look = p.lookup();
    for (std::size_t i = 0; i < op.size(); ++i) out[i][node] = op[i].eval(look);
  }
  return out;
}

std::vector<std::vector<double>> el_residual_frac(const FracLagrangian& lag, const ExtremalCurve& c,
                                                  const std::vector<double>& grid, const ElOptions& opt) {
  return sample_along(el_operator_frac(lag, opt), c, lag.alpha, lag.k + 1, grid);
}

std::vector<std::vector<double>> el_residual_classical(const FracLagrangian& lag, const ExtremalCurve& c,
                                                       const std::vector<double>& grid, const ElOptions& opt) {
  return sample_along(el_operator_classical(lag, opt), c, lag.alpha, lag.k + 1, grid);
}

std::vector<Poly> craig_synge(const FracLagrangian& lag, int level, const ElOptions& opt) {
  lag.validate();
  if (level < 0 || level > lag.k) throw DomainError("Craig-Synge level must lie in 0..k");
  std::vector<Poly> out;
  for (int i = 1; i <= lag.n; ++i) {
    Poly e = level == 0 ? frac_partial(lag.L, Var::x(i), lag.alpha) : Poly();
    for (int a = std::max(level, 1); a <= lag.k; ++a) {
      const Poly inner = frac_partial(lag.L, Var::y(i, a), lag.alpha);
      const Poly d = total_derivative(inner, lag.n, lag.k, lag.alpha, a, opt.range) *
                     Poly(((a % 2) ? -1.0 : 1.0) * rgamma(1.0 + lag.alpha * a));
      e += d;
    }
    out.push_back(e);
  }
  return out;
}

std::vector<std::vector<double>> craig_synge_along(const FracLagrangian& lag, const ExtremalCurve& c, int level,
                                                   const std::vector<double>& grid, const ElOptions& opt) {
  return sample_along(craig_synge(lag, level, opt), c, lag.alpha, lag.k + 1, grid);
}

std::vector<Poly> craig_synge_closed_form(const FracLagrangian& lag) {
  lag.validate();
  const int k = lag.k;
  const PolyMatrix g = fundamental_tensor_symbolic(lag);
  const double sign = ((k - 1) % 2) ? -1.0 : 1.0;
  const double pre = sign * rgamma(1.0 + lag.alpha * (k - 1));
  std::vector<Poly> out;
  for (int i = 1; i <= lag.n; ++i) {
    Poly e = frac_partial(lag.L, level_var(k - 1, i), lag.alpha);
    e -= liouville_derivation(frac_partial(lag.L, Var::y(i, k), lag.alpha), lag.n, k, lag.alpha);
    for (int j = 1; j <= lag.n; ++j)
      e -= g(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(j - 1)) * Poly::var(Var::y(j, k + 1));
    out.push_back(e * Poly(pre));
  }
  return out;
}

FracSpray extract_spray(const FracLagrangian& lag) {
  lag.validate();
  const int n = lag.n, k = lag.k;
  const double a = lag.alpha;
  const PolyMatrix ginv = inverse(fundamental_tensor_symbolic(lag));
  const double pre = gamma(a) * rgamma(1.0 + a * k) * rgamma(1.0 + a);
  std::vector<Poly> bracket;
  for (int j = 1; j <= n; ++j)
    bracket.push_back(liouville_derivation(frac_partial(lag.L, Var::y(j, k), a), n, k, a) -
                      frac_partial(lag.L, level_var(k - 1, j), a));
  FracSpray s{n, k, a, {}};
  for (int i = 0; i < n; ++i) {
    Poly G;
    for (int j = 0; j < n; ++j) G += ginv(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * bracket[j];
    s.G.push_back(G * Poly(pre));
  }
  return s;
}

RiemannStructure RiemannStructure::from_exprs(int n, double alpha, const std::vector<Expr>& entries) {
  if (static_cast<int>(entries.size()) != n * n) throw DomainError("Riemann metric: need n*n entries");
  RiemannStructure r{n, alpha, PolyMatrix(static_cast<std::size_t>(n))};
  for (std::size_t e = 0; e < entries.size(); ++e) {
    check_vars(entries[e], n, 0);
    r.g.a[e] = entries[e].to_poly();
  }
  for (std::size_t i = 0; i < r.g.n; ++i)
    for (std::size_t j = i + 1; j < r.g.n; ++j) {
      const Poly s = (r.g(i, j) + r.g(j, i)) * Poly(0.5);
      r.g(i, j) = s;
      r.g(j, i) = s;
    }
  r.validate();
  return r;
}

void RiemannStructure::validate() const {
  if (n < 1 || static_cast<int>(g.n) != n) throw DomainError("Riemann metric: size differs from n");
  check_alpha(alpha);
}

std::vector<PolyMatrix> christoffel(const PolyMatrix& g, int n, double alpha) {
  const PolyMatrix ginv = inverse(g);
  const auto N = static_cast<std::size_t>(n);
  // dg[m](i, j) = D_{x^m} g_ij
  std::vector<PolyMatrix> dg(N, PolyMatrix(N));
  for (std::size_t m = 0; m < N; ++m)
    for (std::size_t e = 0; e < g.a.size(); ++e) dg[m].a[e] = frac_partial(g.a[e], Var::x(static_cast<int>(m + 1)), alpha);
  std::vector<PolyMatrix> gam(N, PolyMatrix(N));
  for (std::size_t l = 0; l < N; ++l)
    for (std::size_t i = 0; i < N; ++i)
      for (std::size_t j = 0; j < N; ++j) {
        Poly s;
        for (std::size_t q = 0; q < N; ++q) {
          const Poly b = dg[i](q, j) + dg[j](i, q) - dg[q](i, j);
          if (!b.is_zero()) s += ginv(l, q) * b;
        }
        gam[l](i, j) = s * Poly(0.5);
      }
  return gam;
}

DualCoefficients prolong_riemann(const RiemannStructure& r, int k, GammaOperator op) {
  r.validate();
  if (k < 1) throw DomainError("prolongation order must be >= 1");
  const auto n = static_cast<std::size_t>(r.n);
  const std::vector<PolyMatrix> gam = christoffel(r.g, r.n, r.alpha);
  PolyMatrix M1(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Poly s;
      for (std::size_t m = 0; m < n; ++m) s += gam[i](j, m) * Poly::var(Var::y(static_cast<int>(m + 1), 1));
      M1(i, j) = s;
    }
  return dual_recursion(M1, r.n, k, r.alpha, gamma_operator(r.n, k, r.alpha, op));
}

FracSpray geodesic_spray(const RiemannStructure& r, int k) {
  const auto n = static_cast<std::size_t>(r.n);
  const std::vector<PolyMatrix> gam = christoffel(r.g, r.n, r.alpha);
  FracSpray s{r.n, k, r.alpha, {}};
  const double diag = 2.0 * rgamma(2.0 + r.alpha);
  for (std::size_t i = 0; i < n; ++i) {
    Poly G;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t m = 0; m < n; ++m) {
        const Var yp = Var::y(static_cast<int>(p + 1), 1), ym = Var::y(static_cast<int>(m + 1), 1);
        const Poly q = p == m ? Poly::term(diag, Monomial(yp, 1.0 + r.alpha)) : Poly::var(yp) * Poly::var(ym);
        G += gam[i](p, m) * q;
      }
    s.G.push_back(G * Poly(0.5));
  }
  return s;
}

FinslerStructure FinslerStructure::from_F(int n, double alpha, const Expr& F) {
  check_vars(F, n, 1);
  const Expr::Node& root = F.root();
  const Poly F2 = (root.kind == Expr::Kind::Pow && root.value == 0.5) ? F.child(0).to_poly() : F.to_poly().pow(2.0);
  FinslerStructure f{n, alpha, F2};
  f.validate();
  return f;
}

FinslerStructure FinslerStructure::from_F2(int n, double alpha, const Expr& F2) {
  check_vars(F2, n, 1);
  FinslerStructure f{n, alpha, F2.to_poly()};
  f.validate();
  return f;
}

void FinslerStructure::validate() const {
  if (n < 1) throw DomainError("Finsler structure: need n >= 1");
  check_alpha(alpha);
}

PolyMatrix finsler_fundamental_tensor(const FinslerStructure& f) {
  FracLagrangian l{f.n, 1, f.alpha, f.F2};
  return fundamental_tensor_symbolic(l);
}

PolyMatrix cartan_coefficients(const FinslerStructure& f) {
  const auto n = static_cast<std::size_t>(f.n);
  const std::vector<PolyMatrix> gam = christoffel(finsler_fundamental_tensor(f), f.n, f.alpha);
  PolyMatrix G(n);
  for (std::size_t i = 0; i < n; ++i) {
    Poly q;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t m = 0; m < n; ++m)
        q += gam[i](p, m) * Poly::var(Var::y(static_cast<int>(p + 1), 1)) * Poly::var(Var::y(static_cast<int>(m + 1), 1));
    for (std::size_t j = 0; j < n; ++j) G(i, j) = frac_partial(q, Var::y(static_cast<int>(j + 1), 1), f.alpha) * Poly(0.5);
  }
  return G;
}

DualCoefficients prolong_finsler(const FinslerStructure& f, int k, GammaOperator op) {
  f.validate();
  if (k < 1) throw DomainError("prolongation order must be >= 1");
  return dual_recursion(cartan_coefficients(f), f.n, k, f.alpha, gamma_operator(f.n, k, f.alpha, op));
}

std::vector<Poly> lagrange_spray(const FracLagrangian& l, LagrangeSprayReading reading) {
  l.validate();
  const auto n = static_cast<std::size_t>(l.n);
  const double a = l.alpha;
  PolyMatrix g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Poly di = frac_partial(l.L, Var::y(static_cast<int>(i + 1), 1), a);
    for (std::size_t m = 0; m < n; ++m) g(i, m) = frac_partial(di, Var::y(static_cast<int>(m + 1), 1), a);
  }
  const PolyMatrix ginv = inverse(g);
  std::vector<Poly> inner(n);
  for (std::size_t m = 0; m < n; ++m) {
    const int mi = static_cast<int>(m + 1);
    Poly v = -frac_partial(l.L, Var::x(mi), a);
    if (reading == LagrangeSprayReading::Classical) {
      const Poly dy = frac_partial(l.L, Var::y(mi, 1), a);
      for (int j = 1; j <= l.n; ++j) v += frac_partial(dy, Var::x(j), a) * Poly::var(Var::y(j, 1));
    }
    inner[m] = v;
  }
  const double scale = reading == LagrangeSprayReading::Classical ? 0.5 : 1.0;
  std::vector<Poly> G(n);
  for (std::size_t i = 0; i < n; ++i) {
    Poly s;
    for (std::size_t m = 0; m < n; ++m) s += ginv(i, m) * inner[m];
    G[i] = s * Poly(scale);
  }
  return G;
}

DualCoefficients prolong_lagrange(const FracLagrangian& l, int k, LagrangeSprayReading reading, GammaOperator op) {
  if (l.k != 1) throw DomainError("prolong_lagrange takes a first-order Lagrangian (k = 1)");
  if (k < 1) throw DomainError("prolongation order must be >= 1");
  for (const auto& [m, c] : l.L.terms())
    for (const auto& [v, e] : m.factors())
      if (v.order > 1) throw DomainError("first-order Lagrangian depends on " + v.name());
  const std::vector<Poly> G = lagrange_spray(l, reading);
  const auto n = static_cast<std::size_t>(l.n);
  PolyMatrix M1(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M1(i, j) = frac_partial(G[i], Var::y(static_cast<int>(j + 1), 1), l.alpha);
  return dual_recursion(M1, l.n, k, l.alpha, gamma_operator(l.n, k, l.alpha, op));
}

}  // namespace fracosc
