#include "fracosc/oscbundle.hpp"

#include <cmath>
#include <iostream>

#include "fracosc/errors.hpp"
#include "fracosc/geometry.hpp"
#include "fracosc/specfun.hpp"

namespace fracosc {

double JetPoint::value(Var v) const {
  if (v.index < 1 || v.index > n()) throw EvalError("variable " + v.name() + " exceeds dimension n");
  if (v.order == 0) return x(v.index - 1);
  if (v.order >= 1 && v.order <= k()) return y(v.order - 1, v.index - 1);
  throw EvalError("variable " + v.name() + " is not a coordinate of this jet point");
}

VarLookup JetPoint::lookup() const {
  return [this](Var v) { return value(v); };
}

double liouville_weight(double alpha, int b) {
  if (b < 1) throw DomainError("Liouville weight index must be >= 1");
  if (b == 1) return gamma(1.0 + alpha);
  return gamma(alpha * b) / gamma(alpha);
}

Eigen::VectorXd liouville_field(int a, const JetPoint& at, double alpha, WeightConvention conv) {
  const int n = at.n(), k = at.k();
  if (a < 1 || a > k) throw DomainError("Liouville field index must lie in 1..k");
  Eigen::VectorXd v = Eigen::VectorXd::Zero((k + 1) * n);
  for (int b = 1; b <= a; ++b) {
    double w = liouville_weight(alpha, b);
    if (conv == WeightConvention::Literal && a == 1) w = 1.0;
    const int level = k - a + b;
    for (int i = 0; i < n; ++i) v(slot(level, i, n)) = w * at.y(b - 1, i);
  }
  return v;
}

Eigen::MatrixXd tangent_structure_matrix(int n, int k) {
  const int d = (k + 1) * n;
  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(d, d);
  for (int level = 0; level < k; ++level)
    for (int i = 0; i < n; ++i) T(slot(level + 1, i, n), slot(level, i, n)) = 1.0;
  return T;
}

Eigen::VectorXd tangent_structure(const Eigen::VectorXd& v, int n, int k) {
  if (v.size() != (k + 1) * n) throw DomainError("tangent structure: table has the wrong number of slots");
  Eigen::VectorXd r = Eigen::VectorXd::Zero(v.size());
  for (int level = 0; level < k; ++level)
    for (int i = 0; i < n; ++i) r(slot(level + 1, i, n)) = v(slot(level, i, n));
  return r;
}

FracSpray FracSpray::from_exprs(int n, int k, double alpha, const std::vector<Expr>& G) {
  FracSpray s{n, k, alpha, {}};
  for (const Expr& e : G) {
    check_vars(e, n, k);
    s.G.push_back(e.to_poly());
  }
  s.validate();
  return s;
}

void FracSpray::validate() const {
  if (n < 1 || k < 1) throw DomainError("spray: need n >= 1 and k >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("spray: alpha must lie in (0, 1]");
  if (static_cast<int>(G.size()) != n) throw DomainError("spray: need n components G^i");
}

Eigen::VectorXd spray_field(const FracSpray& s, const JetPoint& at) {
  s.validate();
  const int n = s.n, k = s.k;
  Eigen::VectorXd v = Eigen::VectorXd::Zero((k + 1) * n);
  for (int b = 1; b <= k; ++b) {
    const double w = liouville_weight(s.alpha, b);
    for (int i = 0; i < n; ++i) v(slot(b - 1, i, n)) = w * at.y(b - 1, i);
  }
  const double top = gamma(s.alpha * k) / gamma(s.alpha);
  const VarLookup look = at.lookup();
  for (int i = 0; i < n; ++i) v(slot(k, i, n)) = -top * s.G[i].eval(look);
  return v;
}

Poly liouville_derivation(const Poly& f, int n, int k, double alpha) {
  Poly r;
  for (int b = 1; b <= k; ++b) {
    const double w = liouville_weight(alpha, b);
    for (int i = 1; i <= n; ++i) {
      const Var target = b == 1 ? Var::x(i) : Var::y(i, b - 1);
      const Poly d = frac_partial(f, target, alpha);
      if (!d.is_zero()) r += Poly::term(w, Monomial(Var::y(i, b), 1.0)) * d;
    }
  }
  return r;
}

Poly spray_derivation(const FracSpray& s, const Poly& f) {
  Poly r = liouville_derivation(f, s.n, s.k, s.alpha);
  const double top = gamma(s.alpha * s.k) / gamma(s.alpha);
  for (int i = 1; i <= s.n; ++i) {
    const Poly d = frac_partial(f, Var::y(i, s.k), s.alpha);
    if (!d.is_zero()) r -= s.G[static_cast<std::size_t>(i - 1)] * d * Poly(top);
  }
  return r;
}

DualCoefficients dual_recursion(const PolyMatrix& M1, int n, int k, double alpha,
                                const std::function<Poly(const Poly&)>& op) {
  DualCoefficients d{n, k, alpha, {M1}};
  for (int a = 1; a < k; ++a) {
    const PolyMatrix& Ma = d.M.back();
    PolyMatrix applied(Ma.n);
    for (std::size_t e = 0; e < Ma.a.size(); ++e) applied.a[e] = op(Ma.a[e]);
    const double c = gamma(alpha * a) / gamma(alpha * (a + 1));
    d.M.push_back((applied + M1 * Ma).scaled(Poly(c)));
  }
  return d;
}

DualCoefficients spray_to_dual(const FracSpray& s) {
  s.validate();
  const auto n = static_cast<std::size_t>(s.n);
  PolyMatrix M1(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) M1(i, j) = frac_partial(s.G[i], Var::y(static_cast<int>(j + 1), 1), s.alpha);
  return dual_recursion(M1, s.n, s.k, s.alpha, [&](const Poly& f) { return spray_derivation(s, f); });
}

PrimalCoefficients dual_to_primal(const DualCoefficients& d) {
  PrimalCoefficients p{d.n, d.k, d.alpha, {}};
  for (std::size_t dd = 0; dd < d.M.size(); ++dd) {
    PolyMatrix N = d.M[dd];
    // M^{(d)} = N^{(d)} + sum_{e=1}^{d-1} M^{(d-e)} N^{(e)}; zero-based: M[dd-e] pairs with N[e-1].
    for (std::size_t e = 1; e <= dd; ++e) N = N - d.M[dd - e] * p.N[e - 1];
    p.N.push_back(N);
  }
  return p;
}

DualCoefficients primal_to_dual(const PrimalCoefficients& p) {
  DualCoefficients d{p.n, p.k, p.alpha, {}};
  for (std::size_t dd = 0; dd < p.N.size(); ++dd) {
    PolyMatrix M = p.N[dd];
    for (std::size_t e = 1; e <= dd; ++e) M = M + d.M[dd - e] * p.N[e - 1];
    d.M.push_back(M);
  }
  return d;
}

Eigen::MatrixXd eval_matrix(const PolyMatrix& m, const JetPoint& at) {
  const auto n = static_cast<Eigen::Index>(m.n);
  Eigen::MatrixXd r(n, n);
  const VarLookup look = at.lookup();
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) r(i, j) = m(static_cast<std::size_t>(i), static_cast<std::size_t>(j)).eval(look);
  return r;
}

Eigen::MatrixXd adapted_basis(const PrimalCoefficients& p, const JetPoint& at) {
  const int n = p.n, k = p.k;
  Eigen::MatrixXd A = Eigen::MatrixXd::Identity((k + 1) * n, (k + 1) * n);
  std::vector<Eigen::MatrixXd> N;
  for (const auto& m : p.N) N.push_back(eval_matrix(m, at));
  for (int r = 0; r <= k; ++r)
    for (int c = r + 1; c <= k; ++c)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) A(slot(r, i, n), slot(c, j, n)) = -N[c - r - 1](j, i);
  return A;
}

Eigen::MatrixXd dual_basis(const DualCoefficients& d, const JetPoint& at) {
  const int n = d.n, k = d.k;
  Eigen::MatrixXd B = Eigen::MatrixXd::Identity((k + 1) * n, (k + 1) * n);
  std::vector<Eigen::MatrixXd> M;
  for (const auto& m : d.M) M.push_back(eval_matrix(m, at));
  for (int r = 0; r <= k; ++r)
    for (int c = 0; c < r; ++c)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) B(slot(r, i, n), slot(c, j, n)) = M[r - c - 1](i, j);
  return B;
}

MetricField::MetricField(int n_, int k_, double alpha_, PolyMatrix g_) : n(n_), k(k_), alpha(alpha_), g(std::move(g_)) {
  if (static_cast<int>(g.n) != n) throw DomainError("metric: matrix size differs from n");
  for (std::size_t i = 0; i < g.n; ++i)
    for (std::size_t j = i + 1; j < g.n; ++j) {
      const Poly s = (g(i, j) + g(j, i)) * Poly(0.5);
      g(i, j) = s;
      g(j, i) = s;
    }
}

MetricField MetricField::from_exprs(int n, int k, double alpha, const std::vector<Expr>& entries) {
  if (static_cast<int>(entries.size()) != n * n) throw DomainError("metric: need n*n entries");
  PolyMatrix g(static_cast<std::size_t>(n));
  for (std::size_t e = 0; e < entries.size(); ++e) {
    check_vars(entries[e], n, k);
    g.a[e] = entries[e].to_poly();
  }
  return MetricField(n, k, alpha, std::move(g));
}

namespace {

struct AdaptedContext {
  const PrimalCoefficients& p;
  const JetPoint& at;
  std::vector<Eigen::MatrixXd> N;

  AdaptedContext(const PrimalCoefficients& p_, const JetPoint& at_) : p(p_), at(at_) {
    for (const auto& m : p.N) N.push_back(eval_matrix(m, at));
  }

  Var natural(int level, int i) const { return level == 0 ? Var::x(i + 1) : Var::y(i + 1, level); }

  double delta(const Poly& f, int level, int m) const {
    const VarLookup look = at.lookup();
    double v = frac_partial(f, natural(level, m), p.alpha).eval(look);
    for (int b = 1; level + b <= p.k; ++b)
      for (int j = 0; j < p.n; ++j) {
        const double c = N[b - 1](j, m);
        if (c == 0.0) continue;
        v -= c * frac_partial(f, natural(level + b, j), p.alpha).eval(look);
      }
    return v;
  }
};

}  // namespace

double adapted_derivative(const Poly& f, int level, int m, const PrimalCoefficients& p, const JetPoint& at) {
  if (level < 0 || level > p.k) throw DomainError("adapted derivative: level must lie in 0..k");
  return AdaptedContext(p, at).delta(f, level, m);
}

MetricalConnection metrical_connection(const MetricField& g, const PrimalCoefficients& p, const JetPoint& at) {
  const int n = g.n, k = p.k;
  const Eigen::MatrixXd G = g.at(at);
  Eigen::FullPivLU<Eigen::MatrixXd> lu(G);
  if (lu.rank() < n) throw RankError("metric is singular at the point (rank " + std::to_string(lu.rank()) + ")");
  const Eigen::MatrixXd Ginv = lu.inverse();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(G);
  const auto& sv = svd.singularValues();
  MetricalConnection conn;
  conn.condition = sv(0) / sv(sv.size() - 1);
  if (conn.condition > 1e12) std::cerr << "warning: metric condition number " << conn.condition << " exceeds 1e12\n";

  const AdaptedContext ctx(p, at);
  auto coefficients = [&](int level) {
    // dg[m](i, j) = Delta_{level, m} g_ij
    std::vector<Eigen::MatrixXd> dg(n, Eigen::MatrixXd(n, n));
    for (int m = 0; m < n; ++m)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) dg[m](i, j) = ctx.delta(g.g(i, j), level, m);
    Array3 out(n, Eigen::MatrixXd::Zero(n, n));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          double s = 0.0;
          for (int q = 0; q < n; ++q) s += Ginv(i, q) * (dg[j](q, l) + dg[l](j, q) - dg[q](j, l));
          out[i](j, l) = 0.5 * s;
        }
    return out;
  };
  conn.L = coefficients(0);
  for (int a = 1; a <= k; ++a) conn.C.push_back(coefficients(a));
  return conn;
}

const Poly& DTensor::operator[](const std::vector<int>& idx) const {
  std::size_t flat = 0;
  for (int i : idx) flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
  return comp.at(flat);
}

DTensor metric_as_tensor(const MetricField& g) { return DTensor{g.n, 2, g.g.a}; }

double CovariantDerivative::max_abs() const {
  double w = 0.0;
  for (const auto& h : horizontal)
    for (double v : h) w = std::max(w, std::abs(v));
  for (const auto& a : vertical)
    for (const auto& h : a)
      for (double v : h) w = std::max(w, std::abs(v));
  return w;
}

CovariantDerivative covariant_derivative(const DTensor& t, const MetricalConnection& conn, const PrimalCoefficients& p,
                                         const JetPoint& at) {
  const int n = t.n, r = t.rank;
  std::size_t total = 1;
  for (int q = 0; q < r; ++q) total *= static_cast<std::size_t>(n);
  if (t.comp.size() != total) throw DomainError("d-tensor: component count differs from n^rank");

  const AdaptedContext ctx(p, at);
  const VarLookup look = at.lookup();
  std::vector<double> val(total);
  for (std::size_t f = 0; f < total; ++f) val[f] = t.comp[f].eval(look);

  auto unflatten = [&](std::size_t f) {
    std::vector<int> idx(static_cast<std::size_t>(r));
    for (int q = r - 1; q >= 0; --q) {
      idx[static_cast<std::size_t>(q)] = static_cast<int>(f % static_cast<std::size_t>(n));
      f /= static_cast<std::size_t>(n);
    }
    return idx;
  };
  auto flatten = [&](const std::vector<int>& idx) {
    std::size_t f = 0;
    for (int i : idx) f = f * static_cast<std::size_t>(n) + static_cast<std::size_t>(i);
    return f;
  };
  auto derive = [&](int level, const Array3& coef) {
    std::vector<std::vector<double>> out(n, std::vector<double>(total));
    for (int m = 0; m < n; ++m)
      for (std::size_t f = 0; f < total; ++f) {
        double v = ctx.delta(t.comp[f], level, m);
        std::vector<int> idx = unflatten(f);
        for (int q = 0; q < r; ++q) {
          const int iq = idx[static_cast<std::size_t>(q)];
          for (int s = 0; s < n; ++s) {
            idx[static_cast<std::size_t>(q)] = s;
            v -= coef[s](iq, m) * val[flatten(idx)];
          }
          idx[static_cast<std::size_t>(q)] = iq;
        }
        out[m][f] = v;
      }
    return out;
  };
  CovariantDerivative cd;
  cd.horizontal = derive(0, conn.L);
  for (int a = 1; a <= p.k; ++a) cd.vertical.push_back(derive(a, conn.C[a - 1]));
  return cd;
}

Eigen::MatrixXd sasaki_lift(const MetricField& g, const DualCoefficients& d, const JetPoint& at) {
  const int n = g.n, k = d.k;
  const Eigen::MatrixXd G = g.at(at);
  if (Eigen::FullPivLU<Eigen::MatrixXd>(G).rank() < n) throw RankError("metric is singular at the point");
  const int D = (k + 1) * n;
  Eigen::MatrixXd blocks = Eigen::MatrixXd::Zero(D, D);
  for (int level = 0; level <= k; ++level) blocks.block(level * n, level * n, n, n) = G;
  const Eigen::MatrixXd B = dual_basis(d, at);
  return B.transpose() * blocks * B;
}

JetPoint jet_transform(const JetPoint& p, const ChartMap& m, bool fractional_jet_partials) {
  m.validate();
  const int n = p.n(), k = p.k();
  if (n != m.n) throw DomainError("jet transform: point dimension differs from the chart map");
  JetPoint out = JetPoint::zero(n, k);
  out.x = m.apply(p.x);
  if (k == 1) {
    out.y.row(0) = (frac_jacobian(m, p.x, JacobianDirection::Forward) * p.y.row(0).transpose()).transpose();
    return out;
  }
  if (!m.is_monomial()) throw UnsupportedForm("jet transform of order k >= 2 needs monomial chart maps");
  // Positivity and rank checks happen in the numeric path; run it for its diagnostics.
  (void)frac_jacobian(m, p.x, JacobianDirection::Forward);

  const double a = m.alpha;
  const PolyMatrix J = frac_jacobian_symbolic(m);
  auto d = [&](const Poly& f, Var v) { return fractional_jet_partials ? frac_partial(f, v, a) : partial(f, v); };

  std::vector<std::vector<Poly>> Y(static_cast<std::size_t>(k + 1), std::vector<Poly>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      Y[1][i] += J(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) * Poly::var(Var::y(j + 1, 1));
  const double w1 = gamma(1.0 + a);
  const double wmid = gamma(2.0 * a) / gamma(a);
  for (int lev = 2; lev <= k; ++lev) {
    const double c = gamma(a * (lev - 1)) / gamma(a);
    for (int i = 0; i < n; ++i) {
      const Poly& prev = Y[lev - 1][i];
      Poly s;
      for (int j = 1; j <= n; ++j) s += d(prev, Var::x(j)) * Poly::term(w1, Monomial(Var::y(j, 1), 1.0));
      for (int b = 2; b <= lev; ++b) {
        const double w = b == lev ? c : wmid;
        for (int j = 1; j <= n; ++j) s += d(prev, Var::y(j, b - 1)) * Poly::term(w, Monomial(Var::y(j, b), 1.0));
      }
      Y[lev][i] = s * Poly(1.0 / c);
    }
  }
  const VarLookup look = p.lookup();
  for (int lev = 1; lev <= k; ++lev)
    for (int i = 0; i < n; ++i) out.y(lev - 1, i) = Y[lev][i].eval(look);
  return out;
}

}  // namespace fracosc
