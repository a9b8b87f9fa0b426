#include "fracosc/fracnum.hpp"

#include <algorithm>
#include <cmath>

#include "fracosc/errors.hpp"
#include "fracosc/numfmt.hpp"
#include "fracosc/oscbundle.hpp"
#include "fracosc/specfun.hpp"

namespace fracosc {

namespace {

void check_open_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1), got " + fmt_double(alpha));
}

}  // namespace

void SampledFunction::validate() const {
  if (!(h > 0.0)) throw DomainError("sampled function: h must be > 0");
  if (values.size() < 2) throw DomainError("sampled function: need at least 2 samples");
}

SampledFunction SampledFunction::from_series(const FracSeries& f, double a, double b, double h) {
  return from_function([&](double t) { return evaluate(f, t); }, a, b, h);
}

SampledFunction SampledFunction::from_function(const std::function<double(double)>& f, double a, double b,
                                               double h) {
  if (!(h > 0.0) || !(b > a)) throw DomainError("sampling: need h > 0 and b > a");
  const auto n = static_cast<std::size_t>(std::llround((b - a) / h)) + 1;
  SampledFunction s{a, h, std::vector<double>(n)};
  for (std::size_t i = 0; i < n; ++i) s.values[i] = f(s.t(i));
  return s;
}

std::vector<double> gl_weights(double alpha, std::size_t count) {
  std::vector<double> w(count);
  if (count == 0) return w;
  w[0] = 1.0;
  for (std::size_t k = 1; k < count; ++k) w[k] = w[k - 1] * (1.0 - (alpha + 1.0) / static_cast<double>(k));
  return w;
}

SampledFunction gl_derivative(const SampledFunction& f, double alpha, Side side) {
  check_open_alpha(alpha);
  f.validate();
  const std::size_t N = f.size();
  const std::vector<double> w = gl_weights(alpha, N);
  const double scale = std::pow(f.h, -alpha);
  SampledFunction out{f.a, f.h, std::vector<double>(N, 0.0)};
  if (side == Side::Left) {
    const double fa = f.values.front();
    for (std::size_t n = 1; n < N; ++n) {
      double s = 0.0;
      for (std::size_t k = 0; k <= n; ++k) s += w[k] * (f.values[n - k] - fa);
      out.values[n] = scale * s;
    }
  } else {
    const double fb = f.values.back();
    for (std::size_t n = 0; n + 1 < N; ++n) {
      double s = 0.0;
      for (std::size_t k = 0; n + k < N; ++k) s += w[k] * (f.values[n + k] - fb);
      out.values[n] = scale * s;
    }
  }
  return out;
}

SampledFunction l1_derivative(const SampledFunction& f, double alpha) {
  check_open_alpha(alpha);
  f.validate();
  const std::size_t N = f.size();
  std::vector<double> b(N);
  for (std::size_t j = 0; j < N; ++j) {
    const double jd = static_cast<double>(j);
    b[j] = std::pow(jd + 1.0, 1.0 - alpha) - std::pow(jd, 1.0 - alpha);
  }
  const double scale = std::pow(f.h, -alpha) / gamma(2.0 - alpha);
  SampledFunction out{f.a, f.h, std::vector<double>(N, 0.0)};
  for (std::size_t n = 1; n < N; ++n) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += b[j] * (f.values[n - j] - f.values[n - j - 1]);
    out.values[n] = scale * s;
  }
  return out;
}

double trapezoid(const std::vector<double>& v, double h) {
  if (v.size() < 2) return 0.0;
  double s = 0.5 * (v.front() + v.back());
  for (std::size_t i = 1; i + 1 < v.size(); ++i) s += v[i];
  return h * s;
}

IbpReport integration_by_parts(const SampledFunction& f1, const SampledFunction& f2, double alpha) {
  f1.validate();
  f2.validate();
  if (f1.size() != f2.size() || f1.a != f2.a || f1.h != f2.h)
    throw DomainError("integration by parts: the two functions must share one grid");
  const SampledFunction d2 = gl_derivative(f2, alpha, Side::Left);
  const SampledFunction d1 = gl_derivative(f1, alpha, Side::Right);
  std::vector<double> p(f1.size()), q(f1.size());
  for (std::size_t i = 0; i < f1.size(); ++i) {
    p[i] = f1.values[i] * d2.values[i];
    q[i] = f2.values[i] * d1.values[i];
  }
  IbpReport r;
  r.lhs = trapezoid(p, f1.h);
  r.rhs = trapezoid(q, f1.h);
  r.residual = std::abs(r.lhs - r.rhs);
  r.literal_residual = std::abs(r.lhs + r.rhs);
  return r;
}

double integration_by_parts_residual(const SampledFunction& f1, const SampledFunction& f2, double alpha) {
  return integration_by_parts(f1, f2, alpha).residual;
}

void FodeProblem::validate() const {
  check_open_alpha(alpha);
  if (!(h > 0.0)) throw DomainError("solve: h must be > 0");
  if (!(t_end > 0.0)) throw DomainError("solve: t_end must be > 0");
  if (rhs.empty()) throw DomainError("solve: no right-hand side");
  if (x0.size() != rhs.size()) throw DomainError("solve: x0 and rhs sizes differ");
  if (!state.empty() && state.size() != rhs.size()) throw DomainError("solve: state and rhs sizes differ");
}

Trajectory solve_fode(const FodeProblem& p) {
  p.validate();
  const std::size_t dim = p.rhs.size();
  std::vector<Var> state = p.state;
  if (state.empty())
    for (std::size_t i = 0; i < dim; ++i) state.push_back(Var::x(static_cast<int>(i + 1)));

  const auto N = static_cast<std::size_t>(std::llround(p.t_end / p.h));
  const double a = p.alpha;
  Trajectory tr;
  tr.t.resize(N + 1);
  tr.x.assign(N + 1, std::vector<double>(dim));
  std::vector<std::vector<double>> f(N + 1, std::vector<double>(dim));

  auto rhs_at = [&](double t, const std::vector<double>& x, std::vector<double>& out, double last_good) {
    const VarLookup look = [&](Var v) -> double {
      if (v.order < 0) return t;
      for (std::size_t i = 0; i < dim; ++i)
        if (state[i] == v) return x[i];
      throw EvalError("unbound variable " + v.name());
    };
    for (std::size_t i = 0; i < dim; ++i) {
      try {
        out[i] = p.rhs[i].eval(look);
      } catch (const std::exception& e) {
        throw SolverError(std::string("right-hand side failed at t = ") + fmt_double(t) + ": " + e.what(), last_good);
      }
      if (!std::isfinite(out[i]))
        throw SolverError("right-hand side is not finite at t = " + fmt_double(t), last_good);
    }
  };

  tr.t[0] = 0.0;
  tr.x[0] = p.x0;
  rhs_at(0.0, p.x0, f[0], 0.0);

  const double ha = std::pow(p.h, a);
  const double cp = ha / gamma(a + 1.0);  // predictor: h^a/a * 1/G(a)
  const double cc = ha / gamma(a + 2.0);
  std::vector<double> pred(dim);
  for (std::size_t n = 0; n < N; ++n) {
    const double tn1 = p.h * static_cast<double>(n + 1);
    const double nd = static_cast<double>(n);
    for (std::size_t i = 0; i < dim; ++i) {
      double sp = 0.0, sc = 0.0;
      for (std::size_t j = 0; j <= n; ++j) {
        const double m = static_cast<double>(n - j);
        sp += (std::pow(m + 1.0, a) - std::pow(m, a)) * f[j][i];
        const double aj = (j == 0) ? std::pow(nd, a + 1.0) - (nd - a) * std::pow(nd + 1.0, a)
                                   : std::pow(m + 2.0, a + 1.0) + std::pow(m, a + 1.0) - 2.0 * std::pow(m + 1.0, a + 1.0);
        sc += aj * f[j][i];
      }
      pred[i] = p.x0[i] + cp * sp;
      tr.x[n + 1][i] = sc;  // stash the corrector history sum
    }
    std::vector<double> fp(dim);
    rhs_at(tn1, pred, fp, tr.t[n]);
    for (std::size_t i = 0; i < dim; ++i) tr.x[n + 1][i] = p.x0[i] + cc * (fp[i] + tr.x[n + 1][i]);
    tr.t[n + 1] = tn1;
    rhs_at(tn1, tr.x[n + 1], f[n + 1], tr.t[n]);
  }
  return tr;
}

double numeric_frac_partial(const Expr& e, Var v, double alpha, const VarLookup& point, std::size_t steps) {
  const double xv = point(v);
  if (!(xv > 0.0)) throw SingularityError("numeric_frac_partial: " + v.name() + " must be > 0");
  if (alpha == 1.0) {
    const double h = 1e-6 * std::max(1.0, xv);
    auto at = [&](double s) { return e.eval([&](Var w) { return w == v ? s : point(w); }); };
    return (at(xv + h) - at(xv - h)) / (2.0 * h);
  }
  SampledFunction s = SampledFunction::from_function(
      [&](double u) { return e.eval([&](Var w) { return w == v ? u : point(w); }); }, 0.0, xv,
      xv / static_cast<double>(steps));
  return l1_derivative(s, alpha).values.back();
}

std::vector<double> uniform_grid(double a, double b, std::size_t count) {
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i)
    g[i] = count == 1 ? a : a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1);
  return g;
}

double spray_ode_residual(const FracSpray& s, const std::vector<FracSeries>& curve, const std::vector<double>& grid) {
  s.validate();
  if (static_cast<int>(curve.size()) != s.n) throw DomainError("spray residual: curve dimension differs from n");
  const int n = s.n, k = s.k;
  // levels[a][i] = D^{alpha a} x^i
  std::vector<std::vector<FracSeries>> levels(k + 2, std::vector<FracSeries>(n));
  for (int i = 0; i < n; ++i) {
    levels[0][i] = curve[i];
    for (int a = 1; a <= k + 1; ++a) levels[a][i] = frac_derive(levels[a - 1][i], s.alpha);
  }
  double worst = 0.0;
  for (double t : grid) {
    JetPoint p = JetPoint::zero(n, k);
    for (int i = 0; i < n; ++i) {
      p.x(i) = evaluate(levels[0][i], t);
      for (int a = 1; a <= k; ++a) p.y(a - 1, i) = evaluate(levels[a][i], t) * rgamma(1.0 + s.alpha * a);
    }
    const VarLookup look = p.lookup();
    for (int i = 0; i < n; ++i) {
      const double r = evaluate(levels[k + 1][i], t) * rgamma(1.0 + s.alpha * k) + s.G[i].eval(look);
      worst = std::max(worst, std::abs(r));
    }
  }
  return worst;
}

}  // namespace fracosc
