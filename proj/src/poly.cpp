#include "fracosc/poly.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "fracosc/errors.hpp"
#include "fracosc/numfmt.hpp"
#include "fracosc/specfun.hpp"

namespace fracosc {

std::string fmt_double(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string Var::name() const {
  if (order < 0) return "t";
  if (order == 0) return "x" + std::to_string(index);
  return "y" + std::to_string(index) + "_" + std::to_string(order);
}

bool parse_var_name(const std::string& s, Var& out) {
  if (s == "t") {
    out = Var::t();
    return true;
  }
  auto digits = [](const std::string& d) {
    return !d.empty() && d.size() < 6 && std::all_of(d.begin(), d.end(), [](char c) { return c >= '0' && c <= '9'; });
  };
  if (s.size() >= 2 && s[0] == 'x') {
    const std::string d = s.substr(1);
    if (!digits(d) || std::stoi(d) < 1) return false;
    out = Var::x(std::stoi(d));
    return true;
  }
  if (s.size() >= 4 && s[0] == 'y') {
    const auto us = s.find('_');
    if (us == std::string::npos) return false;
    const std::string i = s.substr(1, us - 1), a = s.substr(us + 1);
    if (!digits(i) || !digits(a) || std::stoi(i) < 1 || std::stoi(a) < 1) return false;
    out = Var::y(std::stoi(i), std::stoi(a));
    return true;
  }
  return false;
}

// ---- Monomial ----

Monomial::Monomial(Var v, double e) {
  if (std::abs(e) > kTol) f_.emplace_back(v, e);
}

double Monomial::exponent(Var v) const {
  for (const auto& [w, e] : f_)
    if (w == v) return e;
  return 0.0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  std::size_t i = 0, j = 0;
  while (i < f_.size() || j < o.f_.size()) {
    if (j == o.f_.size() || (i < f_.size() && f_[i].first < o.f_[j].first)) {
      r.f_.push_back(f_[i++]);
    } else if (i == f_.size() || o.f_[j].first < f_[i].first) {
      r.f_.push_back(o.f_[j++]);
    } else {
      const double e = f_[i].second + o.f_[j].second;
      if (std::abs(e) > kTol) r.f_.emplace_back(f_[i].first, e);
      ++i;
      ++j;
    }
  }
  return r;
}

Monomial Monomial::pow(double p) const {
  Monomial r;
  for (const auto& [v, e] : f_)
    if (std::abs(e * p) > kTol) r.f_.emplace_back(v, e * p);
  return r;
}

Monomial Monomial::with_exponent(Var v, double e) const {
  Monomial r;
  bool placed = false;
  for (const auto& [w, x] : f_) {
    if (!placed && v < w) {
      if (std::abs(e) > kTol) r.f_.emplace_back(v, e);
      placed = true;
    }
    if (w == v) {
      if (std::abs(e) > kTol) r.f_.emplace_back(v, e);
      placed = true;
    } else {
      r.f_.emplace_back(w, x);
    }
  }
  if (!placed && std::abs(e) > kTol) r.f_.emplace_back(v, e);
  return r;
}

std::string Monomial::to_string() const {
  std::string s;
  for (const auto& [v, e] : f_) {
    if (!s.empty()) s += "*";
    s += v.name();
    if (e != 1.0) s += "^" + fmt_double(e);
  }
  return s;
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  const std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (fa[i].first != fb[i].first) return fa[i].first < fb[i].first;
    if (std::abs(fa[i].second - fb[i].second) > Monomial::kTol) return fa[i].second < fb[i].second;
  }
  return fa.size() < fb.size();
}

// ---- Poly ----

Poly::Poly(double c) {
  if (c != 0.0) t_.emplace(Monomial{}, c);
}

Poly Poly::var(Var v, double e) { return term(1.0, Monomial(v, e)); }

Poly Poly::term(double c, Monomial m) {
  Poly p;
  if (c != 0.0) p.t_.emplace(std::move(m), c);
  return p;
}

void Poly::add_term(const Monomial& m, double c) {
  if (c == 0.0) return;
  auto it = t_.find(m);
  if (it == t_.end()) {
    t_.emplace(m, c);
    return;
  }
  it->second += c;
  if (it->second == 0.0) t_.erase(it);
}

bool Poly::is_constant() const { return t_.empty() || (t_.size() == 1 && t_.begin()->first.is_one()); }

double Poly::constant_value() const {
  auto it = t_.find(Monomial{});
  return it == t_.end() ? 0.0 : it->second;
}

bool Poly::depends_on(Var v) const {
  for (const auto& [m, c] : t_)
    if (m.exponent(v) != 0.0) return true;
  return false;
}

Poly Poly::operator+(const Poly& o) const {
  Poly r = *this;
  r += o;
  return r;
}

Poly Poly::operator-(const Poly& o) const {
  Poly r = *this;
  r -= o;
  return r;
}

Poly Poly::operator-() const {
  Poly r = *this;
  for (auto& [m, c] : r.t_) c = -c;
  return r;
}

Poly Poly::operator*(const Poly& o) const {
  Poly r;
  for (const auto& [m1, c1] : t_)
    for (const auto& [m2, c2] : o.t_) r.add_term(m1 * m2, c1 * c2);
  return r;
}

Poly& Poly::operator+=(const Poly& o) {
  for (const auto& [m, c] : o.t_) add_term(m, c);
  return *this;
}

Poly& Poly::operator-=(const Poly& o) {
  for (const auto& [m, c] : o.t_) add_term(m, -c);
  return *this;
}

Poly& Poly::operator*=(const Poly& o) {
  *this = *this * o;
  return *this;
}

Poly Poly::pow(double p) const {
  const bool nonneg_int = p >= 0.0 && p == std::floor(p);
  if (t_.empty()) {
    if (p > 0.0) return Poly();
    if (p == 0.0) return Poly(1.0);
    throw EvalError("division by zero: negative power of zero");
  }
  if (t_.size() == 1) {
    const auto& [m, c] = *t_.begin();
    if (c < 0.0 && !nonneg_int && std::abs(p - std::round(p)) > 0.0)
      throw UnsupportedForm("real power of a negative coefficient");
    return term(std::pow(c, p), m.pow(p));
  }
  if (!nonneg_int || p > 64.0)
    throw UnsupportedForm("only non-negative integer powers of sums stay in the monomial fragment");
  Poly r(1.0), base = *this;
  auto e = static_cast<unsigned>(p);
  while (e) {
    if (e & 1u) r *= base;
    e >>= 1u;
    if (e) base *= base;
  }
  return r;
}

double Poly::eval(const VarLookup& lookup) const {
  double sum = 0.0;
  for (const auto& [m, c] : t_) {
    double v = c;
    for (const auto& [var, e] : m.factors()) {
      const double x = lookup(var);
      if (x == 0.0 && e < 0.0) throw EvalError("division by zero: " + var.name() + " = 0 under a negative power");
      v *= (e == 1.0) ? x : (e == 2.0 ? x * x : std::pow(x, e));
    }
    sum += v;
  }
  return sum;
}

Poly Poly::substitute(Var v, double value) const {
  Poly r;
  for (const auto& [m, c] : t_) {
    const double e = m.exponent(v);
    if (e == 0.0) {
      r.add_term(m, c);
      continue;
    }
    if (value == 0.0 && e < 0.0) throw EvalError("division by zero: " + v.name() + " = 0 under a negative power");
    r.add_term(m.with_exponent(v, 0.0), c * std::pow(value, e));
  }
  return r;
}

Poly Poly::pruned(double tol) const {
  Poly r;
  for (const auto& [m, c] : t_)
    if (std::abs(c) > tol) r.t_.emplace(m, c);
  return r;
}

double Poly::max_abs_coef() const {
  double w = 0.0;
  for (const auto& [m, c] : t_) w = std::max(w, std::abs(c));
  return w;
}

std::string Poly::to_string() const {
  if (t_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : t_) {
    double a = c;
    if (!first) {
      s += a < 0.0 ? " - " : " + ";
      a = std::abs(a);
    } else if (a < 0.0) {
      s += "-";
      a = -a;
    }
    first = false;
    if (m.is_one()) {
      s += fmt_double(a);
    } else if (a == 1.0) {
      s += m.to_string();
    } else {
      s += fmt_double(a) + "*" + m.to_string();
    }
  }
  return s;
}

Poly frac_partial(const Poly& p, Var v, double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("fractional order must lie in (0, 1]");
  // The Gamma ratio tends to the falling factorial g, so negative integer powers stay defined.
  if (alpha == 1.0) return partial(p, v);
  Poly r;
  for (const auto& [m, c] : p.terms()) {
    const double g = m.exponent(v);
    if (g == 0.0) continue;
    if (is_gamma_pole(1.0 + g))
      throw DomainError("frac_partial: Gamma(1 + " + fmt_double(g) + ") is a pole for variable " + v.name());
    const double rg = rgamma(1.0 + g - alpha);
    if (rg == 0.0) continue;
    r += Poly::term(c * gamma(1.0 + g) * rg, m.with_exponent(v, g - alpha));
  }
  return r;
}

Poly partial(const Poly& p, Var v) {
  Poly r;
  for (const auto& [m, c] : p.terms()) {
    const double g = m.exponent(v);
    if (g == 0.0) continue;
    r += Poly::term(c * g, m.with_exponent(v, g - 1.0));
  }
  return r;
}

// ---- PolyMatrix ----

PolyMatrix PolyMatrix::identity(std::size_t n) {
  PolyMatrix m(n);
  for (std::size_t i = 0; i < n; ++i) m(i, i) = Poly(1.0);
  return m;
}

PolyMatrix PolyMatrix::operator+(const PolyMatrix& o) const {
  PolyMatrix r = *this;
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] += o.a[i];
  return r;
}

PolyMatrix PolyMatrix::operator-(const PolyMatrix& o) const {
  PolyMatrix r = *this;
  for (std::size_t i = 0; i < a.size(); ++i) r.a[i] -= o.a[i];
  return r;
}

PolyMatrix PolyMatrix::operator*(const PolyMatrix& o) const {
  PolyMatrix r(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      Poly s;
      for (std::size_t l = 0; l < n; ++l) s += (*this)(i, l) * o(l, j);
      r(i, j) = s;
    }
  return r;
}

PolyMatrix PolyMatrix::scaled(const Poly& s) const {
  PolyMatrix r = *this;
  for (Poly& p : r.a) p = p * s;
  return r;
}

bool PolyMatrix::is_zero() const {
  return std::all_of(a.begin(), a.end(), [](const Poly& p) { return p.is_zero(); });
}

namespace {

PolyMatrix minor_of(const PolyMatrix& m, std::size_t row, std::size_t col) {
  PolyMatrix r(m.n - 1);
  for (std::size_t i = 0, ri = 0; i < m.n; ++i) {
    if (i == row) continue;
    for (std::size_t j = 0, rj = 0; j < m.n; ++j) {
      if (j == col) continue;
      r(ri, rj++) = m(i, j);
    }
    ++ri;
  }
  return r;
}

}  // namespace

Poly determinant(const PolyMatrix& m) {
  if (m.n == 0) return Poly(1.0);
  if (m.n == 1) return m(0, 0);
  if (m.n == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  Poly d;
  for (std::size_t j = 0; j < m.n; ++j) {
    if (m(0, j).is_zero()) continue;
    Poly c = m(0, j) * determinant(minor_of(m, 0, j));
    if (j % 2) d -= c; else d += c;
  }
  return d;
}

PolyMatrix inverse(const PolyMatrix& m) {
  const Poly det = determinant(m).pruned(1e-300);
  if (det.is_zero()) throw RankError("matrix is singular (determinant is identically zero)");
  if (!det.is_monomial())
    throw UnsupportedForm("symbolic inverse needs a single-monomial determinant; got " + det.to_string());
  const Poly inv_det = det.pow(-1.0);
  PolyMatrix r(m.n);
  if (m.n == 1) {
    r(0, 0) = inv_det;
    return r;
  }
  for (std::size_t i = 0; i < m.n; ++i)
    for (std::size_t j = 0; j < m.n; ++j) {
      Poly c = determinant(minor_of(m, j, i)) * inv_det;
      r(i, j) = ((i + j) % 2) ? -c : c;
    }
  return r;
}

}  // namespace fracosc
