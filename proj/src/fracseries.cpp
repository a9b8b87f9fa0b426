#include "fracosc/fracseries.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "json.hpp"

#include "fracosc/errors.hpp"
#include "fracosc/specfun.hpp"

namespace fracosc {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("fractional order must lie in (0, 1]");
}

void check_base(const FracSeries& a, const FracSeries& b) {
  if (a.base_point() != b.base_point()) throw DomainError("series have different base points");
}

// Raw power rule on a term list, no admissibility checks. A negative order is a
// fractional integral. Terms whose target Gamma is at a pole vanish.
std::vector<Term> power_rule(const std::vector<Term>& terms, double order) {
  std::vector<Term> out;
  out.reserve(terms.size());
  for (const Term& t : terms) {
    const double r = rgamma(1.0 + t.exponent - order);
    if (r == 0.0) continue;
    out.push_back({t.coef * gamma(1.0 + t.exponent) * r, t.exponent - order});
  }
  return out;
}

// Classical k-th derivative, term-wise falling factorial.
std::vector<Term> classical_derivative(const std::vector<Term>& terms, std::size_t k) {
  std::vector<Term> out;
  for (const Term& t : terms) {
    double c = t.coef;
    for (std::size_t j = 0; j < k; ++j) c *= t.exponent - static_cast<double>(j);
    if (c != 0.0) out.push_back({c, t.exponent - static_cast<double>(k)});
  }
  return out;
}

std::vector<Term> multiply(const std::vector<Term>& a, const std::vector<Term>& b) {
  std::vector<Term> out;
  out.reserve(a.size() * b.size());
  for (const Term& x : a)
    for (const Term& y : b) out.push_back({x.coef * y.coef, x.exponent + y.exponent});
  return normalize_terms(std::move(out));
}

}  // namespace

std::vector<Term> normalize_terms(std::vector<Term> terms) {
  std::sort(terms.begin(), terms.end(),
            [](const Term& x, const Term& y) { return x.exponent < y.exponent; });
  std::vector<Term> out;
  for (const Term& t : terms) {
    if (!out.empty() && std::abs(out.back().exponent - t.exponent) <= FracSeries::kExponentTol)
      out.back().coef += t.coef;
    else
      out.push_back(t);
  }
  for (Term& t : out)
    if (std::abs(t.exponent) <= FracSeries::kExponentTol) t.exponent = 0.0;
  std::erase_if(out, [](const Term& t) { return t.coef == 0.0; });
  return out;
}

FracSeries::FracSeries(std::vector<Term> terms, double base_point)
    : terms_(normalize_terms(std::move(terms))), base_point_(base_point) {
  for (const Term& t : terms_)
    if (t.exponent < 0.0 || !std::isfinite(t.exponent) || !std::isfinite(t.coef))
      throw DomainError("series term " + std::to_string(t.coef) + "*t^" + std::to_string(t.exponent) +
                        " is outside the admissible class (exponent must be >= 0)");
}

FracSeries FracSeries::constant(double c, double base_point) { return FracSeries({{c, 0.0}}, base_point); }

FracSeries FracSeries::monomial(double c, double exponent, double base_point) {
  return FracSeries({{c, exponent}}, base_point);
}

double FracSeries::coefficient(double exponent) const {
  for (const Term& t : terms_)
    if (std::abs(t.exponent - exponent) <= kExponentTol) return t.coef;
  return 0.0;
}

FracSeries FracSeries::operator+(const FracSeries& o) const {
  check_base(*this, o);
  std::vector<Term> all = terms_;
  all.insert(all.end(), o.terms_.begin(), o.terms_.end());
  return FracSeries(std::move(all), base_point_);
}

FracSeries FracSeries::operator-(const FracSeries& o) const { return *this + o * -1.0; }

FracSeries FracSeries::operator*(const FracSeries& o) const {
  check_base(*this, o);
  return FracSeries(multiply(terms_, o.terms_), base_point_);
}

FracSeries FracSeries::operator*(double s) const {
  std::vector<Term> out = terms_;
  for (Term& t : out) t.coef *= s;
  return FracSeries(std::move(out), base_point_);
}

std::string FracSeries::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) os << " + ";
    os << terms_[i].coef << "*t^" << terms_[i].exponent;
  }
  return os.str();
}

FracSeries frac_derive(const FracSeries& f, double alpha) {
  check_alpha(alpha);
  std::vector<Term> nonconst;
  for (const Term& t : f.terms()) {
    if (t.exponent == 0.0) continue;
    if (t.exponent < alpha - FracSeries::kExponentTol) {
      std::ostringstream os;
      os << "frac_derive: term " << t.coef << "*t^" << t.exponent << " has exponent in (0, " << alpha
         << "); its derivative leaves the admissible class";
      throw DomainError(os.str());
    }
    nonconst.push_back(t);
  }
  std::vector<Term> out = power_rule(nonconst, alpha);
  for (Term& t : out)
    if (std::abs(t.exponent) <= FracSeries::kExponentTol) t.exponent = 0.0;
  return FracSeries(std::move(out), f.base_point());
}

FracSeries frac_derive_iterated(const FracSeries& f, double alpha, std::size_t a) {
  FracSeries g = f;
  for (std::size_t i = 0; i < a; ++i) g = frac_derive(g, alpha);
  return g;
}

double semigroup_check(const FracSeries& f, double alpha, double beta) {
  if (!(alpha > 0.0 && alpha < beta && beta <= 1.0))
    throw DomainError("semigroup_check: need 0 < alpha < beta <= 1");
  const FracSeries direct = frac_derive(f, beta);
  const FracSeries composed = frac_derive(frac_derive(f, beta - alpha), alpha);
  double worst = 0.0;
  for (const Term& t : direct.terms()) worst = std::max(worst, std::abs(t.coef - composed.coefficient(t.exponent)));
  for (const Term& t : composed.terms()) worst = std::max(worst, std::abs(t.coef - direct.coefficient(t.exponent)));
  return worst;
}

FracSeries leibniz_series(const FracSeries& f1, const FracSeries& f2, double alpha, std::size_t K) {
  check_alpha(alpha);
  check_base(f1, f2);
  const double c1 = f1.constant_term();
  std::vector<Term> g1;
  for (const Term& t : f1.terms())
    if (t.exponent != 0.0) g1.push_back(t);

  std::vector<Term> acc;
  for (const Term& t : frac_derive(f2, alpha).terms()) acc.push_back({c1 * t.coef, t.exponent});
  for (std::size_t k = 0; k <= K; ++k) {
    const double w = gen_binomial(alpha, k);
    if (w == 0.0) break;
    const std::vector<Term> d2 = classical_derivative(f2.terms(), k);
    if (d2.empty()) continue;
    for (const Term& t : g1)
      if (is_gamma_pole(1.0 + t.exponent - alpha + static_cast<double>(k)))
        throw DomainError("leibniz_series: Gamma pole in the order (alpha - k) power rule");
    std::vector<Term> d1 = power_rule(g1, alpha - static_cast<double>(k));
    for (Term& t : d1) t.coef *= w;
    for (const Term& t : multiply(d1, d2)) {
      if (!std::isfinite(t.coef))
        throw AccuracyError("leibniz_series: coefficient overflow at k = " + std::to_string(k), t.coef);
      acc.push_back(t);
    }
  }
  return FracSeries(normalize_terms(std::move(acc)), f1.base_point());
}

FracSeries ml_reconstruct(const FracSeries& f, double alpha, std::size_t H) {
  check_alpha(alpha);
  for (const Term& t : f.terms()) {
    const double m = t.exponent / alpha;
    if (std::abs(m - std::round(m)) > 1e-9)
      throw DomainError("ml_reconstruct: exponent " + std::to_string(t.exponent) + " is not a multiple of alpha");
  }
  std::vector<Term> out;
  FracSeries g = f;
  for (std::size_t h = 0; h <= H; ++h) {
    if (h > 0) g = frac_derive(g, alpha);
    const double v = g.constant_term();
    if (v != 0.0) {
      const double e = alpha * static_cast<double>(h);
      out.push_back({v * rgamma(1.0 + e), e});
    }
    if (g.is_zero()) break;
  }
  return FracSeries(std::move(out), f.base_point());
}

double evaluate(const FracSeries& f, double t) {
  const double s = t - f.base_point();
  if (s < 0.0) throw DomainError("evaluate: t lies before the base point");
  double sum = 0.0;
  for (const Term& term : f.terms()) sum += term.coef * (term.exponent == 0.0 ? 1.0 : std::pow(s, term.exponent));
  return sum;
}

FracSeries mirror(const FracSeries& f, double b) {
  const double a = f.base_point();
  const double L = b - a;
  // (L - s)^n = sum_j C(n, j) L^(n-j) (-s)^j
  std::vector<Term> out;
  for (const Term& t : f.terms()) {
    const double n = std::round(t.exponent);
    if (std::abs(n - t.exponent) > FracSeries::kExponentTol)
      throw DomainError("mirror: only integer exponents can be re-expanded");
    const auto ni = static_cast<std::size_t>(n);
    for (std::size_t j = 0; j <= ni; ++j) {
      const double c = gen_binomial(n, j) * std::pow(L, n - static_cast<double>(j)) * ((j % 2) ? -1.0 : 1.0);
      out.push_back({t.coef * c, static_cast<double>(j)});
    }
  }
  return FracSeries(std::move(out), a);
}

double integrate(const FracSeries& f, double len) {
  if (len < 0.0) throw DomainError("integrate: negative interval");
  double sum = 0.0;
  for (const Term& t : f.terms()) sum += t.coef * std::pow(len, t.exponent + 1.0) / (t.exponent + 1.0);
  return sum;
}

std::string series_to_json(const FracSeries& f) {
  nlohmann::json j = nlohmann::json::array();
  for (const Term& t : f.terms()) j.push_back({t.coef, t.exponent});
  return j.dump();
}

FracSeries series_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw DomainError(std::string("series JSON: ") + e.what());
  }
  if (!j.is_array()) throw DomainError("series JSON: expected an array of [coeff, exponent] pairs");
  std::vector<Term> terms;
  for (const auto& p : j) {
    if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
      throw DomainError("series JSON: each entry must be [coeff, exponent]");
    terms.push_back({p[0].get<double>(), p[1].get<double>()});
  }
  return FracSeries(std::move(terms));
}

}  // namespace fracosc
