#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace fracosc {

struct Term {
  double coef = 0.0;
  double exponent = 0.0;
};

/// Finite sum of c * (t - a)^gamma with gamma >= 0, kept sorted by exponent.
/// Exponents within kExponentTol are merged; zero coefficients are dropped.
class FracSeries {
public:
  static constexpr double kExponentTol = 1e-9;

  FracSeries() = default;
  explicit FracSeries(std::vector<Term> terms, double base_point = 0.0);

  static FracSeries constant(double c, double base_point = 0.0);
  static FracSeries monomial(double c, double exponent, double base_point = 0.0);

  const std::vector<Term>& terms() const noexcept { return terms_; }
  double base_point() const noexcept { return base_point_; }
  bool is_zero() const noexcept { return terms_.empty(); }

  /// Coefficient of the term with this exponent, 0 when absent.
  double coefficient(double exponent) const;
  /// Value at the base point (the constant term).
  double constant_term() const { return coefficient(0.0); }

  FracSeries operator+(const FracSeries& o) const;
  FracSeries operator-(const FracSeries& o) const;
  FracSeries operator*(const FracSeries& o) const;
  FracSeries operator*(double s) const;

  std::string to_string() const;

private:
  std::vector<Term> terms_;
  double base_point_ = 0.0;
};

/// Sort, merge equal exponents and drop zero coefficients. Exponents are not checked.
std::vector<Term> normalize_terms(std::vector<Term> terms);

/// Reviewed derivative: c t^g -> c G(1+g)/G(1+g-alpha) t^(g-alpha); constants -> 0.
/// Exponents in (0, alpha) are rejected with DomainError.
FracSeries frac_derive(const FracSeries& f, double alpha);

/// a-fold composition of frac_derive.
FracSeries frac_derive_iterated(const FracSeries& f, double alpha, std::size_t a);

/// Max coefficient discrepancy between D^beta f and D^alpha D^(beta-alpha) f.
double semigroup_check(const FracSeries& f, double alpha, double beta);

/// Truncated fractional product rule sum_{k<=K} (alpha choose k) D^(alpha-k) f1 * f2^(k),
/// with f1's constant term handled through the reviewed derivative of f2.
/// AccuracyError once the k-th term overflows (K around 170).
FracSeries leibniz_series(const FracSeries& f1, const FracSeries& f2, double alpha, std::size_t K);

/// sum_{h<=H} t^(alpha h) / G(1 + alpha h) * (D^(alpha h) f)(0).
FracSeries ml_reconstruct(const FracSeries& f, double alpha, std::size_t H);

/// Sum of c t^gamma at t >= base point, using 0^0 = 1.
double evaluate(const FracSeries& f, double t);

/// f(a + b - t) re-expanded about a. Requires integer exponents (polynomials).
FracSeries mirror(const FracSeries& f, double b);

/// Exact integral of f over [base, base + len].
double integrate(const FracSeries& f, double len);

/// JSON array of [coeff, exponent] pairs, base point 0.
std::string series_to_json(const FracSeries& f);
/// Inverse of series_to_json; DomainError on malformed text or negative exponents.
FracSeries series_from_json(const std::string& text);

}  // namespace fracosc
