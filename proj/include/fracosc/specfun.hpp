#pragma once

#include <cstddef>

namespace fracosc {

/// Euler Gamma function. Lanczos approximation for x >= 0.5, reflection below.
/// Throws DomainError at 0, -1, -2, ...
double gamma(double x);

/// log|Gamma(x)|, same domain as gamma().
double lgamma_abs(double x);

/// 1/Gamma(x); entire, so poles map to exactly 0.
double rgamma(double x);

/// True when x is within 1e-12 of a non-positive integer.
bool is_gamma_pole(double x);

/// Generalized binomial coefficient (alpha choose k) by the product recursion
/// w_0 = 1, w_k = w_{k-1} (alpha - k + 1) / k.
double gen_binomial(double alpha, std::size_t k);

struct MLParams {
  double alpha = 1.0;
  std::size_t truncation = 10000;
  double tolerance = 1e-16;

  void validate() const;
};

/// One-parameter Mittag-Leffler function E_alpha(z) = sum_m z^m / Gamma(1 + alpha m),
/// by direct summation. The series stops at the first term whose magnitude is
/// below `tolerance` (relative to the running sum once it exceeds 1). Terms are
/// formed in log space. E_alpha(z) grows like exp(z^(1/alpha)), so the result is
/// finite only for |z|^(1/alpha) below about 700, and the peak term sits near
/// m = |z|^(1/alpha) / alpha, which must fit the truncation budget. For negative z
/// cancellation costs roughly exp(|z|^(1/alpha)) in relative accuracy.
/// Throws AccuracyError if `truncation` terms are not enough.
double mittag_leffler(double alpha, double z, const MLParams& params = {});

}  // namespace fracosc
