#pragma once

#include <cstddef>
#include <vector>

#include "fracosc/expr.hpp"
#include "fracosc/fracseries.hpp"

namespace fracosc {

struct FracSpray;

/// Samples of f at a, a + h, ..., a + (N-1) h.
struct SampledFunction {
  double a = 0.0;
  double h = 1e-3;
  std::vector<double> values;

  double t(std::size_t i) const { return a + h * static_cast<double>(i); }
  double b() const { return t(values.size() - 1); }
  std::size_t size() const { return values.size(); }
  void validate() const;

  /// Uniform samples of a series on [a, b]; the node count is round((b - a) / h) + 1.
  static SampledFunction from_series(const FracSeries& f, double a, double b, double h);
  static SampledFunction from_function(const std::function<double(double)>& f, double a, double b, double h);
};

enum class Side { Left, Right };

/// w_0 = 1, w_k = w_{k-1} (1 - (alpha + 1) / k).
std::vector<double> gl_weights(double alpha, std::size_t count);

/// Grunwald-Letnikov on f - f(a) (left) or f - f(b) (right). The base node is 0.
SampledFunction gl_derivative(const SampledFunction& f, double alpha, Side side = Side::Left);

/// L1 product-integration scheme for the left derivative, order 2 - alpha.
SampledFunction l1_derivative(const SampledFunction& f, double alpha);

/// Trapezoidal rule on uniform samples.
double trapezoid(const std::vector<double>& v, double h);

struct IbpReport {
  double lhs = 0.0;               // integral of f1 * D^alpha f2 (left GL)
  double rhs = 0.0;               // integral of f2 * right D^alpha f1 (right GL)
  double residual = 0.0;          // |lhs - rhs|
  double literal_residual = 0.0;  // |lhs + rhs|, the identity read with a minus sign
};

IbpReport integration_by_parts(const SampledFunction& f1, const SampledFunction& f2, double alpha);
double integration_by_parts_residual(const SampledFunction& f1, const SampledFunction& f2, double alpha);

struct FodeProblem {
  double alpha = 0.5;
  std::vector<Expr> rhs;     // one per state variable
  std::vector<Var> state;    // defaults to x1..xn when empty
  std::vector<double> x0;
  double t_end = 1.0;
  double h = 1e-3;

  void validate() const;
};

struct Trajectory {
  std::vector<double> t;
  std::vector<std::vector<double>> x;  // x[node][i]
};

/// Fractional Adams-Bashforth-Moulton predictor-corrector for D^alpha x = f(t, x).
/// The right-hand side may use t and the state variables.
Trajectory solve_fode(const FodeProblem& p);

/// Reviewed fractional partial of `e` along `v` at a point, by L1 on [0, value of v]
/// with `steps` panels. Works for any evaluable expression.
double numeric_frac_partial(const Expr& e, Var v, double alpha, const VarLookup& point, std::size_t steps = 2000);

/// Max over grid nodes and components of
/// |D^{alpha(k+1)} x^i / G(1 + alpha k) + G^i(x, y^{(alpha)}, ..., y^{(alpha k)})|
/// with y^{(alpha a)} = D^{alpha a} x / G(1 + alpha a), all derivatives exact.
double spray_ode_residual(const FracSpray& s, const std::vector<FracSeries>& curve, const std::vector<double>& grid);

/// Uniform grid a, a + (b - a)/(count - 1), ..., b.
std::vector<double> uniform_grid(double a, double b, std::size_t count);

}  // namespace fracosc
