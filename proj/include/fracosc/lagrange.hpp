#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fracosc/expr.hpp"
#include "fracosc/fracseries.hpp"
#include "fracosc/oscbundle.hpp"
#include "fracosc/poly.hpp"

namespace fracosc {

struct FracLagrangian {
  int n = 1;
  int k = 1;
  double alpha = 0.5;
  Poly L;  // over x1..xn and y<i>_<a>, a <= k

  static FracLagrangian from_expr(int n, int k, double alpha, const Expr& e);
  void validate() const;
};

/// Per-coordinate fractional power series x^i(t) on [0, 1].
using ExtremalCurve = std::vector<FracSeries>;

/// Jet point of the curve at t with `levels` jet rows, y^{(alpha a)} = D^{alpha a} x / G(1 + alpha a).
JetPoint jet_lift(const ExtremalCurve& c, double alpha, int levels, double t);

/// g_ij = 1/2 D_{y^{i(alpha)}} D_{y^{j(alpha)}} L.
PolyMatrix fundamental_tensor_symbolic(const FracLagrangian& lag);

struct FundamentalTensor {
  Eigen::MatrixXd g;
  bool regular = false;  // rank n
};
FundamentalTensor fundamental_tensor(const FracLagrangian& lag, const JetPoint& at);

/// Which terms the total derivative d_t sums. Full: b = 1..k+1 for every order
/// (a chain rule along the curve). Literal: b = 1..a for order a.
enum class DtRange { Full, Literal };

struct ElOptions {
  DtRange range = DtRange::Full;
};

/// d^{alpha a}_t F = sum_b sum_j y^{j(alpha b)} D^alpha_{y^{j(alpha(b-1))}} F, y^{(0)} = x.
Poly total_derivative(const Poly& F, int n, int k, double alpha, int a, DtRange range);

/// Fractional-partial form D_{x^i} L + sum_a (-1)^a d^{alpha a}_t(D_{y^{i(alpha a)}} L), one Poly per i,
/// over x and y up to order k + 1.
std::vector<Poly> el_operator_frac(const FracLagrangian& lag, const ElOptions& opt = {});

/// Classical-partial form dL/dx^i + sum_a (-1)^a d_t(dL/dy^{i(alpha a)}).
std::vector<Poly> el_operator_classical(const FracLagrangian& lag, const ElOptions& opt = {});

/// residual[i][node] of an operator along the curve.
std::vector<std::vector<double>> sample_along(const std::vector<Poly>& op, const ExtremalCurve& c, double alpha,
                                              int levels, const std::vector<double>& grid);

std::vector<std::vector<double>> el_residual_frac(const FracLagrangian& lag, const ExtremalCurve& c,
                                                  const std::vector<double>& grid, const ElOptions& opt = {});
std::vector<std::vector<double>> el_residual_classical(const FracLagrangian& lag, const ExtremalCurve& c,
                                                       const std::vector<double>& grid, const ElOptions& opt = {});

/// E^{(alpha b)}_i = [D_{x^i} L if b = 0] + sum_{a = max(b,1)}^{k} (-1)^a / G(1 + alpha a) d^{alpha a}_t(D_{y^{i(alpha a)}} L).
std::vector<Poly> craig_synge(const FracLagrangian& lag, int level, const ElOptions& opt = {});
std::vector<std::vector<double>> craig_synge_along(const FracLagrangian& lag, const ExtremalCurve& c, int level,
                                                   const std::vector<double>& grid, const ElOptions& opt = {});

/// The literal closed form of E^{(alpha(k-1))}:
/// (-1)^{k-1} / G(1 + alpha(k-1)) (D_{y^{i(alpha(k-1))}} L - Gamma(D_{y^{i(alpha k)}} L) - g_ij y^{j(alpha(k+1))}),
/// with Gamma the total derivation of oscbundle::liouville_derivation.
std::vector<Poly> craig_synge_closed_form(const FracLagrangian& lag);

/// G^i = G(alpha) / (G(1 + alpha k) G(1 + alpha)) g^{ij} [Gamma(D_{y^{j(alpha k)}} L) - D_{y^{j(alpha(k-1))}} L].
/// RankError if g is singular; UnsupportedForm if det g is not a single monomial.
FracSpray extract_spray(const FracLagrangian& lag);

/// How the operator written Gamma^alpha in the prolongation recursions acts on functions.
enum class GammaOperator { TotalDerivation, LiouvilleField };

struct RiemannStructure {
  int n = 1;
  double alpha = 0.5;
  PolyMatrix g;  // functions of x only

  static RiemannStructure from_exprs(int n, double alpha, const std::vector<Expr>& entries);
  void validate() const;
};

/// gamma[l](i, j) = 1/2 g^{ls} (D_{x^i} g_sj + D_{x^j} g_is - D_{x^s} g_ij).
std::vector<PolyMatrix> christoffel(const PolyMatrix& g, int n, double alpha);

/// M^{(alpha)} = gamma^i_{jm} y^{m(alpha)}, then the Gamma recursion.
DualCoefficients prolong_riemann(const RiemannStructure& r, int k,
                                 GammaOperator op = GammaOperator::TotalDerivation);

/// A spray whose first dual coefficient reproduces gamma^i_{jm} y^{m(alpha)} exactly when n = 1.
FracSpray geodesic_spray(const RiemannStructure& r, int k);

struct FinslerStructure {
  int n = 1;
  double alpha = 0.5;
  Poly F2;  // the square of the fundamental function, over x and y<i>_1

  /// Accepts F itself; (expr)^0.5 is squared structurally.
  static FinslerStructure from_F(int n, double alpha, const Expr& F);
  static FinslerStructure from_F2(int n, double alpha, const Expr& F2);
  void validate() const;
};

/// gamma_ij = 1/2 D_{y^i} D_{y^j} F^2.
PolyMatrix finsler_fundamental_tensor(const FinslerStructure& f);
/// G^i_j = 1/2 D_{y^{j(alpha)}} (gamma^i_{pm} y^{p(alpha)} y^{m(alpha)}).
PolyMatrix cartan_coefficients(const FinslerStructure& f);
DualCoefficients prolong_finsler(const FinslerStructure& f, int k, GammaOperator op = GammaOperator::TotalDerivation);

/// Which reading of the Lagrange-structure spray to use.
enum class LagrangeSprayReading { Classical, Literal };

/// Classical: G^i = 1/2 g^{im} ((D_{y^{m(alpha)}} D_{x^j} L) y^{j(alpha)} - D_{x^m} L), g_im = D D L.
/// Literal: G^i = -g^{im} D_{x^m} L.
std::vector<Poly> lagrange_spray(const FracLagrangian& l, LagrangeSprayReading reading = LagrangeSprayReading::Classical);
DualCoefficients prolong_lagrange(const FracLagrangian& l, int k,
                                  LagrangeSprayReading reading = LagrangeSprayReading::Classical,
                                  GammaOperator op = GammaOperator::TotalDerivation);

}  // namespace fracosc
