#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "fracosc/expr.hpp"
#include "fracosc/poly.hpp"

namespace fracosc {

struct ChartMap;

/// A point of the k-order bundle: x (n) and y (k x n), row a-1 holding y^{i(alpha a)}.
struct JetPoint {
  Eigen::VectorXd x;
  Eigen::MatrixXd y;

  JetPoint() = default;
  JetPoint(Eigen::VectorXd x_, Eigen::MatrixXd y_) : x(std::move(x_)), y(std::move(y_)) {}
  static JetPoint zero(int n, int k) { return {Eigen::VectorXd::Zero(n), Eigen::MatrixXd::Zero(k, n)}; }

  int n() const { return static_cast<int>(x.size()); }
  int k() const { return static_cast<int>(y.rows()); }
  /// Value of x<i> or y<i>_<a>; orders above k and t are errors.
  double value(Var v) const;
  VarLookup lookup() const;
};

/// Natural slots are numbered level * n + i (level 0 = x, level a = y^{(alpha a)}).
inline int slot(int level, int i, int n) { return level * n + i; }

/// Liouville weight ladder. Consistent: w_1 = G(1+alpha) everywhere. Literal: the
/// first Liouville field carries weight 1 on y^{(alpha)}.
enum class WeightConvention { Consistent, Literal };

/// w_1 = G(1+alpha), w_b = G(alpha b)/G(alpha) for b >= 2.
double liouville_weight(double alpha, int b);

/// Coefficients of Gamma^{alpha a} over the (k+1)n natural slots.
Eigen::VectorXd liouville_field(int a, const JetPoint& at, double alpha,
                                WeightConvention conv = WeightConvention::Consistent);

/// Slot shift x -> y^{(alpha)} -> ... -> y^{(alpha k)} -> 0, as a matrix acting on coefficient columns.
Eigen::MatrixXd tangent_structure_matrix(int n, int k);
Eigen::VectorXd tangent_structure(const Eigen::VectorXd& v, int n, int k);

struct FracSpray {
  int n = 1;
  int k = 1;
  double alpha = 0.5;
  std::vector<Poly> G;  // G^i over x and jet variables

  static FracSpray from_exprs(int n, int k, double alpha, const std::vector<Expr>& G);
  void validate() const;
};

/// S = sum_b w_b y^{(alpha b)} D_{level b-1} - G(alpha k)/G(alpha) G^i D_{y^{i(alpha k)}}.
Eigen::VectorXd spray_field(const FracSpray& s, const JetPoint& at);

/// Total fractional derivation sum_{b=1..k} w_b y^{i(alpha b)} D^alpha_{level b-1, i} applied to f.
Poly liouville_derivation(const Poly& f, int n, int k, double alpha);

/// The spray acting on a function as a derivation.
Poly spray_derivation(const FracSpray& s, const Poly& f);

/// Matrices are stored with the upper index as row: M(i, j) = M^i_j.
struct DualCoefficients {
  int n = 1, k = 1;
  double alpha = 0.5;
  std::vector<PolyMatrix> M;  // M[a-1] = M^{(alpha a)}
};

struct PrimalCoefficients {
  int n = 1, k = 1;
  double alpha = 0.5;
  std::vector<PolyMatrix> N;  // N[a-1] = N^{(alpha a)}
};

/// M^{(alpha)} = D_{y^{j(alpha)}} G^i, then
/// M^{(alpha(a+1))} = G(alpha a)/G(alpha(a+1)) (S(M^{(alpha a)}) + M^{(alpha)} M^{(alpha a)}).
DualCoefficients spray_to_dual(const FracSpray& s);

/// Same recursion starting from a given first dual coefficient, driven by a
/// derivation `op` applied entrywise.
DualCoefficients dual_recursion(const PolyMatrix& M1, int n, int k, double alpha,
                                const std::function<Poly(const Poly&)>& op);

/// Triangular relation M^{(d)} = N^{(d)} + sum_{e<d} M^{(d-e)} N^{(e)} solved for N.
PrimalCoefficients dual_to_primal(const DualCoefficients& d);
DualCoefficients primal_to_dual(const PrimalCoefficients& p);

/// Rows are the adapted vectors Delta in the natural basis.
Eigen::MatrixXd adapted_basis(const PrimalCoefficients& p, const JetPoint& at);
/// Rows are the adapted covectors delta y in the natural coframe.
Eigen::MatrixXd dual_basis(const DualCoefficients& d, const JetPoint& at);

Eigen::MatrixXd eval_matrix(const PolyMatrix& m, const JetPoint& at);

struct MetricField {
  int n = 1, k = 1;
  double alpha = 0.5;
  PolyMatrix g;  // symmetrized at construction

  MetricField() = default;
  MetricField(int n, int k, double alpha, PolyMatrix g);
  static MetricField from_exprs(int n, int k, double alpha, const std::vector<Expr>& entries);
  Eigen::MatrixXd at(const JetPoint& p) const { return eval_matrix(g, p); }
};

/// Adapted derivative of f at a point. level 0 is Delta_{x^m}; level r >= 1 is Delta_{y^{m(alpha r)}}.
double adapted_derivative(const Poly& f, int level, int m, const PrimalCoefficients& p, const JetPoint& at);

/// Rank-3 array indexed [i][j][l].
using Array3 = std::vector<Eigen::MatrixXd>;

struct MetricalConnection {
  Array3 L;               // L[i](j, l)
  std::vector<Array3> C;  // C[a-1][i](j, l)
  double condition = 1.0; // condition number estimate of g at the point
};

/// Evaluated at one point. Throws RankError if g is singular there.
MetricalConnection metrical_connection(const MetricField& g, const PrimalCoefficients& p, const JetPoint& at);

/// A covariant d-tensor of rank r with polynomial components, flattened row-major over indices.
struct DTensor {
  int n = 1;
  int rank = 2;
  std::vector<Poly> comp;
  const Poly& operator[](const std::vector<int>& idx) const;
};

DTensor metric_as_tensor(const MetricField& g);

struct CovariantDerivative {
  // horizontal[m][flat index], vertical[a-1][m][flat index]
  std::vector<std::vector<double>> horizontal;
  std::vector<std::vector<std::vector<double>>> vertical;
  double max_abs() const;
};

/// |m contracts every index with L; |^{(alpha a)} m contracts every index with C^{(alpha a)}.
CovariantDerivative covariant_derivative(const DTensor& t, const MetricalConnection& conn,
                                         const PrimalCoefficients& p, const JetPoint& at);

/// B^T blockdiag(g, ..., g) B with B the dual coframe matrix.
Eigen::MatrixXd sasaki_lift(const MetricField& g, const DualCoefficients& d, const JetPoint& at);

/// First-order jets by the fractional Jacobian, higher orders by the recursion in
/// docs; k >= 2 requires monomial chart maps. Partials of lower jet coordinates in
/// the recursion are classical unless `fractional_jet_partials` is set.
JetPoint jet_transform(const JetPoint& p, const ChartMap& m, bool fractional_jet_partials = false);

}  // namespace fracosc
