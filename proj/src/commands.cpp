#include "fracosc/commands.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>

#include "json.hpp"

#include "fracosc/config.hpp"
#include "fracosc/errors.hpp"
#include "fracosc/expr.hpp"
#include "fracosc/fracnum.hpp"
#include "fracosc/fracseries.hpp"
#include "fracosc/lagrange.hpp"
#include "fracosc/numfmt.hpp"
#include "fracosc/specfun.hpp"

#ifndef FRACOSC_VERSION
#define FRACOSC_VERSION "0.0.0"
#endif

namespace fracosc {

namespace {

using ojson = nlohmann::ordered_json;

struct Header {
  double alpha = 0.0;
  int k = 1;
  int n = 1;
  std::string hash;
};

void csv_header(std::ostream& out, const Header& h, const std::string& what) {
  out << "# fracosc " << FRACOSC_VERSION << " " << what << "\n";
  out << "# alpha=" << fmt_double(h.alpha) << " k=" << h.k << " n=" << h.n << " config_hash=" << h.hash << "\n";
}

ojson json_meta(const Header& h, const std::string& what) {
  ojson m;
  m["tool"] = "fracosc";
  m["version"] = FRACOSC_VERSION;
  m["command"] = what;
  m["alpha"] = h.alpha;
  m["k"] = h.k;
  m["n"] = h.n;
  m["config_hash"] = h.hash;
  return m;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream s;
  s << std::hex;
  s.width(16);
  s.fill('0');
  s << v;
  return s.str();
}

struct Grid {
  double a = 0.0, b = 1.0, h = 1e-3;
};

Grid parse_grid(const std::string& text) {
  Grid g;
  std::vector<double> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ':')) {
    try {
      std::size_t used = 0;
      parts.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("grid must be a:b:h, got '" + text + "'", 0);
    }
  }
  if (parts.size() != 3) throw ConfigError("grid must be a:b:h, got '" + text + "'", 0);
  g = {parts[0], parts[1], parts[2]};
  if (!(g.h > 0.0) || !(g.b > g.a)) throw ConfigError("grid needs b > a and h > 0", 0);
  return g;
}

std::vector<double> grid_nodes(const Grid& g) {
  const auto steps = static_cast<std::size_t>(std::llround((g.b - g.a) / g.h));
  std::vector<double> t(steps + 1);
  for (std::size_t i = 0; i <= steps; ++i) t[i] = g.a + g.h * static_cast<double>(i);
  return t;
}

FracSeries series_of_expr(const Expr& e) {
  for (const Var& v : e.vars())
    if (v != Var::t()) throw DomainError("--expr must be a function of t only, found " + v.name());
  const Poly p = e.to_poly();
  std::vector<Term> terms;
  for (const auto& [m, c] : p.terms()) terms.push_back({c, m.is_one() ? 0.0 : m.factors().front().second});
  return FracSeries(std::move(terms));
}

std::vector<Expr> indexed_exprs(const RunConfig& cfg, const std::string& prefix, int count) {
  std::vector<Expr> out;
  for (int i = 1; i <= count; ++i) out.push_back(cfg.expr(prefix + std::to_string(i)));
  return out;
}

std::vector<Expr> matrix_exprs(const RunConfig& cfg, const std::string& prefix, int n) {
  std::vector<Expr> out;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= n; ++j) {
      const std::string key = prefix + std::to_string(i) + std::to_string(j);
      const std::string alt = prefix + std::to_string(j) + std::to_string(i);
      if (cfg.has(key)) out.push_back(cfg.expr(key));
      else if (cfg.has(alt)) out.push_back(cfg.expr(alt));
      else out.push_back(Expr::number(0.0));
    }
  return out;
}

std::vector<double> number_list(const RunConfig& cfg, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(cfg.get(key));
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    try {
      std::size_t used = 0;
      const std::size_t b = tok.find_first_not_of(' ');
      tok = b == std::string::npos ? "" : tok.substr(b);
      while (!tok.empty() && tok.back() == ' ') tok.pop_back();
      out.push_back(std::stod(tok, &used));
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      throw ConfigError("line " + std::to_string(cfg.line_of(key)) + ": '" + key + "' must be a comma-separated number list",
                        cfg.line_of(key));
    }
  }
  return out;
}

ojson poly_table(const std::vector<PolyMatrix>& ms) {
  ojson arr = ojson::array();
  for (const PolyMatrix& m : ms) {
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < m.n; ++i) {
      ojson row = ojson::array();
      for (std::size_t j = 0; j < m.n; ++j) row.push_back(m(i, j).to_string());
      rows.push_back(row);
    }
    arr.push_back(rows);
  }
  return arr;
}

ojson numeric_table(const std::vector<PolyMatrix>& ms, const JetPoint& p) {
  ojson arr = ojson::array();
  for (const PolyMatrix& m : ms) {
    const Eigen::MatrixXd v = eval_matrix(m, p);
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < v.rows(); ++i) {
      ojson row = ojson::array();
      for (Eigen::Index j = 0; j < v.cols(); ++j) row.push_back(v(i, j));
      rows.push_back(row);
    }
    arr.push_back(rows);
  }
  return arr;
}

ojson array3(const Array3& a) {
  ojson out = ojson::array();
  for (const Eigen::MatrixXd& m : a) {
    ojson rows = ojson::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      ojson row = ojson::array();
      for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
      rows.push_back(row);
    }
    out.push_back(rows);
  }
  return out;
}

ojson jet_json(const JetPoint& p) {
  ojson j;
  j["x"] = std::vector<double>(p.x.data(), p.x.data() + p.x.size());
  ojson ys = ojson::array();
  for (Eigen::Index a = 0; a < p.y.rows(); ++a) {
    std::vector<double> row;
    for (Eigen::Index i = 0; i < p.y.cols(); ++i) row.push_back(p.y(a, i));
    ys.push_back(row);
  }
  j["y"] = ys;
  return j;
}

}  // namespace

int run_guarded(const std::function<int()>& body, std::ostream& err) {
  try {
    return body();
  } catch (const SyntaxError& e) {
    err << "parse error: " << e.what();
    if (!e.expected().empty() && std::string(e.what()).find("expected") == std::string::npos)
      err << " (expected " << e.expected() << ")";
    err << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const AccuracyError& e) {
    err << "accuracy error: " << e.what() << " (last term " << fmt_double(e.last_term()) << ")\n";
    return kExitAccuracy;
  } catch (const RankError& e) {
    err << "rank error: " << e.what() << "\n";
    return kExitDomain;
  } catch (const SolverError& e) {
    err << "solver error: " << e.what() << " (last good t = " << fmt_double(e.last_good_t()) << ")\n";
    return kExitDomain;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << "\n";
    return kExitDomain;
  }
}

std::vector<JetPoint> sample_jets(int n, int levels, std::size_t count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  // Bit-level mapping keeps samples identical across standard libraries.
  auto u = [&rng] { return 0.1 + 1.9 * static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  std::vector<JetPoint> out;
  for (std::size_t s = 0; s < count; ++s) {
    JetPoint p = JetPoint::zero(n, levels);
    for (int i = 0; i < n; ++i) p.x(i) = u();
    for (int a = 0; a < levels; ++a)
      for (int i = 0; i < n; ++i) p.y(a, i) = u();
    out.push_back(p);
  }
  return out;
}

int cmd_deriv(const DerivOptions& opt, std::ostream& out, std::ostream& err) {
  return run_guarded([&] {
    if (opt.expr.has_value() == opt.series.has_value())
      throw ConfigError("give exactly one of --expr or --series", 0);
    if (opt.scheme != "gl" && opt.scheme != "l1" && opt.scheme != "exact")
      throw ConfigError("--scheme must be gl, l1 or exact", 0);
    if (opt.side != "left" && opt.side != "right") throw ConfigError("--side must be left or right", 0);
    if (!(opt.alpha > 0.0 && opt.alpha <= 1.0)) throw DomainError("alpha must lie in (0, 1]");
    const Grid g = parse_grid(opt.grid);
    const std::vector<double> t = grid_nodes(g);
    const Side side = opt.side == "left" ? Side::Left : Side::Right;

    std::optional<FracSeries> series;
    std::optional<Expr> fexpr;
    if (opt.series) series = series_from_json(*opt.series);
    else {
      fexpr = Expr::parse(*opt.expr);
      for (const Var& v : fexpr->vars())
        if (v != Var::t()) throw DomainError("--expr must be a function of t only, found " + v.name());
    }

    std::vector<double> f(t.size()), d(t.size(), 0.0);
    for (std::size_t i = 0; i < t.size(); ++i)
      f[i] = series ? evaluate(*series, t[i]) : fexpr->eval([&](Var) { return t[i]; });

    if (opt.scheme == "exact") {
      if (g.a != 0.0) throw DomainError("the exact scheme expands about t = 0; use a grid starting at 0");
      const FracSeries s = series ? *series : series_of_expr(*fexpr);
      if (side == Side::Left) {
        const FracSeries ds = frac_derive(s, opt.alpha);
        for (std::size_t i = 0; i < t.size(); ++i) d[i] = evaluate(ds, t[i]);
      } else {
        const FracSeries ds = frac_derive(mirror(s, g.b), opt.alpha);
        for (std::size_t i = 0; i < t.size(); ++i) d[i] = evaluate(ds, g.a + g.b - t[i]);
      }
    } else {
      const SampledFunction sf{g.a, g.h, f};
      if (opt.scheme == "l1" && side == Side::Right) throw DomainError("the l1 scheme is left-sided only");
      const SampledFunction ds = opt.scheme == "gl" ? gl_derivative(sf, opt.alpha, side) : l1_derivative(sf, opt.alpha);
      d = ds.values;
    }

    std::ostringstream flags;
    flags << "alpha=" << fmt_double(opt.alpha) << ";" << (opt.expr ? "expr=" + *opt.expr : "series=" + *opt.series)
          << ";grid=" << opt.grid << ";scheme=" << opt.scheme << ";side=" << opt.side;
    csv_header(out, {opt.alpha, 1, 1, hex64(fnv1a64(flags.str()))},
               "deriv scheme=" + opt.scheme + " side=" + opt.side);
    out << "t,f,dalpha_f\n";
    for (std::size_t i = 0; i < t.size(); ++i)
      out << fmt_double(t[i]) << "," << fmt_double(f[i]) << "," << fmt_double(d[i]) << "\n";
    return kExitOk;
  }, err);
}

int cmd_el(const std::string& config_path, std::optional<double> assert_tol, std::ostream& out, std::ostream& err) {
  return run_guarded([&] {
    const RunConfig cfg = RunConfig::load(config_path);
    if (cfg.empty()) throw ConfigError("config '" + config_path + "' is empty", 0);
    const double alpha = cfg.alpha();
    const int n = cfg.n(), k = cfg.k();
    const std::string range_name = cfg.get_or("el.range", "full");
    if (range_name != "full" && range_name != "literal") throw ConfigError("el.range must be full or literal", cfg.line_of("el.range"));
    const ElOptions opt{range_name == "full" ? DtRange::Full : DtRange::Literal};

    std::vector<Poly> target(static_cast<std::size_t>(n));
    for (int i = 1; i <= n; ++i) {
      const std::string key = "el.target" + std::to_string(i);
      if (cfg.has(key)) {
        const Expr e = cfg.expr(key);
        check_vars(e, n, k + 1);
        target[static_cast<std::size_t>(i - 1)] = e.to_poly();
      }
    }

    struct Form {
      std::string name;
      std::vector<Poly> op;
    };
    std::vector<Form> forms;
    if (cfg.has("el.frac")) {
      const FracLagrangian l = FracLagrangian::from_expr(n, k, alpha, cfg.expr("el.frac"));
      forms.push_back({"frac", el_operator_frac(l, opt)});
    }
    if (cfg.has("el.classical")) {
      const FracLagrangian l = FracLagrangian::from_expr(n, k, alpha, cfg.expr("el.classical"));
      forms.push_back({"classical", el_operator_classical(l, opt)});
    }
    if (forms.empty()) throw ConfigError("config needs el.frac and/or el.classical", 0);
    for (Form& f : forms)
      for (std::size_t i = 0; i < f.op.size(); ++i) f.op[i] = f.op[i] - target[i];

    // Evaluation points: along a curve when one is given, else seeded random jets.
    std::vector<JetPoint> points;
    if (cfg.has("el.curve1")) {
      ExtremalCurve c;
      for (int i = 1; i <= n; ++i) c.push_back(series_from_json(cfg.get("el.curve" + std::to_string(i))));
      for (double t : grid_nodes(parse_grid(cfg.get_or("el.grid", "0.03125:1:0.03125"))))
        points.push_back(jet_lift(c, alpha, k + 1, t));
    } else {
      points = sample_jets(n, k + 1, static_cast<std::size_t>(cfg.integer_or("el.samples", 20)),
                           static_cast<std::uint64_t>(cfg.integer_or("el.seed", 1)));
    }

    csv_header(out, {alpha, k, n, cfg.hash_hex()}, "el range=" + range_name);
    out << "form,component,point,residual\n";
    double worst = 0.0;
    for (const Form& f : forms) {
      double fmax = 0.0;
      for (std::size_t p = 0; p < points.size(); ++p) {
        const VarLookup look = points[p].lookup();
        for (std::size_t i = 0; i < f.op.size(); ++i) {
          const double r = f.op[i].eval(look);
          if (!std::isfinite(r)) throw EvalError("non-finite residual in form " + f.name);
          fmax = std::max(fmax, std::abs(r));
          out << f.name << "," << i + 1 << "," << p << "," << fmt_double(r) << "\n";
        }
      }
      err << "max residual " << f.name << " = " << fmt_double(fmax) << "\n";
      worst = std::max(worst, fmax);
    }
    if (assert_tol) {
      const double tol = std::isnan(*assert_tol) ? cfg.number_or("el.tol", 1e-6) : *assert_tol;
      if (worst > tol) {
        err << "assertion failed: max residual " << fmt_double(worst) << " > " << fmt_double(tol) << "\n";
        return static_cast<int>(kExitAccuracy);
      }
    }
    return static_cast<int>(kExitOk);
  }, err);
}

int cmd_connection(const std::string& config_path, std::ostream& out, std::ostream& err) {
  return run_guarded([&] {
    const RunConfig cfg = RunConfig::load(config_path);
    if (cfg.empty()) throw ConfigError("config '" + config_path + "' is empty", 0);
    const double alpha = cfg.alpha();
    const int n = cfg.n(), k = cfg.k();
    const std::string kind = cfg.get_or("connection.kind", "riemann");

    DualCoefficients dual;
    MetricField metric;
    std::optional<FracSpray> spray;
    if (kind == "riemann") {
      const RiemannStructure r = RiemannStructure::from_exprs(n, alpha, matrix_exprs(cfg, "connection.g", n));
      dual = prolong_riemann(r, k);
      metric = MetricField(n, k, alpha, r.g);
      if (n == 1) spray = geodesic_spray(r, k);
    } else if (kind == "spray") {
      spray = FracSpray::from_exprs(n, k, alpha, indexed_exprs(cfg, "connection.G", n));
      dual = spray_to_dual(*spray);
      metric = MetricField::from_exprs(n, k, alpha, matrix_exprs(cfg, "connection.g", n));
    } else if (kind == "finsler") {
      const FinslerStructure f = cfg.has("connection.F2") ? FinslerStructure::from_F2(n, alpha, cfg.expr("connection.F2"))
                                                          : FinslerStructure::from_F(n, alpha, cfg.expr("connection.F"));
      dual = prolong_finsler(f, k);
      metric = MetricField(n, k, alpha, finsler_fundamental_tensor(f));
    } else if (kind == "lagrange") {
      const FracLagrangian l = FracLagrangian::from_expr(n, 1, alpha, cfg.expr("connection.L"));
      dual = prolong_lagrange(l, k);
      metric = MetricField(n, k, alpha, fundamental_tensor_symbolic(l));
    } else {
      throw ConfigError("connection.kind must be riemann, spray, finsler or lagrange", cfg.line_of("connection.kind"));
    }
    const PrimalCoefficients primal = dual_to_primal(dual);
    const DualCoefficients back = primal_to_dual(primal);

    const std::vector<JetPoint> points =
        sample_jets(n, k, static_cast<std::size_t>(cfg.integer_or("connection.points", 3)),
                    static_cast<std::uint64_t>(cfg.integer_or("connection.seed", 1)));

    const Eigen::MatrixXd T = tangent_structure_matrix(n, k);
    Eigen::MatrixXd P = Eigen::MatrixXd::Identity(T.rows(), T.cols());
    for (int i = 0; i <= k; ++i) P = T * P;

    double metricity = 0.0, roundtrip = 0.0, pairing = 0.0, spray_res = 0.0;
    ojson pts = ojson::array();
    const DTensor gt = metric_as_tensor(metric);
    for (const JetPoint& p : points) {
      const MetricalConnection mc = metrical_connection(metric, primal, p);
      if (mc.condition > 1e12) err << "warning: metric condition number " << fmt_double(mc.condition) << "\n";
      metricity = std::max(metricity, covariant_derivative(gt, mc, primal, p).max_abs());
      for (std::size_t a = 0; a < dual.M.size(); ++a)
        roundtrip = std::max(roundtrip, (eval_matrix(dual.M[a], p) - eval_matrix(back.M[a], p)).cwiseAbs().maxCoeff());
      const Eigen::MatrixXd I = dual_basis(dual, p) * adapted_basis(primal, p).transpose();
      pairing = std::max(pairing, (I - Eigen::MatrixXd::Identity(I.rows(), I.cols())).cwiseAbs().maxCoeff());
      if (spray) {
        const Eigen::VectorXd js = tangent_structure(spray_field(*spray, p), n, k);
        spray_res = std::max(spray_res, (js - liouville_field(k, p, alpha)).cwiseAbs().maxCoeff());
      }
      ojson pj;
      pj["jet"] = jet_json(p);
      pj["dual"] = numeric_table(dual.M, p);
      pj["primal"] = numeric_table(primal.N, p);
      ojson conn;
      conn["L"] = array3(mc.L);
      ojson C = ojson::array();
      for (const Array3& c : mc.C) C.push_back(array3(c));
      conn["C"] = C;
      conn["condition"] = mc.condition;
      pj["metrical"] = conn;
      pts.push_back(pj);
    }

    ojson doc;
    doc["meta"] = json_meta({alpha, k, n, cfg.hash_hex()}, "connection");
    doc["kind"] = kind;
    doc["dual"] = poly_table(dual.M);
    doc["primal"] = poly_table(primal.N);
    doc["points"] = pts;
    ojson checks;
    checks["nilpotency"] = P.cwiseAbs().maxCoeff();
    checks["metricity"] = metricity;
    checks["dual_primal_roundtrip"] = roundtrip;
    checks["basis_pairing"] = pairing;
    checks["spray_property"] = spray ? ojson(spray_res) : ojson(nullptr);
    doc["checks"] = checks;
    out << doc.dump(2) << "\n";
    return static_cast<int>(kExitOk);
  }, err);
}

int cmd_solve(const std::string& config_path, std::ostream& out, std::ostream& err) {
  return run_guarded([&] {
    const RunConfig cfg = RunConfig::load(config_path);
    if (cfg.empty()) throw ConfigError("config '" + config_path + "' is empty", 0);
    FodeProblem p;
    p.alpha = cfg.alpha();
    const int n = cfg.n();
    p.rhs = indexed_exprs(cfg, "solve.rhs", n);
    for (const Expr& e : p.rhs) check_vars(e, n, 0, true);
    p.x0 = number_list(cfg, "solve.x0");
    if (static_cast<int>(p.x0.size()) != n) throw ConfigError("solve.x0 needs n values", cfg.line_of("solve.x0"));
    p.t_end = cfg.number_or("solve.t_end", 1.0);
    p.h = cfg.number_or("solve.h", 1e-3);
    const Trajectory tr = solve_fode(p);

    csv_header(out, {p.alpha, 1, n, cfg.hash_hex()}, "solve");
    out << "t";
    for (int i = 1; i <= n; ++i) out << ",x" << i;
    out << "\n";
    for (std::size_t s = 0; s < tr.t.size(); ++s) {
      out << fmt_double(tr.t[s]);
      for (double v : tr.x[s]) out << "," << fmt_double(v);
      out << "\n";
    }
    return static_cast<int>(kExitOk);
  }, err);
}

}  // namespace fracosc
