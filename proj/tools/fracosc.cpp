#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "fracosc/commands.hpp"

using namespace fracosc;

namespace {

// Buffer the output so a failed run never leaves a partial file behind.
int emit(int code, const std::string& text, const std::string& path) {
  if (code != kExitOk && code != kExitAccuracy) return code;
  if (path.empty()) {
    std::cout << text;
    return code;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) {
    std::cerr << "cannot write '" << path << "'\n";
    return kExitUsage;
  }
  f << text;
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fractional calculus and fractional osculator-bundle geometry"};
  app.set_version_flag("--version", FRACOSC_VERSION);
  app.require_subcommand(1);
  std::string out_path;
  app.add_option("--out,-o", out_path, "Write the result here instead of stdout");

  DerivOptions dopt;
  std::string expr, series;
  auto* deriv = app.add_subcommand("deriv", "Fractional derivative of a function of t on a grid (CSV)");
  deriv->add_option("--alpha", dopt.alpha, "Order in (0, 1]")->required();
  auto* ex = deriv->add_option("--expr", expr, "Expression in t");
  auto* se = deriv->add_option("--series", series, "JSON [[coeff, exponent], ...]");
  ex->excludes(se);
  deriv->add_option("--grid", dopt.grid, "a:b:h")->capture_default_str();
  deriv->add_option("--scheme", dopt.scheme, "gl | l1 | exact")->check(CLI::IsMember({"gl", "l1", "exact"}))->capture_default_str();
  deriv->add_option("--side", dopt.side, "left | right")->check(CLI::IsMember({"left", "right"}))->capture_default_str();
  deriv->add_option("--out,-o", out_path, "Output file");

  std::string el_cfg;
  double el_tol = std::numeric_limits<double>::quiet_NaN();
  auto* el = app.add_subcommand("el", "Euler-Lagrange residuals of both forms (CSV)");
  el->add_option("config", el_cfg, "Config file")->required();
  auto* as = el->add_option("--assert", el_tol, "Exit 3 when the max residual exceeds TOL (default el.tol)")
                 ->expected(0, 1);
  el->add_option("--out,-o", out_path, "Output file");

  std::string conn_cfg;
  auto* conn = app.add_subcommand("connection", "Nonlinear and metrical connection coefficients (JSON)");
  conn->add_option("config", conn_cfg, "Config file")->required();
  conn->add_option("--out,-o", out_path, "Output file");

  std::string solve_cfg;
  auto* solve = app.add_subcommand("solve", "Fractional ODE trajectory (CSV)");
  solve->add_option("config", solve_cfg, "Config file")->required();
  solve->add_option("--out,-o", out_path, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\n\n";
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    std::cerr << sub->help();
    return kExitUsage;
  }

  std::ostringstream buf;
  int code = kExitOk;
  if (*deriv) {
    if (ex->count()) dopt.expr = expr;
    if (se->count()) dopt.series = series;
    code = cmd_deriv(dopt, buf, std::cerr);
  } else if (*el) {
    std::optional<double> tol;
    if (as->count()) tol = el_tol;
    code = cmd_el(el_cfg, tol, buf, std::cerr);
  } else if (*conn) {
    code = cmd_connection(conn_cfg, buf, std::cerr);
  } else if (*solve) {
    code = cmd_solve(solve_cfg, buf, std::cerr);
  }
  return emit(code, buf.str(), out_path);
}
