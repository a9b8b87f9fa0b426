#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fracosc/oscbundle.hpp"

namespace fracosc {

/// Exit codes shared by every subcommand.
enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitDomain = 2, kExitAccuracy = 3 };

/// Run `body`, mapping library exceptions to exit codes with a one-line diagnostic on `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

struct DerivOptions {
  double alpha = 0.5;
  std::optional<std::string> expr;    // function of t
  std::optional<std::string> series;  // JSON [[coeff, exponent], ...]
  std::string grid = "0:1:0.001";     // a:b:h
  std::string scheme = "gl";          // gl | l1 | exact
  std::string side = "left";          // left | right
};

/// CSV with columns t, f, D^alpha f.
int cmd_deriv(const DerivOptions& opt, std::ostream& out, std::ostream& err);

/// Residual CSV of both Euler-Lagrange forms. With `assert_tol`, exit 3 when the
/// max residual exceeds it (falls back to el.tol when the value is NaN).
int cmd_el(const std::string& config_path, std::optional<double> assert_tol, std::ostream& out, std::ostream& err);

/// JSON with dual/primal coefficients, the metrical connection at sample points and self-checks.
int cmd_connection(const std::string& config_path, std::ostream& out, std::ostream& err);

/// Trajectory CSV of D^alpha x = f(t, x).
int cmd_solve(const std::string& config_path, std::ostream& out, std::ostream& err);

/// `count` jet points with coordinates in [0.1, 2), from a fixed-seed generator.
std::vector<JetPoint> sample_jets(int n, int levels, std::size_t count, std::uint64_t seed);

}  // namespace fracosc
