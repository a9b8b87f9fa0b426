#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "fracosc/lagrange.hpp"
#include "fracosc/specfun.hpp"

using namespace fracosc;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out, err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

Run run(const std::string& args) {
  const fs::path dir = fs::temp_directory_path();
  const fs::path o = dir / "fracosc_cli_out.txt", e = dir / "fracosc_cli_err.txt";
  const std::string cmd = std::string(FRACOSC_CLI_PATH) + " " + args + " > " + o.string() + " 2> " + e.string();
  const int status = std::system(cmd.c_str());
  Run r;
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = slurp(o);
  r.err = slurp(e);
  return r;
}

std::string cfg(const std::string& name) { return std::string(FRACOSC_CONFIG_DIR) + "/" + name; }

std::vector<std::vector<double>> csv_rows(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

TEST_CASE("deriv: GL on t") {
  const Run r = run("deriv --alpha 0.5 --expr \"t^1\" --grid 0:1:0.001 --scheme gl");
  REQUIRE(r.code == 0);
  CHECK(r.out.rfind("# fracosc ", 0) == 0);
  CHECK(r.out.find("alpha=0.5 k=1 n=1 config_hash=") != std::string::npos);
  const auto rows = csv_rows(r.out);
  REQUIRE(rows.size() == 1001);
  CHECK(rows.back()[0] == doctest::Approx(1.0));
  CHECK(rows.back()[1] == doctest::Approx(1.0));
  CHECK(rows.back()[2] == doctest::Approx(1.1284).epsilon(1e-3));
}

TEST_CASE("deriv: constants map to zero") {
  const Run r = run("deriv --alpha 0.5 --expr \"3\"");
  REQUIRE(r.code == 0);
  for (const auto& row : csv_rows(r.out)) CHECK(row[2] == 0.0);
}

TEST_CASE("deriv: exact scheme, series input and right side") {
  const Run r = run("deriv --alpha 0.5 --series \"[[1, 2]]\" --grid 0:1:0.25 --scheme exact");
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows.back()[2] == doctest::Approx(2.0 / fracosc::gamma(2.5)).epsilon(1e-14));
  // right derivative of 1 - t on [0, 1] at t = 0 is 1/Gamma(1.5)
  const Run s = run("deriv --alpha 0.5 --expr \"1 - t\" --grid 0:1:0.25 --scheme exact --side right");
  REQUIRE(s.code == 0);
  CHECK(csv_rows(s.out).front()[2] == doctest::Approx(1.0 / fracosc::gamma(1.5)).epsilon(1e-14));
}

TEST_CASE("deriv: usage and domain errors") {
  const Run r = run("deriv --expr \"3\"");
  CHECK(r.code == 1);
  CHECK(r.err.find("--alpha") != std::string::npos);
  CHECK(r.out.empty());
  CHECK(run("deriv --alpha 0.5").code == 1);
  CHECK(run("deriv --alpha 0.5 --expr \"t^0.2\" --scheme exact").code == 2);
  CHECK(run("deriv --alpha 0.5 --expr \"x1\"").code == 2);
  CHECK(run("deriv --alpha 0.5 --expr \"t +\"").code == 1);
  CHECK(run("deriv --alpha 0.5 --expr \"t\" --scheme spline").code == 1);
}

TEST_CASE("el: example passes, perturbation fails the assertion") {
  const Run ok = run("el " + cfg("el_example.cfg") + " --assert 1e-6");
  CHECK(ok.code == 0);
  CHECK(ok.out.find("form,component,point,residual") != std::string::npos);
  CHECK(ok.out.find("\nfrac,") != std::string::npos);
  CHECK(ok.out.find("\nclassical,") != std::string::npos);
  const Run bad = run("el " + cfg("el_perturbed.cfg") + " --assert 1e-6");
  CHECK(bad.code == 3);
  CHECK(bad.err.find("assertion failed") != std::string::npos);
  // without --assert the residual table is still produced
  CHECK(run("el " + cfg("el_perturbed.cfg")).code == 0);
  // the default tolerance comes from the config
  CHECK(run("el " + cfg("el_perturbed.cfg") + " --assert").code == 3);
}

TEST_CASE("el: empty and missing configs") {
  const fs::path empty = fs::temp_directory_path() / "fracosc_empty.cfg";
  std::ofstream(empty).close();
  CHECK(run("el " + empty.string()).code == 1);
  CHECK(run("el /nonexistent/file.cfg").code == 1);
}

TEST_CASE("connection: flat metric gives zero coefficients") {
  const Run r = run("connection " + cfg("connection_flat.cfg"));
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc["meta"]["n"] == 2);
  CHECK(doc["meta"]["k"] == 2);
  for (const auto& order : doc["dual"])
    for (const auto& row : order)
      for (const auto& e : row) CHECK(e == "0");
  for (const auto& p : doc["points"])
    for (const auto& c : p["metrical"]["L"])
      for (const auto& row : c)
        for (const auto& v : row) CHECK(v.get<double>() == 0.0);
  CHECK(doc["checks"]["metricity"].get<double>() < 1e-8);
}

TEST_CASE("connection: Riemann n = 1 matches the direct recursion") {
  const Run r = run("connection " + cfg("connection_riemann.cfg"));
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  const DualCoefficients d = prolong_riemann(RiemannStructure::from_exprs(1, 0.5, {Expr::parse("x1^2")}), 2);
  for (const auto& p : doc["points"]) {
    JetPoint q = JetPoint::zero(1, 2);
    q.x(0) = p["jet"]["x"][0].get<double>();
    q.y(0, 0) = p["jet"]["y"][0][0].get<double>();
    q.y(1, 0) = p["jet"]["y"][1][0].get<double>();
    for (int a = 0; a < 2; ++a) {
      const double expect = eval_matrix(d.M[static_cast<std::size_t>(a)], q)(0, 0);
      CHECK(p["dual"][a][0][0].get<double>() == doctest::Approx(expect).epsilon(1e-12));
      // the printed polynomial re-evaluates to the same number
      const Expr e = Expr::parse(doc["dual"][a][0][0].get<std::string>());
      CHECK(e.eval(q.lookup()) == doctest::Approx(expect).epsilon(1e-12));
    }
  }
  CHECK(doc["checks"]["spray_property"].get<double>() < 1e-10);
  CHECK(doc["checks"]["basis_pairing"].get<double>() < 1e-10);
  CHECK(doc["checks"]["nilpotency"].get<double>() == 0.0);
}

TEST_CASE("connection: singular metric") {
  const Run r = run("connection " + cfg("connection_singular.cfg"));
  CHECK(r.code == 2);
  CHECK(r.err.find("rank") != std::string::npos);
}

TEST_CASE("solve: Mittag-Leffler solution and constant trajectory") {
  const Run r = run("solve " + cfg("solve_ml.cfg"));
  REQUIRE(r.code == 0);
  const auto rows = csv_rows(r.out);
  CHECK(rows.back()[0] == doctest::Approx(1.0));
  CHECK(rows.back()[1] == doctest::Approx(mittag_leffler(0.5, 1.0)).epsilon(5e-3));
  const Run z = run("solve " + cfg("solve_zero.cfg"));
  REQUIRE(z.code == 0);
  for (const auto& row : csv_rows(z.out)) {
    CHECK(row[1] == 1.5);
    CHECK(row[2] == -2.0);
  }
}

TEST_CASE("solve: bad expression reports its position") {
  const Run r = run("solve " + cfg("solve_bad.cfg"));
  CHECK(r.code == 1);
  CHECK(r.err.find("line 5, column") != std::string::npos);
}

TEST_CASE("--out writes the same bytes as stdout") {
  const fs::path out = fs::temp_directory_path() / "fracosc_solve.csv";
  fs::remove(out);
  const Run r = run("solve " + cfg("solve_zero.cfg") + " --out " + out.string());
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  CHECK(slurp(out) == run("solve " + cfg("solve_zero.cfg")).out);
}

TEST_CASE("repeated runs are byte-identical") {
  for (const std::string& c : {"el " + cfg("el_example.cfg"), "connection " + cfg("connection_riemann.cfg"),
                               "solve " + cfg("solve_ml.cfg")}) {
    const std::string first = run(c).out;
    CHECK_FALSE(first.empty());
    CHECK(run(c).out == first);
  }
}
