#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "pdo/io.hpp"
#include "pdo/parse.hpp"

using namespace pdo;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "pdo_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = scratch() / name;
  std::ofstream(p) << text;
  return p.string();
}

}  // namespace

TEST_CASE("parametrix of the constant laplacian") {
  const auto lap = write("lap.sym", R"s(symbol L { dim=2 order=2 trunc=3 term 2: "xi1^2 + xi2^2" })s");
  const Run r = run({"parametrix", lap, "--order", "3"});
  CHECK(r.code == 0);
  const Report rep = parse_report(r.out);
  CHECK(rep.title == "parametrix");
  CHECK(rep.at("degree -2") == "1/(xi1^2+xi2^2)");
  int degrees = 0;
  for (const auto& [k, v] : rep.entries) degrees += k.rfind("degree", 0) == 0;
  CHECK(degrees == 1);
}

TEST_CASE("flow csv conserves the symbol") {
  const auto wave = write("wave.sym", R"s(symbol W { dim=2 order=1 trunc=1 term 1: "|xi|" })s");
  const Run r = run({"flow", wave, "--start", "0,0,1,0", "--time", "5"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto samples = read_trajectory_csv(in);
  REQUIRE(samples.size() > 2);
  CHECK(samples.back().t == doctest::Approx(5.0));
  for (const auto& s : samples) CHECK(std::abs(s.p_value - samples.front().p_value) <= 1e-6);

  const auto var = write("var.sym", R"s(symbol V { dim=2 order=2 trunc=1 term 2: "(2+sin(x1))*xi1^2 + xi1*xi2 + (1.5+cos(x2))*xi2^2" })s");
  const Run v = run({"flow", var, "--start", "0.1,0.2,0.6,-0.8", "--time", "5", "--tol", "1e-10"});
  REQUIRE(v.code == 0);
  std::istringstream vin(v.out);
  const auto vs = read_trajectory_csv(vin);
  for (const auto& s : vs) CHECK(std::abs(s.p_value - vs.front().p_value) <= 1e-6 * std::max(1.0, std::abs(vs.front().p_value)));

  CHECK(run({"flow", wave, "--start", "0,0,1", "--time", "1"}).code == 1);
}

TEST_CASE("circle index report") {
  const Run r = run({"index", "--aplus", "exp(i*x1)", "--aminus", "1", "--K", "32"});
  CHECK(r.code == 0);
  const Report rep = parse_report(r.out);
  CHECK(rep.at("winding plus") == "1");
  CHECK(rep.at("winding minus") == "0");
  CHECK(rep.at("index") == "-1");
  CHECK(run({"index", "--aplus", "sin(x1)", "--aminus", "1"}).code == 1);
}

TEST_CASE("exit codes") {
  CHECK(run({}).code == 1);
  CHECK(run({"nonsense"}).code == 1);
  CHECK(run({"--help"}).code == 0);
  const auto bad = write("bad.sym", R"s(symbol B { dim=1 order=1 trunc=2 term 1: "xi1 + 1" })s");
  const Run h = run({"adjoint", bad});
  CHECK(h.code == 1);
  CHECK(h.err.find("HomogeneityError") != std::string::npos);
  const auto zero = write("zero.sym", R"s(symbol Z { dim=1 order=1 trunc=1 term 1: "sin(x1)*xi1" })s");
  CHECK(run({"parametrix", zero}).code == 1);
  // A discontinuous test function defeats the Cauchy test.
  const Run n = run({"oscint", "--amp", "|xi|*xi1^2", "--test", "1", "--lo", "-0.5", "--hi", "0.5", "--method",
                     "eps", "--tol", "1e-12"});
  CHECK(n.code == 2);
  CHECK(n.err.find("NonConvergent") != std::string::npos);
}

TEST_CASE("symbolic commands and report round trips") {
  const auto p = write("p.sym", R"s(symbol P { dim=1 order=1 trunc=3 term 1: "(2+sin(x1))*xi1" term 0: "cos(x1)" })s");
  const auto q = write("q.sym", R"s(symbol Q { dim=1 order=1 trunc=3 term 1: "xi1" })s");
  const auto pos = write("pos.sym", R"s(symbol S { dim=1 order=2 trunc=3 term 2: "(2+sin(x1))*xi1^2" })s");
  for (const std::vector<std::string>& args :
       {std::vector<std::string>{"compose", p, q}, {"adjoint", p}, {"convert", p, "--to", "right"},
        {"commutator", p, q}, {"sqrt", pos, "--order", "2"}, {"parametrix", p, "--order", "2"}}) {
    const Run r = run(args);
    REQUIRE(r.code == 0);
    // The emitted report is itself a valid symbol input.
    const auto again = write("again.rep", r.out);
    const Run a = run({"adjoint", again});
    CHECK(a.code == 0);
    CHECK_FALSE(symbol_from_report(parse_report(r.out)).empty());
  }
  const Run c = run({"commutator", p, q});
  const auto sym = symbol_from_report(parse_report(c.out));
  CHECK(sym.order() == 2.0);
  CHECK(is_zero(sym.term_at(2.0)));

  const Run e = run({"ellipticity", p});
  CHECK(parse_report(e.out).at("elliptic") == "yes");

  const auto map = write("shift.map", "# map\ndim: 1\nforward 1: 2*x1\ninverse 1: 0.5*x1\n");
  const Run pb = run({"pullback", q, "--map", map});
  REQUIRE(pb.code == 0);
  CHECK(is_zero(parse_expression(parse_report(pb.out).at("degree 1"), 1) - Expr(0.5) * Expr::xi(0), 1));
}

TEST_CASE("grid, wavefront and hodge artifacts") {
  const auto u = GridFunction::sample(sin(Expr::x(0)) + cos(Expr(2.0) * Expr::x(1)), 2, 16);
  std::ostringstream g;
  write_grid_csv(g, u);
  const auto grid = write("u.csv", g.str());
  const auto lap = write("lap2.sym", R"s(symbol L { dim=2 order=2 trunc=1 term 2: "xi1^2 + xi2^2" })s");
  const Run a = run({"apply", lap, "--grid", grid});
  REQUIRE(a.code == 0);
  std::istringstream ain(a.out);
  const GridFunction v = read_grid_csv(ain);
  const auto expected = GridFunction::sample(sin(Expr::x(0)) + Expr(4.0) * cos(Expr(2.0) * Expr::x(1)), 2, 16);
  CHECK((v - expected).max_abs() < 1e-12);

  const Run s = run({"sobolev", "--grid", grid, "--s", "1"});
  CHECK(std::stod(parse_report(s.out).at("norm")) == doctest::Approx(std::sqrt(2 * 0.25 * 2 + 2 * 0.25 * 5)));
  const Run t = run({"sobolev", "--coeff", "1/|xi|", "--s", "0.6"});
  CHECK(parse_report(t.out).at("trend") == "growing");

  // xi1^2 - xi2^2 vanishes on (1, 1)/sqrt2; x moves with velocity (2 xi1, -2 xi2).
  const auto wave = write("wave2.sym", R"s(symbol W { dim=2 order=2 trunc=1 term 2: "xi1^2 - xi2^2" })s");
  const double h = std::sqrt(0.5);
  std::ostringstream pts;
  write_points_csv(pts, {{{0.0, 0.0}, {h, h}}, {{1.0, -1.0}, {-h, h}}});
  const auto init = write("init.csv", pts.str());
  const Run w = run({"wavefront", wave, "--init", init, "--time", "1"});
  REQUIRE(w.code == 0);
  std::istringstream win(w.out);
  const auto moved = read_points_csv(win);
  REQUIRE(moved.size() == 2);
  CHECK(moved[0].x[0] == doctest::Approx(2 * h));
  CHECK(moved[0].x[1] == doctest::Approx(-2 * h));
  CHECK(moved[1].x[0] == doctest::Approx(1.0 - 2 * h));
  CHECK(moved[1].x[1] == doctest::Approx(-1.0 - 2 * h));
  std::ostringstream off;
  write_points_csv(off, {{{0.0, 0.0}, {1.0, 0.0}}});
  CHECK(run({"wavefront", wave, "--init", write("off.csv", off.str()), "--time", "1"}).code == 1);

  const auto form = FormField::sample(2, 1, 8, {sin(Expr::x(0)), Expr(0.0)});
  std::ostringstream f;
  write_form_csv(f, form);
  const auto ffile = write("w.csv", f.str());
  const Run d = run({"hodge", "delta", "--form", ffile});
  REQUIRE(d.code == 0);
  std::istringstream din(d.out);
  CHECK((read_form_csv(din) - FormField::sample(2, 0, 8, {-cos(Expr::x(0))})).max_abs() < 1e-12);
  CHECK(run({"hodge", "d", "--form", ffile}).code == 0);
  CHECK(run({"hodge", "star", "--form", ffile}).code == 0);
  CHECK(run({"hodge", "laplacian", "--form", ffile}).code == 0);
  const auto out = (scratch() / "parts").string();
  CHECK(run({"hodge", "decompose", "--form", ffile, "--out", out}).code == 0);
  std::ifstream exact(out + ".exact");
  CHECK((read_form_csv(exact) - form).max_abs() < 1e-12);
  CHECK(run({"hodge", "delta", "--form", write("top.csv", [] {
                                   std::ostringstream z;
                                   write_form_csv(z, FormField(2, 0, 4));
                                   return z.str();
                                 }())})
            .code == 1);
  CHECK(parse_report(run({"hodge", "betti", "--n", "2", "--j", "1"}).out).at("betti") == "2");
}

TEST_CASE("repeated invocations are bit identical") {
  const std::vector<std::string> args{"hodge", "parametrix-check", "--n", "3", "--j", "1", "--trials", "5", "--seed", "9"};
  CHECK(run(args).out == run(args).out);
  const auto p = write("p2.sym", R"s(symbol P { dim=2 order=2 trunc=3 term 2: "(1+0.5*sin(x1))*(xi1^2+xi2^2)" })s");
  CHECK(run({"parametrix", p, "--order", "3"}).out == run({"parametrix", p, "--order", "3"}).out);
  const auto report = (scratch() / "r.txt").string();
  const Run r = run({"--report", report, "parametrix", p, "--order", "3"});
  std::ifstream in(report);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(text.str() == r.out);
}
