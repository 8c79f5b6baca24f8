#include "cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>

#include "pdo/calculus.hpp"
#include "pdo/circle_index.hpp"
#include "pdo/error.hpp"
#include "pdo/hamilton.hpp"
#include "pdo/hodge.hpp"
#include "pdo/io.hpp"
#include "pdo/oscint.hpp"
#include "pdo/parse.hpp"
#include "pdo/quantize.hpp"

namespace pdo {

namespace {

// Symbol files hold either a symbol document or a symbol report.
ClassicalSymbol load_symbol(const std::string& path) {
  const std::string text = read_text_file(path);
  std::size_t start = text.find_first_not_of(" \t\r\n");
  if (start != std::string::npos && text.compare(start, 6, "symbol") == 0) return parse_symbol_text(text);
  return symbol_from_report(parse_report(text));
}

template <class F>
auto with_file(const std::string& path, F read) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open " + path);
  return read(in);
}

// Writes to `path`, or to out when path is empty.
void emit(const std::string& path, std::ostream& out, const std::function<void(std::ostream&)>& write) {
  if (path.empty()) {
    write(out);
    return;
  }
  std::ofstream f(path);
  if (!f) throw DomainError("cannot write " + path);
  write(f);
}

std::string complex_text(Complex c) { return format_number(c.real()) + " " + format_number(c.imag()); }

std::string join(const std::vector<double>& v) {
  std::string s;
  for (std::size_t k = 0; k < v.size(); ++k) s += (k ? "," : "") + format_number(v[k]);
  return s;
}

Diffeo load_map(const std::string& path) {
  const Report r = parse_report(read_text_file(path));
  const int dim = std::stoi(r.at("dim"));
  std::vector<Expr> forward, inverse;
  for (int a = 1; a <= dim; ++a) {
    forward.push_back(parse_expression(r.at("forward " + std::to_string(a)), dim));
    inverse.push_back(parse_expression(r.at("inverse " + std::to_string(a)), dim));
  }
  return Diffeo(forward, inverse);
}

struct Options {
  std::string a, b, to = "right", map, init, grid, amp, test, aplus, aminus, form, out, report, method = "both";
  std::string hodge_op;
  int order = 3, K = 32, n = 2, j = 1, trials = 50, x_points = 16, directions = 64, points = 16;
  double time = 1.0, tol = 1e-9, s = 0.0, lo = -1.0, hi = 1.0, threshold = 1e-8, osc_tol = 1e-6;
  std::vector<double> start, bump_args;
  std::vector<int> sizes{64, 128, 256};
  std::string coeff;
  std::uint64_t seed = 1;
};

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pseudodifferential symbol calculus and torus numerics", "pdo"};
  app.require_subcommand(1);
  Options o;
  app.add_option("--seed", o.seed, "Seed for randomized probes");
  app.add_option("--report", o.report, "Also write the report to this file");

  auto symbol_arg = [&](CLI::App* c, std::string& target, const char* name) {
    c->add_option(name, target, "Symbol document or report file")->required()->check(CLI::ExistingFile);
  };
  auto ellipticity_flags = [&](CLI::App* c) {
    c->add_option("--x-points", o.x_points, "Sample points per x axis");
    c->add_option("--directions", o.directions, "Sphere directions");
    c->add_option("--threshold", o.threshold, "Ellipticity threshold");
  };

  auto* compose_cmd = app.add_subcommand("compose", "Left symbol of PQ");
  symbol_arg(compose_cmd, o.a, "A");
  symbol_arg(compose_cmd, o.b, "B");
  auto* adjoint_cmd = app.add_subcommand("adjoint", "Symbol of the adjoint");
  symbol_arg(adjoint_cmd, o.a, "A");
  auto* convert_cmd = app.add_subcommand("convert", "Left/right symbol conversion");
  symbol_arg(convert_cmd, o.a, "A");
  convert_cmd->add_option("--to", o.to, "Target side")->check(CLI::IsMember({"right", "left"}));
  auto* parametrix_cmd = app.add_subcommand("parametrix", "Parametrix of an elliptic symbol");
  symbol_arg(parametrix_cmd, o.a, "A");
  parametrix_cmd->add_option("--order", o.order, "Orders kept")->check(CLI::PositiveNumber);
  ellipticity_flags(parametrix_cmd);
  auto* sqrt_cmd = app.add_subcommand("sqrt", "Approximate square root");
  symbol_arg(sqrt_cmd, o.a, "A");
  sqrt_cmd->add_option("--order", o.order, "Orders kept")->check(CLI::PositiveNumber);
  auto* commutator_cmd = app.add_subcommand("commutator", "Symbol of [P, Q]");
  symbol_arg(commutator_cmd, o.a, "A");
  symbol_arg(commutator_cmd, o.b, "B");
  auto* ellipticity_cmd = app.add_subcommand("ellipticity", "Sampled ellipticity check");
  symbol_arg(ellipticity_cmd, o.a, "A");
  ellipticity_flags(ellipticity_cmd);
  auto* pullback_cmd = app.add_subcommand("pullback", "Principal symbol under a diffeomorphism");
  symbol_arg(pullback_cmd, o.a, "A");
  pullback_cmd->add_option("--map", o.map, "Map report with forward/inverse components")
      ->required()
      ->check(CLI::ExistingFile);

  auto* flow_cmd = app.add_subcommand("flow", "Bicharacteristic of the principal symbol (CSV)");
  symbol_arg(flow_cmd, o.a, "A");
  flow_cmd->add_option("--start", o.start, "x1..xn,xi1..xin")->required()->delimiter(',');
  flow_cmd->add_option("--time", o.time, "Flow time")->required();
  flow_cmd->add_option("--tol", o.tol, "Integrator tolerance");
  flow_cmd->add_option("--out", o.out, "CSV output file");
  auto* wavefront_cmd = app.add_subcommand("wavefront", "Propagate characteristic points (CSV)");
  symbol_arg(wavefront_cmd, o.a, "A");
  wavefront_cmd->add_option("--init", o.init, "Points CSV")->required()->check(CLI::ExistingFile);
  wavefront_cmd->add_option("--time", o.time, "Flow time")->required();
  wavefront_cmd->add_option("--tol", o.tol, "Integrator tolerance");
  wavefront_cmd->add_option("--out", o.out, "CSV output file");

  auto* apply_cmd = app.add_subcommand("apply", "Quantize a symbol on a grid (CSV)");
  symbol_arg(apply_cmd, o.a, "A");
  apply_cmd->add_option("--grid", o.grid, "Grid CSV")->required()->check(CLI::ExistingFile);
  apply_cmd->add_option("--out", o.out, "CSV output file");
  auto* sobolev_cmd = app.add_subcommand("sobolev", "Sobolev norm of a grid, or growth trend of a 1D spectrum");
  auto* grid_opt = sobolev_cmd->add_option("--grid", o.grid, "Grid CSV")->check(CLI::ExistingFile);
  auto* coeff_opt = sobolev_cmd->add_option("--coeff", o.coeff, "u^(k) as an expression in xi1");
  grid_opt->excludes(coeff_opt);
  sobolev_cmd->add_option("--sizes", o.sizes, "Grid sizes for --coeff")->delimiter(',');
  sobolev_cmd->add_option("--s", o.s, "Sobolev exponent")->required();

  auto* oscint_cmd = app.add_subcommand("oscint", "Regularized oscillatory integral with phase x theta");
  oscint_cmd->add_option("--amp", o.amp, "Amplitude in xi1 (theta)")->required();
  auto* test_opt = oscint_cmd->add_option("--test", o.test, "Test function profile in x1 on (--lo, --hi)");
  auto* bump_opt = oscint_cmd->add_option("--bump", o.bump_args, "center,radius")->delimiter(',')->expected(2);
  test_opt->excludes(bump_opt);
  oscint_cmd->add_option("--lo", o.lo, "Support start");
  oscint_cmd->add_option("--hi", o.hi, "Support end");
  oscint_cmd->add_option("--method", o.method, "Method")->check(CLI::IsMember({"eps", "parts", "both"}));
  oscint_cmd->add_option("--tol", o.osc_tol, "Cauchy tolerance");
  bool no_excise = false;
  oscint_cmd->add_flag("--no-excise", no_excise, "Keep the amplitude near theta = 0");

  auto* index_cmd = app.add_subcommand("index", "Circle index from winding numbers and a matrix oracle");
  index_cmd->add_option("--aplus", o.aplus, "a+ in x1")->required();
  index_cmd->add_option("--aminus", o.aminus, "a- in x1")->required();
  index_cmd->add_option("--K", o.K, "Truncation")->check(CLI::PositiveNumber);

  auto* hodge_cmd = app.add_subcommand("hodge", "Exterior calculus on the flat torus");
  hodge_cmd->add_option("op", o.hodge_op, "Operation")
      ->required()
      ->check(CLI::IsMember({"d", "star", "delta", "laplacian", "decompose", "betti", "parametrix-check"}));
  hodge_cmd->add_option("--form", o.form, "Form CSV")->check(CLI::ExistingFile);
  hodge_cmd->add_option("--out", o.out, "CSV output file (decompose appends .harmonic/.exact/.coexact)");
  hodge_cmd->add_option("--n", o.n, "Dimension")->check(CLI::Range(1, 3));
  hodge_cmd->add_option("--j", o.j, "Degree")->check(CLI::Range(0, 3));
  hodge_cmd->add_option("--trials", o.trials, "Random fields")->check(CLI::PositiveNumber);
  hodge_cmd->add_option("--M", o.points, "Grid size for random fields");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n";
    return 1;
  }

  Report report;
  auto symbolic = [&](const ClassicalSymbol& p, const std::string& title) { report = symbol_report(p, title); };
  EllipticityOptions ell;
  ell.x_points_per_axis = o.x_points;
  ell.directions = static_cast<std::size_t>(o.directions);
  ell.threshold = o.threshold;

  try {
    if (compose_cmd->parsed()) {
      symbolic(compose(load_symbol(o.a), load_symbol(o.b)), "compose");
    } else if (adjoint_cmd->parsed()) {
      symbolic(adjoint(load_symbol(o.a)), "adjoint");
    } else if (convert_cmd->parsed()) {
      const auto side = o.to == "right" ? SymbolSide::LeftToRight : SymbolSide::RightToLeft;
      symbolic(convert_left_right(load_symbol(o.a), side), "convert to " + o.to);
    } else if (parametrix_cmd->parsed()) {
      symbolic(parametrix(load_symbol(o.a), o.order, ell), "parametrix");
    } else if (sqrt_cmd->parsed()) {
      symbolic(sqrt_approx(load_symbol(o.a), o.order), "sqrt");
    } else if (commutator_cmd->parsed()) {
      symbolic(commutator(load_symbol(o.a), load_symbol(o.b)), "commutator");
    } else if (ellipticity_cmd->parsed()) {
      const auto r = is_elliptic(load_symbol(o.a), ell);
      report.title = "ellipticity";
      report.add("elliptic", r.elliptic ? "yes" : "no");
      report.add("min modulus", format_number(r.min_modulus));
      report.add("argmin x", join(r.argmin_x));
      report.add("argmin xi", join(r.argmin_xi));
    } else if (pullback_cmd->parsed()) {
      const ClassicalSymbol p = load_symbol(o.a);
      const HomogeneousTerm t = pullback_principal(principal(p), load_map(o.map));
      ClassicalSymbol q(p.dim(), p.order(), 1);
      q.add(t);
      symbolic(q, "pullback principal");
    } else if (flow_cmd->parsed()) {
      const ClassicalSymbol p = load_symbol(o.a);
      const auto n = static_cast<std::size_t>(p.dim());
      if (o.start.size() != 2 * n) throw DimensionMismatch("--start needs " + std::to_string(2 * n) + " numbers");
      const PhasePoint z{{o.start.begin(), o.start.begin() + n}, {o.start.begin() + n, o.start.end()}};
      const Bicharacteristic b = flow(principal(p), z, o.time, o.tol);
      emit(o.out, out, [&](std::ostream& s) { write_trajectory_csv(s, b); });
      return 0;
    } else if (wavefront_cmd->parsed()) {
      const auto pts = with_file(o.init, read_points_csv);
      const auto moved = propagate_wavefront(principal(load_symbol(o.a)), pts, o.time, o.tol);
      emit(o.out, out, [&](std::ostream& s) { write_points_csv(s, moved); });
      return 0;
    } else if (apply_cmd->parsed()) {
      const GridFunction u = with_file(o.grid, read_grid_csv);
      const GridFunction v = op_apply(load_symbol(o.a), u);
      emit(o.out, out, [&](std::ostream& s) { write_grid_csv(s, v); });
      return 0;
    } else if (sobolev_cmd->parsed()) {
      report.title = "sobolev";
      report.add("s", format_number(o.s));
      if (!o.grid.empty()) {
        report.add("norm", format_number(sobolev_norm(with_file(o.grid, read_grid_csv), o.s)));
      } else if (!o.coeff.empty()) {
        const auto t = sobolev_trend(parse_expression(o.coeff, 1), o.s, o.sizes);
        for (std::size_t k = 0; k < t.points.size(); ++k)
          report.add("norm M=" + std::to_string(t.points[k]), format_number(t.norms[k]));
        report.add("increment ratio", format_number(t.increment_ratio));
        report.add("trend", t.bounded ? "bounded" : "growing");
      } else {
        throw DomainError("sobolev needs --grid or --coeff");
      }
    } else if (oscint_cmd->parsed()) {
      TestFunction psi;
      if (!o.bump_args.empty()) {
        psi = bump(o.bump_args[0], o.bump_args[1]);
      } else if (!o.test.empty()) {
        psi = {parse_expression(o.test, 1), o.lo, o.hi};
      } else {
        throw DomainError("oscint needs --test or --bump");
      }
      const Amplitude a{parse_expression(o.amp, 1), !no_excise};
      OscOptions opts;
      opts.tol = o.osc_tol;
      report.title = "oscint";
      if (o.method != "parts") {
        const auto r = oscint_eval(a, psi, OscMethod::EpsilonCutoff, opts);
        report.add("epsilon value", complex_text(r.value));
        report.add("epsilon cauchy gap", format_number(r.cauchy_gap));
      }
      if (o.method != "eps") {
        const auto r = oscint_eval(a, psi, OscMethod::Parts, opts);
        report.add("parts value", complex_text(r.value));
        report.add("parts applications", std::to_string(r.applications));
        report.add("order", format_number(r.order));
      }
    } else if (index_cmd->parsed()) {
      const auto r = circle_index(parse_expression(o.aplus, 1), parse_expression(o.aminus, 1), o.K);
      report.title = "index";
      report.add("winding plus", std::to_string(r.winding_plus));
      report.add("winding minus", std::to_string(r.winding_minus));
      report.add("index", std::to_string(r.index));
      report.add("dim ker", std::to_string(r.dim_ker));
      report.add("dim coker", std::to_string(r.dim_coker));
      report.add("K", std::to_string(r.K));
      report.add("index at K+8", std::to_string(r.index_check));
      report.add("bandwidth", std::to_string(r.bandwidth));
      report.add("small singular values", join(r.small_singular_values));
      report.add("smallest kept singular value", format_number(r.smallest_kept));
    } else if (hodge_cmd->parsed()) {
      if (o.hodge_op == "betti") {
        if (o.j > o.n) throw DimensionMismatch("degree exceeds dimension");
        report.title = "betti";
        report.add("n", std::to_string(o.n));
        report.add("j", std::to_string(o.j));
        report.add("betti", std::to_string(betti(o.n, o.j, 0, 8, o.seed)));
      } else if (o.hodge_op == "parametrix-check") {
        if (o.j > o.n) throw DimensionMismatch("degree exceeds dimension");
        const auto r = complex_parametrix_check(o.n, o.j, o.trials, o.points, o.seed);
        report.title = "complex parametrix check";
        report.add("n", std::to_string(r.n));
        report.add("j", std::to_string(r.j));
        report.add("trials", std::to_string(r.trials));
        report.add("max residual", format_number(r.max_residual));
      } else {
        if (o.form.empty()) throw DomainError("hodge " + o.hodge_op + " needs --form");
        const FormField w = with_file(o.form, read_form_csv);
        if (o.hodge_op == "decompose") {
          const HodgeParts p = hodge_decompose(w);
          if (o.out.empty()) {
            for (const FormField* f : {&p.harmonic, &p.exact, &p.coexact}) write_form_csv(out, *f);
          } else {
            emit(o.out + ".harmonic", out, [&](std::ostream& s) { write_form_csv(s, p.harmonic); });
            emit(o.out + ".exact", out, [&](std::ostream& s) { write_form_csv(s, p.exact); });
            emit(o.out + ".coexact", out, [&](std::ostream& s) { write_form_csv(s, p.coexact); });
          }
          return 0;
        }
        FormField r;
        if (o.hodge_op == "d") r = ext_d(w);
        else if (o.hodge_op == "star") r = hodge_star(w);
        else if (o.hodge_op == "delta") r = codifferential(w);
        else r = laplacian(w);
        emit(o.out, out, [&](std::ostream& s) { write_form_csv(s, r); });
        return 0;
      }
    }
  } catch (const Error& e) {
    err << e.what() << "\n";
    return e.numerical() ? 2 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }

  const std::string text = format_report(report);
  out << text;
  if (!o.report.empty()) {
    std::ofstream f(o.report);
    if (!f) {
      err << "cannot write " << o.report << "\n";
      return 1;
    }
    f << text;
  }
  return 0;
}

}  // namespace pdo
