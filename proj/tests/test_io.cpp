#include <sstream>

#include "doctest.h"
#include "pdo/error.hpp"
#include "pdo/io.hpp"

using namespace pdo;

namespace {

template <class W, class R, class T>
T round_trip(const T& value, W write, R read) {
  std::stringstream s;
  write(s, value);
  return read(s);
}

}  // namespace

TEST_CASE("grid csv round trip is bit exact") {
  for (int dim = 1; dim <= 3; ++dim) {
    const Expr f = sin(Expr::x(0)) * Expr(Complex(0.3, -1.7)) + exp(cos(Expr::x(dim - 1)));
    const GridFunction u = GridFunction::sample(f, dim, 8);
    const GridFunction back = round_trip(u, write_grid_csv, read_grid_csv);
    REQUIRE(back.same_grid(u));
    for (std::size_t m = 0; m < u.size(); ++m) CHECK(back[m] == u[m]);

    const GridSpectrum s = u.spectrum();
    const GridSpectrum sb = round_trip(s, write_spectrum_csv, read_spectrum_csv);
    for (std::size_t m = 0; m < s.size(); ++m) CHECK(sb[m] == s[m]);
  }
}

TEST_CASE("form csv round trip") {
  for (int n = 1; n <= 3; ++n)
    for (int j = 0; j <= n; ++j) {
      const FormField w = random_form(n, j, 4, 1, 5 + n + j);
      const FormField back = round_trip(w, write_form_csv, read_form_csv);
      REQUIRE(back.same_shape(w));
      CHECK((back - w).max_abs() == 0.0);
    }
  std::stringstream s;
  write_form_csv(s, FormField(3, 2, 2));
  CHECK(s.str().find("# slots 12 13 23") != std::string::npos);
}

TEST_CASE("trajectory and points csv") {
  const HomogeneousTerm p{Expr::xi(0) * Expr::xi(0) + Expr::xi(1) * Expr::xi(1), 2.0, 2};
  const Bicharacteristic b = flow(p, {{0.0, 0.0}, {1.0, 0.5}}, 2.0);
  std::stringstream s;
  write_trajectory_csv(s, b);
  CHECK(s.str().find("# t,x1,x2,xi1,xi2,p_value") != std::string::npos);
  const auto back = read_trajectory_csv(s);
  REQUIRE(back.size() == b.samples.size());
  for (std::size_t k = 0; k < back.size(); ++k) {
    CHECK(back[k].t == b.samples[k].t);
    CHECK(back[k].point.x == b.samples[k].point.x);
    CHECK(back[k].point.xi == b.samples[k].point.xi);
    CHECK(back[k].p_value == b.samples[k].p_value);
  }

  const std::vector<PhasePoint> pts{{{0.0, 1.0}, {0.6, 0.8}}, {{-2.5, 1e-300}, {1.0, 0.0}}};
  const auto pb = round_trip(pts, write_points_csv, read_points_csv);
  REQUIRE(pb.size() == 2);
  CHECK(pb[1].x == pts[1].x);
  CHECK(pb[0].xi == pts[0].xi);
}

TEST_CASE("malformed csv") {
  std::stringstream missing("0,1,2\n");
  CHECK_THROWS_AS(read_grid_csv(missing), SyntaxError);
  std::stringstream short_rows("# grid dim=1 M=2\n0,1,0\n");
  CHECK_THROWS_AS(read_grid_csv(short_rows), GridMismatch);
  std::stringstream bad("# grid dim=1 M=2\n0,abc,0\n1,0,0\n");
  CHECK_THROWS_AS(read_grid_csv(bad), SyntaxError);
  std::stringstream wide("# points dim=1\n1,2,3\n");
  CHECK_THROWS_AS(read_points_csv(wide), SyntaxError);
  std::stringstream range("# grid dim=1 M=2\n0,1,0\n2,0,0\n");
  CHECK_THROWS_AS(read_grid_csv(range), SyntaxError);
}
