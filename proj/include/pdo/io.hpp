#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "pdo/grid.hpp"
#include "pdo/hamilton.hpp"
#include "pdo/hodge.hpp"

namespace pdo {

// CSV dialect: comma-separated rows, `#` header lines of `key=value` tokens,
// complex values as two columns (re, im). Numbers are written in shortest
// round-trip form.

/// `# grid dim=N M=M`, rows `i1,..,in,re,im`.
void write_grid_csv(std::ostream& out, const GridFunction& u);
GridFunction read_grid_csv(std::istream& in);

/// `# spectrum dim=N M=M`, rows `k1,..,kn,re,im`.
void write_spectrum_csv(std::ostream& out, const GridSpectrum& s);
GridSpectrum read_spectrum_csv(std::istream& in);

/// `# form n=N j=J M=M` and `# slots a1 a2 ...` (1-based index digits), rows
/// `slot,i1,..,in,re,im`.
void write_form_csv(std::ostream& out, const FormField& w);
FormField read_form_csv(std::istream& in);

/// `# trajectory dim=N`, rows `t,x1..xn,xi1..xin,p_value`.
void write_trajectory_csv(std::ostream& out, const Bicharacteristic& b);
std::vector<FlowSample> read_trajectory_csv(std::istream& in);

/// `# points dim=N`, rows `x1..xn,xi1..xin`.
void write_points_csv(std::ostream& out, const std::vector<PhasePoint>& points);
std::vector<PhasePoint> read_points_csv(std::istream& in);

}  // namespace pdo
