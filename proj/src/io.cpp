#include "pdo/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "pdo/error.hpp"

namespace pdo {

namespace {

struct Csv {
  std::vector<std::vector<std::string>> headers;  // whitespace-split `#` lines
  std::vector<std::vector<double>> rows;
};

double to_double(const std::string& s, int line) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw SyntaxError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

Csv read_csv(std::istream& in) {
  Csv csv;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      std::istringstream words(line.substr(1));
      std::vector<std::string> tokens;
      for (std::string w; words >> w;) tokens.push_back(w);
      csv.headers.push_back(tokens);
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      const auto comma = line.find(',', start);
      std::string cell = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      while (!cell.empty() && cell.front() == ' ') cell.erase(cell.begin());
      while (!cell.empty() && cell.back() == ' ') cell.pop_back();
      row.push_back(to_double(cell, number));
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    csv.rows.push_back(std::move(row));
  }
  return csv;
}

// Header line starting with `kind`, as key=value pairs.
std::map<std::string, std::string> header(const Csv& csv, const std::string& kind) {
  for (const auto& h : csv.headers) {
    if (h.empty() || h[0] != kind) continue;
    std::map<std::string, std::string> kv;
    for (std::size_t t = 1; t < h.size(); ++t) {
      const auto eq = h[t].find('=');
      if (eq != std::string::npos) kv[h[t].substr(0, eq)] = h[t].substr(eq + 1);
    }
    return kv;
  }
  throw SyntaxError("missing '# " + kind + "' header");
}

int header_int(const std::map<std::string, std::string>& kv, const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end()) throw SyntaxError("header lacks " + key);
  return static_cast<int>(to_double(it->second, 0));
}

void check_width(const Csv& csv, std::size_t width) {
  for (std::size_t r = 0; r < csv.rows.size(); ++r)
    if (csv.rows[r].size() != width)
      throw SyntaxError("row " + std::to_string(r + 1) + " has " + std::to_string(csv.rows[r].size()) +
                        " columns, expected " + std::to_string(width));
}

std::size_t lattice_flat(const std::vector<double>& row, std::size_t offset, int dim, int points) {
  std::size_t flat = 0;
  for (int a = 0; a < dim; ++a) {
    const double v = row[offset + a];
    if (v < 0 || v >= points || v != static_cast<int>(v)) throw SyntaxError("lattice index out of range");
    flat = flat * points + static_cast<std::size_t>(v);
  }
  return flat;
}

void write_lattice_row(std::ostream& out, std::size_t flat, int dim, int points) {
  std::vector<std::size_t> idx(dim);
  for (int a = dim - 1; a >= 0; --a) {
    idx[a] = flat % points;
    flat /= points;
  }
  for (int a = 0; a < dim; ++a) out << idx[a] << ",";
}

void write_complex(std::ostream& out, Complex c) {
  out << format_number(c.real()) << "," << format_number(c.imag()) << "\n";
}

}  // namespace

void write_grid_csv(std::ostream& out, const GridFunction& u) {
  out << "# grid dim=" << u.dim() << " M=" << u.points() << "\n";
  for (std::size_t m = 0; m < u.size(); ++m) {
    write_lattice_row(out, m, u.dim(), u.points());
    write_complex(out, u[m]);
  }
}

GridFunction read_grid_csv(std::istream& in) {
  const Csv csv = read_csv(in);
  const auto kv = header(csv, "grid");
  GridFunction u(header_int(kv, "dim"), header_int(kv, "M"));
  check_width(csv, u.dim() + 2);
  if (csv.rows.size() != u.size()) throw GridMismatch("grid file row count does not match M^dim");
  for (const auto& row : csv.rows) u[lattice_flat(row, 0, u.dim(), u.points())] = {row[u.dim()], row[u.dim() + 1]};
  return u;
}

void write_spectrum_csv(std::ostream& out, const GridSpectrum& s) {
  out << "# spectrum dim=" << s.dim() << " M=" << s.points() << "\n";
  for (std::size_t m = 0; m < s.size(); ++m) {
    for (int k : s.mode(m)) out << k << ",";
    write_complex(out, s[m]);
  }
}

GridSpectrum read_spectrum_csv(std::istream& in) {
  const Csv csv = read_csv(in);
  const auto kv = header(csv, "spectrum");
  GridSpectrum s(header_int(kv, "dim"), header_int(kv, "M"));
  const int dim = s.dim();
  check_width(csv, dim + 2);
  if (csv.rows.size() != s.size()) throw GridMismatch("spectrum file row count does not match M^dim");
  for (const auto& row : csv.rows) {
    std::vector<int> k(row.begin(), row.begin() + dim);
    for (int v : k)
      if (v < -s.points() / 2 || v >= s.points() / 2) throw SyntaxError("wavenumber out of range");
    s[s.flat_index(k)] = {row[dim], row[dim + 1]};
  }
  return s;
}

void write_form_csv(std::ostream& out, const FormField& w) {
  out << "# form n=" << w.dim() << " j=" << w.degree() << " M=" << w.points() << "\n# slots";
  for (const auto& alpha : w.basis()) {
    out << " ";
    if (alpha.empty()) out << "0";
    for (int a : alpha) out << a + 1;
  }
  out << "\n";
  for (std::size_t s = 0; s < w.slots(); ++s)
    for (std::size_t m = 0; m < w[s].size(); ++m) {
      out << s << ",";
      write_lattice_row(out, m, w.dim(), w.points());
      write_complex(out, w[s][m]);
    }
}

FormField read_form_csv(std::istream& in) {
  const Csv csv = read_csv(in);
  const auto kv = header(csv, "form");
  FormField w(header_int(kv, "n"), header_int(kv, "j"), header_int(kv, "M"));
  const int n = w.dim();
  check_width(csv, n + 3);
  if (csv.rows.size() != w.slots() * w[0].size()) throw GridMismatch("form file row count does not match");
  for (const auto& row : csv.rows) {
    const double slot = row[0];
    if (slot < 0 || slot >= static_cast<double>(w.slots())) throw SyntaxError("form slot out of range");
    w[static_cast<std::size_t>(slot)][lattice_flat(row, 1, n, w.points())] = {row[n + 1], row[n + 2]};
  }
  return w;
}

void write_trajectory_csv(std::ostream& out, const Bicharacteristic& b) {
  const int dim = b.samples.empty() ? 0 : static_cast<int>(b.samples.front().point.x.size());
  out << "# trajectory dim=" << dim << "\n# t";
  for (int a = 1; a <= dim; ++a) out << ",x" << a;
  for (int a = 1; a <= dim; ++a) out << ",xi" << a;
  out << ",p_value\n";
  for (const auto& s : b.samples) {
    out << format_number(s.t);
    for (double v : s.point.x) out << "," << format_number(v);
    for (double v : s.point.xi) out << "," << format_number(v);
    out << "," << format_number(s.p_value) << "\n";
  }
}

std::vector<FlowSample> read_trajectory_csv(std::istream& in) {
  const Csv csv = read_csv(in);
  const int dim = header_int(header(csv, "trajectory"), "dim");
  check_width(csv, 2 * dim + 2);
  std::vector<FlowSample> out;
  for (const auto& row : csv.rows) {
    FlowSample s;
    s.t = row[0];
    s.point.x.assign(row.begin() + 1, row.begin() + 1 + dim);
    s.point.xi.assign(row.begin() + 1 + dim, row.begin() + 1 + 2 * dim);
    s.p_value = row[2 * dim + 1];
    out.push_back(std::move(s));
  }
  return out;
}

void write_points_csv(std::ostream& out, const std::vector<PhasePoint>& points) {
  const int dim = points.empty() ? 0 : static_cast<int>(points.front().x.size());
  out << "# points dim=" << dim << "\n";
  for (const auto& p : points) {
    for (int a = 0; a < dim; ++a) out << format_number(p.x[a]) << ",";
    for (int a = 0; a < dim; ++a) out << format_number(p.xi[a]) << (a + 1 < dim ? "," : "\n");
  }
}

std::vector<PhasePoint> read_points_csv(std::istream& in) {
  const Csv csv = read_csv(in);
  const int dim = header_int(header(csv, "points"), "dim");
  if (dim < 1) throw SyntaxError("points file needs dim >= 1");
  check_width(csv, 2 * dim);
  std::vector<PhasePoint> out;
  for (const auto& row : csv.rows)
    out.push_back({std::vector<double>(row.begin(), row.begin() + dim), std::vector<double>(row.begin() + dim, row.end())});
  return out;
}

}  // namespace pdo
