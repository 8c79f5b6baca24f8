#include "pdo/hamilton.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "pdo/error.hpp"

namespace pdo {

HamiltonianField::HamiltonianField(const HomogeneousTerm& p) : dim_(p.dim) {
  const auto& samples = phase_samples(p.dim);
  Tape probe(p.expr);
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Complex v = probe.run(samples.x[k], samples.xi[k])[0];
    if (std::abs(v.imag()) > 1e-12 * std::max(1.0, std::abs(v)))
      throw NotReal("Hamiltonian flow needs a real symbol");
  }
  std::vector<Expr> roots;
  for (int j = 0; j < dim_; ++j) roots.push_back(p.expr.derivative({VarKind::Xi, j}));
  for (int j = 0; j < dim_; ++j) roots.push_back(-p.expr.derivative({VarKind::X, j}));
  field_ = Tape(roots);
  value_ = Tape(p.expr);
}

void HamiltonianField::evaluate(std::span<const double> x, std::span<const double> xi, std::span<double> out) {
  auto v = field_.run(x, xi);
  for (std::size_t k = 0; k < v.size(); ++k) out[k] = v[k].real();
}

std::vector<double> HamiltonianField::operator()(const PhasePoint& z) {
  std::vector<double> out(2 * dim_);
  evaluate(z.x, z.xi, out);
  return out;
}

double HamiltonianField::value(const PhasePoint& z) { return value_.run(z.x, z.xi)[0].real(); }

double Bicharacteristic::max_drift() const {
  double drift = 0.0;
  for (const auto& s : samples) drift = std::max(drift, std::abs(s.p_value - samples.front().p_value));
  return drift;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

constexpr double kXiFloor = 1e-8;

using State = std::vector<double>;

class Integrator {
 public:
  Integrator(HamiltonianField& field, double tol) : field_(field), n_(field.dim()), tol_(tol) {
    for (auto& k : k_) k.resize(2 * n_);
    tmp_.resize(2 * n_);
  }

  void rhs(const State& y, State& out) {
    field_.evaluate(std::span<const double>(y.data(), n_), std::span<const double>(y.data() + n_, n_), out);
  }

  // One trial step of size h from y; returns the scaled error norm and fills
  // y_new. Throws DomainError from the symbol.
  double trial(const State& y, double h, State& y_new) {
    auto stage = [&](State& out, std::initializer_list<std::pair<double, int>> coefs) {
      for (int i = 0; i < 2 * n_; ++i) {
        double acc = y[i];
        for (auto [a, s] : coefs) acc += h * a * k_[s][i];
        tmp_[i] = acc;
      }
      rhs(tmp_, out);
    };
    stage(k_[1], {{a21, 0}});
    stage(k_[2], {{a31, 0}, {a32, 1}});
    stage(k_[3], {{a41, 0}, {a42, 1}, {a43, 2}});
    stage(k_[4], {{a51, 0}, {a52, 1}, {a53, 2}, {a54, 3}});
    stage(k_[5], {{a61, 0}, {a62, 1}, {a63, 2}, {a64, 3}, {a65, 4}});
    y_new.resize(2 * n_);
    for (int i = 0; i < 2 * n_; ++i)
      y_new[i] = y[i] + h * (b1 * k_[0][i] + b3 * k_[2][i] + b4 * k_[3][i] + b5 * k_[4][i] + b6 * k_[5][i]);
    rhs(y_new, k_[6]);
    double err = 0.0;
    for (int i = 0; i < 2 * n_; ++i) {
      const double e = h * (e1 * k_[0][i] + e3 * k_[2][i] + e4 * k_[3][i] + e5 * k_[4][i] + e6 * k_[5][i] +
                            e7 * k_[6][i]);
      const double scale = tol_ + tol_ * std::max(std::abs(y[i]), std::abs(y_new[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    return err;
  }

  // First-same-as-last: the final stage of an accepted step is the first
  // stage of the next.
  void start(const State& y) { rhs(y, k_[0]); }
  void accept() { std::swap(k_[0], k_[6]); }

 private:
  HamiltonianField& field_;
  int n_;
  double tol_;
  std::array<State, 7> k_;
  State tmp_;
};

double xi_norm(const State& y, int n) {
  double s = 0.0;
  for (int j = n; j < 2 * n; ++j) s += y[j] * y[j];
  return std::sqrt(s);
}

// Distance from the origin to the xi-segment between two states, so a step
// cannot jump across xi = 0 unnoticed.
double xi_segment_gap(const State& a, const State& b, int n) {
  double ab = 0.0, aa = 0.0, dd = 0.0;
  for (int j = n; j < 2 * n; ++j) {
    const double d = b[j] - a[j];
    ab += a[j] * d;
    aa += a[j] * a[j];
    dd += d * d;
  }
  const double u = dd > 0.0 ? std::clamp(-ab / dd, 0.0, 1.0) : 0.0;
  return std::sqrt(std::max(0.0, aa + 2 * u * ab + u * u * dd));
}

PhasePoint unpack(const State& y, int n) {
  return {std::vector<double>(y.begin(), y.begin() + n), std::vector<double>(y.begin() + n, y.end())};
}

// Integrates over [0, |T|] in the direction sign(T).
Bicharacteristic integrate(HamiltonianField& field, const PhasePoint& start, double T, double tol) {
  const int n = field.dim();
  if (static_cast<int>(start.x.size()) != n || static_cast<int>(start.xi.size()) != n)
    throw DimensionMismatch("start point dimension differs from symbol dimension");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be positive");
  State y(start.x);
  y.insert(y.end(), start.xi.begin(), start.xi.end());
  if (xi_norm(y, n) < kXiFloor) throw StepFailure("flow started at xi = 0");

  Bicharacteristic out;
  out.samples.push_back({0.0, start, field.value(start)});
  if (T == 0.0) return out;

  const double dir = T > 0 ? 1.0 : -1.0;
  const double span = std::abs(T);
  Integrator rk(field, tol);
  rk.start(y);
  double t = 0.0;
  double h = std::min(span, 0.01 * std::max(1.0, span));
  out.stats.min_step = std::numeric_limits<double>::infinity();
  State y_new;
  while (t < span) {
    if (t + h > span) h = span - t;
    if (h < 1e-14 * std::max(1.0, t) && h < span - t) throw StepFailure("step size underflow at t = " + format_number(dir * t));
    double err;
    try {
      err = rk.trial(y, dir * h, y_new);
    } catch (const DomainError&) {
      err = std::numeric_limits<double>::infinity();
    }
    if (!(err <= 1.0) || xi_segment_gap(y, y_new, n) < kXiFloor) {
      ++out.stats.rejected;
      const double shrink = std::isfinite(err) ? std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5) : 0.25;
      h *= shrink;
      continue;
    }
    t = (span - t - h <= 1e-15 * span) ? span : t + h;
    y.swap(y_new);
    rk.accept();
    ++out.stats.accepted;
    out.stats.min_step = std::min(out.stats.min_step, h);
    out.stats.max_step = std::max(out.stats.max_step, h);
    PhasePoint z = unpack(y, n);
    const double pv = field.value(z);
    out.samples.push_back({dir * t, std::move(z), pv});
    h *= err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
  }
  return out;
}

}  // namespace

Bicharacteristic flow(const HomogeneousTerm& p, const PhasePoint& start, double T, double tol) {
  if (T < 0.0) throw std::invalid_argument("flow time must be non-negative");
  HamiltonianField field(p);
  return integrate(field, start, T, tol);
}

std::vector<PhasePoint> propagate_wavefront(const HomogeneousTerm& p, const std::vector<PhasePoint>& initial,
                                            double T, double tol) {
  if (T < 0.0) throw std::invalid_argument("propagation time must be non-negative");
  HamiltonianField field(p);
  for (const auto& z : initial)
    if (std::abs(field.value(z)) > 1e-6) throw NotCharacteristic("initial point is off the characteristic variety");
  std::vector<PhasePoint> out;
  out.reserve(initial.size());
  for (const auto& z : initial) out.push_back(T == 0.0 ? z : integrate(field, z, T, tol).end());
  return out;
}

Complex transport_solve(const HomogeneousTerm& p1, const Expr& q_init, double t, const PhasePoint& z, double tol) {
  if (std::abs(p1.degree - 1.0) > kDegreeTol) throw HomogeneityError("transport needs a first-order symbol");
  if (t == 0.0) return q_init.evaluate(z.x, z.xi);
  HamiltonianField field(p1);
  const PhasePoint end = integrate(field, z, t, tol).end();
  return q_init.evaluate(end.x, end.xi);
}

}  // namespace pdo
