#pragma once

#include <vector>

#include "pdo/symbol.hpp"

namespace pdo {

struct PhasePoint {
  std::vector<double> x;
  std::vector<double> xi;
};

/// H_p = (dp/dxi, -dp/dx), compiled once and evaluated on demand.
class HamiltonianField {
 public:
  /// Throws NotReal when p takes non-real values on the sample set.
  explicit HamiltonianField(const HomogeneousTerm& p);

  int dim() const { return dim_; }
  /// Writes the 2n components of H_p at (x, xi) into `out`.
  void evaluate(std::span<const double> x, std::span<const double> xi, std::span<double> out);
  std::vector<double> operator()(const PhasePoint& z);
  /// Real part of p at z.
  double value(const PhasePoint& z);

 private:
  int dim_;
  Tape field_;
  Tape value_;
};

struct FlowSample {
  double t = 0.0;
  PhasePoint point;
  double p_value = 0.0;
};

struct StepStats {
  int accepted = 0;
  int rejected = 0;
  double min_step = 0.0;
  double max_step = 0.0;
};

/// An integral curve of H_p, sampled at every accepted step.
struct Bicharacteristic {
  std::vector<FlowSample> samples;
  StepStats stats;

  const PhasePoint& end() const { return samples.back().point; }
  /// max_t |p(gamma(t)) - p(gamma(0))|.
  double max_drift() const;
};

/// Adaptive Dormand-Prince 5(4) integration of H_p from `start` over [0, T]
/// with atol = rtol = tol. Throws StepFailure when the step size underflows
/// or |xi| drops below 1e-8.
Bicharacteristic flow(const HomogeneousTerm& p, const PhasePoint& start, double T, double tol = 1e-9);

/// Flows every point (each required to satisfy |p| <= 1e-6) for time T.
std::vector<PhasePoint> propagate_wavefront(const HomogeneousTerm& p, const std::vector<PhasePoint>& initial,
                                            double T, double tol = 1e-9);

/// q0(t, z) = q_init(Phi_t(z)) with Phi the flow of H_{p1}; solves
/// dq0/dt - H_{p1} q0 = 0 with q0(0, .) = q_init. Negative t flows backward.
Complex transport_solve(const HomogeneousTerm& p1, const Expr& q_init, double t, const PhasePoint& z,
                        double tol = 1e-10);

}  // namespace pdo
