#pragma once

#include <cstdint>
#include <optional>

#include "aniso/estimates.hpp"

namespace aniso {

/// One configuration of the bump-identity campaign: the quadratured
/// (-Lap)^s of the normalized bump profile must equal 1 at interior points,
/// uniformly in the radius d.  `tol` is the admissible relative deviation.
struct BumpIdentityCase {
  int N = 1;
  double s = 0.5;
  double d = 1.0;
  double tol = 1e-3;
};

/// Runs the identity at `points_per_case` random interior points per case
/// (|x| <= 0.85 d, fixed seed).  Report lhs is the worst deviation/tol
/// ratio; verdict is lhs <= 1.
EstimateReport verify_bump_identity(std::span<const BumpIdentityCase> cases,
                                    int points_per_case, std::uint64_t seed,
                                    const QuadratureSpec& quad);

/// Directional Lipschitz verification: solve L u = f on Q_{d,2} with the
/// given exterior, compare the symmetric quotient along the last axis with
/// its explicit bound.  Slack is the two-grid Richardson estimate.
struct LipschitzCase {
  std::string label;
  OperatorSpec spec;
  std::vector<double> d;
  ScalarField f;
  ScalarField exterior;
  std::vector<int> counts;  // fine grid; the coarse grid halves each axis
  QuadratureSpec quad;
  int osc_density = 48;
};

EstimateReport verify_lipschitz(const LipschitzCase& cfg);

/// Ring-weighted tail verification: w vanishes on (-3R,3R)^n; the sup of
/// |L w| over (-R,R)^n is compared against C_o times the ring integral.
struct TailCase {
  std::string label;
  OperatorSpec spec;
  double R = 1.0;
  ScalarField w;
  RingNorms rings;
  QuadratureSpec quad;
  int sample_density = 33;
};

EstimateReport verify_tail(const TailCase& cfg);

struct SweepEntry {
  double R = 0.0;
  double quotient = 0.0;
  double rhs_bound = 0.0;
  double slack = 0.0;
};

struct SweepResult {
  std::vector<SweepEntry> entries;
  double fitted_exponent = 0.0;  // slope of log(quotient) vs log(R)
  bool quotient_decreasing = false;
  bool bound_decreasing = false;
  std::vector<std::string> notes;
};

/// Decay of the directional Lipschitz quotient for x_n-independent sources
/// under growing box scale R; requires sigma = 2 s_min - 1 > 0.  The
/// right-hand-side bound is the ring-weighted estimate with vanishing
/// oscillation term.
struct SweepConfig {
  OperatorSpec spec;
  ScalarField f;
  ScalarField exterior;
  std::vector<double> R_list;
  std::vector<std::vector<int>> counts;  // fine grid per R
  QuadratureSpec quad;
};

SweepResult rigidity_sweep(const SweepConfig& cfg);

/// (u(x + t e_n) - u(x)) / t as a field with certified bound
/// min(2 ||u|| / |t|, lipschitz_bound); requires 0 < |t| <= 1/1000.
ScalarField difference_quotient(const ScalarField& u, double t,
                                std::optional<double> lipschitz_bound = {});

/// Bound on |d^2_{x_n} u| over B_{97/100} for a solved instance, with the
/// constant obtained by iterating the interior gradient bound twice.
/// Requires a certified Lipschitz constant of f in the last coordinate.
struct SecondDerivativeCase {
  OperatorSpec spec;
  ScalarField f;
  ScalarField exterior;
  std::optional<double> f_dxn_lipschitz;
  std::vector<int> counts;
  QuadratureSpec quad;
};

EstimateReport second_derivative_bound(const SecondDerivativeCase& cfg);

/// Quantifies the failure of directional splitting: the gap between the sum
/// of the 1-D fractional operators and the isotropic one on a planar field,
/// at the origin, against the combined quadrature uncertainty.
struct NonAdditivityReport {
  double directional_sum = 0.0;
  double isotropic = 0.0;
  double gap = 0.0;
  double uncertainty = 0.0;
  double ratio = 0.0;
  bool pass = false;
};

NonAdditivityReport non_additivity_demo(double s, const ScalarField& field,
                                        const QuadratureSpec& quad);

/// Halves a node count (M+1 must be even); preserves the grid geometry with
/// doubled spacing.
std::vector<int> halve_counts(const std::vector<int>& counts);

}  // namespace aniso
