#pragma once

#include <map>
#include <string>

#include "aniso/grid.hpp"
#include "aniso/types.hpp"

namespace aniso {

/// One verified inequality: both sides, the certified slack, and where every
/// constant came from.
struct EstimateReport {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  double slack = 0.0;
  bool verdict = false;  // lhs <= rhs + slack
  std::map<std::string, double> provenance;
  std::vector<std::string> notes;

  void finalize() {
    if (slack < 0.0) throw std::invalid_argument("report: slack must be >= 0");
    verdict = lhs <= rhs + slack;
  }
  static std::string csv_header() { return "name,lhs,rhs,slack,verdict"; }
  std::string csv_row() const;
};

/// Oscillation of f in the last coordinate over Q_d x (0, d_m):
///   sup |f(x + t e_n) - f(x - t e_n)|,
/// approximated by dense sampling (a lower bound; `density` points per axis).
double oscillation_sup(const ScalarField& f, const CoordinateGrouping& g,
                       std::span<const double> d, int density);

/// min_i eta_i d_i^{2 s_i}
double min_eta_term(const OperatorSpec& spec, std::span<const double> d);

/// 2 (a_1 + ... + a_m) / a + 1
double ctilde(const OperatorSpec& spec);

/// Right-hand side of the directional Lipschitz estimate:
///   d_m S / a + Ctilde d_m ||u|| / min_i (eta_i d_i^{2 s_i}).
double main_estimate_rhs(const OperatorSpec& spec, std::span<const double> d, double S,
                         double u_norm);

/// max over nodal t in (0, d_m) of |u(t e_n) - u(-t e_n)| / t, values off the
/// node lattice obtained by linear interpolation.
double directional_lipschitz_lhs(const GridFunction& u, double dm);

/// Explicit admissible interior bound  |d_{x_n} u| <= C (f_norm + u_norm) on
/// B_{r_in} for solutions on B_{r_out}, built by centering boxes with radii
/// (r_out - r_in)/(2 sqrt n) at every point of B_{r_in}.  `value` is the
/// bound, `constant` the admissible C, `trail` the named factors.
struct GradientBound {
  double value = 0.0;
  double constant = 0.0;
  std::map<std::string, double> trail;
};

GradientBound interior_gradient_bound(const OperatorSpec& spec, double f_norm,
                                      double u_norm);
GradientBound interior_gradient_bound_radii(const OperatorSpec& spec, double r_in,
                                            double r_out, double f_norm, double u_norm);

/// C_o = 2 sum_i a_i c_{N_i,s_i} |S^{N_i-1}|, fractional groups only
/// (groups with s_i = 1 act locally and contribute no tail).
double tail_constant(const OperatorSpec& spec);

/// Ring norms rho -> ||u|| on B_{2 rho} \ B_{rho/2}, together with a declared
/// analytic growth bound  norm(rho) <= growth_coeff * rho^growth_exp  and an
/// optional radius beyond which the norms vanish.
struct RingNorms {
  std::function<double(double)> norm;
  double growth_coeff = 0.0;
  double growth_exp = 0.0;   // must stay below 2 s_min
  bool pure_power = false;   // norm(rho) == growth_coeff * rho^growth_exp exactly
  double support_max = kInf; // norm vanishes for rho > support_max

  static RingNorms constant(double M);
  static RingNorms power(double coeff, double exponent);
};

/// int_{2R}^inf norm(rho) / rho^{1+2 s_min} d rho; closed form for pure
/// powers, log-spaced quadrature plus the analytic remainder otherwise.
/// Throws if the declared growth reaches 2 s_min.
double tail_integral(const RingNorms& rings, double R, double s_min);

/// Product cutoff equal to 1 on (-3R,3R)^n and 0 outside (-6R,6R)^n, built
/// from the exponential-of-inverse transition profile.
double cutoff(std::span<const double> x, double R);

/// Ring-weighted right-hand side at scale R >= 1:
///   coef_f * f_osc + coef_u * u_norm_6R + coef_tail * tail,
/// with the coefficients assembled from the box choice d_i = R/(3 sqrt n),
/// the directional Lipschitz bound, and the tail constant.  All factors are
/// recorded in `parts`.
struct WeightedRhs {
  double value = 0.0;
  std::map<std::string, double> parts;
};

WeightedRhs weighted_estimate_rhs(const OperatorSpec& spec, int n, double R,
                                  double f_osc, double u_norm_6R, double tail);

}  // namespace aniso
