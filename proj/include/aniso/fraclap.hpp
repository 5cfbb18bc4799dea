#pragma once

#include "aniso/types.hpp"

namespace aniso {

/// Fixed quadrature rule on the unit sphere of R^dim.  Weights sum to the
/// exact surface measure.  For dim <= 2 the rule covers a half sphere with
/// doubled weights, which is valid for the even integrands used here
/// (symmetrized second differences).
struct SphereRule {
  int dim = 0;
  int count = 0;
  std::vector<double> dirs;  // count x dim, row-major unit vectors
  std::vector<double> weights;
};

const SphereRule& sphere_rule(int dim);

/// One coordinate block on which a (fractional) Laplacian acts.
struct BlockSpec {
  int offset = 0;  // first coordinate index
  int N = 1;       // block size
  double s = 1.0;  // order/2, in (0,1]
};

/// Pointwise (-Lap_block)^s of `field` at x.  For s = 1 this is the negative
/// sum of pure second derivatives over the block (5-point stencils with step
/// local_step).  For s < 1 the singular integral is evaluated in polar
/// coordinates: quadratic model on |y| <= r0 integrated in closed form,
/// adaptive log-spaced Gauss panels on the annulus, and an analytic tail.
/// The tail is exact for compactly supported fields; for merely bounded
/// fields a certified bound is recorded in EvalResult::uncertainty.
EvalResult block_fraclap(const ScalarField& field, std::span<const double> x,
                         const BlockSpec& blk, const QuadratureSpec& quad);

/// (-Lap_{X_i})^{s_i} of `field` at x for group i of the operator spec.
EvalResult group_fraclap(const OperatorSpec& spec, int i, const ScalarField& field,
                         std::span<const double> x, const QuadratureSpec& quad);

/// Full operator  L u(x) = sum_i a_i (-Lap_{X_i})^{s_i} u(x); groups with
/// a_i = 0 are skipped.
EvalResult apply_operator(const OperatorSpec& spec, const ScalarField& field,
                          std::span<const double> x, const QuadratureSpec& quad);

/// Extended operator on R^{n+1} (extra coordinate t):
///   sum_{i<m} a_i (-Lap_{X_i})^{s_i} - (a - nu) d^2/dx_n^2 - nu d^2/dt^2,
/// for nu in (0, a).
EvalResult apply_extended(const OperatorSpec& spec, double nu,
                          const ExtendedField& field, std::span<const double> p,
                          const QuadratureSpec& quad);

/// Independent normalization check: evaluates the 1-D quadrature of
/// (-Lap)^s cos(k .) at 0, enlarging Rcut until the recorded tail
/// uncertainty meets target_rel_tol.  The result approximates |k|^{2s}.
double symbol_oracle(double s, double k, const QuadratureSpec& quad);

/// Composite Gauss integration with per-panel adaptive bisection; panels are
/// log-spaced with quad.panels_per_decade panels per decade.  Returns the
/// value and an error estimate (sum of accepted bisection defects).
struct AdaptiveIntegral {
  double value = 0.0;
  double err_est = 0.0;
};
AdaptiveIntegral integrate_log_adaptive(const std::function<double(double)>& f,
                                        double lo, double hi, int panels_per_decade,
                                        double tol_abs, int max_depth = 44);

}  // namespace aniso
