#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace aniso {

using Point = std::vector<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Partition of the coordinates of R^n into m consecutive blocks
/// X_1..X_m of sizes N_1..N_m.  The last block is always the single
/// distinguished coordinate x_n (N_m = 1), on which the operator acts
/// locally.
struct CoordinateGrouping {
  std::vector<int> dims;     // N_1..N_m
  std::vector<int> offsets;  // running totals N_1+...+N_i

  static CoordinateGrouping make(std::vector<int> dims);

  int m() const { return static_cast<int>(dims.size()); }
  int n() const { return offsets.back(); }
  // first coordinate index of block i (0-based block index)
  int offset_of(int i) const { return i == 0 ? 0 : offsets[i - 1]; }

  bool operator==(const CoordinateGrouping&) const = default;
};

/// Places y in R^{N_i} into the i-th coordinate block of R^n, zero elsewhere.
Point embed_increment(const CoordinateGrouping& g, int i, std::span<const double> y);

/// The operator  L = sum_i a_i (-Lap_{X_i})^{s_i}  with s_m = 1 and a_m > 0,
/// i.e. a superposition of fractional Laplacians on the coordinate blocks
/// plus a local second derivative -a d^2/dx_n^2.
struct OperatorSpec {
  CoordinateGrouping grouping;
  std::vector<double> s;  // s_1..s_m, each in (0,1], s_m = 1
  std::vector<double> a;  // a_1..a_m, a_i >= 0, a_m > 0

  static OperatorSpec make(std::vector<int> dims, std::vector<double> s,
                           std::vector<double> a);

  int m() const { return grouping.m(); }
  int n() const { return grouping.n(); }
  double local_coeff() const { return a.back(); }

  double s_min() const;
  double s_max() const;
  double a_min() const;
  double a_max() const;
};

/// Product box Q_d = B_{d_1} x ... x B_{d_{m-1}} x (-d_m, d_m), with the
/// last interval dilated by kappa:  Q_{d,kappa}.
struct AnisotropicBox {
  std::vector<double> d;  // d_1..d_m, all positive
  double kappa = 1.0;

  static AnisotropicBox make(std::vector<double> d, double kappa = 1.0);

  double dm() const { return d.back(); }
  // open membership test; per-block balls, last interval scaled by kappa
  bool contains(const CoordinateGrouping& g, std::span<const double> x) const;
};

/// A scalar function on R^dim together with certified metadata: a bound for
/// its sup norm over the whole space and, when present, a radius outside of
/// which it vanishes identically.  The bounds are data, not estimates; all
/// tail arguments rely on them.
struct ScalarField {
  int dim = 0;
  std::function<double(std::span<const double>)> sample;
  double global_bound = kInf;
  std::optional<double> support_radius;

  double operator()(std::span<const double> x) const { return sample(x); }
};

// Field on R^{n+1}; the extra last coordinate plays the role of t.
using ExtendedField = ScalarField;

/// Discretization policy for the singular integrals: analytic model inside
/// |y| <= r0, composite Gauss panels (log-spaced) up to Rcut, analytic tail
/// beyond.  local_step is the step of the second-derivative stencils used
/// for the s = 1 branches.
struct QuadratureSpec {
  double singular_radius = 1e-2;    // r0
  double truncation_radius = 50.0;  // Rcut
  int panels_per_decade = 16;       // ppd
  double local_step = 1e-3;         // hloc
  double target_rel_tol = 1e-6;     // rtol

  void validate() const;
  QuadratureSpec refined(double factor = 2.0) const;
};

/// Outcome of a pointwise operator evaluation.  `uncertainty` is a certified
/// absolute bound on the neglected contributions (truncated tail plus the
/// panel-refinement estimate); `tail_flagged` is set when it exceeds the
/// requested relative tolerance.
struct EvalResult {
  double value = 0.0;
  double uncertainty = 0.0;
  bool tail_flagged = false;
};

}  // namespace aniso
