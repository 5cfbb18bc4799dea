#pragma once

#include <utility>

#include "aniso/types.hpp"

namespace aniso {

/// Bump profile eta_{N,s} (d^2 - |X|^2)_+^s; its (-Lap)^s equals 1 at every
/// interior point of the ball of radius d.
double bump_profile(double d, int N, double s, std::span<const double> X);

/// Unnormalized profile (d^2 - |X|^2)_+^s.
double bump_profile_unnormalized(double d, double s, std::span<const double> X);

/// Constants of the composite barrier:
///   c_o = sum_i eta_i d_i^{2 s_i} + d_m^2 / 2
///   A0  = sum_i a_i
///   A2  = ||v||_inf / min_i (eta_i d_i^{2 s_i})
///   A1  = A0 A2 + ||g||_inf + (a - nu)
struct BarrierConstants {
  double c_o = 0.0;
  double A0 = 0.0;
  double A1 = 0.0;
  double A2 = 0.0;
  double nu = 0.0;
};

BarrierConstants barrier_constants(const OperatorSpec& spec, std::span<const double> d,
                                   double nu, double g_norm, double v_norm);
// Same with the default nu = 0.99 a.
BarrierConstants barrier_constants(const OperatorSpec& spec, std::span<const double> d,
                                   double g_norm, double v_norm);

/// Parabolic-in-t factor t_+ (d_m - t)_+ / 2.
double barrier_phi1(double t, double dm);

/// Well-shaped factor  c_o - sum_i eta_i (d_i^2-|X_i|^2)_+^{s_i}
///                     - (d_m^2 - t^2)_+ / 2;  nonnegative by construction.
double barrier_phi2(const OperatorSpec& spec, std::span<const double> d,
                    std::span<const double> p);

/// Composite barrier Phi(x,t) = (A1/nu) Phi1(t) + A2 Phi2(x,t); p has n+1
/// coordinates with t last.  Nonnegative everywhere.
double composite_barrier(const BarrierConstants& bc, const OperatorSpec& spec,
                         std::span<const double> d, std::span<const double> p);

/// Doubled fields over R^{n+1}:
///   v(x,t) = u(x + t_+ e_n) - u(x - t_+ e_n)  and likewise g from f.
/// v carries the certified bound 2 ||u||.
std::pair<ExtendedField, ExtendedField> doubled_fields(const ScalarField& u,
                                                       const ScalarField& f);

}  // namespace aniso
