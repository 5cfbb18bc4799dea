#pragma once

#include <span>

namespace aniso {

/// Euler Gamma function (Lanczos approximation), accurate to better than
/// 1e-12 relative on (0, 20].  Throws on non-positive integers.
double gamma_function(double x);

/// Normalization constant c_{N,s} of the fractional Laplacian written with
/// the symmetrized second difference, for N >= 1 and s in (0,1):
///   c_{N,s} = 2^{2s-1} Gamma(s + N/2) / (pi^{N/2} |Gamma(-s)|),
/// where |Gamma(-s)| is evaluated as Gamma(1-s)/s.
double kernel_constant(int N, double s);

/// eta_{N,s} = Gamma(N/2) / (2^{2s} Gamma(s+1) Gamma(s+N/2)), defined for
/// s in (0,1]; equals 1/(2N) at s = 1.  This is the normalizer that makes
/// the fractional Laplacian of the bump profile identically one.
double eta(int N, double s);

/// Value of (-Lap)^s applied to the unnormalized profile (1-|x|^2)_+^s at
/// any interior point: 2^{2s} Gamma(s+1) Gamma(s+N/2) / Gamma(N/2) = 1/eta.
/// Scale invariant in the profile radius.  Equals 2N at s = 1.
double bump_fraclap_constant(int N, double s);

/// Surface measure of the unit sphere in R^N (2 for N = 1).
double sphere_measure(int N);

}  // namespace aniso
