#include "aniso/barrier.hpp"

#include <algorithm>
#include <cmath>

#include "aniso/special.hpp"

namespace aniso {

namespace {

double norm2(std::span<const double> v) {
  double acc = 0.0;
  for (double x : v) acc += x * x;
  return acc;
}

double min_eta_d(const OperatorSpec& spec, std::span<const double> d) {
  double best = kInf;
  for (int i = 0; i < spec.m(); ++i) {
    const double val =
        eta(spec.grouping.dims[i], spec.s[i]) * std::pow(d[i], 2.0 * spec.s[i]);
    best = std::min(best, val);
  }
  return best;
}

}  // namespace

double bump_profile_unnormalized(double d, double s, std::span<const double> X) {
  if (!(d > 0.0)) throw std::invalid_argument("bump_profile: radius must be positive");
  const double core = d * d - norm2(X);
  return core > 0.0 ? std::pow(core, s) : 0.0;
}

double bump_profile(double d, int N, double s, std::span<const double> X) {
  if (static_cast<int>(X.size()) != N)
    throw std::invalid_argument("bump_profile: point dimension mismatch");
  return eta(N, s) * bump_profile_unnormalized(d, s, X);
}

BarrierConstants barrier_constants(const OperatorSpec& spec, std::span<const double> d,
                                   double nu, double g_norm, double v_norm) {
  if (static_cast<int>(d.size()) != spec.m())
    throw std::invalid_argument("barrier_constants: radius count mismatch");
  const double a = spec.local_coeff();
  if (!(nu > 0.0 && nu < a))
    throw std::invalid_argument("barrier_constants: nu must lie in (0, a)");
  if (g_norm < 0.0 || v_norm < 0.0)
    throw std::invalid_argument("barrier_constants: norms must be >= 0");

  BarrierConstants bc;
  bc.nu = nu;
  const double dm = d.back();
  double co = 0.5 * dm * dm;
  for (int i = 0; i < spec.m(); ++i)
    co += eta(spec.grouping.dims[i], spec.s[i]) * std::pow(d[i], 2.0 * spec.s[i]);
  bc.c_o = co;
  bc.A0 = 0.0;
  for (double ai : spec.a) bc.A0 += ai;
  bc.A2 = v_norm / min_eta_d(spec, d);
  bc.A1 = bc.A0 * bc.A2 + g_norm + (a - nu);
  return bc;
}

BarrierConstants barrier_constants(const OperatorSpec& spec, std::span<const double> d,
                                   double g_norm, double v_norm) {
  return barrier_constants(spec, d, 0.99 * spec.local_coeff(), g_norm, v_norm);
}

double barrier_phi1(double t, double dm) {
  const double tp = std::max(t, 0.0);
  const double rem = std::max(dm - t, 0.0);
  return 0.5 * tp * rem;
}

double barrier_phi2(const OperatorSpec& spec, std::span<const double> d,
                    std::span<const double> p) {
  const int n = spec.n();
  if (static_cast<int>(p.size()) != n + 1)
    throw std::invalid_argument("barrier_phi2: expected n+1 coordinates");
  const double t = p[n];
  const double dm = d.back();

  double co = 0.5 * dm * dm;
  double wells = 0.0;
  for (int i = 0; i < spec.m(); ++i) {
    const int off = spec.grouping.offset_of(i);
    const int N = spec.grouping.dims[i];
    co += eta(N, spec.s[i]) * std::pow(d[i], 2.0 * spec.s[i]);
    wells += bump_profile(d[i], N, spec.s[i], p.subspan(off, N));
  }
  const double tcore = dm * dm - t * t;
  const double tpart = tcore > 0.0 ? 0.5 * tcore : 0.0;
  return co - wells - tpart;
}

double composite_barrier(const BarrierConstants& bc, const OperatorSpec& spec,
                         std::span<const double> d, std::span<const double> p) {
  const double t = p[spec.n()];
  return bc.A1 / bc.nu * barrier_phi1(t, d.back()) +
         bc.A2 * barrier_phi2(spec, d, p);
}

std::pair<ExtendedField, ExtendedField> doubled_fields(const ScalarField& u,
                                                       const ScalarField& f) {
  if (u.dim != f.dim)
    throw std::invalid_argument("doubled_fields: dimension mismatch");
  const int n = u.dim;

  auto doubled = [n](const ScalarField& base) {
    ExtendedField out;
    out.dim = n + 1;
    out.global_bound = 2.0 * base.global_bound;
    auto fn = base.sample;
    out.sample = [fn, n](std::span<const double> p) {
      const double tp = std::max(p[n], 0.0);
      Point q(p.begin(), p.begin() + n);
      q[n - 1] += tp;
      const double plus = fn(q);
      q[n - 1] -= 2.0 * tp;
      return plus - fn(q);
    };
    return out;
  };
  return {doubled(u), doubled(f)};
}

}  // namespace aniso
