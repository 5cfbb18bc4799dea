#include "aniso/estimates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "aniso/fraclap.hpp"
#include "aniso/special.hpp"

namespace aniso {

std::string EstimateReport::csv_row() const {
  std::ostringstream out;
  out.precision(17);
  out << name << "," << lhs << "," << rhs << "," << slack << ","
      << (verdict ? "pass" : "fail");
  return out.str();
}

double oscillation_sup(const ScalarField& f, const CoordinateGrouping& g,
                       std::span<const double> d, int density) {
  if (f.dim != g.n()) throw std::invalid_argument("oscillation_sup: dimension mismatch");
  if (static_cast<int>(d.size()) != g.m())
    throw std::invalid_argument("oscillation_sup: radius count mismatch");
  if (density < 2) throw std::invalid_argument("oscillation_sup: density must be >= 2");
  const int n = g.n();
  const double dm = d.back();

  // sample x on a tensor grid of Q_d and t on (0, d_m); the product-ball box
  // is sampled through its bounding box with a membership test
  std::vector<int> counts(n, density);
  std::vector<double> half(n);
  for (int i = 0; i < g.m(); ++i) {
    const int off = g.offset_of(i);
    for (int c = 0; c < g.dims[i]; ++c) half[off + c] = d[i];
  }

  AnisotropicBox qd = AnisotropicBox::make(std::vector<double>(d.begin(), d.end()), 1.0);
  double best = 0.0;
  Point x(n), xp(n), xm(n);
  for_each_index(counts, [&](long long, std::span<const int> idx) {
    for (int j = 0; j < n; ++j)
      x[j] = -half[j] + 2.0 * half[j] * (idx[j] + 0.5) / density;
    if (!qd.contains(g, x)) return;
    for (int it = 0; it < density; ++it) {
      const double t = dm * (it + 0.5) / density;
      xp = x;
      xm = x;
      xp[n - 1] += t;
      xm[n - 1] -= t;
      best = std::max(best, std::abs(f(xp) - f(xm)));
    }
  });
  return best;
}

double min_eta_term(const OperatorSpec& spec, std::span<const double> d) {
  if (static_cast<int>(d.size()) != spec.m())
    throw std::invalid_argument("min_eta_term: radius count mismatch");
  double best = kInf;
  for (int i = 0; i < spec.m(); ++i)
    best = std::min(best, eta(spec.grouping.dims[i], spec.s[i]) *
                              std::pow(d[i], 2.0 * spec.s[i]));
  return best;
}

double ctilde(const OperatorSpec& spec) {
  double sum = 0.0;
  for (double ai : spec.a) sum += ai;
  return 2.0 * sum / spec.local_coeff() + 1.0;
}

double main_estimate_rhs(const OperatorSpec& spec, std::span<const double> d, double S,
                         double u_norm) {
  if (S < 0.0 || u_norm < 0.0)
    throw std::invalid_argument("main_estimate_rhs: norms must be >= 0");
  const double dm = d.back();
  return dm * S / spec.local_coeff() + ctilde(spec) * dm * u_norm / min_eta_term(spec, d);
}

double directional_lipschitz_lhs(const GridFunction& u, double dm) {
  const int n = u.grid.axes();
  const double axis_half = u.grid.halfwidth[n - 1];
  if (!(dm <= axis_half))
    throw std::invalid_argument("directional_lipschitz_lhs: segment outside grid");
  const double h = u.grid.h[n - 1];
  Point p(n, 0.0), q(n, 0.0);
  double best = 0.0;
  for (int k = 1; k * h < dm; ++k) {
    const double t = k * h;
    p[n - 1] = t;
    q[n - 1] = -t;
    best = std::max(best, std::abs(u.interpolate(p) - u.interpolate(q)) / t);
  }
  return best;
}

GradientBound interior_gradient_bound_radii(const OperatorSpec& spec, double r_in,
                                            double r_out, double f_norm, double u_norm) {
  if (f_norm < 0.0 || u_norm < 0.0)
    throw std::invalid_argument("interior_gradient_bound: norms must be >= 0");
  if (!(0.0 < r_in && r_in < r_out))
    throw std::invalid_argument("interior_gradient_bound: need 0 < r_in < r_out");
  const int n = spec.n();
  // translated boxes Q_{d,2} with all radii delta stay inside B_{r_out} for
  // every center in B_{r_in}: circumradius of Q_{d,2} is delta sqrt(n+3)
  const double delta = (r_out - r_in) / (2.0 * std::sqrt(static_cast<double>(n)));
  std::vector<double> d(spec.m(), delta);
  const double dm = delta;
  const double minterm = min_eta_term(spec, d);
  const double Ct = ctilde(spec);
  const double a = spec.local_coeff();

  // oscillation of f around any center is at most 2 f_norm; the symmetric
  // quotient bounds twice the derivative in the limit
  const double coef_f = 0.5 * dm * 2.0 / a;
  const double coef_u = 0.5 * Ct * dm / minterm;

  GradientBound out;
  out.value = coef_f * f_norm + coef_u * u_norm;
  out.constant = std::max(coef_f, coef_u);
  out.trail["delta"] = delta;
  out.trail["d_m"] = dm;
  out.trail["min_eta_term"] = minterm;
  out.trail["ctilde"] = Ct;
  out.trail["osc_factor"] = 2.0;
  out.trail["sym_quotient_to_derivative"] = 0.5;
  out.trail["coef_f"] = coef_f;
  out.trail["coef_u"] = coef_u;
  out.trail["C"] = out.constant;
  return out;
}

GradientBound interior_gradient_bound(const OperatorSpec& spec, double f_norm,
                                      double u_norm) {
  return interior_gradient_bound_radii(spec, 0.5, 1.0, f_norm, u_norm);
}

double tail_constant(const OperatorSpec& spec) {
  double acc = 0.0;
  for (int i = 0; i < spec.m(); ++i) {
    if (spec.s[i] == 1.0) continue;  // local groups vanish away from the support
    const int N = spec.grouping.dims[i];
    acc += spec.a[i] * kernel_constant(N, spec.s[i]) * sphere_measure(N);
  }
  return 2.0 * acc;
}

RingNorms RingNorms::constant(double M) {
  RingNorms r;
  r.norm = [M](double) { return M; };
  r.growth_coeff = M;
  r.growth_exp = 0.0;
  r.pure_power = true;
  return r;
}

RingNorms RingNorms::power(double coeff, double exponent) {
  RingNorms r;
  r.norm = [coeff, exponent](double rho) { return coeff * std::pow(rho, exponent); };
  r.growth_coeff = coeff;
  r.growth_exp = exponent;
  r.pure_power = true;
  return r;
}

double tail_integral(const RingNorms& rings, double R, double s_min) {
  if (!(R >= 1.0)) throw std::invalid_argument("tail_integral: R must be >= 1");
  if (!(rings.growth_exp < 2.0 * s_min))
    throw std::invalid_argument("tail_integral: declared growth reaches 2 s_min, integral diverges");
  const double lo = 2.0 * R;
  const double p = rings.growth_exp - 2.0 * s_min;  // < 0
  if (rings.pure_power && !(rings.support_max < kInf))
    return rings.growth_coeff * std::pow(lo, p) / (-p);

  const double hi = std::min(rings.support_max, std::max(lo * 1e4, 1e4));
  auto f = [&](double rho) { return rings.norm(rho) * std::pow(rho, -1.0 - 2.0 * s_min); };
  double value = 0.0;
  if (hi > lo) {
    AdaptiveIntegral integ = integrate_log_adaptive(
        f, lo, hi, 16, 1e-9 * rings.norm(lo) * std::pow(lo, -2.0 * s_min) + 1e-300);
    value = integ.value + integ.err_est;
  }
  if (!(rings.support_max < kInf)) {
    // analytic remainder from the declared growth bound
    value += rings.growth_coeff * std::pow(hi, p) / (-p);
  }
  return value;
}

namespace {

// smooth transition profile: 1 for |xi| <= 1, 0 for |xi| >= 2
double cutoff_profile(double xi) {
  const double t = std::abs(xi);
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double tau = t - 1.0;
  return std::exp(1.0 - 1.0 / (1.0 - tau * tau));
}

}  // namespace

double cutoff(std::span<const double> x, double R) {
  if (!(R >= 1.0)) throw std::invalid_argument("cutoff: R must be >= 1");
  double prod = 1.0;
  for (double xi : x) {
    prod *= cutoff_profile(xi / (3.0 * R));
    if (prod == 0.0) break;
  }
  return prod;
}

WeightedRhs weighted_estimate_rhs(const OperatorSpec& spec, int n, double R,
                                  double f_osc, double u_norm_6R, double tail) {
  if (n != spec.n()) throw std::invalid_argument("weighted_estimate_rhs: n mismatch");
  if (!(R >= 1.0)) throw std::invalid_argument("weighted_estimate_rhs: R must be >= 1");
  if (f_osc < 0.0 || u_norm_6R < 0.0 || tail < 0.0)
    throw std::invalid_argument("weighted_estimate_rhs: inputs must be >= 0");

  const double delta = R / (3.0 * std::sqrt(static_cast<double>(n)));
  std::vector<double> d(spec.m(), delta);
  const double dm = delta;
  const double a = spec.local_coeff();
  const double minterm = min_eta_term(spec, d);
  const double Ct = ctilde(spec);
  const double Co = tail_constant(spec);

  // oscillation of the localized source splits into the oscillation of f and
  // twice the cutoff defect, which the ring integral controls through C_o
  const double coef_f = dm / a;
  const double coef_tail = 2.0 * dm * Co / a;
  const double coef_u = Ct * dm / minterm;

  WeightedRhs out;
  out.value = coef_f * f_osc + coef_u * u_norm_6R + coef_tail * tail;
  out.parts["delta"] = delta;
  out.parts["d_m"] = dm;
  out.parts["min_eta_term"] = minterm;
  out.parts["ctilde"] = Ct;
  out.parts["C_o"] = Co;
  out.parts["coef_f"] = coef_f;
  out.parts["coef_u"] = coef_u;
  out.parts["coef_tail"] = coef_tail;
  out.parts["C_f_normalized"] = coef_f / R;
  out.parts["C_u_normalized"] = coef_u * std::pow(R, 2.0 * spec.s_min()) / R;
  out.parts["C_tail_normalized"] = coef_tail / R;
  return out;
}

}  // namespace aniso
