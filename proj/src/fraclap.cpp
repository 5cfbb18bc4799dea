#include "aniso/fraclap.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>

#include "aniso/special.hpp"

namespace aniso {

namespace {

// 8-point Gauss-Legendre rule on [-1,1].
constexpr int kGL = 8;
constexpr double kGLx[kGL] = {
    -0.9602898564975362316, -0.7966664774136267396, -0.5255324099163289858,
    -0.1834346424956498049, 0.1834346424956498049,  0.5255324099163289858,
    0.7966664774136267396,  0.9602898564975362316};
constexpr double kGLw[kGL] = {
    0.1012285362903762592, 0.2223810344533744705, 0.3137066458778872873,
    0.3626837833783619830, 0.3626837833783619830, 0.3137066458778872873,
    0.2223810344533744705, 0.1012285362903762592};

double gauss_panel(const std::function<double(double)>& f, double a, double b) {
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double acc = 0.0;
  for (int i = 0; i < kGL; ++i) acc += kGLw[i] * f(mid + half * kGLx[i]);
  return acc * half;
}

struct PanelOut {
  double value;
  double err;
};

PanelOut adaptive_panel(const std::function<double(double)>& f, double a, double b,
                        double whole, double tol, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = gauss_panel(f, a, mid);
  const double right = gauss_panel(f, mid, b);
  const double diff = std::abs(left + right - whole);
  // the second test is the roundoff floor; without it a vanishing tolerance
  // splits every node down to the depth cap
  if (diff <= tol || diff <= 4e-15 * (std::abs(left) + std::abs(right)) || depth <= 0)
    return {left + right, diff};
  PanelOut l = adaptive_panel(f, a, mid, left, 0.5 * tol, depth - 1);
  PanelOut r = adaptive_panel(f, mid, b, right, 0.5 * tol, depth - 1);
  return {l.value + r.value, l.err + r.err};
}

std::vector<double> log_edges(double lo, double hi, int panels_per_decade) {
  const double decades = std::log10(hi / lo);
  const int npanels =
      std::max(1, static_cast<int>(std::ceil(decades * panels_per_decade)));
  std::vector<double> edges(npanels + 1);
  const double ratio = std::pow(hi / lo, 1.0 / npanels);
  edges[0] = lo;
  for (int j = 1; j < npanels; ++j) edges[j] = edges[j - 1] * ratio;
  edges[npanels] = hi;
  return edges;
}

SphereRule make_sphere_rule(int dim) {
  SphereRule rule;
  rule.dim = dim;
  if (dim == 1) {
    // one half of S^0 with doubled weight; total measure 2
    rule.count = 1;
    rule.dirs = {1.0};
    rule.weights = {2.0};
    return rule;
  }
  if (dim == 2) {
    // half circle, doubled weights; offset nodes avoid the coordinate axes
    const int half = 64;
    rule.count = half;
    for (int j = 0; j < half; ++j) {
      const double th = (j + 0.5) * M_PI / half;
      rule.dirs.push_back(std::cos(th));
      rule.dirs.push_back(std::sin(th));
      rule.weights.push_back(2.0 * M_PI / half);
    }
    return rule;
  }
  // unreachable; dim >= 3 is built by make_sphere_rule_from below
  throw std::logic_error("make_sphere_rule: dim >= 3 needs a sub-rule");
}

// dim >= 3: Gauss nodes in the polar cosine times a rule on S^{dim-2}.
// The (1-z^2)^{(dim-3)/2} weight is folded into the node weights and the
// total is renormalized to the exact surface measure.
SphereRule make_sphere_rule_from(int dim, const SphereRule& sub) {
  SphereRule rule;
  rule.dim = dim;
  std::vector<double> zz, zw;
  for (int halfi = 0; halfi < 2; ++halfi) {
    const double a = halfi == 0 ? -1.0 : 0.0;
    const double b = halfi == 0 ? 0.0 : 1.0;
    for (int i = 0; i < kGL; ++i) {
      zz.push_back(0.5 * (a + b) + 0.5 * (b - a) * kGLx[i]);
      zw.push_back(0.5 * (b - a) * kGLw[i]);
    }
  }
  double total = 0.0;
  for (size_t iz = 0; iz < zz.size(); ++iz) {
    const double c = zz[iz];
    const double sq = std::sqrt(std::max(0.0, 1.0 - c * c));
    const double wfold =
        zw[iz] * std::pow(std::max(1e-300, 1.0 - c * c), 0.5 * (dim - 3));
    for (int k = 0; k < sub.count; ++k) {
      for (int d = 0; d < dim - 1; ++d)
        rule.dirs.push_back(sq * sub.dirs[k * (dim - 1) + d]);
      rule.dirs.push_back(c);
      rule.weights.push_back(wfold * sub.weights[k]);
      total += wfold * sub.weights[k];
    }
  }
  rule.count = static_cast<int>(rule.weights.size());
  const double scale = sphere_measure(dim) / total;
  for (double& w : rule.weights) w *= scale;
  return rule;
}

// Aggregated second difference over the sphere rule:
//   sum_k w_k [2 f(x) - f(x + r theta_k) - f(x - r theta_k)]
// with increments placed in the block coordinates only.
class SecondDifference {
 public:
  SecondDifference(const ScalarField& field, std::span<const double> x,
                   const BlockSpec& blk)
      : field_(field),
        blk_(blk),
        rule_(sphere_rule(blk.N)),
        x_(x.begin(), x.end()),
        xp_(x.begin(), x.end()),
        xm_(x.begin(), x.end()) {
    fx_ = field_(x_);
  }

  double center_value() const { return fx_; }

  double at(double r) {
    long double acc = 0.0;
    const int N = blk_.N;
    const int off = blk_.offset;
    for (int k = 0; k < rule_.count; ++k) {
      for (int c = 0; c < N; ++c) {
        const double step = r * rule_.dirs[k * N + c];
        xp_[off + c] = x_[off + c] + step;
        xm_[off + c] = x_[off + c] - step;
      }
      acc += rule_.weights[k] * (2.0 * fx_ - field_(xp_) - field_(xm_));
    }
    return static_cast<double>(acc);
  }

 private:
  const ScalarField& field_;
  BlockSpec blk_;
  const SphereRule& rule_;
  Point x_, xp_, xm_;
  double fx_ = 0.0;
};

double fivepoint_second_derivative(const ScalarField& field,
                                   std::span<const double> x, int coord, double h) {
  Point p(x.begin(), x.end());
  const double x0 = p[coord];
  auto at = [&](double dx) {
    p[coord] = x0 + dx;
    return field(p);
  };
  return (-at(-2 * h) + 16 * at(-h) - 30 * at(0) + 16 * at(h) - at(2 * h)) /
         (12 * h * h);
}

}  // namespace

const SphereRule& sphere_rule(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere_rule: dim must be >= 1");
  static std::map<int, SphereRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  // fill from low dimensions up; each rule builds on the previous one
  for (int d = 1; d <= dim; ++d) {
    if (cache.count(d)) continue;
    cache.emplace(d, d <= 2 ? make_sphere_rule(d)
                            : make_sphere_rule_from(d, cache.at(d - 1)));
  }
  return cache.at(dim);
}

AdaptiveIntegral integrate_log_adaptive(const std::function<double(double)>& f,
                                        double lo, double hi, int panels_per_decade,
                                        double tol_abs, int max_depth) {
  AdaptiveIntegral out;
  if (!(hi > lo)) return out;
  const std::vector<double> edges = log_edges(lo, hi, panels_per_decade);
  const int npanels = static_cast<int>(edges.size()) - 1;
  const double tol_panel = tol_abs / npanels;
  long double val = 0.0, err = 0.0;
  for (int j = 0; j < npanels; ++j) {
    const double whole = gauss_panel(f, edges[j], edges[j + 1]);
    PanelOut p = adaptive_panel(f, edges[j], edges[j + 1], whole, tol_panel, max_depth);
    val += p.value;
    err += p.err;
  }
  out.value = static_cast<double>(val);
  out.err_est = static_cast<double>(err);
  return out;
}

EvalResult block_fraclap(const ScalarField& field, std::span<const double> x,
                         const BlockSpec& blk, const QuadratureSpec& quad) {
  quad.validate();
  if (blk.N < 1 || blk.offset < 0 || blk.offset + blk.N > field.dim)
    throw std::invalid_argument("block_fraclap: block does not fit field dimension");
  if (static_cast<int>(x.size()) != field.dim)
    throw std::invalid_argument("block_fraclap: point dimension mismatch");
  if (!(blk.s > 0.0 && blk.s <= 1.0))
    throw std::invalid_argument("block_fraclap: exponent out of (0,1]");

  EvalResult res;
  if (blk.s == 1.0) {
    double acc = 0.0;
    for (int c = 0; c < blk.N; ++c)
      acc -= fivepoint_second_derivative(field, x, blk.offset + c, quad.local_step);
    res.value = acc;
    return res;
  }

  const bool compact = field.support_radius.has_value();
  if (!compact && !std::isfinite(field.global_bound))
    throw std::invalid_argument(
        "block_fraclap: fractional evaluation needs a global bound or compact support");

  const double s = blk.s;
  const double c = kernel_constant(blk.N, s);
  const double omega = sphere_measure(blk.N);
  const double r0 = quad.singular_radius;
  const double Rcut = quad.truncation_radius;

  SecondDifference diff(field, x, blk);

  // (a) singular cell: quadratic model q(theta) r^2 of the second difference,
  // q taken from the discrete second difference at step r0; integrates to
  // q * r0^{2-2s} / (2-2s) against the radial kernel weight.
  const double q_angular = diff.at(r0) / (r0 * r0);
  const double singular = q_angular * std::pow(r0, 2.0 - 2.0 * s) / (2.0 - 2.0 * s);

  double xnorm = 0.0;
  for (double xi : x) xnorm += xi * xi;
  xnorm = std::sqrt(xnorm);

  // Beyond reach = |x| + support radius every sample vanishes and the second
  // difference is exactly 2 f(x); integrate that stretch in closed form.
  double annulus_hi = Rcut;
  double exact_const_part = 0.0;
  if (compact) {
    const double reach = xnorm + *field.support_radius;
    if (reach < Rcut) {
      annulus_hi = std::max(r0, reach);
      exact_const_part +=
          2.0 * diff.center_value() * omega *
          (std::pow(annulus_hi, -2.0 * s) - std::pow(Rcut, -2.0 * s)) / (2.0 * s);
    }
  }

  // (b) annulus via adaptive log-spaced Gauss panels; a coarse pass over the
  // same panels sets the absolute tolerance budget.
  auto integrand = [&](double r) { return diff.at(r) * std::pow(r, -1.0 - 2.0 * s); };
  AdaptiveIntegral ann{0.0, 0.0};
  if (annulus_hi > r0) {
    const std::vector<double> edges = log_edges(r0, annulus_hi, quad.panels_per_decade);
    double coarse_abs = 0.0;
    for (size_t j = 0; j + 1 < edges.size(); ++j)
      coarse_abs += std::abs(gauss_panel(integrand, edges[j], edges[j + 1]));
    const double scale = std::max({coarse_abs, std::abs(singular),
                                   std::abs(exact_const_part), 1e-14});
    ann = integrate_log_adaptive(integrand, r0, annulus_hi, quad.panels_per_decade,
                                 quad.target_rel_tol * scale / 3.0);
  }

  // (c) tail beyond Rcut: exact for compactly supported fields, otherwise a
  // certified bound recorded as the evaluation's uncertainty.
  double tail_value = 0.0, tail_bound = 0.0;
  if (compact && *field.support_radius < Rcut - xnorm) {
    tail_value = 2.0 * diff.center_value() * omega / (2.0 * s * std::pow(Rcut, 2.0 * s));
  } else {
    tail_bound = 4.0 * field.global_bound * omega / (2.0 * s * std::pow(Rcut, 2.0 * s));
  }

  res.value = c * (singular + ann.value + exact_const_part + tail_value);
  res.uncertainty = c * (tail_bound + ann.err_est);
  res.tail_flagged = res.uncertainty > quad.target_rel_tol * std::abs(res.value);
  return res;
}

EvalResult group_fraclap(const OperatorSpec& spec, int i, const ScalarField& field,
                         std::span<const double> x, const QuadratureSpec& quad) {
  if (i < 0 || i >= spec.m())
    throw std::invalid_argument("group_fraclap: group index out of range");
  if (field.dim != spec.n())
    throw std::invalid_argument("group_fraclap: field dimension mismatch");
  BlockSpec blk{spec.grouping.offset_of(i), spec.grouping.dims[i], spec.s[i]};
  return block_fraclap(field, x, blk, quad);
}

EvalResult apply_operator(const OperatorSpec& spec, const ScalarField& field,
                          std::span<const double> x, const QuadratureSpec& quad) {
  EvalResult total;
  for (int i = 0; i < spec.m(); ++i) {
    if (spec.a[i] == 0.0) continue;
    EvalResult g = group_fraclap(spec, i, field, x, quad);
    total.value += spec.a[i] * g.value;
    total.uncertainty += spec.a[i] * g.uncertainty;
    total.tail_flagged = total.tail_flagged || g.tail_flagged;
  }
  return total;
}

EvalResult apply_extended(const OperatorSpec& spec, double nu,
                          const ExtendedField& field, std::span<const double> p,
                          const QuadratureSpec& quad) {
  const double a = spec.local_coeff();
  if (!(nu > 0.0 && nu < a))
    throw std::invalid_argument("apply_extended: nu must lie in (0, a)");
  if (field.dim != spec.n() + 1)
    throw std::invalid_argument(
        "apply_extended: extended field must have one extra coordinate");
  if (static_cast<int>(p.size()) != field.dim)
    throw std::invalid_argument("apply_extended: point dimension mismatch");

  EvalResult total;
  for (int i = 0; i + 1 < spec.m(); ++i) {
    if (spec.a[i] == 0.0) continue;
    BlockSpec blk{spec.grouping.offset_of(i), spec.grouping.dims[i], spec.s[i]};
    EvalResult g = block_fraclap(field, p, blk, quad);
    total.value += spec.a[i] * g.value;
    total.uncertainty += spec.a[i] * g.uncertainty;
    total.tail_flagged = total.tail_flagged || g.tail_flagged;
  }
  // -(a - nu) d^2/dx_n^2  and  -nu d^2/dt^2
  BlockSpec xn{spec.n() - 1, 1, 1.0};
  BlockSpec tt{spec.n(), 1, 1.0};
  total.value += (a - nu) * block_fraclap(field, p, xn, quad).value;
  total.value += nu * block_fraclap(field, p, tt, quad).value;
  return total;
}

double symbol_oracle(double s, double k, const QuadratureSpec& quad) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("symbol_oracle: exponent out of (0,1)");
  if (k == 0.0)
    throw std::invalid_argument("symbol_oracle: wavenumber must be nonzero");
  ScalarField wave;
  wave.dim = 1;
  wave.global_bound = 1.0;
  wave.sample = [k](std::span<const double> x) { return std::cos(k * x[0]); };

  QuadratureSpec cur = quad;
  const Point origin{0.0};
  EvalResult res;
  for (int round = 0; round < 64; ++round) {
    res = block_fraclap(wave, origin, BlockSpec{0, 1, s}, cur);
    if (res.uncertainty <= cur.target_rel_tol * std::abs(res.value)) return res.value;
    cur.truncation_radius *= 2.0;
  }
  return res.value;
}

}  // namespace aniso
