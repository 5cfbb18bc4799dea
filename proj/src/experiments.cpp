#include "aniso/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "aniso/barrier.hpp"
#include "aniso/fraclap.hpp"
#include "aniso/special.hpp"

namespace aniso {

namespace {

std::string case_key(const BumpIdentityCase& c) {
  std::ostringstream key;
  key << "dev_N" << c.N << "_s" << c.s << "_d" << c.d;
  return key.str();
}

ScalarField profile_field(int N, double s, double d) {
  ScalarField f;
  f.dim = N;
  f.global_bound = eta(N, s) * std::pow(d, 2.0 * s);
  f.support_radius = d;
  const double scale = eta(N, s);
  f.sample = [scale, d, s](std::span<const double> x) {
    double core = d * d;
    for (double v : x) core -= v * v;
    return core > 0.0 ? scale * std::pow(core, s) : 0.0;
  };
  return f;
}

const std::string kBarrierFormNote =
    "constants use c_o = sum_i eta_i d_i^{2 s_i} + d_m^2/2 (eta-weighted form; "
    "the unweighted variant sum_i d_i^{2 s_i} + d_m^2 is not used)";

}  // namespace

EstimateReport verify_bump_identity(std::span<const BumpIdentityCase> cases,
                                    int points_per_case, std::uint64_t seed,
                                    const QuadratureSpec& quad) {
  quad.validate();
  EstimateReport rep;
  rep.name = "bump-identity";
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);

  double worst_ratio = 0.0;
  for (const auto& c : cases) {
    ScalarField field = profile_field(c.N, c.s, c.d);
    double worst_dev = 0.0;
    for (int p = 0; p < points_per_case; ++p) {
      // uniform in the ball of radius 0.85 d (rejection)
      Point x(c.N);
      while (true) {
        double nrm2 = 0.0;
        for (int j = 0; j < c.N; ++j) {
          x[j] = unit(rng);
          nrm2 += x[j] * x[j];
        }
        if (nrm2 <= 1.0) {
          for (double& v : x) v *= 0.85 * c.d;
          break;
        }
      }
      double nrm = 0.0;
      for (double v : x) nrm += v * v;
      nrm = std::sqrt(nrm);

      QuadratureSpec q = quad;
      q.singular_radius = std::min(quad.singular_radius * c.d, 0.15 * (c.d - nrm));
      q.truncation_radius = nrm + 1.5 * c.d;
      q.local_step = std::min(quad.local_step, 0.02 * (c.d - nrm));
      EvalResult r = block_fraclap(field, x, BlockSpec{0, c.N, c.s}, q);
      worst_dev = std::max(worst_dev, std::abs(r.value - 1.0));
    }
    rep.provenance[case_key(c)] = worst_dev;
    worst_ratio = std::max(worst_ratio, worst_dev / c.tol);
  }

  rep.lhs = worst_ratio;
  rep.rhs = 1.0;
  rep.slack = 0.0;
  rep.provenance["points_per_case"] = points_per_case;
  rep.finalize();
  return rep;
}

std::vector<int> halve_counts(const std::vector<int>& counts) {
  std::vector<int> out(counts.size());
  for (size_t j = 0; j < counts.size(); ++j) {
    if ((counts[j] + 1) % 2 != 0)
      throw std::invalid_argument("halve_counts: count+1 must be even");
    out[j] = (counts[j] + 1) / 2 - 1;
    if (out[j] < 1) throw std::invalid_argument("halve_counts: grid too coarse to halve");
  }
  return out;
}

EstimateReport verify_lipschitz(const LipschitzCase& cfg) {
  const AnisotropicBox box = AnisotropicBox::make(cfg.d, 2.0);
  const double dm = cfg.d.back();

  SolveInfo fine_info, coarse_info;
  GridFunction fine = solve_dirichlet(cfg.spec, box, cfg.f, cfg.exterior, cfg.counts,
                                      cfg.quad, &fine_info);
  GridFunction coarse = solve_dirichlet(cfg.spec, box, cfg.f, cfg.exterior,
                                        halve_counts(cfg.counts), cfg.quad, &coarse_info);

  const double lhs_fine = directional_lipschitz_lhs(fine, dm);
  const double lhs_coarse = directional_lipschitz_lhs(coarse, dm);
  const double S = oscillation_sup(cfg.f, cfg.spec.grouping, cfg.d, cfg.osc_density);
  const double u_norm = std::max(fine.nodal_max_abs(), cfg.exterior.global_bound);

  EstimateReport rep;
  rep.name = cfg.label.empty() ? "directional-lipschitz" : cfg.label;
  rep.lhs = lhs_fine;
  rep.rhs = main_estimate_rhs(cfg.spec, cfg.d, S, u_norm);
  rep.slack = std::abs(lhs_fine - lhs_coarse);
  rep.provenance["S"] = S;
  rep.provenance["S_sample_density"] = cfg.osc_density;
  rep.provenance["u_norm"] = u_norm;
  rep.provenance["ctilde"] = ctilde(cfg.spec);
  rep.provenance["min_eta_term"] = min_eta_term(cfg.spec, cfg.d);
  rep.provenance["lhs_coarse"] = lhs_coarse;
  rep.provenance["unknowns_fine"] = static_cast<double>(fine_info.unknowns);
  rep.provenance["residual_fine"] = fine_info.rel_residual;
  rep.provenance["rhs_uncertainty_fine"] = fine_info.rhs_uncertainty;
  rep.notes.push_back(kBarrierFormNote);
  rep.finalize();
  return rep;
}

EstimateReport verify_tail(const TailCase& cfg) {
  cfg.quad.validate();
  const int n = cfg.spec.n();
  if (cfg.w.dim != n) throw std::invalid_argument("verify_tail: field dimension mismatch");
  if (!(cfg.R >= 1.0)) throw std::invalid_argument("verify_tail: R must be >= 1");

  // precondition: w vanishes identically on (-3R,3R)^n (checked by sampling)
  {
    std::vector<int> counts(n, 2 * cfg.sample_density + 1);
    Point x(n);
    bool ok = true;
    for_each_index(counts, [&](long long, std::span<const int> idx) {
      if (!ok) return;
      for (int j = 0; j < n; ++j)
        x[j] = -3.0 * cfg.R + 6.0 * cfg.R * idx[j] / (counts[j] - 1.0);
      if (cfg.w(x) != 0.0) ok = false;
    });
    if (!ok)
      throw std::invalid_argument("verify_tail: field does not vanish on (-3R,3R)^n");
  }

  double lhs = 0.0, unc = 0.0;
  {
    std::vector<int> counts(n, cfg.sample_density);
    Point x(n);
    for_each_index(counts, [&](long long, std::span<const int> idx) {
      for (int j = 0; j < n; ++j)
        x[j] = -cfg.R + 2.0 * cfg.R * (idx[j] + 0.5) / counts[j];
      EvalResult r = apply_operator(cfg.spec, cfg.w, x, cfg.quad);
      lhs = std::max(lhs, std::abs(r.value));
      unc = std::max(unc, r.uncertainty);
    });
  }

  const double Co = tail_constant(cfg.spec);
  const double integral = tail_integral(cfg.rings, cfg.R, cfg.spec.s_min());

  EstimateReport rep;
  rep.name = cfg.label.empty() ? "ring-tail-bound" : cfg.label;
  rep.lhs = lhs;
  rep.rhs = Co * integral;
  rep.slack = 0.0;
  rep.provenance["C_o"] = Co;
  rep.provenance["tail_integral"] = integral;
  rep.provenance["eval_uncertainty"] = unc;
  rep.provenance["margin"] = rep.rhs - lhs - unc;
  rep.provenance["R"] = cfg.R;
  rep.notes.push_back("C_o sums the fractional blocks i = 1..m; blocks with s_i = 1 "
                      "contribute no tail");
  rep.finalize();
  return rep;
}

SweepResult rigidity_sweep(const SweepConfig& cfg) {
  const double sigma = 2.0 * cfg.spec.s_min() - 1.0;
  if (!(sigma > 0.0))
    throw std::invalid_argument("rigidity_sweep: requires sigma = 2 s_min - 1 > 0");
  if (cfg.R_list.size() != cfg.counts.size())
    throw std::invalid_argument("rigidity_sweep: need one grid per R");
  if (!std::is_sorted(cfg.R_list.begin(), cfg.R_list.end()) ||
      std::adjacent_find(cfg.R_list.begin(), cfg.R_list.end()) != cfg.R_list.end())
    throw std::invalid_argument("rigidity_sweep: R list must be strictly increasing");
  if (!std::isfinite(cfg.exterior.global_bound))
    throw std::invalid_argument("rigidity_sweep: exterior must be bounded");

  const int n = cfg.spec.n();
  const double M_ext = cfg.exterior.global_bound;

  SweepResult result;
  for (size_t c = 0; c < cfg.R_list.size(); ++c) {
    const double R = cfg.R_list[c];
    const double delta = R / (3.0 * std::sqrt(static_cast<double>(n)));
    std::vector<double> d(cfg.spec.m(), delta);

    // the source must not depend on the last coordinate
    const double S = oscillation_sup(cfg.f, cfg.spec.grouping, d, 24);
    if (S != 0.0)
      throw std::invalid_argument("rigidity_sweep: source depends on the last coordinate");

    const AnisotropicBox box = AnisotropicBox::make(d, 2.0);
    GridFunction fine =
        solve_dirichlet(cfg.spec, box, cfg.f, cfg.exterior, cfg.counts[c], cfg.quad);
    GridFunction coarse = solve_dirichlet(cfg.spec, box, cfg.f, cfg.exterior,
                                          halve_counts(cfg.counts[c]), cfg.quad);

    const double q_fine = directional_lipschitz_lhs(fine, delta);
    const double q_coarse = directional_lipschitz_lhs(coarse, delta);

    // rings beyond 2R lie entirely outside the box (circumradius delta sqrt 5),
    // so the exterior bound is a valid constant ring norm
    const double u6 = std::max(fine.nodal_max_abs(), M_ext);
    const double tail = tail_integral(RingNorms::constant(M_ext), R, cfg.spec.s_min());
    WeightedRhs rhs = weighted_estimate_rhs(cfg.spec, n, R, 0.0, u6, tail);

    SweepEntry e;
    e.R = R;
    e.quotient = q_fine;
    e.rhs_bound = rhs.value;
    e.slack = std::abs(q_fine - q_coarse);
    result.entries.push_back(e);
  }

  // least-squares slope of log(quotient) against log(R)
  {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int cnt = 0;
    for (const auto& e : result.entries) {
      if (e.quotient <= 0.0) continue;
      const double lx = std::log(e.R), ly = std::log(e.quotient);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++cnt;
    }
    result.fitted_exponent =
        cnt >= 2 ? (cnt * sxy - sx * sy) / (cnt * sxx - sx * sx) : 0.0;
  }

  result.quotient_decreasing = true;
  result.bound_decreasing = true;
  for (size_t i = 1; i < result.entries.size(); ++i) {
    if (!(result.entries[i].quotient < result.entries[i - 1].quotient))
      result.quotient_decreasing = false;
    if (!(result.entries[i].rhs_bound < result.entries[i - 1].rhs_bound))
      result.bound_decreasing = false;
  }
  result.notes.push_back("sigma = 2 min_i s_i - 1 over all m block exponents");
  return result;
}

ScalarField difference_quotient(const ScalarField& u, double t,
                                std::optional<double> lipschitz_bound) {
  if (t == 0.0) throw std::invalid_argument("difference_quotient: t must be nonzero");
  if (std::abs(t) > 1e-3)
    throw std::invalid_argument("difference_quotient: |t| must be <= 1/1000");
  ScalarField out;
  out.dim = u.dim;
  out.global_bound = 2.0 * u.global_bound / std::abs(t);
  if (lipschitz_bound) out.global_bound = std::min(out.global_bound, *lipschitz_bound);
  if (u.support_radius) out.support_radius = *u.support_radius + std::abs(t);
  const int last = u.dim - 1;
  auto fn = u.sample;
  out.sample = [fn, t, last](std::span<const double> x) {
    Point q(x.begin(), x.end());
    const double base = fn(q);
    q[last] += t;
    return (fn(q) - base) / t;
  };
  return out;
}

EstimateReport second_derivative_bound(const SecondDerivativeCase& cfg) {
  if (!cfg.f_dxn_lipschitz)
    throw std::invalid_argument(
        "second_derivative_bound: certified Lipschitz constant of f in x_n required");
  const int n = cfg.spec.n();
  const AnisotropicBox box =
      AnisotropicBox::make(std::vector<double>(cfg.spec.m(), 1.0), 2.0);
  GridFunction u =
      solve_dirichlet(cfg.spec, box, cfg.f, cfg.exterior, cfg.counts, cfg.quad);

  // discrete second derivative in the last coordinate over B_{97/100}
  const double hn = u.grid.h[n - 1];
  double lhs = 0.0;
  Point p(n);
  for_each_index(u.grid.counts, [&](long long flat, std::span<const int> idx) {
    u.grid.node_point(idx, p);
    double r2 = 0.0;
    for (double v : p) r2 += v * v;
    if (r2 > 0.97 * 0.97) return;
    std::vector<int> up(idx.begin(), idx.end()), dn(idx.begin(), idx.end());
    up[n - 1] += 1;
    dn[n - 1] -= 1;
    if (dn[n - 1] < 0 || up[n - 1] >= u.grid.counts[n - 1]) return;
    const double d2 =
        (u.value(up) - 2.0 * u.values[flat] + u.value(dn)) / (hn * hn);
    lhs = std::max(lhs, std::abs(d2));
  });

  const double f_norm = cfg.f.global_bound;
  const double u_norm = std::max(u.nodal_max_abs(), cfg.exterior.global_bound);
  const GradientBound inner = interior_gradient_bound(cfg.spec, f_norm, u_norm);
  const GradientBound outer = interior_gradient_bound_radii(cfg.spec, 0.97, 0.99,
                                                            f_norm, u_norm);
  const double C_a = inner.constant;
  const double C_b = outer.constant;
  const double rhs = C_b * (*cfg.f_dxn_lipschitz + C_a * (f_norm + u_norm));

  EstimateReport rep;
  rep.name = "second-derivative-bound";
  rep.lhs = lhs;
  rep.rhs = rhs;
  rep.slack = 0.0;
  rep.provenance["C_a"] = C_a;
  rep.provenance["C_b"] = C_b;
  rep.provenance["C"] = C_b * std::max(1.0, C_a);
  rep.provenance["f_dxn_lipschitz"] = *cfg.f_dxn_lipschitz;
  rep.provenance["f_norm"] = f_norm;
  rep.provenance["u_norm"] = u_norm;
  rep.finalize();
  return rep;
}

NonAdditivityReport non_additivity_demo(double s, const ScalarField& field,
                                        const QuadratureSpec& quad) {
  if (!(s > 0.0 && s < 1.0))
    throw std::invalid_argument("non_additivity_demo: exponent out of (0,1)");
  if (field.dim != 2)
    throw std::invalid_argument("non_additivity_demo: planar field required");

  const Point origin{0.0, 0.0};
  const QuadratureSpec fine = quad.refined(2.0);

  auto eval_pair = [&](const BlockSpec& blk) {
    EvalResult base = block_fraclap(field, origin, blk, quad);
    EvalResult ref = block_fraclap(field, origin, blk, fine);
    return std::pair<double, double>(
        base.value, base.uncertainty + ref.uncertainty + std::abs(base.value - ref.value));
  };

  auto [d1, u1] = eval_pair(BlockSpec{0, 1, s});
  auto [d2, u2] = eval_pair(BlockSpec{1, 1, s});
  auto [iso, u3] = eval_pair(BlockSpec{0, 2, s});

  NonAdditivityReport rep;
  rep.directional_sum = d1 + d2;
  rep.isotropic = iso;
  rep.gap = std::abs(rep.directional_sum - iso);
  rep.uncertainty = u1 + u2 + u3;
  rep.ratio = rep.uncertainty > 0.0 ? rep.gap / rep.uncertainty : kInf;
  rep.pass = rep.gap > 10.0 * rep.uncertainty;
  return rep;
}

}  // namespace aniso
