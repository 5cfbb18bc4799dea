#include "aniso/fields.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

namespace aniso {

double smooth_step(double t) {
  if (t <= 0.0) return 0.0;
  if (t >= 1.0) return 1.0;
  const double a = std::exp(-1.0 / t);
  const double b = std::exp(-1.0 / (1.0 - t));
  return a / (a + b);
}

double smooth_bump(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

namespace {

double norm(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return std::sqrt(acc);
}

int levenshtein(const std::string& a, const std::string& b) {
  std::vector<int> prev(b.size() + 1), cur(b.size() + 1);
  for (size_t j = 0; j <= b.size(); ++j) prev[j] = static_cast<int>(j);
  for (size_t i = 1; i <= a.size(); ++i) {
    cur[0] = static_cast<int>(i);
    for (size_t j = 1; j <= b.size(); ++j) {
      const int sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

class ParamReader {
 public:
  ParamReader(const std::string& field, const std::map<std::string, double>& params)
      : field_(field), params_(params) {}

  double get(const std::string& key, double fallback) {
    used_.insert(key);
    auto it = params_.find(key);
    return it == params_.end() ? fallback : it->second;
  }

  double require(const std::string& key) {
    used_.insert(key);
    auto it = params_.find(key);
    if (it == params_.end())
      throw std::invalid_argument("field '" + field_ + "': missing parameter '" + key + "'");
    return it->second;
  }

  // per-axis parameters prefix1..prefixN
  std::vector<double> axis_values(const std::string& prefix, int dim, double fallback) {
    std::vector<double> out(dim);
    for (int j = 0; j < dim; ++j)
      out[j] = get(prefix + std::to_string(j + 1), fallback);
    return out;
  }

  void finish() const {
    for (const auto& [key, value] : params_) {
      (void)value;
      if (!used_.count(key))
        throw std::invalid_argument("field '" + field_ + "': unknown parameter '" + key + "'");
    }
  }

 private:
  std::string field_;
  const std::map<std::string, double>& params_;
  std::set<std::string> used_;
};

}  // namespace

const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"zero", "identically zero", {}},
      {"constant", "constant value", {{"value", 1.0, false, "the constant"}}},
      {"bump",
       "radial C-infinity bump supported in |x| < radius",
       {{"amp", 1.0, false, "amplitude"}, {"radius", 1.0, false, "support radius"}}},
      {"bump_product",
       "product of per-axis C-infinity bumps, supported in |x_j| < r_j",
       {{"amp", 1.0, false, "amplitude"},
        {"r1", 1.0, false, "per-axis radii r1..rn (default 1)"}}},
      {"cosine",
       "amp cos(k.x + phase); bounded, no compact support",
       {{"amp", 1.0, false, "amplitude"},
        {"k1", 0.0, false, "per-axis wavenumbers k1..kn"},
        {"phase", 0.0, false, "phase shift"}}},
      {"gaussian",
       "amp exp(-|x|^2 / width^2); bounded, no compact support",
       {{"amp", 1.0, false, "amplitude"}, {"width", 1.0, false, "width"}}},
      {"power_bump",
       "amp (radius^2 - |x|^2)_+^exponent",
       {{"amp", 1.0, false, "amplitude"},
        {"radius", 1.0, false, "support radius"},
        {"exponent", 0.5, false, "power of the positive part"}}},
      {"odd_bump",
       "amp x_n times a radial C-infinity bump; odd in the last coordinate",
       {{"amp", 1.0, false, "amplitude"}, {"radius", 1.0, false, "support radius"}}},
      {"axis_bump",
       "C-infinity bump in a single coordinate, constant in the others",
       {{"amp", 1.0, false, "amplitude"},
        {"radius", 1.0, false, "support radius along the axis"},
        {"axis", 1.0, false, "1-based coordinate index"}}},
      {"annulus",
       "radial C-infinity bump supported in r_inner <= |x| <= r_outer",
       {{"amp", 1.0, false, "amplitude"},
        {"r_inner", 2.0, true, "inner support radius"},
        {"r_outer", 3.0, true, "outer support radius"}}},
      {"axis_annulus",
       "C-infinity annulus profile in a single coordinate, constant in the others",
       {{"amp", 1.0, false, "amplitude"},
        {"r_inner", 2.0, true, "inner support radius"},
        {"r_outer", 3.0, true, "outer support radius"},
        {"axis", 1.0, false, "1-based coordinate index"}}},
      {"growing_annulus",
       "radial profile amp |x|^growth between r_inner and r_outer with smooth ramps",
       {{"amp", 1.0, false, "amplitude"},
        {"r_inner", 2.0, true, "inner support radius"},
        {"r_outer", 20.0, true, "outer support radius"},
        {"growth", 0.0, false, "power growth of the envelope"}}},
  };
  return catalog;
}

ScalarField make_builtin(const std::string& name,
                         const std::map<std::string, double>& params, int dim) {
  if (dim < 1) throw std::invalid_argument("make_builtin: dim must be >= 1");
  const auto& catalog = builtin_catalog();
  const bool known = std::any_of(catalog.begin(), catalog.end(),
                                 [&](const BuiltinInfo& b) { return b.name == name; });
  if (!known) {
    std::vector<std::pair<int, std::string>> ranked;
    for (const auto& b : catalog) ranked.emplace_back(levenshtein(name, b.name), b.name);
    std::sort(ranked.begin(), ranked.end());
    std::ostringstream msg;
    msg << "unknown field '" << name << "'; nearest matches:";
    for (size_t i = 0; i < ranked.size() && i < 3; ++i) msg << " " << ranked[i].second;
    throw std::invalid_argument(msg.str());
  }

  ParamReader rd(name, params);
  ScalarField f;
  f.dim = dim;

  if (name == "zero") {
    f.global_bound = 0.0;
    f.support_radius = 0.0;
    f.sample = [](std::span<const double>) { return 0.0; };
  } else if (name == "constant") {
    const double v = rd.get("value", 1.0);
    f.global_bound = std::abs(v);
    f.sample = [v](std::span<const double>) { return v; };
  } else if (name == "bump") {
    const double amp = rd.get("amp", 1.0);
    const double radius = rd.get("radius", 1.0);
    if (!(radius > 0.0)) throw std::invalid_argument("bump: radius must be positive");
    f.global_bound = std::abs(amp);
    f.support_radius = radius;
    f.sample = [amp, radius](std::span<const double> x) {
      return amp * smooth_bump(norm(x) / radius);
    };
  } else if (name == "bump_product") {
    const double amp = rd.get("amp", 1.0);
    std::vector<double> r = rd.axis_values("r", dim, 1.0);
    double circ = 0.0;
    for (double rj : r) {
      if (!(rj > 0.0)) throw std::invalid_argument("bump_product: radii must be positive");
      circ += rj * rj;
    }
    f.global_bound = std::abs(amp);
    f.support_radius = std::sqrt(circ);
    f.sample = [amp, r](std::span<const double> x) {
      double v = amp;
      for (size_t j = 0; j < r.size(); ++j) {
        v *= smooth_bump(x[j] / r[j]);
        if (v == 0.0) break;
      }
      return v;
    };
  } else if (name == "cosine") {
    const double amp = rd.get("amp", 1.0);
    const double phase = rd.get("phase", 0.0);
    std::vector<double> k = rd.axis_values("k", dim, 0.0);
    f.global_bound = std::abs(amp);
    f.sample = [amp, phase, k](std::span<const double> x) {
      double arg = phase;
      for (size_t j = 0; j < k.size(); ++j) arg += k[j] * x[j];
      return amp * std::cos(arg);
    };
  } else if (name == "gaussian") {
    const double amp = rd.get("amp", 1.0);
    const double width = rd.get("width", 1.0);
    if (!(width > 0.0)) throw std::invalid_argument("gaussian: width must be positive");
    f.global_bound = std::abs(amp);
    f.sample = [amp, width](std::span<const double> x) {
      const double r = norm(x) / width;
      return amp * std::exp(-r * r);
    };
  } else if (name == "power_bump") {
    const double amp = rd.get("amp", 1.0);
    const double radius = rd.get("radius", 1.0);
    const double expn = rd.get("exponent", 0.5);
    if (!(radius > 0.0) || !(expn > 0.0))
      throw std::invalid_argument("power_bump: radius and exponent must be positive");
    f.global_bound = std::abs(amp) * std::pow(radius, 2.0 * expn);
    f.support_radius = radius;
    f.sample = [amp, radius, expn](std::span<const double> x) {
      double acc = radius * radius;
      for (double v : x) acc -= v * v;
      return acc > 0.0 ? amp * std::pow(acc, expn) : 0.0;
    };
  } else if (name == "odd_bump") {
    const double amp = rd.get("amp", 1.0);
    const double radius = rd.get("radius", 1.0);
    if (!(radius > 0.0)) throw std::invalid_argument("odd_bump: radius must be positive");
    f.global_bound = std::abs(amp) * radius;
    f.support_radius = radius;
    const int last = dim - 1;
    f.sample = [amp, radius, last](std::span<const double> x) {
      return amp * x[last] * smooth_bump(norm(x) / radius);
    };
  } else if (name == "axis_bump") {
    const double amp = rd.get("amp", 1.0);
    const double radius = rd.get("radius", 1.0);
    const int axis = static_cast<int>(rd.get("axis", 1.0)) - 1;
    if (!(radius > 0.0)) throw std::invalid_argument("axis_bump: radius must be positive");
    if (axis < 0 || axis >= dim)
      throw std::invalid_argument("axis_bump: axis out of range");
    f.global_bound = std::abs(amp);
    if (dim == 1) f.support_radius = radius;
    f.sample = [amp, radius, axis](std::span<const double> x) {
      return amp * smooth_bump(x[axis] / radius);
    };
  } else if (name == "annulus" || name == "axis_annulus") {
    const double amp = rd.get("amp", 1.0);
    const double ri = rd.require("r_inner");
    const double ro = rd.require("r_outer");
    if (!(0.0 < ri && ri < ro))
      throw std::invalid_argument(name + ": need 0 < r_inner < r_outer");
    const double mid = 0.5 * (ri + ro), halfw = 0.5 * (ro - ri);
    auto profile = [amp, mid, halfw](double r) {
      return amp * smooth_bump((r - mid) / halfw);
    };
    f.global_bound = std::abs(amp);
    if (name == "annulus") {
      f.support_radius = ro;
      f.sample = [profile](std::span<const double> x) { return profile(norm(x)); };
    } else {
      const int axis = static_cast<int>(rd.get("axis", 1.0)) - 1;
      if (axis < 0 || axis >= dim)
        throw std::invalid_argument("axis_annulus: axis out of range");
      if (dim == 1) f.support_radius = ro;
      f.sample = [profile, axis](std::span<const double> x) {
        return profile(std::abs(x[axis]));
      };
    }
  } else if (name == "growing_annulus") {
    const double amp = rd.get("amp", 1.0);
    const double ri = rd.require("r_inner");
    const double ro = rd.require("r_outer");
    const double growth = rd.get("growth", 0.0);
    if (!(0.0 < ri && ri < ro))
      throw std::invalid_argument("growing_annulus: need 0 < r_inner < r_outer");
    f.global_bound = std::abs(amp) * std::pow(ro, std::max(growth, 0.0)) *
                     std::pow(ri, std::min(growth, 0.0));
    f.support_radius = ro;
    f.sample = [amp, ri, ro, growth](std::span<const double> x) {
      const double r = norm(x);
      if (r <= ri || r >= ro) return 0.0;
      const double up = smooth_step((r - ri) / (0.125 * ri));
      const double down = smooth_step((ro - r) / (0.125 * ro));
      return amp * std::pow(r, growth) * up * down;
    };
  }

  rd.finish();
  return f;
}

}  // namespace aniso
