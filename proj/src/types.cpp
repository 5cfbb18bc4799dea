#include "aniso/types.hpp"

#include <algorithm>
#include <numeric>

namespace aniso {

CoordinateGrouping CoordinateGrouping::make(std::vector<int> dims) {
  if (dims.empty())
    throw std::invalid_argument("grouping: at least one block required");
  for (int N : dims)
    if (N < 1) throw std::invalid_argument("grouping: block sizes must be positive");
  if (dims.back() != 1)
    throw std::invalid_argument("grouping: last block must have size 1");
  CoordinateGrouping g;
  g.dims = std::move(dims);
  g.offsets.resize(g.dims.size());
  std::partial_sum(g.dims.begin(), g.dims.end(), g.offsets.begin());
  return g;
}

Point embed_increment(const CoordinateGrouping& g, int i, std::span<const double> y) {
  if (i < 0 || i >= g.m())
    throw std::invalid_argument("embed_increment: group index out of range");
  if (static_cast<int>(y.size()) != g.dims[i])
    throw std::invalid_argument("embed_increment: increment size mismatch");
  Point out(g.n(), 0.0);
  const int off = g.offset_of(i);
  for (int c = 0; c < g.dims[i]; ++c) out[off + c] = y[c];
  return out;
}

OperatorSpec OperatorSpec::make(std::vector<int> dims, std::vector<double> s,
                                std::vector<double> a) {
  OperatorSpec spec;
  spec.grouping = CoordinateGrouping::make(std::move(dims));
  const int m = spec.grouping.m();
  if (static_cast<int>(s.size()) != m || static_cast<int>(a.size()) != m)
    throw std::invalid_argument("operator: need one exponent and one coefficient per block");
  for (double si : s)
    if (!(si > 0.0 && si <= 1.0))
      throw std::invalid_argument("operator: exponent out of (0,1]");
  if (s.back() != 1.0)
    throw std::invalid_argument("operator: last exponent must be exactly 1");
  for (double ai : a)
    if (!(ai >= 0.0) || !std::isfinite(ai))
      throw std::invalid_argument("operator: coefficients must be finite and >= 0");
  if (!(a.back() > 0.0))
    throw std::invalid_argument("operator: local coefficient must be positive");
  spec.s = std::move(s);
  spec.a = std::move(a);
  return spec;
}

double OperatorSpec::s_min() const { return *std::min_element(s.begin(), s.end()); }
double OperatorSpec::s_max() const { return *std::max_element(s.begin(), s.end()); }
double OperatorSpec::a_min() const { return *std::min_element(a.begin(), a.end()); }
double OperatorSpec::a_max() const { return *std::max_element(a.begin(), a.end()); }

AnisotropicBox AnisotropicBox::make(std::vector<double> d, double kappa) {
  for (double di : d)
    if (!(di > 0.0) || !std::isfinite(di))
      throw std::invalid_argument("box: radii must be positive");
  if (d.empty()) throw std::invalid_argument("box: at least one radius required");
  if (!(kappa > 0.0)) throw std::invalid_argument("box: kappa must be positive");
  AnisotropicBox b;
  b.d = std::move(d);
  b.kappa = kappa;
  return b;
}

bool AnisotropicBox::contains(const CoordinateGrouping& g,
                              std::span<const double> x) const {
  if (static_cast<int>(d.size()) != g.m())
    throw std::invalid_argument("box: radius count does not match grouping");
  if (static_cast<int>(x.size()) != g.n())
    throw std::invalid_argument("box: point dimension mismatch");
  for (int i = 0; i < g.m(); ++i) {
    const int off = g.offset_of(i);
    double nrm2 = 0.0;
    for (int c = 0; c < g.dims[i]; ++c) nrm2 += x[off + c] * x[off + c];
    const double radius = (i == g.m() - 1) ? kappa * d[i] : d[i];
    if (!(nrm2 < radius * radius)) return false;
  }
  return true;
}

void QuadratureSpec::validate() const {
  if (!(singular_radius > 0.0))
    throw std::invalid_argument("quadrature: r0 must be positive");
  if (!(truncation_radius > singular_radius))
    throw std::invalid_argument("quadrature: Rcut must exceed r0");
  if (panels_per_decade < 1)
    throw std::invalid_argument("quadrature: ppd must be positive");
  if (!(local_step > 0.0))
    throw std::invalid_argument("quadrature: hloc must be positive");
  if (!(target_rel_tol > 0.0))
    throw std::invalid_argument("quadrature: rtol must be positive");
}

QuadratureSpec QuadratureSpec::refined(double factor) const {
  QuadratureSpec q = *this;
  q.singular_radius /= factor;
  q.truncation_radius *= factor;
  q.panels_per_decade = static_cast<int>(panels_per_decade * factor);
  q.local_step /= factor;
  return q;
}

}  // namespace aniso
