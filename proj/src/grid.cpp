#include "aniso/grid.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <fstream>
#include <memory>

#include "aniso/fraclap.hpp"
#include "aniso/special.hpp"

namespace aniso {

namespace {

double box_circumradius(const Grid& grid) {
  double acc = 0.0;
  for (double w : grid.halfwidth) acc += w * w;
  return std::sqrt(acc);
}

// closed-form integral of y^{1-2s} over (a, b)
double cell_moment(double a, double b, double s) {
  const double p = 2.0 - 2.0 * s;
  return (std::pow(b, p) - std::pow(a, p)) / p;
}

}  // namespace

Grid Grid::make(const CoordinateGrouping& g, const AnisotropicBox& box,
                std::vector<int> counts) {
  if (static_cast<int>(box.d.size()) != g.m())
    throw std::invalid_argument("grid: box radius count does not match grouping");
  for (int N : g.dims)
    if (N != 1)
      throw std::invalid_argument(
          "unsupported configuration: the grid solver requires size-1 coordinate blocks");
  if (static_cast<int>(counts.size()) != g.n())
    throw std::invalid_argument("grid: need one node count per axis");
  for (int M : counts)
    if (M < 1) throw std::invalid_argument("grid: node counts must be positive");

  Grid grid;
  grid.box = box;
  grid.grouping = g;
  grid.counts = std::move(counts);
  grid.halfwidth.resize(g.n());
  grid.h.resize(g.n());
  for (int j = 0; j < g.n(); ++j) {
    grid.halfwidth[j] = (j == g.n() - 1) ? box.kappa * box.d[j] : box.d[j];
    grid.h[j] = 2.0 * grid.halfwidth[j] / (grid.counts[j] + 1);
  }
  return grid;
}

long long Grid::size() const {
  long long total = 1;
  for (int M : counts) total *= M;
  return total;
}

void Grid::node_point(std::span<const int> idx, std::span<double> out) const {
  for (int j = 0; j < axes(); ++j) out[j] = coord(j, idx[j]);
}

void for_each_index(std::span<const int> counts,
                    const std::function<void(long long, std::span<const int>)>& fn) {
  const int n = static_cast<int>(counts.size());
  std::vector<int> idx(n, 0);
  long long flat = 0;
  while (true) {
    fn(flat, idx);
    ++flat;
    int j = n - 1;
    while (j >= 0 && ++idx[j] == counts[j]) idx[j--] = 0;
    if (j < 0) break;
  }
}

double GridFunction::value(std::span<const int> idx) const {
  long long flat = 0;
  for (int j = 0; j < grid.axes(); ++j) flat = flat * grid.counts[j] + idx[j];
  return values[flat];
}

double GridFunction::nodal_max_abs() const {
  return values.size() ? values.cwiseAbs().maxCoeff() : 0.0;
}

double GridFunction::interpolate(std::span<const double> x) const {
  const int n = grid.axes();
  for (int j = 0; j < n; ++j)
    if (std::abs(x[j]) >= grid.halfwidth[j]) return exterior(x);

  std::vector<int> i0(n);
  std::vector<double> frac(n);
  for (int j = 0; j < n; ++j) {
    const double t = (x[j] + grid.halfwidth[j]) / grid.h[j] - 1.0;
    double fl = std::floor(t);
    i0[j] = static_cast<int>(fl);
    frac[j] = t - fl;
  }

  double acc = 0.0;
  Point corner(n);
  const int ncorners = 1 << n;
  for (int mask = 0; mask < ncorners; ++mask) {
    double w = 1.0;
    bool in_range = true;
    for (int j = 0; j < n; ++j) {
      const int bit = (mask >> j) & 1;
      w *= bit ? frac[j] : (1.0 - frac[j]);
      const int ij = i0[j] + bit;
      if (ij < 0 || ij >= grid.counts[j]) in_range = false;
    }
    if (w == 0.0) continue;
    double v;
    if (in_range) {
      long long flat = 0;
      for (int j = 0; j < n; ++j) flat = flat * grid.counts[j] + (i0[j] + ((mask >> j) & 1));
      v = values[flat];
    } else {
      // wall corner: clamp the out-of-range coordinates to the box face and
      // sample the exterior there
      for (int j = 0; j < n; ++j) {
        const int ij = i0[j] + ((mask >> j) & 1);
        if (ij < 0)
          corner[j] = -grid.halfwidth[j];
        else if (ij >= grid.counts[j])
          corner[j] = grid.halfwidth[j];
        else
          corner[j] = grid.coord(j, ij);
      }
      v = exterior(corner);
    }
    acc += w * v;
  }
  return acc;
}

namespace {

double catmull_rom(double p0, double p1, double p2, double p3, double u) {
  return 0.5 * (2.0 * p1 + (-p0 + p2) * u + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u);
}

}  // namespace

double GridFunction::interpolate_smooth(std::span<const double> x) const {
  const int n = grid.axes();
  std::vector<int> i0(n);
  std::vector<double> frac(n);
  for (int j = 0; j < n; ++j) {
    if (std::abs(x[j]) >= grid.halfwidth[j]) return exterior(x);
    const double t = (x[j] + grid.halfwidth[j]) / grid.h[j] - 1.0;
    const double fl = std::floor(t);
    i0[j] = static_cast<int>(fl);
    frac[j] = t - fl;
    if (i0[j] - 1 < 0 || i0[j] + 2 >= grid.counts[j]) return interpolate(x);
  }
  // gather the 4^n stencil and collapse one axis at a time
  const int total = 1 << (2 * n);  // 4^n
  std::vector<double> buf(total);
  std::vector<int> idx(n);
  for (int c = 0; c < total; ++c) {
    int rem = c;
    long long flat = 0;
    for (int j = 0; j < n; ++j) {
      const int o = rem & 3;
      rem >>= 2;
      flat = flat * grid.counts[j] + (i0[j] - 1 + o);
    }
    buf[c] = values[flat];
  }
  // axis 0 offsets occupy the low bits, so consecutive 4-blocks vary axis 0:
  // collapse in ascending axis order
  int len = total;
  for (int j = 0; j < n; ++j) {
    len >>= 2;
    for (int c = 0; c < len; ++c) {
      buf[c] = catmull_rom(buf[4 * c + 0], buf[4 * c + 1], buf[4 * c + 2], buf[4 * c + 3],
                           frac[j]);
    }
  }
  return buf[0];
}

ScalarField GridFunction::as_field() const {
  auto self = std::make_shared<GridFunction>(*this);
  ScalarField f;
  f.dim = grid.axes();
  f.global_bound = std::max(nodal_max_abs(), exterior.global_bound);
  if (exterior.support_radius)
    f.support_radius = std::max(*exterior.support_radius, box_circumradius(grid));
  f.sample = [self](std::span<const double> x) { return self->interpolate(x); };
  return f;
}

ScalarField GridFunction::as_smooth_field() const {
  auto self = std::make_shared<GridFunction>(*this);
  ScalarField f;
  f.dim = grid.axes();
  f.global_bound = 1.5 * std::max(nodal_max_abs(), exterior.global_bound);
  if (exterior.support_radius)
    f.support_radius = std::max(*exterior.support_radius, box_circumradius(grid));
  f.sample = [self](std::span<const double> x) { return self->interpolate_smooth(x); };
  return f;
}

void GridFunction::write_csv(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("write_csv: cannot open " + path);
  const int n = grid.axes();
  for (int j = 0; j < n; ++j) out << "x" << (j + 1) << ",";
  out << "value\n";
  out.precision(17);
  Point p(n);
  for_each_index(grid.counts, [&](long long flat, std::span<const int> idx) {
    grid.node_point(idx, p);
    for (int j = 0; j < n; ++j) out << p[j] << ",";
    out << values[flat] << "\n";
  });
}

Eigen::VectorXd OperatorMatrix::apply(const Eigen::VectorXd& u) const {
  const int n = grid.axes();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(u.size());
  for (int axis = 0; axis < n; ++axis) {
    const Eigen::MatrixXd& op = axis_ops[axis];
    if (op.size() == 0 || op.isZero(0.0)) continue;
    const int M = grid.counts[axis];
    long long stride = 1;
    for (int j = axis + 1; j < n; ++j) stride *= grid.counts[j];
    long long blocks = 1;
    for (int j = 0; j < axis; ++j) blocks *= grid.counts[j];
    for (long long b = 0; b < blocks; ++b) {
      for (long long i = 0; i < stride; ++i) {
        const long long base = b * M * stride + i;
        Eigen::Map<const Eigen::VectorXd, 0, Eigen::InnerStride<>> src(
            u.data() + base, M, Eigen::InnerStride<>(stride));
        Eigen::Map<Eigen::VectorXd, 0, Eigen::InnerStride<>> dst(
            y.data() + base, M, Eigen::InnerStride<>(stride));
        dst.noalias() += op * src;
      }
    }
  }
  return y;
}

Eigen::MatrixXd OperatorMatrix::dense() const {
  const long long N = size();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N, N);
  const int n = grid.axes();
  std::vector<int> idx(n);
  for_each_index(grid.counts, [&](long long flat, std::span<const int> ix) {
    for (int axis = 0; axis < n; ++axis) {
      const Eigen::MatrixXd& op = axis_ops[axis];
      if (op.size() == 0) continue;
      long long stride = 1;
      for (int j = axis + 1; j < n; ++j) stride *= grid.counts[j];
      for (int k = 0; k < grid.counts[axis]; ++k) {
        const double v = op(ix[axis], k);
        if (v == 0.0) continue;
        const long long col = flat + (k - ix[axis]) * stride;
        A(flat, col) += v;
      }
    }
  });
  return A;
}

namespace {

// per-axis stencil data for one fractional (s < 1) axis
struct FractionalStencil {
  double c = 0.0;     // a_i * c_{1,s}
  double sing = 0.0;  // singular-cell coefficient applied to the step-h difference
  std::vector<double> wgt;  // cell weights, index 1..K
  int K = 0;
  double tail_edge = 0.0;
  double tail_weight = 0.0;
};

FractionalStencil make_fractional_stencil(double coeff, double s, double h,
                                          double halfwidth, int M) {
  FractionalStencil st;
  st.c = coeff * kernel_constant(1, s);
  st.K = std::max(M + 1, static_cast<int>(std::ceil(4.0 * halfwidth / h)));
  st.sing = 2.0 * std::pow(h, 2.0 - 2.0 * s) / (2.0 - 2.0 * s) / (h * h);
  st.wgt.assign(st.K + 1, 0.0);
  for (int k = 1; k <= st.K; ++k) {
    const double lo = (k == 1) ? h : (k - 0.5) * h;
    const double hi = (k + 0.5) * h;
    st.wgt[k] = cell_moment(lo, hi, s) / (k * h * k * h);
  }
  st.tail_edge = (st.K + 0.5) * h;
  st.tail_weight = std::pow(st.tail_edge, -2.0 * s) / (2.0 * s);
  return st;
}

}  // namespace

OperatorMatrix assemble(const OperatorSpec& spec, const Grid& grid,
                        const ScalarField& exterior, const QuadratureSpec& quad) {
  quad.validate();
  const int n = grid.axes();
  if (spec.n() != n) throw std::invalid_argument("assemble: spec/grid mismatch");
  if (exterior.dim != n)
    throw std::invalid_argument("assemble: exterior field dimension mismatch");
  for (int i = 0; i < spec.m(); ++i)
    if (spec.a[i] > 0.0 && spec.s[i] < 1.0 && spec.grouping.dims[i] != 1)
      throw std::invalid_argument(
          "unsupported configuration: fractional blocks of size >= 2 cannot be assembled");
  const bool compact_ext = exterior.support_radius.has_value();
  if (!compact_ext && !std::isfinite(exterior.global_bound))
    throw std::invalid_argument(
        "assemble: exterior field needs a global bound or compact support");

  OperatorMatrix out;
  out.grid = grid;
  out.axis_ops.resize(n);
  out.rhs_correction = Eigen::VectorXd::Zero(grid.size());

  // with size-1 blocks, axis j corresponds to group j
  std::vector<FractionalStencil> stencil(n);
  for (int axis = 0; axis < n; ++axis) {
    const int M = grid.counts[axis];
    const double h = grid.h[axis];
    const double coeff = spec.a[axis];
    const double s = spec.s[axis];
    Eigen::MatrixXd& op = out.axis_ops[axis];
    op = Eigen::MatrixXd::Zero(M, M);
    if (coeff == 0.0) continue;

    if (s == 1.0) {
      const double w = coeff / (h * h);
      for (int i = 0; i < M; ++i) {
        op(i, i) = 2.0 * w;
        if (i > 0) op(i, i - 1) = -w;
        if (i + 1 < M) op(i, i + 1) = -w;
      }
      continue;
    }

    const FractionalStencil& st = stencil[axis] =
        make_fractional_stencil(coeff, s, h, grid.halfwidth[axis], M);
    double diag = 2.0 * st.sing + 4.0 * st.tail_weight;
    for (int k = 1; k <= st.K; ++k) diag += 4.0 * st.wgt[k];
    for (int i = 0; i < M; ++i) {
      op(i, i) = st.c * diag;
      if (i > 0) op(i, i - 1) -= st.c * st.sing;
      if (i + 1 < M) op(i, i + 1) -= st.c * st.sing;
      for (int k = 1; k <= st.K; ++k) {
        if (i - k >= 0) op(i, i - k) -= 2.0 * st.c * st.wgt[k];
        if (i + k < M) op(i, i + k) -= 2.0 * st.c * st.wgt[k];
      }
    }
  }

  // exterior references -> right-hand-side correction
  Point node(n);
  Point foot(n);
  for_each_index(grid.counts, [&](long long flat, std::span<const int> idx) {
    grid.node_point(idx, node);
    double ext_acc = 0.0;
    for (int axis = 0; axis < n; ++axis) {
      const double coeff = spec.a[axis];
      if (coeff == 0.0) continue;
      const int M = grid.counts[axis];
      const double h = grid.h[axis];
      const double s = spec.s[axis];
      const int i = idx[axis];
      foot.assign(node.begin(), node.end());

      if (s == 1.0) {
        const double w = coeff / (h * h);
        if (i == 0) {
          foot[axis] = node[axis] - h;
          ext_acc += w * exterior(foot);
        }
        if (i == M - 1) {
          foot[axis] = node[axis] + h;
          ext_acc += w * exterior(foot);
        }
        continue;
      }

      const FractionalStencil& st = stencil[axis];
      // stencil feet that leave the grid
      for (int sgn : {-1, 1}) {
        const int edge = sgn < 0 ? i : M - 1 - i;  // feet beyond this offset are exterior
        for (int k = edge + 1; k <= st.K; ++k) {
          foot[axis] = node[axis] + sgn * k * h;
          double wtotal = 2.0 * st.wgt[k];
          if (k == 1) wtotal += st.sing;  // singular-cell neighbor
          ext_acc += st.c * wtotal * exterior(foot);
        }
      }
      // analytic tail beyond the stencil reach, integrated against the exterior
      double stop;
      if (compact_ext) {
        double xnorm = 0.0;
        for (double xv : node) xnorm += xv * xv;
        stop = std::sqrt(xnorm) + *exterior.support_radius;
        if (stop <= st.tail_edge) continue;
      } else {
        stop = std::max(quad.truncation_radius, 2.0 * st.tail_edge);
      }
      auto line = [&](double y) {
        Point q(node.begin(), node.end());
        q[axis] = node[axis] + y;
        double v = exterior(q);
        q[axis] = node[axis] - y;
        v += exterior(q);
        return v * std::pow(y, -1.0 - 2.0 * s);
      };
      AdaptiveIntegral ti = integrate_log_adaptive(
          line, st.tail_edge, stop, quad.panels_per_decade,
          quad.target_rel_tol * exterior.global_bound *
              std::pow(st.tail_edge, -2.0 * s));
      ext_acc += 2.0 * st.c * ti.value;
      if (!compact_ext) {
        // beyond the stop radius: freeze the exterior at the cut (exact for
        // constants) and certify the rest through the global bound
        foot[axis] = node[axis] + stop;
        double frozen = exterior(foot);
        foot[axis] = node[axis] - stop;
        frozen += exterior(foot);
        const double t_stop = std::pow(stop, -2.0 * s) / (2.0 * s);
        const double rem_est = 2.0 * st.c * frozen * t_stop;
        ext_acc += rem_est;
        const double rem_bound = 4.0 * st.c * exterior.global_bound * t_stop;
        out.rhs_uncertainty =
            std::max(out.rhs_uncertainty,
                     rem_bound + std::abs(rem_est) + 2.0 * st.c * ti.err_est);
      }
    }
    out.rhs_correction[flat] = ext_acc;
  });

  return out;
}

namespace {

// applies the matrix (or its transpose-equal) along one tensor axis
void apply_axis_matrix(const Eigen::MatrixXd& V, bool transpose, int axis,
                       std::span<const int> counts, Eigen::VectorXd& vec) {
  const int n = static_cast<int>(counts.size());
  const int M = counts[axis];
  long long stride = 1;
  for (int j = axis + 1; j < n; ++j) stride *= counts[j];
  long long blocks = 1;
  for (int j = 0; j < axis; ++j) blocks *= counts[j];
  Eigen::VectorXd tmp(M);
  for (long long b = 0; b < blocks; ++b) {
    for (long long i = 0; i < stride; ++i) {
      const long long base = b * M * stride + i;
      Eigen::Map<Eigen::VectorXd, 0, Eigen::InnerStride<>> slice(
          vec.data() + base, M, Eigen::InnerStride<>(stride));
      if (transpose)
        tmp.noalias() = V.transpose() * slice;
      else
        tmp.noalias() = V * slice;
      slice = tmp;
    }
  }
}

}  // namespace

GridFunction solve_dirichlet(const OperatorSpec& spec, const AnisotropicBox& box,
                             const ScalarField& f, const ScalarField& exterior,
                             std::vector<int> counts, const QuadratureSpec& quad,
                             SolveInfo* info) {
  Grid grid = Grid::make(spec.grouping, box, std::move(counts));
  if (f.dim != grid.axes())
    throw std::invalid_argument("solve_dirichlet: source field dimension mismatch");
  OperatorMatrix matrix = assemble(spec, grid, exterior, quad);

  Eigen::VectorXd b(grid.size());
  Point p(grid.axes());
  for_each_index(grid.counts, [&](long long flat, std::span<const int> idx) {
    grid.node_point(idx, p);
    b[flat] = f(p) + matrix.rhs_correction[flat];
  });

  // eigendecompose each axis operator; the Kronecker sum is diagonal in the
  // tensor product eigenbasis
  const int n = grid.axes();
  std::vector<Eigen::MatrixXd> V(n);
  std::vector<Eigen::VectorXd> lam(n);
  for (int axis = 0; axis < n; ++axis) {
    const int M = grid.counts[axis];
    if (matrix.axis_ops[axis].size() == 0 || matrix.axis_ops[axis].isZero(0.0)) {
      V[axis] = Eigen::MatrixXd::Identity(M, M);
      lam[axis] = Eigen::VectorXd::Zero(M);
      continue;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(matrix.axis_ops[axis]);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("solve_dirichlet: axis eigendecomposition failed");
    V[axis] = es.eigenvectors();
    lam[axis] = es.eigenvalues();
  }

  auto spectral_solve = [&](const Eigen::VectorXd& rhs) {
    Eigen::VectorXd w = rhs;
    for (int axis = 0; axis < n; ++axis)
      apply_axis_matrix(V[axis], true, axis, grid.counts, w);
    std::vector<int> idx(n, 0);
    for_each_index(grid.counts, [&](long long flat, std::span<const int> ix) {
      double l = 0.0;
      for (int axis = 0; axis < n; ++axis) l += lam[axis][ix[axis]];
      if (!(l > 0.0))
        throw std::runtime_error("solve_dirichlet: operator not positive definite");
      w[flat] /= l;
    });
    for (int axis = 0; axis < n; ++axis)
      apply_axis_matrix(V[axis], false, axis, grid.counts, w);
    return w;
  };

  Eigen::VectorXd u = spectral_solve(b);
  const double bnorm = b.norm();
  double rel_res = 0.0;
  if (bnorm > 0.0) {
    Eigen::VectorXd r = b - matrix.apply(u);
    rel_res = r.norm() / bnorm;
    if (rel_res > 1e-12) {  // one round of iterative refinement
      u += spectral_solve(r);
      r = b - matrix.apply(u);
      rel_res = r.norm() / bnorm;
    }
    if (rel_res > 1e-10)
      throw std::runtime_error("solve_dirichlet: residual " + std::to_string(rel_res) +
                               " exceeds 1e-10");
  }

  if (info) {
    info->unknowns = grid.size();
    info->rel_residual = rel_res;
    info->rhs_uncertainty = matrix.rhs_uncertainty;
  }

  GridFunction gf;
  gf.grid = grid;
  gf.values = std::move(u);
  gf.exterior = exterior;
  return gf;
}

Eigen::VectorXd discrete_apply(const OperatorMatrix& matrix, const GridFunction& u) {
  if (!(u.grid == matrix.grid))
    throw std::invalid_argument("discrete_apply: grid mismatch");
  return matrix.apply(u.values) - matrix.rhs_correction;
}

ComparisonReport comparison_check(const OperatorMatrix& matrix) {
  ComparisonReport rep;
  for (int axis = 0; axis < matrix.grid.axes(); ++axis) {
    const Eigen::MatrixXd& A = matrix.axis_ops[axis];
    if (A.size() == 0 || A.isZero(0.0)) continue;  // degenerate coefficient
    ++rep.checked_axes;
    const double scale = A.cwiseAbs().maxCoeff();
    const double tol = 1e-12 * scale;
    const int M = static_cast<int>(A.rows());
    for (int i = 0; i < M; ++i) {
      if (!(A(i, i) > 0.0))
        rep.violations.push_back({axis, i, i, A(i, i), "nonpositive diagonal"});
      double offsum = 0.0;
      for (int j = 0; j < M; ++j) {
        if (i == j) continue;
        if (A(i, j) > tol)
          rep.violations.push_back({axis, i, j, A(i, j), "positive off-diagonal"});
        if (std::abs(A(i, j) - A(j, i)) > tol)
          rep.violations.push_back({axis, i, j, A(i, j) - A(j, i), "asymmetry"});
        offsum += std::abs(A(i, j));
      }
      if (A(i, i) - offsum < -1e-10 * scale)
        rep.violations.push_back(
            {axis, i, i, A(i, i) - offsum, "diagonal dominance failure"});
    }
  }
  rep.pass = rep.violations.empty();
  return rep;
}

}  // namespace aniso
