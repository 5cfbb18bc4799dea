#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "aniso/fields.hpp"
#include "aniso/fraclap.hpp"
#include "aniso/grid.hpp"

using namespace aniso;

namespace {

OperatorSpec spec2(double s1, double a1 = 1.0, double a = 1.0) {
  return OperatorSpec::make({1, 1}, {s1, 1.0}, {a1, a});
}

const AnisotropicBox kBox = AnisotropicBox::make({1.0, 1.0}, 2.0);

ScalarField zero2() { return make_builtin("zero", {}, 2); }

}  // namespace

TEST_CASE("grid geometry") {
  Grid g = Grid::make(spec2(0.5).grouping, kBox, {31, 63});
  CHECK(g.halfwidth == std::vector<double>{1.0, 2.0});
  CHECK(g.h[0] == doctest::Approx(2.0 / 32.0));
  CHECK(g.h[1] == doctest::Approx(4.0 / 64.0));
  CHECK(g.coord(0, 0) == doctest::Approx(-1.0 + g.h[0]));
  CHECK(g.coord(0, 30) == doctest::Approx(1.0 - g.h[0]));
  CHECK(g.size() == 31 * 63);

  // multi-dimensional blocks are not assemblable on tensor grids
  auto g3 = CoordinateGrouping::make({2, 1});
  CHECK_THROWS_AS(Grid::make(g3, AnisotropicBox::make({1.0, 1.0}), {5, 5, 5}),
                  std::invalid_argument);
}

TEST_CASE("degenerate fractional coefficient leaves the classical stencil") {
  OperatorSpec spec = spec2(0.5, 0.0, 2.0);
  Grid grid = Grid::make(spec.grouping, kBox, {9, 9});
  OperatorMatrix A = assemble(spec, grid, zero2());
  CHECK(A.axis_ops[0].isZero(0.0));
  const double w = 2.0 / (grid.h[1] * grid.h[1]);
  CHECK(A.axis_ops[1](4, 4) == doctest::Approx(2.0 * w));
  CHECK(A.axis_ops[1](4, 5) == doctest::Approx(-w));
  CHECK(comparison_check(A).pass);
}

TEST_CASE("fractional axis rows sum to a nonnegative value") {
  OperatorSpec spec = spec2(0.5);
  Grid grid = Grid::make(spec.grouping, kBox, {17, 17});
  OperatorMatrix A = assemble(spec, grid, zero2());
  const Eigen::MatrixXd& F = A.axis_ops[0];
  for (int i = 0; i < F.rows(); ++i) CHECK(F.row(i).sum() >= -1e-12);
}

TEST_CASE("assembled matrices satisfy the comparison structure") {
  for (double s : {0.3, 0.6, 0.9}) {
    OperatorSpec spec = spec2(s);
    Grid grid = Grid::make(spec.grouping, kBox, {15, 31});
    OperatorMatrix A = assemble(spec, grid, zero2());
    ComparisonReport rep = comparison_check(A);
    CHECK(rep.pass);
    CHECK(rep.checked_axes == 2);
  }
}

TEST_CASE("comparison check flags a hand-built violation") {
  OperatorSpec spec = spec2(0.5);
  Grid grid = Grid::make(spec.grouping, kBox, {5, 5});
  OperatorMatrix A = assemble(spec, grid, zero2());
  A.axis_ops[0](1, 3) = 0.7;
  A.axis_ops[0](3, 1) = 0.7;  // keep it symmetric: exactly one violation kind
  ComparisonReport rep = comparison_check(A);
  CHECK(!rep.pass);
  bool found = false;
  for (const auto& v : rep.violations)
    if (v.kind == "positive off-diagonal") found = true;
  CHECK(found);
}

TEST_CASE("dense materialization agrees with the structured product") {
  OperatorSpec spec = spec2(0.6);
  Grid grid = Grid::make(spec.grouping, kBox, {7, 9});
  OperatorMatrix A = assemble(spec, grid, zero2());
  Eigen::MatrixXd D = A.dense();
  CHECK((D - D.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * D.cwiseAbs().maxCoeff());
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss;
  Eigen::VectorXd v(grid.size());
  for (long long i = 0; i < v.size(); ++i) v[i] = gauss(rng);
  CHECK((A.apply(v) - D * v).cwiseAbs().maxCoeff() <=
        1e-11 * D.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff());
}

TEST_CASE("trivial solves") {
  OperatorSpec spec = spec2(0.5);

  SUBCASE("zero data gives the zero solution") {
    GridFunction u = solve_dirichlet(spec, kBox, zero2(), zero2(), {15, 31});
    CHECK(u.nodal_max_abs() <= 1e-14);
  }

  SUBCASE("nonnegative source gives a nonnegative solution") {
    ScalarField f = make_builtin("bump", {{"amp", 1.0}, {"radius", 0.7}}, 2);
    GridFunction u = solve_dirichlet(spec, kBox, f, zero2(), {15, 31});
    CHECK(u.values.minCoeff() >= -1e-10);
  }

  SUBCASE("nonpositive source and exterior keep the solution nonpositive") {
    ScalarField f = make_builtin("bump", {{"amp", -1.0}, {"radius", 0.7}}, 2);
    GridFunction u = solve_dirichlet(spec, kBox, f, zero2(), {15, 31});
    CHECK(u.values.maxCoeff() <= 1e-10);
  }

  SUBCASE("residual is reported") {
    SolveInfo info;
    ScalarField f = make_builtin("bump", {{"amp", 1.0}, {"radius", 0.7}}, 2);
    solve_dirichlet(spec, kBox, f, zero2(), {15, 31}, QuadratureSpec{}, &info);
    CHECK(info.rel_residual <= 1e-10);
    CHECK(info.unknowns == 15 * 31);
  }
}

TEST_CASE("discrete apply") {
  OperatorSpec spec = spec2(0.5);
  Grid grid = Grid::make(spec.grouping, kBox, {15, 31});

  SUBCASE("constants with matching exterior are annihilated") {
    ScalarField c = make_builtin("constant", {{"value", 3.0}}, 2);
    QuadratureSpec q;
    q.target_rel_tol = 1e-9;
    OperatorMatrix A = assemble(spec, grid, c, q);
    GridFunction u;
    u.grid = grid;
    u.values = Eigen::VectorXd::Constant(grid.size(), 3.0);
    u.exterior = c;
    Eigen::VectorXd r = discrete_apply(A, u);
    CHECK(r.cwiseAbs().maxCoeff() <= 1e-6);
  }

  SUBCASE("linearity in the nodal values") {
    OperatorMatrix A = assemble(spec, grid, zero2());
    std::mt19937_64 rng(5);
    std::normal_distribution<double> gauss;
    GridFunction u, w;
    u.grid = w.grid = grid;
    u.exterior = w.exterior = zero2();
    u.values.resize(grid.size());
    w.values.resize(grid.size());
    for (long long i = 0; i < grid.size(); ++i) {
      u.values[i] = gauss(rng);
      w.values[i] = gauss(rng);
    }
    GridFunction mix;
    mix.grid = grid;
    mix.exterior = zero2();
    mix.values = 2.0 * u.values - 3.0 * w.values;
    Eigen::VectorXd lhs = discrete_apply(A, mix);
    Eigen::VectorXd rhs = 2.0 * discrete_apply(A, u) - 3.0 * discrete_apply(A, w);
    CHECK((lhs - rhs).cwiseAbs().maxCoeff() <= 1e-9 * rhs.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("discrete operator is consistent with the quadrature evaluator") {
  OperatorSpec spec = spec2(0.5);
  ScalarField u = make_builtin("bump_product", {{"amp", 1.0}, {"r1", 0.7}, {"r2", 1.4}}, 2);

  QuadratureSpec oracle;
  oracle.target_rel_tol = 1e-6;
  oracle.truncation_radius = 8.0;
  oracle.panels_per_decade = 24;

  auto max_err = [&](std::vector<int> counts) {
    Grid grid = Grid::make(spec.grouping, kBox, counts);
    OperatorMatrix A = assemble(spec, grid, u);  // exterior = u (vanishes there)
    GridFunction gf;
    gf.grid = grid;
    gf.exterior = u;
    gf.values.resize(grid.size());
    Point p(2);
    for_each_index(grid.counts, [&](long long flat, std::span<const int> idx) {
      grid.node_point(idx, p);
      gf.values[flat] = u(p);
    });
    Eigen::VectorXd Lh = discrete_apply(A, gf);
    double err = 0.0;
    for_each_index(grid.counts, [&](long long flat, std::span<const int> idx) {
      grid.node_point(idx, p);
      err = std::max(err, std::abs(Lh[flat] - apply_operator(spec, u, p, oracle).value));
    });
    return err;
  };

  const double e1 = max_err({15, 31});
  const double e2 = max_err({31, 63});
  const double order = std::log2(e1 / e2);
  CHECK(order >= 1.0);
}

TEST_CASE("manufactured solution converges") {
  OperatorSpec spec = spec2(0.5);
  ScalarField ustar =
      make_builtin("bump_product", {{"amp", 1.0}, {"r1", 0.7}, {"r2", 1.4}}, 2);

  QuadratureSpec oracle;
  oracle.target_rel_tol = 1e-6;
  oracle.truncation_radius = 8.0;
  oracle.panels_per_decade = 24;

  ScalarField fstar;
  fstar.dim = 2;
  fstar.global_bound = kInf;
  fstar.sample = [&](std::span<const double> x) {
    return apply_operator(spec, ustar, x, oracle).value;
  };

  auto err_at = [&](std::vector<int> counts) {
    GridFunction u = solve_dirichlet(spec, kBox, fstar, ustar, counts, oracle);
    double err = 0.0;
    Point p(2);
    for_each_index(u.grid.counts, [&](long long flat, std::span<const int> idx) {
      u.grid.node_point(idx, p);
      err = std::max(err, std::abs(u.values[flat] - ustar(p)));
    });
    return err;
  };

  const double e1 = err_at({15, 31});
  const double e2 = err_at({31, 63});
  CHECK(std::log2(e1 / e2) >= 1.0);
}

TEST_CASE("spectral solve agrees with a dense factorization") {
  OperatorSpec spec = spec2(0.6);
  ScalarField f = make_builtin("odd_bump", {{"amp", 1.0}, {"radius", 0.8}}, 2);
  SolveInfo info;
  GridFunction u = solve_dirichlet(spec, kBox, f, zero2(), {15, 31}, QuadratureSpec{},
                                   &info);
  OperatorMatrix A = assemble(spec, u.grid, zero2());
  Eigen::VectorXd b(u.grid.size());
  Point p(2);
  for_each_index(u.grid.counts, [&](long long flat, std::span<const int> idx) {
    u.grid.node_point(idx, p);
    b[flat] = f(p) + A.rhs_correction[flat];
  });
  Eigen::VectorXd dense_u = A.dense().ldlt().solve(b);
  CHECK((dense_u - u.values).cwiseAbs().maxCoeff() <=
        1e-10 * std::max(1.0, u.values.cwiseAbs().maxCoeff()));
}

TEST_CASE("three-axis operator: middle-axis strides and convergence") {
  // two fractional blocks plus the local axis; exercises the interior-axis
  // tensor transforms that two-dimensional grids never touch
  OperatorSpec spec = OperatorSpec::make({1, 1, 1}, {0.5, 0.7, 1.0}, {1.0, 0.8, 1.0});
  const AnisotropicBox box = AnisotropicBox::make({1.0, 1.0, 1.0}, 2.0);
  ScalarField ustar = make_builtin(
      "bump_product", {{"amp", 1.0}, {"r1", 0.7}, {"r2", 0.7}, {"r3", 1.4}}, 3);

  QuadratureSpec oracle;
  oracle.target_rel_tol = 1e-6;
  oracle.truncation_radius = 8.0;
  oracle.panels_per_decade = 24;

  ScalarField fstar;
  fstar.dim = 3;
  fstar.global_bound = kInf;
  fstar.sample = [&](std::span<const double> x) {
    return apply_operator(spec, ustar, x, oracle).value;
  };

  SUBCASE("structured product matches the dense matrix") {
    Grid grid = Grid::make(spec.grouping, box, {5, 7, 9});
    OperatorMatrix A = assemble(spec, grid, ustar);
    Eigen::MatrixXd D = A.dense();
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss;
    Eigen::VectorXd v(grid.size());
    for (long long i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    CHECK((A.apply(v) - D * v).cwiseAbs().maxCoeff() <=
          1e-11 * D.cwiseAbs().maxCoeff() * v.cwiseAbs().maxCoeff());
  }

  SUBCASE("manufactured solution converges") {
    auto err_at = [&](std::vector<int> counts) {
      SolveInfo info;
      GridFunction u = solve_dirichlet(spec, box, fstar, ustar, counts, oracle, &info);
      CHECK(info.rel_residual <= 1e-10);
      double err = 0.0;
      Point p(3);
      for_each_index(u.grid.counts, [&](long long flat, std::span<const int> idx) {
        u.grid.node_point(idx, p);
        err = std::max(err, std::abs(u.values[flat] - ustar(p)));
      });
      return err;
    };
    const double e1 = err_at({15, 15, 31});
    const double e2 = err_at({31, 31, 63});
    CHECK(std::log2(e1 / e2) >= 1.0);
  }
}

TEST_CASE("interpolation") {
  OperatorSpec spec = spec2(0.5);
  Grid grid = Grid::make(spec.grouping, kBox, {15, 31});
  ScalarField ext = make_builtin("constant", {{"value", 2.0}}, 2);
  GridFunction u;
  u.grid = grid;
  u.exterior = ext;
  u.values.resize(grid.size());
  Point p(2);
  for_each_index(grid.counts, [&](long long flat, std::span<const int> idx) {
    grid.node_point(idx, p);
    u.values[flat] = p[0] + 2.0 * p[1];
  });

  SUBCASE("reproduces nodal values") {
    CHECK(u.interpolate(Point{grid.coord(0, 3), grid.coord(1, 7)}) ==
          doctest::Approx(grid.coord(0, 3) + 2.0 * grid.coord(1, 7)));
  }
  SUBCASE("linear functions are interpolated exactly inside") {
    CHECK(u.interpolate(Point{0.123, -0.456}) ==
          doctest::Approx(0.123 - 2.0 * 0.456).epsilon(1e-12));
  }
  SUBCASE("exterior samples outside the box") {
    CHECK(u.interpolate(Point{1.5, 0.0}) == doctest::Approx(2.0));
    CHECK(u.as_field().global_bound >= 2.0);
  }
  SUBCASE("smooth interpolation matches smooth data") {
    CHECK(u.interpolate_smooth(Point{0.2, 0.3}) ==
          doctest::Approx(0.2 + 0.6).epsilon(1e-10));
  }
}

TEST_CASE("csv export") {
  OperatorSpec spec = spec2(0.5);
  Grid grid = Grid::make(spec.grouping, kBox, {3, 3});
  GridFunction u;
  u.grid = grid;
  u.exterior = zero2();
  u.values.resize(grid.size());
  for (long long i = 0; i < grid.size(); ++i) u.values[i] = static_cast<double>(i);
  const std::string path = "/tmp/aniso_grid_test.csv";
  u.write_csv(path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x1,x2,value");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 9);
  std::remove(path.c_str());
}
