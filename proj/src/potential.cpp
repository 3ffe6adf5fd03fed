#include "gmol/potential.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

namespace gmol {

RectGrid RectGrid::square(std::size_t n) { return make(0.0, 1.0, 0.0, 1.0, n, n); }

RectGrid RectGrid::make(double x0, double x1, double y0, double y1, std::size_t nx,
                        std::size_t ny) {
  if (nx < 16 || ny < 16) throw ValidationError("grid", "need at least 16 nodes per direction");
  if (!(x1 > x0) || !(y1 > y0)) throw ValidationError("grid", "empty interval");
  const double hx = (x1 - x0) / static_cast<double>(nx - 1);
  const double hy = (y1 - y0) / static_cast<double>(ny - 1);
  if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
    throw ValidationError("grid", "spacing must agree in x and y");
  return {x0, x1, y0, y1, nx, ny, hx};
}

AnalyticField AnalyticField::zero() {
  auto z = [](double, double) { return 0.0; };
  return {"zero", z, z, z, z, z, z};
}

AnalyticField AnalyticField::xy() {
  return {"xy",
          [](double x, double y) { return x * y; },
          [](double, double y) { return y; },
          [](double x, double) { return x; },
          [](double, double) { return 0.0; },
          [](double, double) { return 0.0; },
          [](double, double) { return 1.0; }};
}

AnalyticField AnalyticField::sin_sin() {
  return {"sin_sin",
          [](double x, double y) { return std::sin(x) * std::sin(y); },
          [](double x, double y) { return std::cos(x) * std::sin(y); },
          [](double x, double y) { return std::sin(x) * std::cos(y); },
          [](double x, double y) { return -std::sin(x) * std::sin(y); },
          [](double x, double y) { return -std::sin(x) * std::sin(y); },
          [](double x, double y) { return std::cos(x) * std::cos(y); }};
}

AnalyticField AnalyticField::x_squared() {
  return {"x2",
          [](double x, double) { return x * x; },
          [](double x, double) { return 2.0 * x; },
          [](double, double) { return 0.0; },
          [](double, double) { return 2.0; },
          [](double, double) { return 0.0; },
          [](double, double) { return 0.0; }};
}

AnalyticField AnalyticField::named(std::string_view name) {
  if (name == "zero") return zero();
  if (name == "xy") return xy();
  if (name == "sin_sin") return sin_sin();
  if (name == "x2") return x_squared();
  throw ValidationError("field", "unknown analytic field '" + std::string(name) + "'");
}

Field AnalyticField::sample(const RectGrid& g) const {
  Field f(g.nx, g.ny);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j) f(i, j) = value(g.x(i), g.y(j));
  return f;
}

namespace {

// Dirichlet problem lap w = rhs with w = bc on the edges.
Field poisson(const Field& rhs, const ScalarFn& bc, const RectGrid& g) {
  const std::size_t mx = g.nx - 2, my = g.ny - 2;
  auto id = [&](std::size_t i, std::size_t j) {
    return static_cast<Eigen::Index>((i - 1) * my + (j - 1));
  };
  Field w(g.nx, g.ny);
  for (std::size_t i = 0; i < g.nx; ++i)
    for (std::size_t j = 0; j < g.ny; ++j)
      if (g.on_edge(i, j)) w(i, j) = bc(g.x(i), g.y(j));

  // Assemble -h^2 lap (SPD) with edge values moved to the right-hand side.
  const double h2 = g.h * g.h;
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(5 * mx * my);
  Eigen::VectorXd b(static_cast<Eigen::Index>(mx * my));
  for (std::size_t i = 1; i + 1 < g.nx; ++i) {
    for (std::size_t j = 1; j + 1 < g.ny; ++j) {
      const Eigen::Index row = id(i, j);
      t.emplace_back(row, row, 4.0);
      double rhs_ij = -h2 * rhs(i, j);
      const std::size_t ni[4] = {i - 1, i + 1, i, i};
      const std::size_t nj[4] = {j, j, j - 1, j + 1};
      for (int k = 0; k < 4; ++k) {
        if (g.on_edge(ni[k], nj[k]))
          rhs_ij += w(ni[k], nj[k]);
        else
          t.emplace_back(row, id(ni[k], nj[k]), -1.0);
      }
      b[row] = rhs_ij;
    }
  }
  Eigen::SparseMatrix<double> A(static_cast<Eigen::Index>(mx * my),
                                static_cast<Eigen::Index>(mx * my));
  A.setFromTriplets(t.begin(), t.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success) throw SolveFailure("Poisson factorization failed");
  Eigen::VectorXd x = ldlt.solve(b);
  // Refinement with an extended-precision residual: the curl differentiates
  // the potentials three times, so O(1e-13) solve noise would show up as
  // O(1e-7) in it.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd r(x.size());
    for (std::size_t i = 1; i + 1 < g.nx; ++i) {
      for (std::size_t j = 1; j + 1 < g.ny; ++j) {
        const Eigen::Index row = id(i, j);
        long double acc = static_cast<long double>(b[row]) - 4.0L * x[row];
        const std::size_t ni[4] = {i - 1, i + 1, i, i};
        const std::size_t nj[4] = {j, j, j - 1, j + 1};
        for (int k = 0; k < 4; ++k)
          if (!g.on_edge(ni[k], nj[k])) acc += x[id(ni[k], nj[k])];
        r[row] = static_cast<double>(acc);
      }
    }
    x += ldlt.solve(r);
  }
  const double scale = std::max(1.0, b.lpNorm<Eigen::Infinity>());
  const double res = (A * x - b).lpNorm<Eigen::Infinity>() / scale;
  if (!(res <= 1e-12)) throw SolveFailure("Poisson residual " + std::to_string(res));
  for (std::size_t i = 1; i + 1 < g.nx; ++i)
    for (std::size_t j = 1; j + 1 < g.ny; ++j) w(i, j) = x[id(i, j)];
  return w;
}

double lap5(const Field& w, std::size_t i, std::size_t j, double h) {
  return (w(i + 1, j) + w(i - 1, j) + w(i, j + 1) + w(i, j - 1) - 4.0 * w(i, j)) / (h * h);
}

// 1-D fourth-order derivative of n samples read through get(k), written
// through put(k, value).
template <class Get, class Put>
void diff1(std::size_t n, double h, Get get, Put put) {
  const double s = 1.0 / (12.0 * h);
  auto one_sided0 = [&](auto f) {
    return (-25.0 * f(0) + 48.0 * f(1) - 36.0 * f(2) + 16.0 * f(3) - 3.0 * f(4)) * s;
  };
  auto one_sided1 = [&](auto f) {
    return (-3.0 * f(0) - 10.0 * f(1) + 18.0 * f(2) - 6.0 * f(3) + f(4)) * s;
  };
  auto fwd = [&](std::size_t k) { return get(k); };
  auto bwd = [&](std::size_t k) { return get(n - 1 - k); };
  put(0, one_sided0(fwd));
  put(1, one_sided1(fwd));
  for (std::size_t k = 2; k + 2 < n; ++k)
    put(k, (get(k - 2) - 8.0 * get(k - 1) + 8.0 * get(k + 1) - get(k + 2)) * s);
  put(n - 2, -one_sided1(bwd));
  put(n - 1, -one_sided0(bwd));
}

template <class Get, class Put>
void diff2(std::size_t n, double h, Get get, Put put) {
  const double s = 1.0 / (12.0 * h * h);
  auto one_sided0 = [&](auto f) {
    return (45.0 * f(0) - 154.0 * f(1) + 214.0 * f(2) - 156.0 * f(3) + 61.0 * f(4) -
            10.0 * f(5)) *
           s;
  };
  auto one_sided1 = [&](auto f) {
    return (10.0 * f(0) - 15.0 * f(1) - 4.0 * f(2) + 14.0 * f(3) - 6.0 * f(4) + f(5)) * s;
  };
  auto fwd = [&](std::size_t k) { return get(k); };
  auto bwd = [&](std::size_t k) { return get(n - 1 - k); };
  put(0, one_sided0(fwd));
  put(1, one_sided1(fwd));
  for (std::size_t k = 2; k + 2 < n; ++k)
    put(k, (-get(k - 2) + 16.0 * get(k - 1) - 30.0 * get(k) + 16.0 * get(k + 1) - get(k + 2)) *
               s);
  put(n - 2, one_sided1(bwd));
  put(n - 1, one_sided0(bwd));
}

template <bool AlongX, int Order>
Field differentiate(const Field& f, const RectGrid& g) {
  Field out(g.nx, g.ny);
  const std::size_t lines = AlongX ? g.ny : g.nx;
  const std::size_t n = AlongX ? g.nx : g.ny;
  for (std::size_t l = 0; l < lines; ++l) {
    auto get = [&](std::size_t k) { return AlongX ? f(k, l) : f(l, k); };
    auto put = [&](std::size_t k, double v) {
      if constexpr (AlongX)
        out(k, l) = v;
      else
        out(l, k) = v;
    };
    if constexpr (Order == 1)
      diff1(n, g.h, get, put);
    else
      diff2(n, g.h, get, put);
  }
  return out;
}

Field combine(const Field& a, double sa, const Field& b, double sb) {
  Field out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = sa * a(i, j) + sb * b(i, j);
  return out;
}

}  // namespace

Field diff_x(const Field& f, const RectGrid& g) { return differentiate<true, 1>(f, g); }
Field diff_y(const Field& f, const RectGrid& g) { return differentiate<false, 1>(f, g); }
Field diff_xx(const Field& f, const RectGrid& g) { return differentiate<true, 2>(f, g); }
Field diff_yy(const Field& f, const RectGrid& g) { return differentiate<false, 2>(f, g); }

PotentialTriple solve_potentials(const AnalyticField& w1, const ScalarFn& bc0,
                                 const ScalarFn& bc2, const RectGrid& grid) {
  Field rhs2(grid.nx, grid.ny), rhs0(grid.nx, grid.ny);
  for (std::size_t i = 0; i < grid.nx; ++i)
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const double x = grid.x(i), y = grid.y(j);
      rhs2(i, j) = -2.0 * w1.dxy(x, y);
      rhs0(i, j) = w1.dyy(x, y) - w1.dxx(x, y);
    }
  PotentialTriple p;
  p.w1 = w1.sample(grid);
  p.w2 = poisson(rhs2, bc2, grid);
  p.w0 = poisson(rhs0, bc0, grid);
  return p;
}

PotentialResiduals potential_residuals(const PotentialTriple& p, const AnalyticField& w1,
                                       const RectGrid& grid) {
  PotentialResiduals r{Field(grid.nx, grid.ny), Field(grid.nx, grid.ny)};
  for (std::size_t i = 1; i + 1 < grid.nx; ++i)
    for (std::size_t j = 1; j + 1 < grid.ny; ++j) {
      const double x = grid.x(i), y = grid.y(j);
      r.w2_equation(i, j) = lap5(p.w2, i, j, grid.h) + 2.0 * w1.dxy(x, y);
      r.w0_equation(i, j) = lap5(p.w0, i, j, grid.h) + w1.dxx(x, y) - w1.dyy(x, y);
    }
  return r;
}

Velocity velocity_from_potentials(const PotentialTriple& p, const RectGrid& grid) {
  const Field w0x = diff_x(p.w0, grid), w0y = diff_y(p.w0, grid);
  const Field w1x = diff_x(p.w1, grid), w1y = diff_y(p.w1, grid);
  const Field w2x = diff_x(p.w2, grid), w2y = diff_y(p.w2, grid);
  Velocity out{Field(grid.nx, grid.ny), Field(grid.nx, grid.ny)};
  for (std::size_t i = 0; i < grid.nx; ++i)
    for (std::size_t j = 0; j < grid.ny; ++j) {
      out.u(i, j) = w0x(i, j) + w1x(i, j) + w2y(i, j);
      out.v(i, j) = w0y(i, j) - w1y(i, j) - w2x(i, j);
    }
  return out;
}

Field divergence(const Field& u, const Field& v, const RectGrid& grid) {
  return combine(diff_x(u, grid), 1.0, diff_y(v, grid), 1.0);
}

Convective convective_curl(const Field& u, const Field& v, const RectGrid& grid) {
  const Field ux = diff_x(u, grid), uy = diff_y(u, grid);
  const Field vx = diff_x(v, grid), vy = diff_y(v, grid);
  Convective c{Field(grid.nx, grid.ny), Field(grid.nx, grid.ny), {}};
  for (std::size_t i = 0; i < grid.nx; ++i)
    for (std::size_t j = 0; j < grid.ny; ++j) {
      c.h1(i, j) = u(i, j) * ux(i, j) + v(i, j) * uy(i, j);
      c.h2(i, j) = u(i, j) * vx(i, j) + v(i, j) * vy(i, j);
    }
  c.curl = combine(diff_y(c.h1, grid), 1.0, diff_x(c.h2, grid), -1.0);
  return c;
}

namespace {

struct Gradient {
  Field gx, gy;
};

Gradient pressure_gradient(const Field& u, const Field& v, const AnalyticField& f, double nu,
                           const RectGrid& grid) {
  const Field lap_u = combine(diff_xx(u, grid), 1.0, diff_yy(u, grid), 1.0);
  const Field lap_v = combine(diff_xx(v, grid), 1.0, diff_yy(v, grid), 1.0);
  const Convective c = convective_curl(u, v, grid);
  Gradient g{Field(grid.nx, grid.ny), Field(grid.nx, grid.ny)};
  for (std::size_t i = 0; i < grid.nx; ++i)
    for (std::size_t j = 0; j < grid.ny; ++j) {
      const double x = grid.x(i), y = grid.y(j);
      g.gx(i, j) = nu * lap_u(i, j) - c.h1(i, j) + f.dx(x, y);
      g.gy(i, j) = nu * lap_v(i, j) - c.h2(i, j) + f.dy(x, y);
    }
  return g;
}

}  // namespace

PressureRecovery recover_pressure(const Field& u, const Field& v, const AnalyticField& f,
                                  double nu, const RectGrid& grid) {
  const Gradient g = pressure_gradient(u, v, f, nu, grid);
  const double half = 0.5 * grid.h;
  Field row_first(grid.nx, grid.ny), col_first(grid.nx, grid.ny);
  for (std::size_t i = 1; i < grid.nx; ++i)
    row_first(i, 0) = row_first(i - 1, 0) + half * (g.gx(i - 1, 0) + g.gx(i, 0));
  for (std::size_t i = 0; i < grid.nx; ++i)
    for (std::size_t j = 1; j < grid.ny; ++j)
      row_first(i, j) = row_first(i, j - 1) + half * (g.gy(i, j - 1) + g.gy(i, j));
  for (std::size_t j = 1; j < grid.ny; ++j)
    col_first(0, j) = col_first(0, j - 1) + half * (g.gy(0, j - 1) + g.gy(0, j));
  for (std::size_t j = 0; j < grid.ny; ++j)
    for (std::size_t i = 1; i < grid.nx; ++i)
      col_first(i, j) = col_first(i - 1, j) + half * (g.gx(i - 1, j) + g.gx(i, j));

  PressureRecovery out;
  out.limit = 100.0 * grid.h * grid.h;
  out.path_independence_defect = max_abs_diff(row_first, col_first);
  if (!(out.path_independence_defect <= out.limit))
    throw NotAGradient(out.path_independence_defect, out.limit);
  out.P = std::move(row_first);
  return out;
}

MomentumResidual momentum_residual(const Field& u, const Field& v, const Field& P,
                                   const AnalyticField& f, double nu, const RectGrid& grid) {
  const Gradient g = pressure_gradient(u, v, f, nu, grid);
  return {combine(g.gx, 1.0, diff_x(P, grid), -1.0), combine(g.gy, 1.0, diff_y(P, grid), -1.0)};
}

namespace {

struct CaseData {
  PotentialTriple p;
  Velocity vel;
};

// Dirichlet traces from closed-form potentials. The 5-point error behaves
// like h^2 E with lap E = -(w_xxxx + w_yyyy)/12 and E = 0 on the edges; when
// the right side is nonzero at a corner, E has an r^2 log r singularity there
// and the third derivatives in the curl lose an order. sin x sin y therefore
// lives on [pi/2, 3pi/2]^2, where cos x cos y vanishes on every edge.
CaseData build_case(const AnalyticField& w1, const RectGrid& grid) {
  ScalarFn bc0 = [](double, double) { return 0.0; };
  ScalarFn bc2 = bc0;
  if (w1.name == "xy") {
    bc0 = [](double x, double y) { return x * x - y * y; };
    bc2 = [](double x, double y) { return -0.5 * (x * x + y * y); };
  } else if (w1.name == "sin_sin") {
    // Harmonic parts keep the velocity away from zero; both are reproduced
    // exactly by the 5-point stencil.
    bc0 = [](double x, double y) { return x * x * x - 3.0 * x * y * y; };
    bc2 = [](double x, double y) { return std::cos(x) * std::cos(y) + x * x - y * y; };
  } else if (w1.name == "x2") {
    bc0 = [](double x, double) { return -x * x; };
  }
  CaseData c;
  c.p = solve_potentials(w1, bc0, bc2, grid);
  c.vel = velocity_from_potentials(c.p, grid);
  return c;
}

// Sup over nodes off the edges, where the outer difference is central.
double interior_sup(const Field& f) {
  double m = 0.0;
  for (std::size_t i = 1; i + 1 < f.rows(); ++i)
    for (std::size_t j = 1; j + 1 < f.cols(); ++j) m = std::max(m, std::abs(f(i, j)));
  return m;
}

RectGrid case_grid(const AnalyticField& w1, std::size_t n) {
  if (w1.name != "sin_sin") return RectGrid::square(n);
  const double a = 0.5 * std::numbers::pi, b = 1.5 * std::numbers::pi;
  return RectGrid::make(a, b, a, b, n, n);
}

}  // namespace

CertificationReport certify(std::string_view w1_name, std::string_view forcing, std::size_t n,
                            double nu, const std::vector<std::size_t>& refinement) {
  const AnalyticField w1 = AnalyticField::named(w1_name);
  const AnalyticField f = AnalyticField::named(forcing);
  const RectGrid grid = case_grid(w1, n);

  CertificationReport rep;
  rep.w1 = w1.name;
  rep.forcing = f.name;
  rep.n = n;
  rep.h = grid.h;
  rep.nu = nu;

  const CaseData c = build_case(w1, grid);
  const PotentialResiduals pr = potential_residuals(c.p, w1, grid);
  rep.main.potential_residual_sup = std::max(pr.w0_equation.max_abs(), pr.w2_equation.max_abs());
  rep.main.divergence_sup = divergence(c.vel.u, c.vel.v, grid).max_abs();
  const Field curl = convective_curl(c.vel.u, c.vel.v, grid).curl;
  rep.main.curl_sup = interior_sup(curl);
  rep.main.curl_sup_with_edges = curl.max_abs();
  const PressureRecovery pres = recover_pressure(c.vel.u, c.vel.v, f, nu, grid);
  rep.main.pressure_defect = pres.path_independence_defect;
  const MomentumResidual mr = momentum_residual(c.vel.u, c.vel.v, pres.P, f, nu, grid);
  rep.main.momentum_sup = std::max(mr.ru.max_abs(), mr.rv.max_abs());
  if (w1.name == "xy") {
    double err = 0.0;
    for (std::size_t i = 0; i < grid.nx; ++i)
      for (std::size_t j = 0; j < grid.ny; ++j) {
        const double x = grid.x(i), y = grid.y(j);
        const double exact = -2.0 * (x * x + y * y) + f.value(x, y) - f.value(grid.x0, grid.y0);
        err = std::max(err, std::abs(pres.P(i, j) - exact));
      }
    rep.main.pressure_error = err;
  }

  const AnalyticField smooth = AnalyticField::sin_sin();
  for (std::size_t m : refinement) {
    const RectGrid g = case_grid(smooth, m);
    const CaseData s = build_case(smooth, g);
    rep.refinement_n.push_back(m);
    rep.refinement_divergence.push_back(divergence(s.vel.u, s.vel.v, g).max_abs());
    rep.refinement_curl.push_back(interior_sup(convective_curl(s.vel.u, s.vel.v, g).curl));
  }
  const std::size_t k = rep.refinement_n.size();
  if (k >= 2) {
    const double ratio_h = static_cast<double>(rep.refinement_n[k - 1] - 1) /
                           static_cast<double>(rep.refinement_n[k - 2] - 1);
    rep.divergence_order =
        std::log(rep.refinement_divergence[k - 2] / rep.refinement_divergence[k - 1]) /
        std::log(ratio_h);
    rep.curl_order = std::log(rep.refinement_curl[k - 2] / rep.refinement_curl[k - 1]) /
                     std::log(ratio_h);
  }
  return rep;
}

}  // namespace gmol
