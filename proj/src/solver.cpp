#include "gmol/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "gmol/residual.hpp"

namespace gmol {

void SolverConfig::validate() const {
  if (!(nu > 0.0)) throw ValidationError("nu", "must be positive");
  if (mode == Closure::continuity)
    throw ValidationError("mode", "solver needs pressure_poisson or artificial_compressibility");
  if (mode == Closure::artificial_compressibility && !(epsilon > 0.0))
    throw ValidationError("epsilon", "must be positive");
  if (!(inner_tol > 0.0)) throw ValidationError("inner_tol", "must be positive");
  if (!(outer_tol > 0.0)) throw ValidationError("outer_tol", "must be positive");
  if (max_inner < 1) throw ValidationError("max_inner", "must be at least 1");
  if (max_sweeps < 1) throw ValidationError("max_sweeps", "must be at least 1");
}

NoConvergence::NoConvergence(SolveReport report_, FlowState state_)
    : Error("line sweeps did not converge within " + std::to_string(report_.sweeps) +
            " sweeps (last change " + std::to_string(report_.final_change) + ")"),
      report(report_),
      state(std::move(state_)) {}

namespace {

OperatorOptions full_equations(double nu, Closure mode, double epsilon) {
  OperatorOptions o;
  o.nu = nu;
  o.closure = mode;
  o.epsilon = epsilon;
  return o;
}

struct LineResiduals {
  LineFunction ru, rv, rp;
  explicit LineResiduals(std::size_t m) : ru(m), rv(m), rp(m) {}
};

LineResiduals residuals_from_rows(const LineStencil& rows, std::size_t n,
                                  const GeometryCoefficients& geo, const DomainGrid& grid,
                                  const OperatorOptions& opt) {
  const auto cur = row_derivatives(rows.u.cur, rows.v.cur, rows.p.cur, grid.dtheta);
  const auto prev = row_derivatives(rows.u.prev, rows.v.prev, rows.p.prev, grid.dtheta);
  LineResiduals r(grid.n_theta);
  line_residual(rows, n, cur, prev, geo, grid, opt, r.ru, r.rv, r.rp);
  return r;
}

LineFunction step(std::span<const double> x, const LineFunction& r, double scale) {
  LineFunction out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] + scale * r[j];
  return out;
}

// Largest magnitude of the periodic second-derivative symbol, times h^2.
double d2_symbol_max(std::size_t m) {
  double best = 0.0;
  for (std::size_t k = 0; k <= m / 2; ++k) {
    const double kh = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
    const double s = -49.0 / 18.0 +
                     2.0 * (1.5 * std::cos(kh) - 0.15 * std::cos(2 * kh) +
                            std::cos(3 * kh) / 90.0);
    best = std::max(best, -s);
  }
  return best;
}

double pressure_scale(const SolverConfig& c) {
  return c.mode == Closure::artificial_compressibility ? 1.0 / c.epsilon : 1.0;
}

}  // namespace

LineFunction t_map_u(std::span<const double> u_next, std::span<const double> u_n,
                     std::span<const double> u_prev, std::span<const double> v_n,
                     std::span<const double> P_n, std::span<const double> P_prev, std::size_t n,
                     const GeometryCoefficients& geo, const DomainGrid& grid, double nu) {
  const LineStencil rows{{u_next, u_n, u_prev}, {v_n, v_n, v_n}, {P_n, P_n, P_prev}};
  const auto r = residuals_from_rows(rows, n, geo, grid,
                                     full_equations(nu, Closure::continuity, 0.0));
  return step(u_n, r.ru, grid.d * grid.d / (3.0 * nu));
}

LineFunction t_map_v(std::span<const double> v_next, std::span<const double> v_n,
                     std::span<const double> v_prev, std::span<const double> u_n,
                     std::span<const double> P_n, std::span<const double> P_prev, std::size_t n,
                     const GeometryCoefficients& geo, const DomainGrid& grid, double nu) {
  const LineStencil rows{{u_n, u_n, u_n}, {v_next, v_n, v_prev}, {P_n, P_n, P_prev}};
  const auto r = residuals_from_rows(rows, n, geo, grid,
                                     full_equations(nu, Closure::continuity, 0.0));
  return step(v_n, r.rv, grid.d * grid.d / (3.0 * nu));
}

LineFunction t_map_P(std::span<const double> P_next, std::span<const double> P_n,
                     std::span<const double> P_prev, std::span<const double> u_n,
                     std::span<const double> u_prev, std::span<const double> v_n,
                     std::span<const double> v_prev, std::size_t n,
                     const GeometryCoefficients& geo, const DomainGrid& grid, Closure mode,
                     double epsilon) {
  if (mode == Closure::continuity)
    throw ModeMismatch("t_map_P needs pressure_poisson or artificial_compressibility");
  const LineStencil rows{{u_n, u_n, u_prev}, {v_n, v_n, v_prev}, {P_next, P_n, P_prev}};
  const auto r = residuals_from_rows(rows, n, geo, grid, full_equations(1.0, mode, epsilon));
  const double scale = mode == Closure::artificial_compressibility ? 1.0 / epsilon : 1.0;
  return step(P_n, r.rp, grid.d * grid.d / 3.0 * scale);
}

double line_relaxation(std::size_t n, const GeometryCoefficients& geo, const DomainGrid& grid) {
  const double sigma = d2_symbol_max(grid.n_theta) / (grid.dtheta * grid.dtheta);
  const double t = grid.t[n];
  const double d = grid.d;
  double lmax = -std::numeric_limits<double>::infinity();
  double lmin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j < grid.n_theta; ++j) {
    const double a = geo.f2[j] * d / t;
    const double b = geo.f4[j] * d * d / (t * t);
    lmax = std::max(lmax, (1.0 + a) / 3.0);
    lmin = std::min(lmin, (1.0 + a - b * sigma) / 3.0);
  }
  if (lmin + lmax >= 0.0) return 1.0;
  return std::min(1.0, 2.0 / (2.0 - lmin - lmax));
}

LineSolveResult banach_line_solve(std::size_t n, const FlowState& state,
                                  const GeometryCoefficients& geo, const DomainGrid& grid,
                                  const SolverConfig& config, LineSeed seed, double tol) {
  if (n < 1 || n >= grid.n_lines) throw ValidationError("n", "line index must be interior");
  state.check_shape(grid);
  const bool with_p = state.has_pressure();
  if (!with_p) throw ModeMismatch("line solve needs a pressure field");
  if (tol <= 0.0) tol = config.inner_tol;

  const std::size_t src = seed == LineSeed::next_row ? n + 1 : n;
  LineSolveResult res;
  res.u.assign(state.u.row(src).begin(), state.u.row(src).end());
  res.v.assign(state.v.row(src).begin(), state.v.row(src).end());
  const std::size_t p_src = config.freeze_pressure ? n : src;
  res.P.assign(state.P.row(p_src).begin(), state.P.row(p_src).end());
  res.relaxation = config.relaxation > 0.0 ? config.relaxation : line_relaxation(n, geo, grid);

  OperatorOptions opt = full_equations(config.nu, config.mode, config.epsilon);
  opt.convection = config.convection;
  opt.pressure_gradient = config.pressure_coupling;

  const RowDerivatives prev = row_derivatives(state, n - 1, grid.dtheta);
  const double d2 = grid.d * grid.d;
  const double su = res.relaxation * d2 / (3.0 * config.nu);
  const double sp =
      config.freeze_pressure ? 0.0 : res.relaxation * d2 / 3.0 * pressure_scale(config);
  const std::size_t m = grid.n_theta;
  LineResiduals r(m);
  int growth = 0;

  for (int k = 1; k <= config.max_inner; ++k) {
    const LineStencil rows{{state.u.row(n + 1), res.u, state.u.row(n - 1)},
                           {state.v.row(n + 1), res.v, state.v.row(n - 1)},
                           {state.P.row(n + 1), res.P, state.P.row(n - 1)}};
    const RowDerivatives cur = row_derivatives(res.u, res.v, res.P, grid.dtheta);
    line_residual(rows, n, cur, prev, geo, grid, opt, r.ru, r.rv, r.rp);

    double change = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double du = su * r.ru[j];
      const double dv = su * r.rv[j];
      const double dp = sp * r.rp[j];
      res.u[j] += du;
      res.v[j] += dv;
      res.P[j] += dp;
      change = std::max({change, std::abs(du), std::abs(dv), std::abs(dp)});
    }
    if (!std::isfinite(change)) throw InnerDivergence(n, k);
    res.iterations = k;
    if (!res.changes.empty() && change > res.changes.back()) {
      if (++growth >= 5) throw InnerDivergence(n, k);
    } else {
      growth = 0;
    }
    res.changes.push_back(change);
    if (change <= tol) break;
  }
  return res;
}

namespace {

// Residuals of line n as a function of its own row; neighbours frozen.
class LineProblem {
 public:
  LineProblem(std::size_t n, const FlowState& state, const GeometryCoefficients& geo,
              const DomainGrid& grid, const SolverConfig& config)
      : n_(n), state_(state), geo_(geo), grid_(grid),
        prev_(row_derivatives(state, n - 1, grid.dtheta)), freeze_(config.freeze_pressure) {
    opt_ = full_equations(config.nu, config.mode, config.epsilon);
    opt_.convection = config.convection;
    opt_.pressure_gradient = config.pressure_coupling;
  }

  std::size_t m() const { return grid_.n_theta; }

  // x = [u_n; v_n; P_n], r = [ru; rv; rp].
  void eval(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    const std::size_t m = grid_.n_theta;
    const std::span<const double> u(x.data(), m), v(x.data() + m, m), p(x.data() + 2 * m, m);
    const LineStencil rows{{state_.u.row(n_ + 1), u, state_.u.row(n_ - 1)},
                           {state_.v.row(n_ + 1), v, state_.v.row(n_ - 1)},
                           {state_.P.row(n_ + 1), p, state_.P.row(n_ - 1)}};
    const RowDerivatives cur = row_derivatives(u, v, p, grid_.dtheta);
    r.resize(static_cast<Eigen::Index>(3 * m));
    line_residual(rows, n_, cur, prev_, geo_, grid_, opt_, {r.data(), m}, {r.data() + m, m},
                  {r.data() + 2 * m, m});
    if (freeze_)
      for (std::size_t j = 0; j < m; ++j) r[2 * m + j] = p[j] - state_.P(n_, j);
  }

  // Forward-difference Jacobian. Row n enters node j's residual only through
  // theta stencils of half-width 3, so nodes 7 or more apart (periodically)
  // are perturbed together.
  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r0) const {
    const std::size_t m = grid_.n_theta;
    std::size_t colors = 7;
    while (m % colors != 0) ++colors;
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(9 * 7 * 3 * m);
    Eigen::VectorXd xp = x;
    Eigen::VectorXd r1;
    std::vector<double> h(m);
    for (std::size_t field = 0; field < 3; ++field) {
      const std::size_t off = field * m;
      for (std::size_t c = 0; c < colors; ++c) {
        for (std::size_t j = c; j < m; j += colors) {
          h[j] = 1e-7 * (1.0 + std::abs(x[off + j]));
          xp[off + j] = x[off + j] + h[j];
        }
        eval(xp, r1);
        for (std::size_t j = c; j < m; j += colors) xp[off + j] = x[off + j];
        for (std::size_t i = 0; i < m; ++i) {
          for (int delta = -3; delta <= 3; ++delta) {
            const std::size_t j = (i + m + delta) % m;
            if (j % colors != c) continue;
            for (std::size_t g = 0; g < 3; ++g) {
              const std::size_t row = g * m + i;
              const double val = (r1[row] - r0[row]) / h[j];
              if (val != 0.0) entries.emplace_back(row, off + j, val);
            }
            break;
          }
        }
      }
    }
    Eigen::SparseMatrix<double> jac(3 * m, 3 * m);
    jac.setFromTriplets(entries.begin(), entries.end());
    return jac;
  }

 private:
  std::size_t n_;
  const FlowState& state_;
  const GeometryCoefficients& geo_;
  const DomainGrid& grid_;
  OperatorOptions opt_;
  RowDerivatives prev_;
  bool freeze_;
};

}  // namespace

LineSolveResult linearized_line_solve(std::size_t n, const FlowState& state,
                                      const GeometryCoefficients& geo, const DomainGrid& grid,
                                      const SolverConfig& config, double tol) {
  if (n < 1 || n >= grid.n_lines) throw ValidationError("n", "line index must be interior");
  state.check_shape(grid);
  if (!state.has_pressure()) throw ModeMismatch("line solve needs a pressure field");
  if (tol <= 0.0) tol = config.inner_tol;

  const LineProblem problem(n, state, geo, grid, config);
  const std::size_t m = grid.n_theta;
  Eigen::VectorXd x(3 * m);
  for (std::size_t j = 0; j < m; ++j) {
    x[j] = state.u(n, j);
    x[m + j] = state.v(n, j);
    x[2 * m + j] = state.P(n, j);
  }

  LineSolveResult res;
  Eigen::VectorXd r;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  int growth = 0;
  for (int k = 1; k <= config.max_inner; ++k) {
    problem.eval(x, r);
    const Eigen::SparseMatrix<double> jac = problem.jacobian(x, r);
    lu.compute(jac);
    if (lu.info() != Eigen::Success) throw SolveFailure("singular line Jacobian");
    const Eigen::VectorXd step = lu.solve(r);
    x -= step;
    const double change = step.lpNorm<Eigen::Infinity>();
    if (!std::isfinite(change)) throw InnerDivergence(n, k);
    res.iterations = k;
    if (!res.changes.empty() && change > res.changes.back()) {
      if (++growth >= 5) throw InnerDivergence(n, k);
    } else {
      growth = 0;
    }
    res.changes.push_back(change);
    if (change <= tol) break;
  }
  res.u.assign(x.data(), x.data() + m);
  res.v.assign(x.data() + m, x.data() + 2 * m);
  res.P.assign(x.data() + 2 * m, x.data() + 3 * m);
  return res;
}

FlowState initial_state(const BoundaryData& boundary, const DomainGrid& grid,
                        const SolverConfig& config) {
  const std::size_t m = grid.n_theta;
  const std::size_t N = grid.n_lines;
  if (boundary.size() != m) throw ShapeMismatch("boundary data length does not match M");
  if (config.mode == Closure::pressure_poisson && !boundary.has_pressure())
    throw ModeMismatch("pressure_poisson mode needs pressure on both boundaries");

  FlowState s = FlowState::zeros(grid);
  s.u.set_row(0, boundary.u0);
  s.v.set_row(0, boundary.v0);
  if (!boundary.P0.empty()) s.P.set_row(0, boundary.P0);
  if (!boundary.Pf.empty()) s.P.set_row(N, boundary.Pf);

  for (std::size_t n = 1; n < N; ++n) {
    const double w = config.seed == Seed::linear_interpolation
                         ? static_cast<double>(n) / static_cast<double>(N)
                         : 1.0;
    for (Field* f : {&s.u, &s.v, &s.P})
      for (std::size_t j = 0; j < m; ++j) (*f)(n, j) = (1.0 - w) * (*f)(0, j) + w * (*f)(N, j);
  }
  return s;
}

double sweep(FlowState& state, const GeometryCoefficients& geo, const DomainGrid& grid,
             const SolverConfig& config, double inner_tol, long* inner_iterations) {
  double change = 0.0;
  for (std::size_t n = 1; n < grid.n_lines; ++n) {
    LineSolveResult line =
        config.line_solver == LineSolver::linearized
            ? linearized_line_solve(n, state, geo, grid, config, inner_tol)
            : banach_line_solve(n, state, geo, grid, config, LineSeed::current_row, inner_tol);
    change = std::max({change, max_abs_diff(line.u, state.u.row(n)),
                       max_abs_diff(line.v, state.v.row(n)),
                       max_abs_diff(line.P, state.P.row(n))});
    state.u.set_row(n, line.u);
    state.v.set_row(n, line.v);
    state.P.set_row(n, line.P);
    if (inner_iterations) *inner_iterations += line.iterations;
  }
  return change;
}

namespace {

Eigen::VectorXd pack(const FlowState& s, std::size_t n_lines) {
  const std::size_t m = s.u.cols();
  const std::size_t rows = n_lines - 1;
  Eigen::VectorXd x(3 * rows * m);
  std::size_t k = 0;
  for (const Field* f : {&s.u, &s.v, &s.P})
    for (std::size_t n = 1; n < n_lines; ++n)
      for (std::size_t j = 0; j < m; ++j) x[k++] = (*f)(n, j);
  return x;
}

void unpack(const Eigen::VectorXd& x, FlowState& s, std::size_t n_lines) {
  const std::size_t m = s.u.cols();
  std::size_t k = 0;
  for (Field* f : {&s.u, &s.v, &s.P})
    for (std::size_t n = 1; n < n_lines; ++n)
      for (std::size_t j = 0; j < m; ++j) (*f)(n, j) = x[k++];
}

}  // namespace

namespace {

SolveResult solve_impl(const BoundaryData& boundary, const GeometryCoefficients& geo,
                       const DomainGrid& grid, const SolverConfig& config,
                       const Field* pressure) {
  config.validate();
  SolveResult out{initial_state(boundary, grid, config), {}};
  if (pressure) out.state.P = *pressure;
  SolveReport& rep = out.report;
  rep.relaxation_min = 1.0;
  if (config.line_solver == LineSolver::relaxed_map)
    for (std::size_t n = 1; n < grid.n_lines; ++n)
      rep.relaxation_min = std::min(
          rep.relaxation_min,
          config.relaxation > 0.0 ? config.relaxation : line_relaxation(n, geo, grid));

  const std::size_t N = grid.n_lines;
  const int depth = std::max(0, config.anderson_depth);
  std::vector<Eigen::VectorXd> dF, dG;
  Eigen::VectorXd x = pack(out.state, N);
  Eigen::VectorXd g_prev, f_prev;
  FlowState swept = out.state;
  double last = 1.0;
  double best = std::numeric_limits<double>::infinity();

  for (int s = 1; s <= config.max_sweeps; ++s) {
    const double tol = config.adaptive_inner && depth == 0
                           ? std::max(config.inner_tol, 1e-2 * last)
                           : config.inner_tol;
    swept = out.state;
    unpack(x, swept, N);
    try {
      sweep(swept, geo, grid, config, tol, &rep.inner_iterations_total);
    } catch (const InnerDivergence&) {
      // A mixed iterate left the basin of the line solver: drop the history
      // and continue from the last plain sweep.
      if (dF.empty()) throw;
      dF.clear();
      dG.clear();
      x = g_prev;
      f_prev.resize(0);
      continue;
    }
    const Eigen::VectorXd g = pack(swept, N);
    const Eigen::VectorXd f = g - x;
    const double change = f.lpNorm<Eigen::Infinity>();

    rep.sweeps = s;
    rep.final_change = change;
    rep.contraction_ratio_estimate = s > 1 ? change / last : 0.0;
    last = change;
    if (change <= config.outer_tol) {
      rep.converged = true;
      break;
    }
    if (!std::isfinite(change)) break;

    if (depth == 0) {
      x = g;
      continue;
    }
    if (change > 1e4 * best) {
      dF.clear();
      dG.clear();
      f_prev.resize(0);
    }
    best = std::min(best, change);
    if (f_prev.size() == f.size()) {
      dF.push_back(f - f_prev);
      dG.push_back(g - g_prev);
      if (static_cast<int>(dF.size()) > depth) {
        dF.erase(dF.begin());
        dG.erase(dG.begin());
      }
    }
    f_prev = f;
    g_prev = g;
    if (dF.empty()) {
      x = g;
      continue;
    }
    Eigen::MatrixXd A(f.size(), static_cast<Eigen::Index>(dF.size()));
    for (std::size_t c = 0; c < dF.size(); ++c) A.col(static_cast<Eigen::Index>(c)) = dF[c];
    const Eigen::VectorXd gamma = A.colPivHouseholderQr().solve(f);
    x = g;
    for (std::size_t c = 0; c < dG.size(); ++c) x -= gamma[static_cast<Eigen::Index>(c)] * dG[c];
  }
  out.state = std::move(swept);
  rep.J_final = evaluate_J(out.state, geo, grid, config.nu).J;
  if (!rep.converged) throw NoConvergence(rep, std::move(out.state));
  return out;
}

}  // namespace

SolveResult solve(const BoundaryData& boundary, const GeometryCoefficients& geo,
                  const DomainGrid& grid, const SolverConfig& config) {
  if (config.freeze_pressure)
    throw ValidationError("freeze_pressure", "use solve_with_pressure to supply the rows");
  return solve_impl(boundary, geo, grid, config, nullptr);
}

SolveResult solve_with_pressure(const BoundaryData& boundary, const Field& pressure,
                                const GeometryCoefficients& geo, const DomainGrid& grid,
                                SolverConfig config) {
  if (pressure.rows() != grid.n_lines + 1 || pressure.cols() != grid.n_theta)
    throw ShapeMismatch("pressure field does not match the grid");
  BoundaryData b = boundary;
  b.P0.assign(pressure.row(0).begin(), pressure.row(0).end());
  b.Pf.assign(pressure.row(grid.n_lines).begin(), pressure.row(grid.n_lines).end());
  config.freeze_pressure = true;
  config.mode = Closure::pressure_poisson;
  return solve_impl(b, geo, grid, config, &pressure);
}

}  // namespace gmol
