#include "gmol/ansatz.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <thread>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "gmol/solver.hpp"

namespace gmol {

const std::array<std::string_view, kUTerms> u_term_names = {
    "cos", "u0", "cos*u0^2", "sin*u0*v0", "sin*u0*u0'", "cos*v0*u0'",
    "u0''", "sin", "sin*P0", "cos*P0", "1"};

// b5 and b6 are printed as sin v0' u0 and cos v0 u0'; b6 is taken as
// cos v0 v0', the mirror of a6 = cos v0 u0'.
const std::array<std::string_view, kVTerms> v_term_names = {
    "sin", "v0", "sin*v0^2", "cos*u0*v0", "sin*u0*v0'", "cos*v0*v0'",
    "v0''", "cos", "sin*P0", "cos*P0", "1"};

const std::array<std::string_view, kPTerms> p_term_names = {
    "1", "cos*u0", "sin*v0", "sin*u0'", "cos*v0'", "u0''", "v0''", "P0", "P0''"};

const std::array<std::string_view, kPTerms> c_labels = {"c1", "c2", "c3", "c4", "c5",
                                                        "c6", "c7", "c9", "c10"};

AnsatzCoefficients AnsatzCoefficients::zeros(std::size_t interior_lines) {
  return {Field(interior_lines, kUTerms), Field(interior_lines, kVTerms),
          Field(interior_lines, kPTerms)};
}

bool AnsatzCoefficients::all_finite() const {
  for (const Field* f : {&a, &b, &c})
    for (double x : f->values())
      if (!std::isfinite(x)) return false;
  return true;
}

TargetNotReached::TargetNotReached(ResidualReport report_)
    : Error("fit stopped at J = " + std::to_string(report_.J) + " above the target"),
      report(report_) {}

void require_target(const FitResult& result) {
  if (!result.target_reached) throw TargetNotReached(result.report);
}

int worker_threads(int requested) {
  int n = requested;
  if (n <= 0) {
    n = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("GMOL_THREADS")) {
      const int cap = std::atoi(env);
      if (cap > 0) n = std::min(n, cap);
    }
  }
  return std::max(1, n);
}

BasisEvaluation assemble_basis(const BoundaryData& bd, std::span<const double> P0,
                               const DomainGrid& grid) {
  const std::size_t m = grid.n_theta;
  if (bd.size() != m || P0.size() != m) throw ShapeMismatch("basis data length does not match M");
  const LineFunction d2P0 = theta_derivative(P0, 2, grid.dtheta);
  BasisEvaluation out{Field(m, kUTerms), Field(m, kVTerms), Field(m, kPTerms)};
  for (std::size_t j = 0; j < m; ++j) {
    const double c = std::cos(grid.theta[j]);
    const double s = std::sin(grid.theta[j]);
    const double u0 = bd.u0[j], du0 = bd.du0[j], d2u0 = bd.d2u0[j];
    const double v0 = bd.v0[j], dv0 = bd.dv0[j], d2v0 = bd.d2v0[j];
    const double p0 = P0[j];
    const double u[kUTerms] = {c, u0, c * u0 * u0, s * u0 * v0, s * u0 * du0, c * v0 * du0,
                               d2u0, s, s * p0, c * p0, 1.0};
    const double v[kVTerms] = {s, v0, s * v0 * v0, c * u0 * v0, s * u0 * dv0, c * v0 * dv0,
                               d2v0, c, s * p0, c * p0, 1.0};
    const double p[kPTerms] = {1.0, c * u0, s * v0, s * du0, c * dv0, d2u0, d2v0, p0, d2P0[j]};
    for (std::size_t k = 0; k < kUTerms; ++k) out.u(j, k) = u[k];
    for (std::size_t k = 0; k < kVTerms; ++k) out.v(j, k) = v[k];
    for (std::size_t k = 0; k < kPTerms; ++k) out.p(j, k) = p[k];
  }
  return out;
}

namespace {

void apply_basis(const Field& basis, const Field& coeffs, std::size_t line, std::span<double> out) {
  const std::size_t k_count = basis.cols();
  for (std::size_t j = 0; j < basis.rows(); ++j) {
    double acc = 0.0;
    for (std::size_t k = 0; k < k_count; ++k) acc += basis(j, k) * coeffs(line, k);
    out[j] = acc;
  }
}

}  // namespace

FlowState evaluate_ansatz(const AnsatzCoefficients& coeffs, std::span<const double> P0,
                          const BasisEvaluation& basis, const DomainGrid& grid) {
  const std::size_t m = grid.n_theta;
  const std::size_t N = grid.n_lines;
  if (coeffs.a.rows() != N - 1 || coeffs.b.rows() != N - 1 || coeffs.c.rows() != N - 1 ||
      coeffs.a.cols() != kUTerms || coeffs.b.cols() != kVTerms || coeffs.c.cols() != kPTerms)
    throw ShapeMismatch("coefficient arrays do not match the grid");
  if (basis.u.rows() != m || basis.v.rows() != m || basis.p.rows() != m || P0.size() != m)
    throw ShapeMismatch("basis does not match the grid");

  FlowState s = FlowState::zeros(grid);
  for (std::size_t j = 0; j < m; ++j) {
    s.u(0, j) = basis.u(j, 1);
    s.v(0, j) = basis.v(j, 1);
    s.P(0, j) = P0[j];
  }
  for (std::size_t n = 1; n < N; ++n) {
    apply_basis(basis.u, coeffs.a, n - 1, s.u.row(n));
    apply_basis(basis.v, coeffs.b, n - 1, s.v.row(n));
    apply_basis(basis.p, coeffs.c, n - 1, s.P.row(n));
  }
  for (std::size_t j = 0; j < m; ++j) s.P(N, j) = 2.0 * s.P(N - 1, j) - s.P(N - 2, j);
  return s;
}

namespace {

// Unknown vector layout: a (line-major), b, c, then the M samples of P0.
class FitProblem {
 public:
  FitProblem(const BoundaryData& bd, const GeometryCoefficients& geo, const DomainGrid& grid,
             double nu, double penalty)
      : bd_(bd), geo_(geo), grid_(grid), nu_(nu), sqrt_penalty_(std::sqrt(penalty)),
        lines_(grid.n_lines - 1), m_(grid.n_theta) {}

  std::size_t lines() const { return lines_; }
  std::size_t unknowns() const { return lines_ * (kUTerms + kVTerms + kPTerms) + m_; }
  std::size_t j_rows() const { return 3 * lines_ * m_; }
  std::size_t rows() const { return j_rows() + m_; }
  std::size_t a_index(std::size_t n, std::size_t k) const { return (n - 1) * kUTerms + k; }
  std::size_t b_index(std::size_t n, std::size_t k) const {
    return lines_ * kUTerms + (n - 1) * kVTerms + k;
  }
  std::size_t c_index(std::size_t n, std::size_t k) const {
    return lines_ * (kUTerms + kVTerms) + (n - 1) * kPTerms + k;
  }
  std::size_t p0_index(std::size_t j) const {
    return lines_ * (kUTerms + kVTerms + kPTerms) + j;
  }

  void unpack(const Eigen::VectorXd& x, AnsatzCoefficients& c, LineFunction& P0) const {
    c = AnsatzCoefficients::zeros(lines_);
    for (std::size_t n = 1; n <= lines_; ++n) {
      for (std::size_t k = 0; k < kUTerms; ++k) c.a(n - 1, k) = x[a_index(n, k)];
      for (std::size_t k = 0; k < kVTerms; ++k) c.b(n - 1, k) = x[b_index(n, k)];
      for (std::size_t k = 0; k < kPTerms; ++k) c.c(n - 1, k) = x[c_index(n, k)];
    }
    P0.resize(m_);
    for (std::size_t j = 0; j < m_; ++j) P0[j] = x[p0_index(j)];
  }

  Eigen::VectorXd pack(const AnsatzCoefficients& c, std::span<const double> P0) const {
    Eigen::VectorXd x(unknowns());
    for (std::size_t n = 1; n <= lines_; ++n) {
      for (std::size_t k = 0; k < kUTerms; ++k) x[a_index(n, k)] = c.a(n - 1, k);
      for (std::size_t k = 0; k < kVTerms; ++k) x[b_index(n, k)] = c.b(n - 1, k);
      for (std::size_t k = 0; k < kPTerms; ++k) x[c_index(n, k)] = c.c(n - 1, k);
    }
    for (std::size_t j = 0; j < m_; ++j) x[p0_index(j)] = P0[j];
    return x;
  }

  FlowState state(const Eigen::VectorXd& x) const {
    AnsatzCoefficients c;
    LineFunction P0;
    unpack(x, c, P0);
    return evaluate_ansatz(c, P0, assemble_basis(bd_, P0, grid_), grid_);
  }

  // Momentum u, momentum v, continuity (line-major each), then the penalty.
  void residual(const Eigen::VectorXd& x, Eigen::VectorXd& r) const {
    const FlowState s = state(x);
    OperatorOptions opt;
    opt.nu = nu_;
    opt.closure = Closure::continuity;
    const ResidualFields f = grid_residual_operators(s, geo_, grid_, opt);
    r.resize(static_cast<Eigen::Index>(rows()));
    const std::size_t block = lines_ * m_;
    std::copy(f.momentum_u.values().begin(), f.momentum_u.values().end(), r.data());
    std::copy(f.momentum_v.values().begin(), f.momentum_v.values().end(), r.data() + block);
    std::copy(f.closure.values().begin(), f.closure.values().end(), r.data() + 2 * block);
    const LineFunction d2 = theta_derivative(s.P.row(0), 2, grid_.dtheta);
    for (std::size_t j = 0; j < m_; ++j) r[j_rows() + j] = sqrt_penalty_ * d2[j];
  }

  double J_part(const Eigen::VectorXd& r) const {
    return r.head(static_cast<Eigen::Index>(j_rows())).squaredNorm();
  }

  Eigen::SparseMatrix<double> jacobian(const Eigen::VectorXd& x, const Eigen::VectorXd& r0,
                                       int threads) const {
    // Coefficients of line n reach residual lines n-1..n+1, so lines three
    // apart are perturbed together. P0 at node j reaches nodes j-6..j+6.
    std::size_t p_colors = 13;
    while (m_ % p_colors != 0) ++p_colors;
    struct Task {
      int kind;  // 0 a, 1 b, 2 c, 3 P0
      std::size_t color, term;
    };
    std::vector<Task> tasks;
    for (std::size_t color = 0; color < 3; ++color) {
      for (std::size_t k = 0; k < kUTerms; ++k) tasks.push_back({0, color, k});
      for (std::size_t k = 0; k < kVTerms; ++k) tasks.push_back({1, color, k});
      for (std::size_t k = 0; k < kPTerms; ++k) tasks.push_back({2, color, k});
    }
    for (std::size_t color = 0; color < p_colors; ++color) tasks.push_back({3, color, 0});

    std::vector<std::vector<Eigen::Triplet<double>>> parts(tasks.size());
    auto run = [&](std::size_t t) {
      const Task& task = tasks[t];
      Eigen::VectorXd xp = x;
      Eigen::VectorXd r1;
      std::vector<double> h(task.kind == 3 ? m_ : lines_ + 1, 0.0);
      auto column = [&](std::size_t i) -> std::size_t {
        if (task.kind == 0) return a_index(i, task.term);
        if (task.kind == 1) return b_index(i, task.term);
        if (task.kind == 2) return c_index(i, task.term);
        return p0_index(i);
      };
      if (task.kind == 3) {
        for (std::size_t j = task.color; j < m_; j += p_colors) {
          const std::size_t col = column(j);
          h[j] = 1e-7 * (1.0 + std::abs(x[col]));
          xp[col] += h[j];
        }
      } else {
        for (std::size_t n = 1; n <= lines_; ++n) {
          if (n % 3 != task.color) continue;
          const std::size_t col = column(n);
          h[n] = 1e-7 * (1.0 + std::abs(x[col]));
          xp[col] += h[n];
        }
      }
      residual(xp, r1);
      auto& out = parts[t];
      for (std::size_t eq = 0; eq < 3; ++eq) {
        for (std::size_t line = 1; line <= lines_; ++line) {
          for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t row = (eq * lines_ + line - 1) * m_ + i;
            const double diff = r1[row] - r0[row];
            if (diff == 0.0) continue;
            std::size_t src = 0;
            bool found = false;
            if (task.kind == 3) {
              for (int delta = -6; delta <= 6 && !found; ++delta) {
                const std::size_t j = (i + 6 * m_ + delta) % m_;
                if (j % p_colors == task.color) {
                  src = j;
                  found = true;
                }
              }
            } else {
              for (std::size_t n = line > 1 ? line - 1 : 1; n <= std::min(line + 1, lines_); ++n)
                if (n % 3 == task.color) {
                  src = n;
                  found = true;
                }
            }
            if (found) out.emplace_back(row, column(src), diff / h[src]);
          }
        }
      }
    };

    const std::size_t workers =
        std::min<std::size_t>(static_cast<std::size_t>(std::max(1, threads)), tasks.size());
    if (workers <= 1) {
      for (std::size_t t = 0; t < tasks.size(); ++t) run(t);
    } else {
      std::vector<std::thread> pool;
      for (std::size_t w = 0; w < workers; ++w)
        pool.emplace_back([&, w] {
          for (std::size_t t = w; t < tasks.size(); t += workers) run(t);
        });
      for (auto& th : pool) th.join();
    }

    std::vector<Eigen::Triplet<double>> all;
    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    all.reserve(total + 7 * m_);
    for (const auto& p : parts) all.insert(all.end(), p.begin(), p.end());
    // Penalty rows are linear in P0: sqrt(lambda) times the periodic D2 stencil.
    const double w[4] = {-49.0 / 18.0, 1.5, -0.15, 1.0 / 90.0};
    const double scale = sqrt_penalty_ / (grid_.dtheta * grid_.dtheta);
    if (scale != 0.0)
      for (std::size_t i = 0; i < m_; ++i)
        for (int delta = -3; delta <= 3; ++delta) {
          const std::size_t j = (i + m_ + delta) % m_;
          all.emplace_back(j_rows() + i, p0_index(j), scale * w[std::abs(delta)]);
        }
    Eigen::SparseMatrix<double> jac(static_cast<Eigen::Index>(rows()),
                                    static_cast<Eigen::Index>(unknowns()));
    jac.setFromTriplets(all.begin(), all.end());
    return jac;
  }

  const BoundaryData& boundary() const { return bd_; }
  const DomainGrid& grid() const { return grid_; }

 private:
  const BoundaryData& bd_;
  const GeometryCoefficients& geo_;
  const DomainGrid& grid_;
  double nu_;
  double sqrt_penalty_;
  std::size_t lines_, m_;
};

struct StartResult {
  Eigen::VectorXd x;
  double J = std::numeric_limits<double>::infinity();
  int iterations = 0;
  std::vector<double> history;
};

StartResult levenberg_marquardt(const FitProblem& prob, Eigen::VectorXd x,
                                const FitOptions& opt, int threads) {
  StartResult res;
  Eigen::VectorXd r;
  prob.residual(x, r);
  double phi = r.squaredNorm();
  double mu = opt.initial_damping;
  res.history.push_back(phi);
  int stalls = 0;

  for (int it = 1; it <= opt.max_iterations; ++it) {
    if (prob.J_part(r) <= opt.target) break;
    const Eigen::SparseMatrix<double> jac = prob.jacobian(x, r, threads);
    const Eigen::SparseMatrix<double> jt = jac.transpose();
    const Eigen::MatrixXd A = Eigen::MatrixXd(jt * jac);
    const Eigen::VectorXd g = jt * r;
    Eigen::VectorXd diag = A.diagonal();
    const double floor = 1e-12 * std::max(1.0, diag.maxCoeff());
    for (Eigen::Index i = 0; i < diag.size(); ++i) diag[i] = std::max(diag[i], floor);

    bool accepted = false;
    double phi_new = phi;
    Eigen::VectorXd x_new, r_new;
    while (mu < 1e16) {
      Eigen::MatrixXd M = A;
      M.diagonal() += mu * diag;
      const Eigen::VectorXd step = M.ldlt().solve(-g);
      x_new = x + step;
      prob.residual(x_new, r_new);
      phi_new = r_new.squaredNorm();
      if (std::isfinite(phi_new) && phi_new < phi) {
        accepted = true;
        mu = std::max(mu / opt.damping_factor, 1e-15);
        break;
      }
      mu *= opt.damping_factor;
    }
    res.iterations = it;
    if (!accepted) break;
    const double gain = (phi - phi_new) / phi;
    x = std::move(x_new);
    r = std::move(r_new);
    phi = phi_new;
    res.history.push_back(phi);
    stalls = gain < 1e-10 ? stalls + 1 : 0;
    if (stalls >= 3) break;
  }
  res.J = prob.J_part(r);
  res.x = std::move(x);
  return res;
}

// Least-squares projection of a flow state onto the basis, line by line.
Eigen::VectorXd project(const FitProblem& prob, const FlowState& s) {
  const DomainGrid& grid = prob.grid();
  const std::size_t m = grid.n_theta;
  const LineFunction P0(s.P.row(0).begin(), s.P.row(0).end());
  const BasisEvaluation basis = assemble_basis(prob.boundary(), P0, grid);
  auto to_matrix = [&](const Field& f) {
    Eigen::MatrixXd B(m, f.cols());
    for (std::size_t j = 0; j < m; ++j)
      for (std::size_t k = 0; k < f.cols(); ++k) B(j, k) = f(j, k);
    return B;
  };
  const auto qu = to_matrix(basis.u).completeOrthogonalDecomposition();
  const auto qv = to_matrix(basis.v).completeOrthogonalDecomposition();
  const auto qp = to_matrix(basis.p).completeOrthogonalDecomposition();
  AnsatzCoefficients c = AnsatzCoefficients::zeros(prob.lines());
  for (std::size_t n = 1; n <= prob.lines(); ++n) {
    auto row = [&](const Field& f) {
      return Eigen::Map<const Eigen::VectorXd>(f.row(n).data(), static_cast<Eigen::Index>(m));
    };
    const Eigen::VectorXd a = qu.solve(row(s.u));
    const Eigen::VectorXd b = qv.solve(row(s.v));
    const Eigen::VectorXd p = qp.solve(row(s.P));
    for (std::size_t k = 0; k < kUTerms; ++k) c.a(n - 1, k) = a[k];
    for (std::size_t k = 0; k < kVTerms; ++k) c.b(n - 1, k) = b[k];
    for (std::size_t k = 0; k < kPTerms; ++k) c.c(n - 1, k) = p[k];
  }
  return prob.pack(c, P0);
}

bool finite_state(const FlowState& s) {
  for (const Field* f : {&s.u, &s.v, &s.P})
    for (double x : f->values())
      if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace

FitResult fit(const BoundaryData& boundary, const GeometryCoefficients& geo,
              const DomainGrid& grid, double nu, const FitOptions& options) {
  if (boundary.size() != grid.n_theta) throw ShapeMismatch("boundary data length does not match M");
  if (!(nu > 0.0)) throw ValidationError("nu", "must be positive");
  if (!(options.target > 0.0)) throw ValidationError("fit.target", "must be positive");
  if (options.max_iterations < 0) throw ValidationError("fit.max_iterations", "must be >= 0");

  const FitProblem prob(boundary, geo, grid, nu, options.p0_penalty);
  const int threads = worker_threads(options.threads);

  StartResult best = levenberg_marquardt(prob, Eigen::VectorXd::Zero(prob.unknowns()), options,
                                         threads);
  std::string start = "zero";
  std::string note;

  if (best.J > options.target && !options.solver_seed) note = "disabled";
  if (best.J > options.target && options.solver_seed) {
    SolverConfig sc;
    sc.nu = nu;
    sc.mode = Closure::artificial_compressibility;
    sc.epsilon = options.seed_epsilon;
    sc.max_sweeps = options.seed_max_sweeps;
    FlowState seed_state;
    try {
      seed_state = solve(boundary, geo, grid, sc).state;
    } catch (const NoConvergence& e) {
      seed_state = e.state;
      note = "seed solve did not converge; last sweep used";
    } catch (const Error& e) {
      note = std::string("seed solve failed: ") + e.what();
    }
    if (!seed_state.u.empty() && finite_state(seed_state)) {
      StartResult seeded = levenberg_marquardt(prob, project(prob, seed_state), options, threads);
      if (seeded.J < best.J) {
        best = std::move(seeded);
        start = "solver_seed";
      }
    } else if (note.empty()) {
      note = "seed solve produced a non-finite state";
    }
  }

  FitResult out;
  prob.unpack(best.x, out.coeffs, out.P0);
  out.state = prob.state(best.x);
  out.report = evaluate_J(out.state, geo, grid, nu);
  out.target_reached = out.report.J <= options.target;
  out.iterations = best.iterations;
  out.objective_history = std::move(best.history);
  out.start = start;
  out.seed_note = note;
  return out;
}

}  // namespace gmol
