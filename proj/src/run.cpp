#include "gmol/run.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>

#include "gmol/io.hpp"

namespace gmol {

namespace {

// O_EXCL lock file; a crashed run leaves it behind and it must be removed by hand.
class DirectoryLock {
 public:
  explicit DirectoryLock(const fs::path& dir) : path_(dir / ".gmol.lock") {
    fd_ = ::open(path_.c_str(), O_CREAT | O_EXCL | O_WRONLY, 0644);
    if (fd_ < 0) {
      const std::string why = errno == EEXIST ? "another run holds " : std::strerror(errno);
      throw ValidationError("outputs", why + path_.string());
    }
  }
  ~DirectoryLock() {
    ::close(fd_);
    std::error_code ec;
    fs::remove(path_, ec);
  }
  DirectoryLock(const DirectoryLock&) = delete;
  DirectoryLock& operator=(const DirectoryLock&) = delete;

 private:
  fs::path path_;
  int fd_ = -1;
};

std::string yes_no(bool b) { return b ? "true" : "false"; }

void add_run_keys(KeyValues& kv, std::string_view command, const RunConfig& c) {
  kv.emplace_back("command", std::string(command));
  kv.emplace_back("N", std::to_string(c.N));
  kv.emplace_back("M", std::to_string(c.M));
  kv.emplace_back("nu", format_double(c.nu));
  kv.emplace_back("boundary", c.boundary);
}

void add_residual_keys(KeyValues& kv, const ResidualReport& r) {
  kv.emplace_back("J", format_double(r.J));
  kv.emplace_back("momentum_u_norm2", format_double(r.momentum_u_norm2));
  kv.emplace_back("momentum_v_norm2", format_double(r.momentum_v_norm2));
  kv.emplace_back("continuity_norm2", format_double(r.continuity_norm2));
  kv.emplace_back("quadrature", std::string(to_string(r.quadrature)));
  kv.emplace_back("scaling", std::string(to_string(r.scaling)));
}

void write_figures(const fs::path& dir, const FlowState& s, const DomainGrid& grid) {
  std::vector<std::size_t> lines;
  for (std::size_t n : kFigureLines)
    if (n < grid.n_lines) lines.push_back(n);
  write_line_table(dir / "figure_u.csv", s.u, lines, grid);
  write_line_table(dir / "figure_v.csv", s.v, lines, grid);
  write_line_table(dir / "figure_P.csv", s.P, lines, grid);
}

int cmd_solve(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const DomainGrid grid = c.grid();
  const GeometryCoefficients geo = build_coefficients(c.shape, grid);
  const BoundaryData boundary = load_boundary(c, grid);
  const SolverConfig sc = c.solver_config();

  SolveResult result;
  std::string failure;
  try {
    result = solve(boundary, geo, grid, sc);
  } catch (const NoConvergence& e) {
    result = {e.state, e.report};
    failure = e.what();
  }
  const SolveReport& r = result.report;
  write_state(out, result.state, grid);
  write_figures(out, result.state, grid);

  KeyValues kv;
  add_run_keys(kv, "solve", c);
  kv.emplace_back("mode", std::string(to_string(c.mode)));
  if (c.mode == Closure::artificial_compressibility) kv.emplace_back("epsilon", format_double(c.epsilon));
  kv.emplace_back("line_solver", std::string(to_string(c.line_solver)));
  kv.emplace_back("anderson_depth", std::to_string(c.anderson_depth));
  kv.emplace_back("converged", yes_no(r.converged));
  kv.emplace_back("sweeps", std::to_string(r.sweeps));
  kv.emplace_back("inner_iterations_total", std::to_string(r.inner_iterations_total));
  kv.emplace_back("final_change", format_double(r.final_change));
  kv.emplace_back("contraction_ratio_estimate", format_double(r.contraction_ratio_estimate));
  kv.emplace_back("relaxation_min", format_double(r.relaxation_min));
  add_residual_keys(kv, evaluate_J(result.state, geo, grid, c.nu, c.quadrature));
  const ResidualFields rf = residual_fields(result.state, geo, grid, c.nu, c.mode, c.epsilon);
  kv.emplace_back("closure_residual_sup", format_double(rf.closure.max_abs()));
  write_key_values(out / "report.txt", kv);

  if (!failure.empty()) {
    log << "solve: " << failure << '\n';
    return kExitNumeric;
  }
  log << "solve: converged after " << r.sweeps << " sweeps, J = " << r.J_final << '\n';
  return kExitOk;
}

int cmd_fit(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const DomainGrid grid = c.grid();
  const GeometryCoefficients geo = build_coefficients(c.shape, grid);
  const BoundaryData boundary = load_boundary(c, grid);
  const FitResult f = fit(boundary, geo, grid, c.nu, c.fit);

  write_state(out, f.state, grid);
  write_figures(out, f.state, grid);
  write_coefficients(out, f.coeffs);
  write_line_csv(out / "P0.csv", grid.theta, f.P0);

  KeyValues kv;
  add_run_keys(kv, "fit", c);
  kv.emplace_back("target", format_double(c.fit.target));
  kv.emplace_back("target_reached", yes_no(f.target_reached));
  kv.emplace_back("iterations", std::to_string(f.iterations));
  kv.emplace_back("start", f.start);
  if (!f.seed_note.empty()) kv.emplace_back("seed_note", f.seed_note);
  kv.emplace_back("objective_initial", format_double(f.objective_history.front()));
  kv.emplace_back("objective_final", format_double(f.objective_history.back()));
  add_residual_keys(kv, f.report);
  std::string lines;
  for (std::size_t n : kFigureLines)
    if (n < grid.n_lines) lines += (lines.empty() ? "" : ",") + std::to_string(n);
  kv.emplace_back("figure_lines", lines);
  write_key_values(out / "report.txt", kv);

  try {
    require_target(f);
  } catch (const TargetNotReached& e) {
    log << "fit: " << e.what() << '\n';
    return kExitNumeric;
  }
  log << "fit: J = " << f.report.J << " after " << f.iterations << " iterations\n";
  return kExitOk;
}

int cmd_verify(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const TheoremCase& t = c.theorem;
  const CertificationReport r = certify(t.w1, t.forcing, t.n, t.nu);
  KeyValues kv;
  kv.emplace_back("command", "verify-theorem");
  kv.emplace_back("w1", r.w1);
  kv.emplace_back("forcing", r.forcing);
  kv.emplace_back("n", std::to_string(r.n));
  kv.emplace_back("h", format_double(r.h));
  kv.emplace_back("nu", format_double(r.nu));
  kv.emplace_back("divergence_sup", format_double(r.main.divergence_sup));
  kv.emplace_back("curl_sup", format_double(r.main.curl_sup));
  kv.emplace_back("curl_sup_with_edges", format_double(r.main.curl_sup_with_edges));
  kv.emplace_back("potential_residual_sup", format_double(r.main.potential_residual_sup));
  kv.emplace_back("pressure_path_defect", format_double(r.main.pressure_defect));
  kv.emplace_back("momentum_sup", format_double(r.main.momentum_sup));
  if (r.main.pressure_error >= 0.0)
    kv.emplace_back("pressure_error", format_double(r.main.pressure_error));
  for (std::size_t k = 0; k < r.refinement_n.size(); ++k) {
    const std::string tag = "refinement_" + std::to_string(r.refinement_n[k]);
    kv.emplace_back(tag + "_divergence", format_double(r.refinement_divergence[k]));
    kv.emplace_back(tag + "_curl", format_double(r.refinement_curl[k]));
  }
  kv.emplace_back("divergence_order", format_double(r.divergence_order));
  kv.emplace_back("curl_order", format_double(r.curl_order));
  write_key_values(out / "report.txt", kv);
  log << "verify-theorem: divergence " << r.main.divergence_sup << ", curl " << r.main.curl_sup
      << ", orders " << r.divergence_order << " / " << r.curl_order << '\n';
  return kExitOk;
}

int cmd_report(const RunConfig& c, const fs::path& out, std::ostream& log) {
  const DomainGrid grid = c.grid();
  const GeometryCoefficients geo = build_coefficients(c.shape, grid);
  const FlowState s = read_state(out, grid);
  const ResidualReport r = evaluate_J(s, geo, grid, c.nu, c.quadrature);
  KeyValues kv;
  add_run_keys(kv, "report", c);
  add_residual_keys(kv, r);
  write_key_values(out / "report_recheck.txt", kv);
  log << "report: J = " << format_double(r.J) << '\n';
  return kExitOk;
}

}  // namespace

BoundaryData load_boundary(const RunConfig& config, const DomainGrid& grid) {
  if (is_preset(config.boundary)) return make_preset(config.boundary, grid);
  return read_boundary_csv(config.boundary, grid);
}

int run(std::string_view command, const RunConfig& config, std::ostream& log) {
  using Fn = int (*)(const RunConfig&, const fs::path&, std::ostream&);
  Fn fn = nullptr;
  if (command == "solve") fn = cmd_solve;
  if (command == "fit") fn = cmd_fit;
  if (command == "verify-theorem") fn = cmd_verify;
  if (command == "report") fn = cmd_report;
  if (!fn) {
    log << "unknown command '" << command << "'\n";
    return kExitConfig;
  }
  try {
    const fs::path out = config.outputs;
    fs::create_directories(out);
    DirectoryLock lock(out);
    return fn(config, out, log);
  } catch (const NoConvergence& e) {
    log << e.what() << '\n';
    return kExitNumeric;
  } catch (const TargetNotReached& e) {
    log << e.what() << '\n';
    return kExitNumeric;
  } catch (const NotAGradient& e) {
    log << e.what() << '\n';
    return kExitNumeric;
  } catch (const InnerDivergence& e) {
    log << e.what() << '\n';
    return kExitNumeric;
  } catch (const SolveFailure& e) {
    log << e.what() << '\n';
    return kExitNumeric;
  } catch (const std::exception& e) {
    // Parse/validation errors, mode or shape mismatches, unreadable files.
    log << e.what() << '\n';
    return kExitConfig;
  }
}

}  // namespace gmol
