#pragma once
// Line-wise functional ansatz in the inner boundary data and its least-squares
// fit against J.
//
//   u_n = a1 cos + a2 u0 + a3 cos u0^2 + a4 sin u0 v0 + a5 sin u0 u0'
//       + a6 cos v0 u0' + a7 u0'' + a8 sin + a9 sin P0 + a10 cos P0 + a11
//   v_n = b1 sin + b2 v0 + b3 sin v0^2 + b4 cos u0 v0 + b5 sin u0 v0'
//       + b6 cos v0 v0' + b7 v0'' + b8 cos + b9 sin P0 + b10 cos P0 + b11
//   P_n = c1 + c2 cos u0 + c3 sin v0 + c4 sin u0' + c5 cos v0' + c6 u0''
//       + c7 v0'' + c9 P0 + c10 P0''
//
// P0, the inner pressure trace, is unknown and fitted with the coefficients.

#include <array>
#include <string>
#include <string_view>
#include <vector>

#include "gmol/boundary.hpp"
#include "gmol/errors.hpp"
#include "gmol/residual.hpp"

namespace gmol {

inline constexpr std::size_t kUTerms = 11;
inline constexpr std::size_t kVTerms = 11;
inline constexpr std::size_t kPTerms = 9;

extern const std::array<std::string_view, kUTerms> u_term_names;
extern const std::array<std::string_view, kVTerms> v_term_names;
extern const std::array<std::string_view, kPTerms> p_term_names;
// Coefficient labels as indexed in the expansions: a1..a11, b1..b11, and
// c1..c7, c9, c10 (there is no c8).
extern const std::array<std::string_view, kPTerms> c_labels;

// Row n-1 of each array holds line n.
struct AnsatzCoefficients {
  Field a, b, c;

  static AnsatzCoefficients zeros(std::size_t interior_lines);
  std::size_t lines() const { return a.rows(); }
  bool all_finite() const;
};

// Line-independent basis matrices (M x K); columns follow the term lists.
struct BasisEvaluation {
  Field u, v, p;
};

// The P0 columns use the given P0 samples (length M).
BasisEvaluation assemble_basis(const BoundaryData& boundary, std::span<const double> P0,
                               const DomainGrid& grid);

// Interior rows from the expansions; row 0 carries u0, v0 (basis columns) and
// P0; the outer velocity row is zero and the outer pressure row is linearly
// extrapolated (it does not enter J). Throws ShapeMismatch.
FlowState evaluate_ansatz(const AnsatzCoefficients& coeffs, std::span<const double> P0,
                          const BasisEvaluation& basis, const DomainGrid& grid);

struct FitOptions {
  double target = 1e-6;
  int max_iterations = 200;
  double p0_penalty = 1e-8;  // weight of |P0''|^2
  double initial_damping = 1e-3;
  double damping_factor = 10.0;
  // Second start from an artificial-compressibility solve projected onto the
  // basis; used when the zero start misses the target.
  bool solver_seed = true;
  double seed_epsilon = 1e-3;
  int seed_max_sweeps = 2000;
  int threads = 0;  // 0: GMOL_THREADS or hardware concurrency
};

struct FitResult {
  AnsatzCoefficients coeffs;
  LineFunction P0;
  FlowState state;
  ResidualReport report;
  bool target_reached = false;
  int iterations = 0;
  // Penalized objective J + penalty after each accepted step of the
  // returned start (first entry: starting point).
  std::vector<double> objective_history;
  std::string start;       // "zero" or "solver_seed"
  std::string seed_note;   // why the seeded start was skipped, if it was
};

class TargetNotReached : public Error {
 public:
  explicit TargetNotReached(ResidualReport report);
  ResidualReport report;
};

// Levenberg-Marquardt on [a; b; c; P0]. Never throws TargetNotReached itself;
// see require_target.
FitResult fit(const BoundaryData& boundary, const GeometryCoefficients& geo,
              const DomainGrid& grid, double nu, const FitOptions& options = {});

// Throws TargetNotReached unless result.target_reached.
void require_target(const FitResult& result);

// Number of worker threads for Jacobian columns.
int worker_threads(int requested);

}  // namespace gmol
