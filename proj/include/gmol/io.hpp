#pragma once
// CSV persistence. Every number is written with %.17g so a write/read cycle
// is exact for doubles.

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "gmol/ansatz.hpp"
#include "gmol/boundary.hpp"
#include "gmol/operators.hpp"

namespace gmol {

namespace fs = std::filesystem;

std::string format_double(double x);

// "theta,value" with one row per theta node.
void write_line_csv(const fs::path& path, std::span<const double> theta,
                    std::span<const double> values);
// Returns the value column; throws ValidationError on malformed files or when
// theta does not match the grid.
LineFunction read_line_csv(const fs::path& path, const DomainGrid& grid);

// theta,u0,v0[,P0,Pf]; a header line is optional.
BoundaryData read_boundary_csv(const fs::path& path, const DomainGrid& grid);

// u_<n>.csv, v_<n>.csv, P_<n>.csv for every line n = 0..N.
void write_state(const fs::path& dir, const FlowState& state, const DomainGrid& grid);
FlowState read_state(const fs::path& dir, const DomainGrid& grid);

// Side-by-side columns for selected lines: theta, j (the node index, the
// figure axis unit 2 pi / M), then one column per line.
void write_line_table(const fs::path& path, const Field& f, const std::vector<std::size_t>& lines,
                      const DomainGrid& grid);

// coeff_a.csv (n,a1..a11), coeff_b.csv (n,b1..b11), coeff_c.csv
// (n,c1..c7,c9,c10).
void write_coefficients(const fs::path& dir, const AnsatzCoefficients& c);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// "key = value" lines.
void write_key_values(const fs::path& path, const KeyValues& kv);

}  // namespace gmol
