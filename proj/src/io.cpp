#include "gmol/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gmol {

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw ValidationError("outputs", "cannot write '" + path.string() + "'");
  return f;
}

// Numeric rows of a CSV file; a first line that does not parse is a header.
std::vector<std::vector<double>> read_rows(const fs::path& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("input", "cannot read '" + path.string() + "'");
  std::vector<std::vector<double>> rows;
  int line_no = 0;
  for (std::string line; std::getline(f, line);) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    bool ok = true;
    for (std::string cell; std::getline(ss, cell, ',');) {
      char* end = nullptr;
      const double x = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) {
        ok = false;
        break;
      }
      row.push_back(x);
    }
    if (!ok) {
      if (rows.empty() && line_no == 1) continue;
      throw ValidationError("input", path.string() + ":" + std::to_string(line_no) +
                                         ": not a numeric row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

void check_theta(const fs::path& path, double theta, std::size_t j, const DomainGrid& grid) {
  if (std::abs(theta - grid.theta[j]) > 1e-9)
    throw ValidationError("input", path.string() + ": theta of row " + std::to_string(j) +
                                       " does not match the grid");
}

fs::path line_file(const fs::path& dir, char field, std::size_t n) {
  return dir / (std::string(1, field) + "_" + std::to_string(n) + ".csv");
}

}  // namespace

void write_line_csv(const fs::path& path, std::span<const double> theta,
                    std::span<const double> values) {
  if (theta.size() != values.size()) throw ShapeMismatch("theta and values differ in length");
  auto f = open_out(path);
  f << "theta,value\n";
  for (std::size_t j = 0; j < theta.size(); ++j)
    f << format_double(theta[j]) << ',' << format_double(values[j]) << '\n';
}

LineFunction read_line_csv(const fs::path& path, const DomainGrid& grid) {
  const auto rows = read_rows(path);
  if (rows.size() != grid.n_theta)
    throw ValidationError("input", path.string() + ": expected " + std::to_string(grid.n_theta) +
                                       " rows");
  LineFunction out(grid.n_theta);
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != 2) throw ValidationError("input", path.string() + ": expected 2 columns");
    check_theta(path, rows[j][0], j, grid);
    out[j] = rows[j][1];
  }
  return out;
}

BoundaryData read_boundary_csv(const fs::path& path, const DomainGrid& grid) {
  const auto rows = read_rows(path);
  if (rows.size() != grid.n_theta)
    throw ValidationError("boundary", path.string() + ": expected " +
                                          std::to_string(grid.n_theta) + " rows");
  const std::size_t cols = rows.front().size();
  if (cols != 3 && cols != 5)
    throw ValidationError("boundary", "columns must be theta,u0,v0 or theta,u0,v0,P0,Pf");
  LineFunction u0, v0, P0, Pf;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    if (rows[j].size() != cols) throw ValidationError("boundary", "ragged rows");
    check_theta(path, rows[j][0], j, grid);
    u0.push_back(rows[j][1]);
    v0.push_back(rows[j][2]);
    if (cols == 5) {
      P0.push_back(rows[j][3]);
      Pf.push_back(rows[j][4]);
    }
  }
  return boundary_from_samples(std::move(u0), std::move(v0), std::move(P0), std::move(Pf), grid);
}

void write_state(const fs::path& dir, const FlowState& state, const DomainGrid& grid) {
  state.check_shape(grid);
  for (std::size_t n = 0; n <= grid.n_lines; ++n) {
    write_line_csv(line_file(dir, 'u', n), grid.theta, state.u.row(n));
    write_line_csv(line_file(dir, 'v', n), grid.theta, state.v.row(n));
    if (state.has_pressure()) write_line_csv(line_file(dir, 'P', n), grid.theta, state.P.row(n));
  }
}

FlowState read_state(const fs::path& dir, const DomainGrid& grid) {
  FlowState s = FlowState::zeros(grid);
  for (std::size_t n = 0; n <= grid.n_lines; ++n) {
    s.u.set_row(n, read_line_csv(line_file(dir, 'u', n), grid));
    s.v.set_row(n, read_line_csv(line_file(dir, 'v', n), grid));
    s.P.set_row(n, read_line_csv(line_file(dir, 'P', n), grid));
  }
  return s;
}

void write_line_table(const fs::path& path, const Field& f, const std::vector<std::size_t>& lines,
                      const DomainGrid& grid) {
  auto out = open_out(path);
  out << "theta,j";
  for (std::size_t n : lines) out << ",line_" << n;
  out << '\n';
  for (std::size_t j = 0; j < grid.n_theta; ++j) {
    out << format_double(grid.theta[j]) << ',' << j;
    for (std::size_t n : lines) out << ',' << format_double(f(n, j));
    out << '\n';
  }
}

void write_coefficients(const fs::path& dir, const AnsatzCoefficients& c) {
  auto table = [&](const char* file, const Field& f, auto&& label) {
    auto out = open_out(dir / file);
    out << 'n';
    for (std::size_t k = 0; k < f.cols(); ++k) out << ',' << label(k);
    out << '\n';
    for (std::size_t r = 0; r < f.rows(); ++r) {
      out << r + 1;
      for (std::size_t k = 0; k < f.cols(); ++k) out << ',' << format_double(f(r, k));
      out << '\n';
    }
  };
  table("coeff_a.csv", c.a, [](std::size_t k) { return "a" + std::to_string(k + 1); });
  table("coeff_b.csv", c.b, [](std::size_t k) { return "b" + std::to_string(k + 1); });
  table("coeff_c.csv", c.c, [](std::size_t k) { return std::string(c_labels[k]); });
}

void write_key_values(const fs::path& path, const KeyValues& kv) {
  auto out = open_out(path);
  for (const auto& [k, v] : kv) out << k << " = " << v << '\n';
}

}  // namespace gmol
