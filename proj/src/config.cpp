#include "gmol/config.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace gmol {

std::string_view to_string(Closure c) {
  switch (c) {
    case Closure::pressure_poisson: return "pressure_poisson";
    case Closure::artificial_compressibility: return "artificial_compressibility";
    case Closure::continuity: return "continuity";
  }
  return "?";
}

std::string_view to_string(Seed s) {
  return s == Seed::linear_interpolation ? "linear_interpolation" : "outer_neighbor";
}

std::string_view to_string(LineSolver s) {
  return s == LineSolver::relaxed_map ? "relaxed_map" : "linearized";
}

SolverConfig RunConfig::solver_config() const {
  SolverConfig c;
  c.nu = nu;
  c.mode = mode;
  c.epsilon = epsilon;
  c.inner_tol = inner_tol;
  c.outer_tol = outer_tol;
  c.max_inner = max_inner;
  c.max_sweeps = max_sweeps;
  c.seed = seed;
  c.relaxation = relaxation;
  c.line_solver = line_solver;
  c.anderson_depth = anderson_depth;
  return c;
}

DomainGrid RunConfig::grid() const { return DomainGrid::make(N, M); }

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ValidationError(std::string(key), "not a number: '" + std::string(v) + "'");
  return x;
}

long to_integer(std::string_view key, std::string_view v) {
  long x = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), x);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size())
    throw ValidationError(std::string(key), "not an integer: '" + std::string(v) + "'");
  return x;
}

std::vector<double> to_list(std::string_view key, std::string_view v) {
  std::vector<double> out;
  while (true) {
    const auto comma = v.find(',');
    out.push_back(to_double(key, trim(v.substr(0, comma))));
    if (comma == std::string_view::npos) break;
    v.remove_prefix(comma + 1);
  }
  return out;
}

bool to_bool(std::string_view key, std::string_view v) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  throw ValidationError(std::string(key), "expected true or false");
}

template <class E>
E to_enum(std::string_view key, std::string_view v,
          std::initializer_list<std::pair<std::string_view, E>> names) {
  for (const auto& [name, value] : names)
    if (v == name) return value;
  throw ValidationError(std::string(key), "unknown value '" + std::string(v) + "'");
}

using Setter = std::function<void(RunConfig&, std::string_view key, std::string_view value)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"shape.cos", [](RunConfig& c, auto k, auto v) { c.shape.fourier_cosine = to_list(k, v); }},
      {"shape.sin", [](RunConfig& c, auto k, auto v) { c.shape.fourier_sine = to_list(k, v); }},
      {"N", [](RunConfig& c, auto k, auto v) {
         const long n = to_integer(k, v);
         if (n < 2) throw ValidationError("N", "need at least 2 lines");
         c.N = static_cast<std::size_t>(n);
       }},
      {"M", [](RunConfig& c, auto k, auto v) {
         const long m = to_integer(k, v);
         if (m < 8) throw ValidationError("M", "need at least 8 theta nodes");
         c.M = static_cast<std::size_t>(m);
       }},
      {"nu", [](RunConfig& c, auto k, auto v) { c.nu = to_double(k, v); }},
      {"mode", [](RunConfig& c, auto k, auto v) {
         c.mode = to_enum<Closure>(k, v, {{"pressure_poisson", Closure::pressure_poisson},
                                         {"artificial_compressibility",
                                          Closure::artificial_compressibility}});
       }},
      {"epsilon", [](RunConfig& c, auto k, auto v) { c.epsilon = to_double(k, v); }},
      {"boundary", [](RunConfig& c, auto, auto v) { c.boundary = std::string(v); }},
      {"seed", [](RunConfig& c, auto k, auto v) {
         c.seed = to_enum<Seed>(k, v, {{"linear_interpolation", Seed::linear_interpolation},
                                      {"outer_neighbor", Seed::outer_neighbor}});
       }},
      {"inner_tol", [](RunConfig& c, auto k, auto v) { c.inner_tol = to_double(k, v); }},
      {"outer_tol", [](RunConfig& c, auto k, auto v) { c.outer_tol = to_double(k, v); }},
      {"max_inner", [](RunConfig& c, auto k, auto v) { c.max_inner = static_cast<int>(to_integer(k, v)); }},
      {"max_sweeps", [](RunConfig& c, auto k, auto v) { c.max_sweeps = static_cast<int>(to_integer(k, v)); }},
      {"relaxation", [](RunConfig& c, auto k, auto v) { c.relaxation = to_double(k, v); }},
      {"line_solver", [](RunConfig& c, auto k, auto v) {
         c.line_solver = to_enum<LineSolver>(k, v, {{"relaxed_map", LineSolver::relaxed_map},
                                                   {"linearized", LineSolver::linearized}});
       }},
      {"anderson_depth", [](RunConfig& c, auto k, auto v) {
         c.anderson_depth = static_cast<int>(to_integer(k, v));
         if (c.anderson_depth < 0) throw ValidationError("anderson_depth", "must be >= 0");
       }},
      {"fit.target", [](RunConfig& c, auto k, auto v) {
         c.fit.target = to_double(k, v);
         if (!(c.fit.target > 0.0)) throw ValidationError("fit.target", "must be positive");
       }},
      {"fit.max_iterations", [](RunConfig& c, auto k, auto v) {
         c.fit.max_iterations = static_cast<int>(to_integer(k, v));
         if (c.fit.max_iterations < 1) throw ValidationError("fit.max_iterations", "must be >= 1");
       }},
      {"fit.p0_penalty", [](RunConfig& c, auto k, auto v) {
         c.fit.p0_penalty = to_double(k, v);
         if (!(c.fit.p0_penalty >= 0.0)) throw ValidationError("fit.p0_penalty", "must be >= 0");
       }},
      {"fit.solver_seed", [](RunConfig& c, auto k, auto v) { c.fit.solver_seed = to_bool(k, v); }},
      {"quadrature", [](RunConfig& c, auto k, auto v) {
         c.quadrature = to_enum<Quadrature>(
             k, v, {{"unit_weighted", Quadrature::unit_weighted},
                    {"cell_area_weighted", Quadrature::cell_area_weighted}});
       }},
      {"outputs", [](RunConfig& c, auto, auto v) { c.outputs = std::string(v); }},
      {"theorem.w1", [](RunConfig& c, auto, auto v) { c.theorem.w1 = std::string(v); }},
      {"theorem.forcing", [](RunConfig& c, auto, auto v) { c.theorem.forcing = std::string(v); }},
      {"theorem.n", [](RunConfig& c, auto k, auto v) {
         const long n = to_integer(k, v);
         if (n < 16) throw ValidationError("theorem.n", "need at least 16 nodes");
         c.theorem.n = static_cast<std::size_t>(n);
       }},
      {"theorem.nu", [](RunConfig& c, auto k, auto v) { c.theorem.nu = to_double(k, v); }},
  };
  return table;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  RunConfig c;
  std::set<std::string, std::less<>> seen;
  int line_no = 0;
  std::istringstream in{std::string(text)};
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    std::string_view line = raw;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(line_no, "expected key = value");
    const std::string_view key = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ParseError(line_no, "unknown key '" + std::string(key) + "'");
    if (!seen.insert(std::string(key)).second)
      throw ParseError(line_no, "repeated key '" + std::string(key) + "'");
    if (value.empty()) throw ParseError(line_no, "missing value for '" + std::string(key) + "'");
    it->second(c, key, value);
  }

  c.solver_config().validate();
  if (c.shape.fourier_cosine.empty()) throw ValidationError("shape.cos", "needs c0");
  c.shape.validate(c.M);
  AnalyticField::named(c.theorem.w1);
  AnalyticField::named(c.theorem.forcing);
  if (!(c.theorem.nu > 0.0)) throw ValidationError("theorem.nu", "must be positive");
  if (c.outputs.empty()) throw ValidationError("outputs", "must not be empty");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ValidationError("config", "cannot read '" + path + "'");
  std::ostringstream s;
  s << f.rdbuf();
  return parse_config(s.str());
}

}  // namespace gmol
