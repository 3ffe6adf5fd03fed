#include "gmol/field.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gmol/errors.hpp"

namespace gmol {

void Field::set_row(std::size_t r, std::span<const double> values) {
  if (values.size() != cols_) throw ShapeMismatch("row length does not match field width");
  std::copy(values.begin(), values.end(), row(r).begin());
}

double Field::max_abs() const { return gmol::max_abs(data_); }

double max_abs(std::span<const double> a) {
  double m = 0.0;
  for (double x : a) m = std::max(m, std::abs(x));
  return m;
}

double max_abs_diff(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw ShapeMismatch("size mismatch in max_abs_diff");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

double max_abs_diff(const Field& a, const Field& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ShapeMismatch("field shapes differ");
  return max_abs_diff(a.values(), b.values());
}

NonPositiveRadius::NonPositiveRadius(double theta_, double radius_)
    : Error("boundary radius r(theta) = " + std::to_string(radius_) +
            " is not positive at theta = " + std::to_string(theta_)),
      theta(theta_),
      radius(radius_) {}

InnerDivergence::InnerDivergence(std::size_t line_, int iteration_)
    : Error("line fixed-point iteration diverged on line " + std::to_string(line_) +
            " at iteration " + std::to_string(iteration_)),
      line(line_),
      iteration(iteration_) {}

NotAGradient::NotAGradient(double defect_, double limit_)
    : Error("pressure gradient field is not closed: path defect " + std::to_string(defect_) +
            " exceeds " + std::to_string(limit_)),
      defect(defect_),
      limit(limit_) {}

ParseError::ParseError(int line_, const std::string& message)
    : Error("line " + std::to_string(line_) + ": " + message), line(line_) {}

ValidationError::ValidationError(const std::string& field_, const std::string& message)
    : Error(field_ + ": " + message), field(field_) {}

}  // namespace gmol
