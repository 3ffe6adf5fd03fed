#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gmol {

// A periodic sample on the theta grid.
using LineFunction = std::vector<double>;

// Dense row-major 2-D array. Rows are lines (or x-indices on a rectangle).
class Field {
 public:
  Field() = default;
  Field(std::size_t rows, std::size_t cols, double value = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, value) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  void set_row(std::size_t r, std::span<const double> values);

  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double max_abs() const;

  friend bool operator==(const Field&, const Field&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// sup |a - b| over all entries; shapes must agree.
double max_abs_diff(const Field& a, const Field& b);
double max_abs_diff(std::span<const double> a, std::span<const double> b);
double max_abs(std::span<const double> a);

}  // namespace gmol
