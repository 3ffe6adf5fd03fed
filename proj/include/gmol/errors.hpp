#pragma once

#include <stdexcept>
#include <string>

namespace gmol {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NonPositiveRadius : public Error {
 public:
  NonPositiveRadius(double theta, double radius);
  double theta;
  double radius;
};

class ModeMismatch : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class IncompleteState : public Error {
 public:
  using Error::Error;
};

class InnerDivergence : public Error {
 public:
  InnerDivergence(std::size_t line, int iteration);
  std::size_t line;
  int iteration;
};

class SolveFailure : public Error {
 public:
  using Error::Error;
};

class NotAGradient : public Error {
 public:
  NotAGradient(double defect, double limit);
  double defect;
  double limit;
};

class ParseError : public Error {
 public:
  ParseError(int line, const std::string& message);
  int line;
};

class ValidationError : public Error {
 public:
  ValidationError(const std::string& field, const std::string& message);
  std::string field;
};

}  // namespace gmol
