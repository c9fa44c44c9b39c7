#pragma once

#include <stdexcept>
#include <string>

namespace snapbeam {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Scenario document does not match the schema or fails validation.
class ScenarioError : public Error {
 public:
  using Error::Error;
};

/// Element kinematics left the range the formulation supports.
class KinematicsError : public Error {
 public:
  KinematicsError(std::size_t element, const std::string& what)
      : Error("element " + std::to_string(element) + ": " + what), element_(element) {}

  std::size_t element() const noexcept { return element_; }

 private:
  std::size_t element_;
};

/// Newton iterations failed to reach the requested tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double lambda) : Error(what), lambda_(lambda) {}

  double lambda() const noexcept { return lambda_; }

 private:
  double lambda_;
};

/// Bistability post-processing could not produce the requested quantity.
class AnalysisError : public Error {
 public:
  using Error::Error;
};

}  // namespace snapbeam
