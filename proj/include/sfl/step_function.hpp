#pragma once

#include <functional>
#include <string>
#include <vector>

#include "json.hpp"

namespace sfl {

/// Right-continuous piecewise-constant function with finitely many breakpoints.
///
/// values()[0] holds to the left of the first breakpoint, values()[k] on
/// [b_k, b_{k+1}) and values().back() to the right of the last one. The
/// constructor merges adjacent pieces with equal values, so two step
/// functions describing the same function compare equal.
class StepFunction {
 public:
  struct Piece {
    double lo;  // may be -inf
    double hi;  // may be +inf
    double value;
  };

  StepFunction() : values_{0.0} {}
  explicit StepFunction(double constant) : values_{constant} {}
  /// Throws PreconditionError unless breakpoints are strictly ascending and
  /// values.size() == breakpoints.size() + 1.
  StepFunction(std::vector<double> breakpoints, std::vector<double> values);

  const std::vector<double>& breakpoints() const { return breakpoints_; }
  const std::vector<double>& values() const { return values_; }

  double operator()(double x) const;
  std::vector<Piece> pieces() const;

  /// Pieces with nonzero value; empty for the zero function.
  std::vector<Piece> support_pieces() const;

  bool has_compact_support() const { return values_.front() == 0.0 && values_.back() == 0.0; }
  bool is_integer_valued() const;

  StepFunction operator-() const;

  /// Sum over pieces of value * (F(hi) - F(lo)) where F is a primitive of the
  /// integrand; F must accept infinite arguments for unbounded pieces.
  double integrate_with_primitive(const std::function<double(double)>& primitive) const;

  friend bool operator==(const StepFunction&, const StepFunction&) = default;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> values_;
};

/// Same values and breakpoints within rel_tol * (1 + |b|).
bool approx_equal(const StepFunction& a, const StepFunction& b, double rel_tol);

/// CSV rows "breakpoint,value" where value holds to the right of the
/// breakpoint; the first row is "-inf,<value left of all breakpoints>".
std::string to_csv(const StepFunction& f);
StepFunction step_function_from_csv(const std::string& text);

/// {"left_value": v0, "rows": [{"breakpoint": b, "value": v}, ...]}
nlohmann::json to_json(const StepFunction& f);
StepFunction step_function_from_json(const nlohmann::json& doc);

}  // namespace sfl
