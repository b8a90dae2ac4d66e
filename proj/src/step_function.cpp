#include "sfl/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "sfl/error.hpp"

namespace sfl {

StepFunction::StepFunction(std::vector<double> breakpoints, std::vector<double> values) {
  if (values.size() != breakpoints.size() + 1) {
    throw PreconditionError("StepFunction: need exactly one more value than breakpoints");
  }
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (!std::isfinite(breakpoints[i])) throw PreconditionError("StepFunction: non-finite breakpoint");
    if (i > 0 && !(breakpoints[i] > breakpoints[i - 1])) {
      throw PreconditionError("StepFunction: breakpoints must be strictly ascending");
    }
  }
  values_.push_back(values[0]);
  for (std::size_t i = 0; i < breakpoints.size(); ++i) {
    if (values[i + 1] == values_.back()) continue;
    breakpoints_.push_back(breakpoints[i]);
    values_.push_back(values[i + 1]);
  }
}

double StepFunction::operator()(double x) const {
  const auto idx = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) - breakpoints_.begin();
  return values_[static_cast<std::size_t>(idx)];
}

std::vector<StepFunction::Piece> StepFunction::pieces() const {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<Piece> out;
  out.reserve(values_.size());
  for (std::size_t k = 0; k < values_.size(); ++k) {
    const double lo = (k == 0) ? -inf : breakpoints_[k - 1];
    const double hi = (k == breakpoints_.size()) ? inf : breakpoints_[k];
    out.push_back({lo, hi, values_[k]});
  }
  return out;
}

std::vector<StepFunction::Piece> StepFunction::support_pieces() const {
  std::vector<Piece> out;
  for (const Piece& p : pieces()) {
    if (p.value != 0.0) out.push_back(p);
  }
  return out;
}

bool StepFunction::is_integer_valued() const {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == std::round(v); });
}

StepFunction StepFunction::operator-() const {
  std::vector<double> neg(values_.size());
  std::transform(values_.begin(), values_.end(), neg.begin(), [](double v) { return -v + 0.0; });
  return StepFunction(breakpoints_, std::move(neg));
}

double StepFunction::integrate_with_primitive(const std::function<double(double)>& primitive) const {
  double total = 0.0;
  for (const Piece& p : support_pieces()) total += p.value * (primitive(p.hi) - primitive(p.lo));
  return total;
}

bool approx_equal(const StepFunction& a, const StepFunction& b, double rel_tol) {
  if (a.values() != b.values()) return false;
  for (std::size_t i = 0; i < a.breakpoints().size(); ++i) {
    const double x = a.breakpoints()[i];
    const double y = b.breakpoints()[i];
    if (std::abs(x - y) > rel_tol * (1.0 + std::abs(x))) return false;
  }
  return true;
}

namespace {

std::string format_double(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string to_csv(const StepFunction& f) {
  std::ostringstream out;
  out << "breakpoint,value\n";
  out << "-inf," << format_double(f.values()[0]) << "\n";
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    out << format_double(f.breakpoints()[i]) << "," << format_double(f.values()[i + 1]) << "\n";
  }
  return out.str();
}

StepFunction step_function_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<double> bps;
  std::vector<double> vals;
  bool seen_left = false;
  while (std::getline(in, line)) {
    if (line.empty() || line.rfind("breakpoint", 0) == 0) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw PreconditionError("step function CSV: missing comma");
    const std::string b = line.substr(0, comma);
    const double v = std::stod(line.substr(comma + 1));
    if (b == "-inf") {
      if (seen_left) throw PreconditionError("step function CSV: duplicate -inf row");
      vals.insert(vals.begin(), v);
      seen_left = true;
    } else {
      bps.push_back(std::stod(b));
      vals.push_back(v);
    }
  }
  if (!seen_left) throw PreconditionError("step function CSV: missing -inf row");
  return StepFunction(std::move(bps), std::move(vals));
}

nlohmann::json to_json(const StepFunction& f) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t i = 0; i < f.breakpoints().size(); ++i) {
    rows.push_back({{"breakpoint", f.breakpoints()[i]}, {"value", f.values()[i + 1]}});
  }
  return {{"left_value", f.values()[0]}, {"rows", rows}};
}

StepFunction step_function_from_json(const nlohmann::json& doc) {
  std::vector<double> bps;
  std::vector<double> vals{doc.at("left_value").get<double>()};
  for (const auto& row : doc.at("rows")) {
    bps.push_back(row.at("breakpoint").get<double>());
    vals.push_back(row.at("value").get<double>());
  }
  return StepFunction(std::move(bps), std::move(vals));
}

}  // namespace sfl
