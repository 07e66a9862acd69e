#include "aperiodic/quantile.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aperiodic/errors.hpp"

namespace aperiodic {

namespace {

void validate_rows(const std::vector<QuantileTable::Row>& rows) {
  if (rows.empty()) throw OutOfRange("quantile table is empty");
  for (std::size_t k = 0; k < rows.size(); ++k) {
    if (!(rows[k].epsilon > 0.0)) throw OutOfRange("quantile table scales must be positive");
    if (k == 0) continue;
    if (!(rows[k].epsilon < rows[k - 1].epsilon))
      throw OutOfRange("quantile table scales must be strictly decreasing");
    if (rows[k].value < rows[k - 1].value)
      throw OutOfRange("quantile table values must be non-decreasing as scales shrink");
  }
}

void check_range(const QuantileTable& f, double s) {
  if (s < f.min_value() || s >= f.max_value()) {
    throw OutOfRange("shift " + std::to_string(s) + " outside table value range [" +
                     std::to_string(f.min_value()) + ", " + std::to_string(f.max_value()) + ")");
  }
}

}  // namespace

QuantileTable::QuantileTable(Kind kind, std::vector<Row> rows, double c, double exponent)
    : kind_(kind), rows_(std::move(rows)), c_(c), exponent_(exponent) {
  validate_rows(rows_);
}

QuantileTable QuantileTable::step(std::vector<Row> rows) {
  return QuantileTable(Kind::Step, std::move(rows), 0.0, 0.0);
}

QuantileTable QuantileTable::power_law(double c, double exponent, std::span<const double> grid) {
  if (!(c > 0.0) || !(exponent > 0.0)) throw OutOfRange("power law needs c > 0 and exponent > 0");
  std::vector<Row> rows;
  rows.reserve(grid.size());
  for (double eps : grid) rows.push_back({eps, c * std::pow(eps, -exponent)});
  return QuantileTable(Kind::PowerLaw, std::move(rows), c, exponent);
}

QuantileTable QuantileTable::constant(double value, std::span<const double> grid) {
  std::vector<Row> rows;
  rows.reserve(grid.size());
  for (double eps : grid) rows.push_back({eps, value});
  return step(std::move(rows));
}

std::vector<double> QuantileTable::epsilons() const {
  std::vector<double> out;
  out.reserve(rows_.size());
  for (const auto& r : rows_) out.push_back(r.epsilon);
  return out;
}

double QuantileTable::operator()(double epsilon) const {
  if (kind_ == Kind::PowerLaw) return c_ * std::pow(epsilon, -exponent_);
  if (epsilon > rows_.front().epsilon) return rows_.front().value;
  // First row whose scale is < epsilon marks the end of the step containing it.
  auto it = std::find_if(rows_.begin(), rows_.end(),
                         [epsilon](const Row& r) { return r.epsilon < epsilon; });
  return it == rows_.end() ? rows_.back().value : std::prev(it)->value;
}

double quantile_left(const QuantileTable& f, double s) {
  check_range(f, s);
  if (f.kind() == QuantileTable::Kind::PowerLaw)
    return std::pow(f.power_constant() / s, 1.0 / f.power_exponent());
  // {F > s} is a down-set of scales; on a left-continuous step function its
  // supremum is the scale of the first row exceeding s, and it is attained.
  for (const auto& r : f.rows())
    if (r.value > s) return r.epsilon;
  throw OutOfRange("no row exceeds the requested shift");
}

double quantile_right(const QuantileTable& f, double s) {
  check_range(f, s);
  if (f.kind() == QuantileTable::Kind::PowerLaw)
    return std::pow(f.power_constant() / s, 1.0 / f.power_exponent());
  // {F <= s} is the union of steps (eps_{k+1}, eps_k] with F_k <= s; its
  // infimum is the open lower end of the last such step.
  const auto& rows = f.rows();
  std::size_t last = 0;
  for (std::size_t k = 0; k < rows.size(); ++k)
    if (rows[k].value <= s) last = k;
  if (last + 1 >= rows.size()) throw OutOfRange("table ends before F exceeds the shift");
  return rows[last + 1].epsilon;
}

std::vector<double> geometric_grid(double eps_max, double ratio, std::size_t count) {
  if (!(eps_max > 0.0) || !(ratio > 0.0 && ratio < 1.0))
    throw OutOfRange("geometric grid needs eps_max > 0 and ratio in (0, 1)");
  std::vector<double> grid;
  grid.reserve(count);
  double eps = eps_max;
  for (std::size_t k = 0; k < count; ++k) {
    grid.push_back(eps);
    eps *= ratio;
  }
  return grid;
}

}  // namespace aperiodic
