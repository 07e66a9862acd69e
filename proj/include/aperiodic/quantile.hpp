#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace aperiodic {

/// A non-increasing scale function F : (0, inf) -> [1, inf) known on a finite
/// grid of scales.
///
/// Rows are (eps_k, F_k) with eps strictly decreasing and F non-decreasing.
/// Two readings of the rows are supported:
///  - Step: F(eps) = F_k on (eps_{k+1}, eps_k], i.e. a left-continuous step
///    function; below the last row the last value is kept.
///  - PowerLaw: F(eps) = c * eps^-exponent, exact between the rows, with
///    exact inverse quantiles.
class QuantileTable {
 public:
  enum class Kind { Step, PowerLaw };

  struct Row {
    double epsilon;
    double value;
  };

  static QuantileTable step(std::vector<Row> rows);
  static QuantileTable power_law(double c, double exponent, std::span<const double> grid);
  /// F(eps) = value on the whole grid.
  static QuantileTable constant(double value, std::span<const double> grid);

  Kind kind() const noexcept { return kind_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::vector<double> epsilons() const;

  double min_value() const noexcept { return rows_.front().value; }
  double max_value() const noexcept { return rows_.back().value; }

  /// F(eps). Outside (0, eps_0] the first row is used for eps > eps_0.
  double operator()(double epsilon) const;

  /// Composition F(delta(eps)) sampled on the same grid; delta must be
  /// non-decreasing so the result stays non-increasing.
  template <typename Delta>
  QuantileTable composed_with(Delta delta) const {
    std::vector<Row> out;
    out.reserve(rows_.size());
    double running = 1.0;
    for (const auto& r : rows_) {
      running = std::max(running, (*this)(delta(r.epsilon)));
      out.push_back({r.epsilon, running});
    }
    return step(std::move(out));
  }

  double power_constant() const noexcept { return c_; }
  double power_exponent() const noexcept { return exponent_; }

 private:
  QuantileTable(Kind kind, std::vector<Row> rows, double c, double exponent);

  Kind kind_;
  std::vector<Row> rows_;
  double c_ = 0.0;
  double exponent_ = 0.0;
};

/// sup{eps : F(eps) > s}. Throws OutOfRange unless min_value() <= s < max_value().
double quantile_left(const QuantileTable& f, double s);

/// inf{eps : F(eps) <= s}. Same range contract as quantile_left.
double quantile_right(const QuantileTable& f, double s);

/// Geometric grid eps_k = eps_max * ratio^k, k = 0..count-1.
std::vector<double> geometric_grid(double eps_max, double ratio, std::size_t count);

}  // namespace aperiodic
