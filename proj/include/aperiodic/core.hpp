#pragma once

// System abstraction, Bowen metrics, return times and shift functions.
//
// Everything here quantifies over a finite window: orbits are truncated at a
// horizon N and shift searches at s_max. An unresolved search is reported as
// std::nullopt and means "no return within the cap", never "infinite".

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "aperiodic/errors.hpp"
#include "aperiodic/quantile.hpp"

namespace aperiodic {

template <typename S>
concept DynamicalSystem = requires(const S& sys, const typename S::State& x) {
  typename S::State;
  { sys.distance(x, x) } -> std::convertible_to<double>;
  { sys.step(x) } -> std::same_as<typename S::State>;
  { sys.diameter_bound() } -> std::convertible_to<double>;
};

/// Systems whose metric takes finitely many values decide d(a, b) < eps
/// exactly (for instance in the exponent) instead of comparing floats.
template <typename S>
concept ExactThresholdSystem =
    DynamicalSystem<S> && requires(const S& sys, const typename S::State& x, double eps) {
      { sys.closer_than(x, x, eps) } -> std::same_as<bool>;
    };

template <DynamicalSystem S>
bool closer_than(const S& sys, const typename S::State& a, const typename S::State& b,
                 double eps) {
  if constexpr (ExactThresholdSystem<S>) {
    return sys.closer_than(a, b, eps);
  } else {
    return sys.distance(a, b) < eps;
  }
}

using ShiftValue = std::optional<std::uint64_t>;

/// Window limits shared by every orbit-based verdict.
struct Window {
  std::size_t horizon = 10'000;  // N: times 0..N
  std::size_t max_shift = 100'000;  // s_max
};

/// Iterates T^0 x .. T^N x, computed once at construction.
template <DynamicalSystem S>
class OrbitWindow {
 public:
  using State = typename S::State;

  OrbitWindow(const S& sys, State base, std::size_t horizon) {
    iterates_.reserve(horizon + 1);
    iterates_.push_back(std::move(base));
    for (std::size_t k = 0; k < horizon; ++k) iterates_.push_back(sys.step(iterates_.back()));
  }

  std::size_t horizon() const noexcept { return iterates_.size() - 1; }
  const State& base() const noexcept { return iterates_.front(); }
  const State& operator[](std::size_t k) const { return iterates_.at(k); }
  std::span<const State> iterates() const noexcept { return iterates_; }

 private:
  std::vector<State> iterates_;
};

namespace detail {

// Grows on demand; local to a single computation so the public types stay
// immutable.
template <DynamicalSystem S>
class LazyOrbit {
 public:
  using State = typename S::State;

  LazyOrbit(const S& sys, State base) : sys_(&sys) { iterates_.push_back(std::move(base)); }

  const State& at(std::size_t k) {
    while (iterates_.size() <= k) iterates_.push_back(sys_->step(iterates_.back()));
    return iterates_[k];
  }

 private:
  const S* sys_;
  std::deque<State> iterates_;  // references survive growth
};

// Least s in [1, cap] with d_l(T^{n+s} x, T^n x) < eps.
template <DynamicalSystem S>
ShiftValue return_time_at(const S& sys, LazyOrbit<S>& orbit, std::size_t n, double eps,
                          std::size_t l, std::uint64_t cap) {
  for (std::uint64_t s = 1; s <= cap; ++s) {
    bool close = true;
    for (std::size_t i = 0; i <= l && close; ++i)
      close = closer_than(sys, orbit.at(n + s + i), orbit.at(n + i), eps);
    if (close) return s;
  }
  return std::nullopt;
}

}  // namespace detail

/// d_l(x, y) = max_{0 <= i <= l} d(T^i x, T^i y).
template <DynamicalSystem S>
double bowen_distance(const S& sys, const typename S::State& x, const typename S::State& y,
                      std::size_t l) {
  auto a = x;
  auto b = y;
  double worst = sys.distance(a, b);
  for (std::size_t i = 1; i <= l; ++i) {
    a = sys.step(a);
    b = sys.step(b);
    worst = std::max(worst, sys.distance(a, b));
  }
  return worst;
}

/// d_l(x, y) < eps, through the system's exact threshold test when it has one.
template <DynamicalSystem S>
bool bowen_closer_than(const S& sys, const typename S::State& x, const typename S::State& y,
                       std::size_t l, double eps) {
  auto a = x;
  auto b = y;
  if (!closer_than(sys, a, b, eps)) return false;
  for (std::size_t i = 1; i <= l; ++i) {
    a = sys.step(a);
    b = sys.step(b);
    if (!closer_than(sys, a, b, eps)) return false;
  }
  return true;
}

template <DynamicalSystem S>
ShiftValue return_time(const S& sys, const typename S::State& x, double epsilon, std::size_t l,
                       std::uint64_t s_max) {
  if (!(epsilon > 0.0)) throw PreconditionFailed("return_time needs epsilon > 0");
  if (s_max < 1) throw PreconditionFailed("return_time needs s_max >= 1");
  detail::LazyOrbit<S> orbit(sys, x);
  return detail::return_time_at(sys, orbit, 0, epsilon, l, s_max);
}

/// min over 0 <= n <= N of the return time of T^n x.
template <DynamicalSystem S>
ShiftValue shift_function(const S& sys, const typename S::State& x, double epsilon,
                          std::size_t l, std::size_t horizon, std::uint64_t s_max) {
  if (!(epsilon > 0.0)) throw PreconditionFailed("shift_function needs epsilon > 0");
  if (s_max < 1) throw PreconditionFailed("shift_function needs s_max >= 1");
  detail::LazyOrbit<S> orbit(sys, x);
  ShiftValue best;
  for (std::size_t n = 0; n <= horizon; ++n) {
    // Only strictly smaller shifts can improve the minimum.
    const std::uint64_t cap = best ? *best - 1 : s_max;
    if (cap == 0) break;
    if (auto s = detail::return_time_at(sys, orbit, n, epsilon, l, cap)) best = s;
  }
  return best;
}

struct ShiftProfile {
  std::size_t length = 0;
  std::vector<double> epsilon_grid;
  std::vector<ShiftValue> values;
  std::size_t horizon = 0;
  std::uint64_t max_shift = 0;

  std::size_t resolved_count() const {
    return static_cast<std::size_t>(
        std::count_if(values.begin(), values.end(), [](const ShiftValue& v) { return v.has_value(); }));
  }
};

inline void require_decreasing_grid(std::span<const double> grid) {
  if (grid.empty()) throw PreconditionFailed("epsilon grid is empty");
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (!(grid[k] > 0.0)) throw PreconditionFailed("epsilon grid must be positive");
    if (k > 0 && !(grid[k] < grid[k - 1]))
      throw PreconditionFailed("epsilon grid must be strictly decreasing");
  }
}

template <DynamicalSystem S>
ShiftProfile shift_profile(const S& sys, const typename S::State& x,
                           std::span<const double> epsilon_grid, std::size_t l, std::size_t horizon,
                           std::uint64_t s_max) {
  require_decreasing_grid(epsilon_grid);
  ShiftProfile profile{l, {epsilon_grid.begin(), epsilon_grid.end()}, {}, horizon, s_max};
  profile.values.reserve(epsilon_grid.size());
  for (double eps : epsilon_grid)
    profile.values.push_back(shift_function(sys, x, eps, l, horizon, s_max));
  return profile;
}

struct AperiodicityVerdict {
  enum class Kind { HoldsOnWindow, Violated, Inconclusive };

  struct Witness {
    std::size_t time = 0;
    std::uint64_t shift = 0;
    double epsilon = 0.0;
  };

  Kind kind = Kind::HoldsOnWindow;
  std::optional<Witness> witness;
  std::size_t length = 0;
  Window window;

  bool holds() const noexcept { return kind == Kind::HoldsOnWindow; }
  bool violated() const noexcept { return kind == Kind::Violated; }
};

/// Checks d_l(T^n x, T^{n+s} x) < eps  =>  s >= F(eps) for every grid scale
/// of F, every n <= N and every s <= s_max. A search that would need shifts
/// beyond s_max makes the verdict Inconclusive rather than Holds.
template <DynamicalSystem S>
AperiodicityVerdict is_F_aperiodic(const S& sys, const typename S::State& x,
                                   const QuantileTable& f, std::size_t l, Window window) {
  AperiodicityVerdict verdict;
  verdict.length = l;
  verdict.window = window;
  detail::LazyOrbit<S> orbit(sys, x);
  bool incomplete = false;
  for (const auto& row : f.rows()) {
    // Shifts s with s < F(eps) are forbidden to return.
    const double bound = row.value;
    std::uint64_t forbidden = bound <= 1.0 ? 0 : static_cast<std::uint64_t>(std::ceil(bound) - 1.0);
    if (forbidden > window.max_shift) {
      forbidden = window.max_shift;
      incomplete = true;
    }
    if (forbidden == 0) continue;
    for (std::size_t n = 0; n <= window.horizon; ++n) {
      if (auto s = detail::return_time_at(sys, orbit, n, row.epsilon, l, forbidden)) {
        verdict.kind = AperiodicityVerdict::Kind::Violated;
        verdict.witness = AperiodicityVerdict::Witness{n, *s, row.epsilon};
        return verdict;
      }
    }
  }
  verdict.kind = incomplete ? AperiodicityVerdict::Kind::Inconclusive
                            : AperiodicityVerdict::Kind::HoldsOnWindow;
  return verdict;
}

}  // namespace aperiodic
