#pragma once

// Separated nets and log-log growth-rate estimators: box dimension,
// topological entropy and the two aperiodic complexities.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <unordered_set>
#include <vector>

#include "aperiodic/core.hpp"

namespace aperiodic {

/// Systems that can hash a state so that two states share a key exactly when
/// d_l(x, y) < eps. Net construction then needs no pairwise scan.
template <typename S>
concept SeparationKeyed =
    DynamicalSystem<S> &&
    requires(const S& sys, const typename S::State& x, double eps, std::size_t l) {
      { sys.separation_key(x, eps, l) } -> std::same_as<std::string>;
    };

template <DynamicalSystem S>
struct SeparatedNet {
  std::size_t length = 0;
  double epsilon = 0.0;
  std::vector<typename S::State> points;

  std::size_t size() const noexcept { return points.size(); }
};

/// Greedy pass over candidates in the given order: a candidate is kept iff it
/// is at least eps from every kept point in d_l.
template <DynamicalSystem S>
SeparatedNet<S> maximal_separated_net(const S& sys, std::span<const typename S::State> candidates,
                                      double epsilon, std::size_t l) {
  if (candidates.empty()) throw PreconditionFailed("maximal_separated_net needs candidates");
  SeparatedNet<S> net{l, epsilon, {}};
  if constexpr (SeparationKeyed<S>) {
    std::unordered_set<std::string> seen;
    for (const auto& c : candidates)
      if (seen.insert(sys.separation_key(c, epsilon, l)).second) net.points.push_back(c);
  } else {
    // Iterates of the kept points are cached so each candidate walks its own
    // orbit once.
    std::vector<std::vector<typename S::State>> kept_orbits;
    for (const auto& c : candidates) {
      std::vector<typename S::State> orbit{c};
      for (std::size_t i = 0; i < l; ++i) orbit.push_back(sys.step(orbit.back()));
      bool separated = true;
      for (const auto& k : kept_orbits) {
        bool close = true;
        for (std::size_t i = 0; i <= l && close; ++i) close = closer_than(sys, orbit[i], k[i], epsilon);
        if (close) {
          separated = false;
          break;
        }
      }
      if (separated) {
        net.points.push_back(c);
        kept_orbits.push_back(std::move(orbit));
      }
    }
  }
  return net;
}

struct FitOptions {
  std::size_t trim_head = 2;
  std::size_t trim_tail = 2;
  double max_residual = 0.05;
  std::size_t min_points = 3;
};

/// No trimming and no window search. Shift profiles are staircases whose
/// flat runs would otherwise win the window search with the wrong slope.
inline FitOptions whole_range() {
  return FitOptions{0, 0, std::numeric_limits<double>::infinity(), 3};
}

/// Least-squares slope over a contiguous window of (x, y) samples.
struct GrowthRateEstimate {
  double slope = 0.0;
  double intercept = 0.0;
  std::size_t window_begin = 0;  // indices into xs/ys, half-open
  std::size_t window_end = 0;
  double residual = 0.0;  // RMS error of the fit over the window
  std::vector<double> xs;
  std::vector<double> ys;
};

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual = 0.0;
};

LineFit least_squares(std::span<const double> xs, std::span<const double> ys);

/// Trims the ends, then takes the largest contiguous window whose RMS
/// residual is below the threshold (ties: smaller residual). Falls back to
/// the whole trimmed range when no window qualifies.
GrowthRateEstimate fit_growth_rate(std::vector<double> xs, std::vector<double> ys,
                                   const FitOptions& options = {});

template <DynamicalSystem S>
GrowthRateEstimate box_dimension_estimate(const S& sys,
                                          std::span<const typename S::State> candidates,
                                          std::span<const double> epsilon_grid,
                                          const FitOptions& options = {}) {
  require_decreasing_grid(epsilon_grid);
  if (epsilon_grid.size() < 5) throw PreconditionFailed("box dimension needs >= 5 grid points");
  std::vector<double> xs, ys;
  for (double eps : epsilon_grid) {
    const auto net = maximal_separated_net(sys, candidates, eps, 0);
    xs.push_back(-std::log(eps));
    ys.push_back(std::log(static_cast<double>(net.size())));
  }
  if (std::all_of(ys.begin(), ys.end(), [&](double y) { return y == ys.front(); }))
    throw DegenerateFit("all net sizes are equal");
  return fit_growth_rate(std::move(xs), std::move(ys), options);
}

/// Slope of log N_T(l, eps) against l at one scale.
template <DynamicalSystem S>
GrowthRateEstimate topological_entropy_estimate(const S& sys,
                                                std::span<const typename S::State> candidates,
                                                double epsilon, std::span<const std::size_t> lengths,
                                                const FitOptions& options = {}) {
  if (lengths.size() < 5) throw PreconditionFailed("entropy estimate needs >= 5 lengths");
  std::vector<double> xs, ys;
  for (std::size_t l : lengths) {
    const auto net = maximal_separated_net(sys, candidates, epsilon, l);
    xs.push_back(static_cast<double>(l));
    ys.push_back(std::log(static_cast<double>(net.size())));
  }
  // Constant counts above one are a genuine zero-entropy answer (rotations).
  if (std::all_of(ys.begin(), ys.end(), [](double y) { return y == 0.0; }))
    throw DegenerateFit("every net is a single point");
  return fit_growth_rate(std::move(xs), std::move(ys), options);
}

/// Slope of log F_x^0(eps) against -log eps over resolved entries.
GrowthRateEstimate growth_rate_F(const ShiftProfile& profile, const FitOptions& options = whole_range());

/// Slope of log F_x^l(eps) against l at a fixed eps; one profile per length,
/// each evaluated on the same single-scale grid.
GrowthRateEstimate growth_rate_G(std::span<const ShiftProfile> profiles,
                                 const FitOptions& options = whole_range());

}  // namespace aperiodic
