#include "aperiodic/complexity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace aperiodic {

LineFit least_squares(std::span<const double> xs, std::span<const double> ys) {
  const std::size_t n = xs.size();
  if (n == 0 || n != ys.size()) throw PreconditionFailed("least_squares needs matching samples");
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / static_cast<double>(n);
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = ys[i] - (fit.intercept + fit.slope * xs[i]);
    sse += e * e;
  }
  fit.residual = std::sqrt(sse / static_cast<double>(n));
  return fit;
}

GrowthRateEstimate fit_growth_rate(std::vector<double> xs, std::vector<double> ys,
                                   const FitOptions& options) {
  const std::size_t n = xs.size();
  if (n != ys.size()) throw PreconditionFailed("fit_growth_rate needs matching samples");
  const std::size_t min_points = std::max<std::size_t>(options.min_points, 2);
  if (n < min_points) throw TooFewResolved("fit needs at least " + std::to_string(min_points) + " samples");

  // Trim the ends only as far as the minimum window size allows.
  std::size_t head = options.trim_head;
  std::size_t tail = options.trim_tail;
  while (head + tail + min_points > n) {
    if (head >= tail && head > 0) {
      --head;
    } else if (tail > 0) {
      --tail;
    } else {
      break;
    }
  }
  const std::size_t lo = head;
  const std::size_t hi = n - tail;

  auto fit_window = [&](std::size_t b, std::size_t e) {
    return least_squares(std::span(xs).subspan(b, e - b), std::span(ys).subspan(b, e - b));
  };

  std::size_t best_b = lo, best_e = hi;
  LineFit best = fit_window(lo, hi);
  if (best.residual >= options.max_residual) {
    bool found = false;
    for (std::size_t size = hi - lo; size >= min_points && !found; --size) {
      for (std::size_t b = lo; b + size <= hi; ++b) {
        const LineFit f = fit_window(b, b + size);
        if (f.residual < options.max_residual && (!found || f.residual < best.residual)) {
          best = f;
          best_b = b;
          best_e = b + size;
          found = true;
        }
      }
    }
    if (!found) {
      best = fit_window(lo, hi);
      best_b = lo;
      best_e = hi;
    }
  }

  GrowthRateEstimate est;
  est.slope = best.slope;
  est.intercept = best.intercept;
  est.residual = best.residual;
  est.window_begin = best_b;
  est.window_end = best_e;
  est.xs = std::move(xs);
  est.ys = std::move(ys);
  return est;
}

GrowthRateEstimate growth_rate_F(const ShiftProfile& profile, const FitOptions& options) {
  if (profile.length != 0) throw PreconditionFailed("growth_rate_F needs a length-0 profile");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < profile.values.size(); ++k) {
    if (!profile.values[k]) continue;
    xs.push_back(-std::log(profile.epsilon_grid[k]));
    ys.push_back(std::log(static_cast<double>(*profile.values[k])));
  }
  if (xs.size() < 5) throw TooFewResolved("growth_rate_F needs >= 5 resolved values");
  return fit_growth_rate(std::move(xs), std::move(ys), options);
}

GrowthRateEstimate growth_rate_G(std::span<const ShiftProfile> profiles, const FitOptions& options) {
  std::vector<double> xs, ys;
  double eps = 0.0;
  for (const auto& p : profiles) {
    if (p.values.size() != 1) throw PreconditionFailed("growth_rate_G expects single-scale profiles");
    if (eps == 0.0) eps = p.epsilon_grid.front();
    if (p.epsilon_grid.front() != eps) throw PreconditionFailed("growth_rate_G profiles disagree on epsilon");
    if (!p.values.front()) continue;
    xs.push_back(static_cast<double>(p.length));
    ys.push_back(std::log(static_cast<double>(*p.values.front())));
  }
  if (xs.size() < 5) throw TooFewResolved("growth_rate_G needs >= 5 resolved lengths");
  return fit_growth_rate(std::move(xs), std::move(ys), options);
}

}  // namespace aperiodic
