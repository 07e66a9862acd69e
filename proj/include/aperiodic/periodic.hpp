#pragma once

// Periodic anchors, critical neighborhoods, approximation constants,
// penetration lengths and falsification checks for closing properties.

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "aperiodic/core.hpp"

namespace aperiodic {

template <DynamicalSystem S>
struct PeriodicPoint {
  typename S::State state;
  std::size_t period = 1;
  double residual = 0.0;  // d(T^p x_p, x_p)
  bool primitive = true;
};

/// Computes the residual and primitivity of a claimed periodic point. Throws
/// PreconditionFailed if the residual exceeds the tolerance (pass 0 for
/// exact systems).
template <DynamicalSystem S>
PeriodicPoint<S> certify_periodic(const S& sys, typename S::State state, std::size_t period,
                                  double tolerance = 1e-10) {
  if (period == 0) throw PreconditionFailed("period must be positive");
  PeriodicPoint<S> pp{state, period, 0.0, true};
  auto y = state;
  for (std::size_t q = 1; q <= period; ++q) {
    y = sys.step(y);
    const double d = sys.distance(y, state);
    if (q < period && d <= tolerance) pp.primitive = false;
    if (q == period) pp.residual = d;
  }
  if (pp.residual > tolerance)
    throw PreconditionFailed("residual " + std::to_string(pp.residual) + " exceeds tolerance");
  return pp;
}

/// Radius of the critical neighborhood of a period-p point: F<-(p) / 2.
inline double critical_radius(const QuantileTable& f, double p) { return quantile_left(f, p) / 2.0; }

/// y is within rho of x_p both now and after p steps.
template <DynamicalSystem S>
bool in_critical_neighborhood(const S& sys, const typename S::State& y, const PeriodicPoint<S>& xp,
                              double rho) {
  if (!closer_than(sys, y, xp.state, rho)) return false;
  auto z = y;
  for (std::size_t i = 0; i < xp.period; ++i) z = sys.step(z);
  return closer_than(sys, z, xp.state, rho);
}

struct ApproximationRecord {
  std::size_t horizon = 0;
  double constant = 0.0;
  std::size_t attained_at = 0;
};

/// The orbit enters the critical neighborhood of radius r at time n iff
/// max(d(T^n x, x_p), d(T^{n+p} x, x_p)) < r, so the infimum of radii the
/// window ever enters is the minimum of that max over n.
template <DynamicalSystem S>
ApproximationRecord approximation_constant(const S& sys, const typename S::State& x,
                                           const PeriodicPoint<S>& xp, std::size_t horizon) {
  if (horizon < 1) throw PreconditionFailed("approximation_constant needs N >= 1");
  detail::LazyOrbit<S> orbit(sys, x);
  ApproximationRecord rec{horizon, std::numeric_limits<double>::infinity(), 0};
  for (std::size_t n = 0; n <= horizon; ++n) {
    const double a = sys.distance(orbit.at(n), xp.state);
    if (a >= rec.constant) continue;
    const double m = std::max(a, sys.distance(orbit.at(n + xp.period), xp.state));
    if (m < rec.constant) {
      rec.constant = m;
      rec.attained_at = n;
    }
  }
  return rec;
}

/// 0 if y is outside B(x0, eps), otherwise 1 + max{l <= L_max : d_l(y, x0) < eps}.
/// Unresolved when the maximum reaches L_max.
template <DynamicalSystem S>
ShiftValue penetration_length(const S& sys, const typename S::State& x0, const typename S::State& y,
                              double epsilon, std::size_t max_length) {
  if (!(epsilon > 0.0)) throw PreconditionFailed("penetration_length needs epsilon > 0");
  auto a = y;
  auto b = x0;
  if (!closer_than(sys, a, b, epsilon)) return 0;
  for (std::size_t l = 1; l <= max_length; ++l) {
    a = sys.step(a);
    b = sys.step(b);
    if (!closer_than(sys, a, b, epsilon)) return l;
  }
  return std::nullopt;
}

/// Periodic points of a given period offered as closing witnesses for x.
/// Built-in systems supply exact providers; ListRegistry serves user lists.
template <typename R, typename S>
concept PeriodicRegistry = DynamicalSystem<S> &&
    requires(const R& reg, const typename S::State& x, std::size_t period) {
      { reg.candidates(x, period) } -> std::same_as<std::vector<PeriodicPoint<S>>>;
    };

template <DynamicalSystem S>
class ListRegistry {
 public:
  ListRegistry() = default;
  explicit ListRegistry(std::vector<PeriodicPoint<S>> points) : points_(std::move(points)) {}

  std::vector<PeriodicPoint<S>> candidates(const typename S::State&, std::size_t period) const {
    std::vector<PeriodicPoint<S>> out;
    for (const auto& p : points_)
      if (p.period == period) out.push_back(p);
    return out;
  }
  const std::vector<PeriodicPoint<S>>& points() const noexcept { return points_; }

 private:
  std::vector<PeriodicPoint<S>> points_;
};

template <DynamicalSystem S>
struct RecurrenceEvent {
  typename S::State x;
  std::size_t shift = 1;
  std::size_t length = 0;  // only read by the strong checker
  double epsilon = 0.0;
};

struct ClosingReport {
  struct Counterexample {
    std::size_t event = 0;
    std::string reason;
  };
  std::size_t checked = 0;
  std::size_t skipped = 0;  // delta(eps) beyond the diameter bound
  std::vector<Counterexample> counterexamples;
  // A counterexample refutes closing only for this registry and budget.
  std::string semantics = "no counterexample within registry and budget";

  bool clean() const noexcept { return counterexamples.empty(); }
};

using ClosingFunction = std::function<double(double)>;
using StrongClosingFunction = std::function<std::size_t(double, std::size_t)>;

template <DynamicalSystem S, typename R>
  requires PeriodicRegistry<R, S>
ClosingReport check_delta_closing(const S& sys, const ClosingFunction& delta, const R& registry,
                                  std::span<const RecurrenceEvent<S>> events) {
  ClosingReport report;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& ev = events[k];
    auto ts = ev.x;
    for (std::size_t i = 0; i < ev.shift; ++i) ts = sys.step(ts);
    if (ev.shift == 0 || !closer_than(sys, ev.x, ts, ev.epsilon))
      throw MalformedEvent("event " + std::to_string(k) + " is not an eps-recurrence");
    const double rho = delta(ev.epsilon);
    if (rho > sys.diameter_bound()) {
      ++report.skipped;
      continue;
    }
    ++report.checked;
    bool found = false;
    for (const auto& xs : registry.candidates(ev.x, ev.shift)) {
      if (in_critical_neighborhood(sys, ev.x, xs, rho)) {
        found = true;
        break;
      }
    }
    if (!found) report.counterexamples.push_back({k, "no period-" + std::to_string(ev.shift) + " witness"});
  }
  return report;
}

template <DynamicalSystem S, typename R>
  requires PeriodicRegistry<R, S>
ClosingReport check_strong_delta_closing(const S& sys, const StrongClosingFunction& delta,
                                         const R& registry,
                                         std::span<const RecurrenceEvent<S>> events) {
  ClosingReport report;
  for (std::size_t k = 0; k < events.size(); ++k) {
    const auto& ev = events[k];
    auto ts = ev.x;
    for (std::size_t i = 0; i < ev.shift; ++i) ts = sys.step(ts);
    if (ev.shift == 0 || !bowen_closer_than(sys, ev.x, ts, ev.length, ev.epsilon))
      throw MalformedEvent("event " + std::to_string(k) + " is not a Bowen eps-recurrence");
    ++report.checked;
    const std::size_t need = ev.shift + delta(ev.epsilon, ev.length) + 1;
    bool found = false;
    for (const auto& xs : registry.candidates(ev.x, ev.shift)) {
      const ShiftValue p = penetration_length(sys, xs.state, ev.x, ev.epsilon, need);
      if (!p || *p >= need) {
        found = true;
        break;
      }
    }
    if (!found)
      report.counterexamples.push_back({k, "no period-" + std::to_string(ev.shift) +
                                               " point with penetration >= " + std::to_string(need)});
  }
  return report;
}

/// Lower bound for the Hurwitz constant of x_p: the best approximation
/// constant over the sample.
template <DynamicalSystem S>
double hurwitz_estimate(const S& sys, const PeriodicPoint<S>& xp,
                        std::span<const typename S::State> sample, std::size_t horizon) {
  if (sample.empty()) throw PreconditionFailed("hurwitz_estimate needs a sample");
  double best = 0.0;
  for (const auto& x : sample) best = std::max(best, approximation_constant(sys, x, xp, horizon).constant);
  return best;
}

struct BoundedClassification {
  std::size_t anchor = 0;
  std::size_t period = 0;
  double radius = 0.0;
  bool member = true;  // the window avoids the critical neighborhood
  std::optional<std::size_t> entry_time;
  double approximation = 0.0;
  bool consistent = true;  // member == (approximation >= radius)
};

/// Membership of x in the F-bounded set of each anchor, decided along the
/// window and cross-checked against the approximation constant.
template <DynamicalSystem S>
std::vector<BoundedClassification> classify_bounded(const S& sys, const typename S::State& x,
                                                    const QuantileTable& f,
                                                    std::span<const PeriodicPoint<S>> registry,
                                                    std::size_t horizon) {
  std::vector<BoundedClassification> out;
  for (std::size_t a = 0; a < registry.size(); ++a) {
    const auto& xp = registry[a];
    BoundedClassification c;
    c.anchor = a;
    c.period = xp.period;
    c.radius = critical_radius(f, static_cast<double>(xp.period));
    auto y = x;
    for (std::size_t n = 0; n <= horizon; ++n) {
      if (in_critical_neighborhood(sys, y, xp, c.radius)) {
        c.member = false;
        c.entry_time = n;
        break;
      }
      y = sys.step(y);
    }
    c.approximation = approximation_constant(sys, x, xp, horizon).constant;
    c.consistent = c.member == (c.approximation >= c.radius);
    out.push_back(c);
  }
  return out;
}

}  // namespace aperiodic
