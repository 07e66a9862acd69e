#include "aperiodic/hyperbolic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <string>
#include <tuple>

namespace aperiodic::hyperbolic {

namespace {

// Inequalities are checked with this allowance for rounding in the closed
// forms; anything below it is reported as a negative slack, not a violation.
constexpr double kRoundoff = 1e-9;
// Hypotheses on constructed inputs lose more: a segment of length 2L carried
// by a random isometry has end distances accurate to about e^L ulp.
constexpr double kHypothesisSlack = 1e-7;
constexpr double kStep = 0.01;

// Evenly spaced samples of [a, b] at spacing <= kStep, both ends included.
template <typename F>
void sample(double a, double b, F&& f) {
  if (b < a) return;
  const auto n = static_cast<std::size_t>(std::ceil((b - a) / kStep));
  if (n == 0) {
    f(a);
    return;
  }
  for (std::size_t k = 0; k <= n; ++k) f(a + (b - a) * static_cast<double>(k) / static_cast<double>(n));
}

// Distance from e^t i to the imaginary axis after applying m. Checks route
// points through composed frames so that long segments keep full
// precision: a point far out on a line is never formed in absolute
// coordinates.
double frame_gap(const Isometry& m, double t) {
  const HPoint w = m.apply(HPoint(0.0, std::exp(t)));
  return std::asinh(std::abs(w.u()) / w.v());
}

Isometry relative(const GeodesicLine& target, const GeodesicLine& gamma) {
  return target.frame().inverse() * gamma.frame();
}

}  // namespace

HPoint::HPoint(double u, double v) : z_(u, v) {
  if (!std::isfinite(u) || !std::isfinite(v) || !(v > 1e-300))
    throw DomainError("point (" + std::to_string(u) + ", " + std::to_string(v) + ") is not in the upper half-plane");
}

double hyp_distance(const HPoint& z, const HPoint& w) {
  const double chord = std::abs(z.z() - w.z());
  return 2.0 * std::asinh(chord / (2.0 * std::sqrt(z.v() * w.v())));
}

Isometry::Isometry(double a, double b, double c, double d) {
  const double det = a * d - b * c;
  if (!std::isfinite(det) || !(det > 0.0)) throw DomainError("isometry needs a positive determinant");
  const double k = 1.0 / std::sqrt(det);
  m_ = {a * k, b * k, c * k, d * k};
}

Isometry Isometry::dilation(double t) { return {std::exp(t / 2.0), 0.0, 0.0, std::exp(-t / 2.0)}; }

Isometry Isometry::rotation(double theta) {
  const double c = std::cos(theta / 2.0);
  const double s = std::sin(theta / 2.0);
  return {c, s, -s, c};
}

bool Isometry::is_hyperbolic() const noexcept { return std::abs(trace()) > 2.0; }

Complex Isometry::apply(Complex z) const {
  return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]);
}

HPoint Isometry::apply(const HPoint& z) const {
  // Im(g z) = Im z / |cz + d|^2 keeps full relative precision near the boundary.
  const double u = z.u();
  const double v = z.v();
  const double cu = m_[2] * u + m_[3];
  const double den = cu * cu + m_[2] * m_[2] * v * v;
  const double re = ((m_[0] * u + m_[1]) * cu + m_[0] * m_[2] * v * v) / den;
  return HPoint(re, v / den);
}

double Isometry::apply_boundary(double x) const {
  if (std::isinf(x)) return m_[2] == 0.0 ? kInfinity : m_[0] / m_[2];
  const double den = m_[2] * x + m_[3];
  if (den == 0.0) return kInfinity;
  return (m_[0] * x + m_[1]) / den;
}

Isometry Isometry::operator*(const Isometry& o) const {
  return {m_[0] * o.m_[0] + m_[1] * o.m_[2], m_[0] * o.m_[1] + m_[1] * o.m_[3],
          m_[2] * o.m_[0] + m_[3] * o.m_[2], m_[2] * o.m_[1] + m_[3] * o.m_[3]};
}

bool Isometry::same_as(const Isometry& o, double tolerance) const {
  bool plus = true, minus = true;
  for (std::size_t i = 0; i < 4; ++i) {
    plus = plus && std::abs(m_[i] - o.m_[i]) <= tolerance;
    minus = minus && std::abs(m_[i] + o.m_[i]) <= tolerance;
  }
  return plus || minus;
}

GeodesicLine GeodesicLine::from_endpoints(double start, double end) {
  if (start == end || (std::isinf(start) && std::isinf(end)))
    throw DomainError("geodesic endpoints must be distinct");
  Isometry frame;
  if (std::isinf(end)) {
    frame = Isometry(1.0, start, 0.0, 1.0);
  } else if (std::isinf(start)) {
    frame = Isometry(end, -1.0, 1.0, 0.0);
  } else if (end > start) {
    frame = Isometry(end, start, 1.0, 1.0);
  } else {
    frame = Isometry(end, -start, 1.0, -1.0);
  }
  GeodesicLine line(frame);
  return line.shifted(line.foot_parameter(HPoint(0.0, 1.0)));
}

GeodesicLine GeodesicLine::through(const HPoint& z, const HPoint& w) {
  if (hyp_distance(z, w) == 0.0) throw DomainError("geodesic through a single point is undefined");
  // Move z to i, then w to x + iy.
  const double sv = std::sqrt(z.v());
  const Isometry h(1.0 / sv, -z.u() / sv, 0.0, sv);
  const HPoint wp = h.apply(w);
  const double x = wp.u();
  const double y = wp.v();
  double start, end;
  if (x == 0.0) {
    start = y > 1.0 ? 0.0 : kInfinity;
    end = y > 1.0 ? kInfinity : 0.0;
  } else {
    // Endpoints are the roots of t^2 - 2ct - 1 = 0.
    const double c = (x * x + y * y - 1.0) / (2.0 * x);
    const double r = std::hypot(c, 1.0);
    const double big = c >= 0.0 ? c + r : c - r;
    const double small = -1.0 / big;
    const double left = std::min(big, small);
    const double right = std::max(big, small);
    start = x > 0.0 ? left : right;
    end = x > 0.0 ? right : left;
  }
  const GeodesicLine line = from_endpoints(start, end).transformed(h.inverse());
  return line.shifted(line.foot_parameter(z));
}

HPoint GeodesicLine::at(double t) const { return frame_.apply(HPoint(0.0, std::exp(t))); }

GeodesicLine GeodesicLine::shifted(double t0) const { return GeodesicLine(frame_ * Isometry::dilation(t0)); }

GeodesicLine GeodesicLine::reversed() const { return GeodesicLine(frame_ * Isometry(0.0, -1.0, 1.0, 0.0)); }

double GeodesicLine::foot_parameter(const HPoint& z) const {
  return std::log(std::abs(frame_.inverse().apply(z).z()));
}

double dist_to_geodesic(const HPoint& z, const GeodesicLine& line) {
  return std::abs(signed_dist_to_geodesic(z, line));
}

double signed_dist_to_geodesic(const HPoint& z, const GeodesicLine& line) {
  const HPoint w = line.frame().inverse().apply(z);
  return std::asinh(w.u() / w.v());
}

double dist_to_segment(const HPoint& z, const GeodesicLine& line, double t0, double t1) {
  const double t = line.foot_parameter(z);
  if (t >= t0 && t <= t1) return dist_to_geodesic(z, line);
  return std::min(hyp_distance(z, line.at(t0)), hyp_distance(z, line.at(t1)));
}

double translation_length(const Isometry& psi) {
  if (!psi.is_hyperbolic()) throw NotHyperbolic("|trace| = " + std::to_string(std::abs(psi.trace())) + " <= 2");
  return 2.0 * std::acosh(std::abs(psi.trace()) / 2.0);
}

GeodesicLine axis(const Isometry& psi) {
  if (!psi.is_hyperbolic()) throw NotHyperbolic("|trace| = " + std::to_string(std::abs(psi.trace())) + " <= 2");
  const double a = psi.a(), b = psi.b(), c = psi.c(), d = psi.d();
  // Fixed points solve c z^2 + (d - a) z - b = 0, discriminant trace^2 - 4.
  const double disc = std::sqrt(psi.trace() * psi.trace() - 4.0);
  const double e = d - a;
  const double q = -0.5 * (e + (e >= 0.0 ? disc : -disc));
  const double z1 = c == 0.0 ? kInfinity : q / c;
  const double z2 = -b / q;
  const bool z2_attracting = std::abs(c * z2 + d) > 1.0;
  return z2_attracting ? GeodesicLine::from_endpoints(z1, z2) : GeodesicLine::from_endpoints(z2, z1);
}

Isometry hyperbolic_with_axis(const GeodesicLine& line, double length) {
  return line.frame() * Isometry::dilation(length) * line.frame().inverse();
}

HPoint offset_point(const GeodesicLine& line, double t, double offset) {
  const double r = std::exp(t);
  return line.frame().apply(HPoint(r * std::tanh(offset), r / std::cosh(offset)));
}

DisplacementReport displacement_bounds_check(const Isometry& psi, const HPoint& z) {
  DisplacementReport r;
  r.translation = translation_length(psi);
  if (r.translation < 4.0 * kDeltaZero)
    throw PreconditionFailed("|psi| = " + std::to_string(r.translation) + " < 4 delta0");
  r.axis_distance = dist_to_geodesic(z, axis(psi));
  r.displacement = hyp_distance(z, psi.apply(z));
  r.lower = std::max(2.0 * r.axis_distance, r.translation) - 4.0 * kDeltaZero;
  r.upper = r.translation + 2.0 * r.axis_distance;
  r.slack_lower = r.displacement - r.lower + kRoundoff;
  r.slack_upper = r.upper - r.displacement + kRoundoff;
  return r;
}

ContainmentReport neighbor_containment_check(const GeodesicLine& gamma, double half_length,
                                             const GeodesicLine& alpha, double D, double epsilon) {
  if (!(epsilon > 0.0) || D < epsilon) throw PreconditionFailed("need D >= eps > 0");
  const double c = D - std::log(epsilon);
  if (half_length < 2.0 * c) throw PreconditionFailed("L below 2(D - log eps)");
  const Isometry m = relative(alpha, gamma);
  if (frame_gap(m, -half_length) > D + kHypothesisSlack || frame_gap(m, half_length) > D + kHypothesisSlack)
    throw PreconditionFailed("segment ends are farther than D from the line");
  ContainmentReport r;
  r.c = c;
  sample(-half_length + c, half_length - c, [&](double t) {
    const double dist = frame_gap(m, t);
    ++r.samples;
    r.max_distance = std::max(r.max_distance, dist);
    if (dist >= epsilon) ++r.violations;
  });
  r.min_slack = epsilon - r.max_distance;
  return r;
}

ClosingConstants closing_constants(double epsilon0) {
  if (!(epsilon0 > 0.0)) throw PreconditionFailed("eps0 must be positive");
  ClosingConstants k;
  k.epsilon0 = epsilon0;
  k.s0 = 4.0 * epsilon0 + 6.0 * kDeltaZero;
  k.c0 = 2.0 * kDeltaZero + epsilon0 - std::log(epsilon0 / 8.0);
  k.l0 = std::max(4.0 * kDeltaZero + epsilon0, 2.0 * k.c0 - k.s0);
  return k;
}

ClosingLemmaReport closing_lemma_check(const GeodesicLine& gamma, const Isometry& psi, double epsilon0,
                                       double s, double l) {
  ClosingLemmaReport r;
  r.constants = closing_constants(epsilon0);
  r.translation = translation_length(psi);
  if (r.translation < 4.0 * kDeltaZero) throw PreconditionFailed("|psi| < 4 delta0");
  if (s <= r.constants.s0) throw PreconditionFailed("s <= s0 = " + std::to_string(r.constants.s0));
  if (l < r.constants.l0) throw PreconditionFailed("l < l0 = " + std::to_string(r.constants.l0));

  // In the frame of gamma: gamma(s + t) = e^{s+t} i against n(e^t i).
  const Isometry n = gamma.frame().inverse() * psi * gamma.frame();
  sample(0.0, l, [&](double t) {
    const double d = hyp_distance(HPoint(0.0, std::exp(s + t)), n.apply(HPoint(0.0, std::exp(t))));
    r.shadowing = std::max(r.shadowing, d);
  });
  if (r.shadowing > epsilon0)
    throw HypothesisFailed("shadowing distance " + std::to_string(r.shadowing) + " exceeds eps0");

  r.slack_lower = r.translation - (s - 2.0 * epsilon0) + kRoundoff;
  r.slack_upper = (s + epsilon0) - r.translation + kRoundoff;

  const Isometry m = relative(axis(psi), gamma);
  const double radius = epsilon0 / 8.0;
  r.tube.c = r.constants.c0;
  sample(r.constants.c0, s + l - r.constants.c0, [&](double t) {
    const double dist = frame_gap(m, t);
    ++r.tube.samples;
    r.tube.max_distance = std::max(r.tube.max_distance, dist);
    if (dist >= radius) ++r.tube.violations;
  });
  r.tube.min_slack = radius - r.tube.max_distance;
  return r;
}

std::vector<Penetration> geodesic_penetration(const GeodesicLine& gamma, double t0, double t1,
                                              const Isometry& psi, double epsilon0,
                                              const std::vector<Isometry>& elements) {
  if (!(epsilon0 > 0.0)) throw PreconditionFailed("eps0 must be positive");
  if (t1 < t0) throw PreconditionFailed("empty segment");
  const GeodesicLine a = axis(psi);
  const double radius = epsilon0 / 2.0;
  std::vector<Penetration> out;
  for (std::size_t k = 0; k < elements.size(); ++k) {
    const Isometry m = relative(a.transformed(elements[k]), gamma);
    // Distance to a geodesic is convex along a geodesic, so the sublevel
    // set is an interval around the minimiser.
    auto f = [&](double t) { return frame_gap(m, t) - radius; };
    std::vector<double> ts;
    sample(t0, t1, [&](double t) { ts.push_back(t); });
    std::size_t best = 0;
    std::vector<double> fs(ts.size());
    for (std::size_t i = 0; i < ts.size(); ++i) {
      fs[i] = f(ts[i]);
      if (fs[i] < fs[best]) best = i;
    }
    double lo = ts[best > 0 ? best - 1 : 0];
    double hi = ts[std::min(best + 1, ts.size() - 1)];
    for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (f(m1) < f(m2)) hi = m2;
      else lo = m1;
    }
    double tmin = 0.5 * (lo + hi);
    if (f(ts[best]) < f(tmin)) tmin = ts[best];
    if (f(tmin) > 0.0) continue;
    auto edge = [&](double inside, double outside) {
      if (f(outside) <= 0.0) return outside;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (inside + outside);
        (f(m) <= 0.0 ? inside : outside) = m;
      }
      return inside;
    };
    const double left = edge(tmin, t0);
    const double right = edge(tmin, t1);
    out.push_back({k, left, right - left});
  }
  return out;
}

std::vector<Isometry> word_ball(const std::vector<Isometry>& generators, std::size_t radius) {
  const std::size_t m = generators.size();
  std::vector<Isometry> letters = generators;
  for (const auto& g : generators) letters.push_back(g.inverse());

  std::vector<Isometry> out{Isometry::identity()};
  // Buckets on rounded, sign-normalised entries; equality is confirmed
  // with same_as.
  std::map<std::tuple<long long, long long, long long, long long>, std::vector<std::size_t>> buckets;
  auto key = [](const Isometry& g) {
    double e[4] = {g.a(), g.b(), g.c(), g.d()};
    double sign = 1.0;
    for (double x : e)
      if (std::abs(x) > 1e-6) {
        sign = x > 0.0 ? 1.0 : -1.0;
        break;
      }
    auto r = [&](double x) { return std::llround(sign * x * 1e6); };
    return std::make_tuple(r(e[0]), r(e[1]), r(e[2]), r(e[3]));
  };
  auto insert = [&](const Isometry& g) {
    auto& bucket = buckets[key(g)];
    for (std::size_t idx : bucket)
      if (out[idx].same_as(g)) return false;
    bucket.push_back(out.size());
    out.push_back(g);
    return true;
  };
  buckets[key(out.front())].push_back(0);

  struct Node {
    Isometry g;
    std::size_t last;
  };
  std::vector<Node> frontier;
  for (std::size_t k = 0; k < letters.size(); ++k) frontier.push_back({letters[k], k});
  for (std::size_t len = 1; len <= radius && !frontier.empty(); ++len) {
    std::vector<Node> next;
    for (const auto& node : frontier) {
      insert(node.g);
      if (len == radius) continue;
      for (std::size_t k = 0; k < letters.size(); ++k) {
        if (m > 0 && k == (node.last + m) % (2 * m)) continue;  // would cancel
        next.push_back({node.g * letters[k], k});
      }
    }
    frontier = std::move(next);
  }
  return out;
}

std::size_t orbital_counting(const std::vector<Isometry>& generators, const HPoint& x, double l,
                             std::size_t radius) {
  if (radius < 1) throw PreconditionFailed("word radius must be >= 1");
  std::size_t count = 0;
  for (const auto& g : word_ball(generators, radius))
    if (hyp_distance(x, g.apply(x)) <= l) ++count;
  return count;
}

std::vector<Isometry> schottky_generators() {
  const double length = 2.0 * std::asinh(2.0);
  const Isometry a = hyperbolic_with_axis(GeodesicLine::from_endpoints(-1.0, 1.0), length);
  return {a, Isometry::dilation(length)};
}

Isometry random_isometry(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
  std::uniform_real_distribution<double> stretch(-3.0, 3.0);
  std::uniform_real_distribution<double> shift(-2.0, 2.0);
  return Isometry::translation(shift(rng)) * Isometry::dilation(stretch(rng)) * Isometry::rotation(angle(rng));
}

}  // namespace aperiodic::hyperbolic
