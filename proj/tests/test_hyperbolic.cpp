#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "aperiodic/hyperbolic.hpp"

using namespace aperiodic;
using namespace aperiodic::hyperbolic;

namespace {

// Cross-ratio form of the metric, independent of the library's closed form.
double cross_ratio_distance(Complex z, Complex w) {
  const double a = std::abs(z - std::conj(w));
  const double b = std::abs(z - w);
  return std::log((a + b) / (a - b));
}

HPoint random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-3.0, 3.0), v(-2.0, 2.0);
  return HPoint(u(rng), std::exp(v(rng)));
}

// Length of the path t -> (x(t), y(t)) in the metric |dz| / y, midpoint rule.
template <typename Path>
double path_length(Path path, double a, double b, int steps) {
  double total = 0.0;
  const double h = (b - a) / steps;
  for (int k = 0; k < steps; ++k) {
    const Complex p = path(a + k * h), q = path(a + (k + 1) * h);
    total += std::abs(q - p) / (0.5 * (p.imag() + q.imag()));
  }
  return total;
}

}  // namespace

TEST_CASE("hyperbolic distance examples") {
  CHECK(hyp_distance(HPoint(0, 1), HPoint(0, std::exp(1.0))) == doctest::Approx(1.0));
  CHECK(hyp_distance(HPoint(0.3, 2), HPoint(0.3, 2)) == 0.0);
  const double d = hyp_distance(HPoint(0, 1), HPoint(1, 1));
  CHECK(d == doctest::Approx(std::acosh(1.5)));
  CHECK(d == doctest::Approx(0.9624).epsilon(1e-4));
  // Along the geodesic from i to 1 + i: the circle |z - 1/2| = sqrt(5) / 2.
  const double r = std::sqrt(5.0) / 2.0;
  const double a0 = std::atan2(1.0, -0.5), a1 = std::atan2(1.0, 0.5);
  const double integral = path_length([&](double t) { return Complex(0.5 + r * std::cos(t), r * std::sin(t)); },
                                      a0, a1, 200'000);
  CHECK(integral == doctest::Approx(d).epsilon(1e-6));
  CHECK_THROWS_AS(HPoint(0.0, 0.0), DomainError);
  CHECK_THROWS_AS(HPoint(0.0, -1.0), DomainError);
}

TEST_CASE("distance against the cross-ratio form and isometry invariance") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 2000; ++k) {
    const HPoint z = random_point(rng), w = random_point(rng);
    const double d = hyp_distance(z, w);
    CHECK(d == doctest::Approx(cross_ratio_distance(z.z(), w.z())).epsilon(1e-9));
    const Isometry g = random_isometry(rng);
    CHECK(std::abs(hyp_distance(g.apply(z), g.apply(w)) - d) < 1e-9 * std::max(1.0, d));
    CHECK(g.determinant() == doctest::Approx(1.0));
  }
}

TEST_CASE("isometry algebra") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    const Isometry g = random_isometry(rng), h = random_isometry(rng);
    CHECK((g * g.inverse()).same_as(Isometry::identity()));
    const HPoint z = random_point(rng);
    const HPoint a = (g * h).apply(z), b = g.apply(h.apply(z));
    CHECK(hyp_distance(a, b) < 1e-8);
    CHECK(Isometry(-g.a(), -g.b(), -g.c(), -g.d()).same_as(g));
  }
  CHECK(Isometry::translation(2.0).apply_boundary(kInfinity) == kInfinity);
  CHECK(Isometry::dilation(std::log(4.0)).apply_boundary(1.5) == doctest::Approx(6.0));
}

TEST_CASE("translation lengths") {
  for (double t : {0.5, 1.0, 4.0, 12.0}) CHECK(translation_length(Isometry::dilation(t)) == doctest::Approx(t));
  const Isometry tr3(2.0, 1.0, 1.0, 1.0);
  CHECK(translation_length(tr3) == doctest::Approx(2.0 * std::acosh(1.5)));
  CHECK(translation_length(tr3) == doctest::Approx(1.9248).epsilon(1e-4));
  // Displacement cross-check on the axis.
  const auto ax = axis(tr3);
  for (double t : {-2.0, 0.0, 3.0}) CHECK(hyp_distance(ax.at(t), tr3.apply(ax.at(t))) == doctest::Approx(translation_length(tr3)));
  CHECK_THROWS_AS(translation_length(Isometry::translation(1.0)), NotHyperbolic);
  CHECK_THROWS_AS(translation_length(Isometry::rotation(1.0)), NotHyperbolic);
  CHECK_THROWS_AS(axis(Isometry::translation(1.0)), NotHyperbolic);
}

TEST_CASE("axes") {
  const auto a = axis(Isometry::dilation(1.0));
  CHECK(a.start() == doctest::Approx(0.0));
  CHECK(a.end() == kInfinity);
  const Isometry shift = Isometry::translation(1.0);
  const auto b = axis(shift * Isometry::dilation(1.0) * shift.inverse());
  CHECK(b.start() == doctest::Approx(1.0));
  CHECK(b.end() == kInfinity);
  // The orientation follows the direction of translation.
  const auto c = axis(Isometry::dilation(-1.0));
  CHECK(c.start() == kInfinity);
  CHECK(c.end() == doctest::Approx(0.0));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> len(0.2, 10.0);
  for (int k = 0; k < 500; ++k) {
    const Isometry g = random_isometry(rng);
    const Isometry psi = g * Isometry::dilation(len(rng)) * g.inverse();
    const auto ax = axis(psi);
    for (double t : {-3.0, 0.0, 2.0}) {
      CHECK(dist_to_geodesic(psi.apply(ax.at(t)), ax) < 1e-6);
      CHECK(hyp_distance(psi.apply(ax.at(t)), ax.at(t + translation_length(psi))) < 1e-6);
    }
  }
}

TEST_CASE("translation length is the minimal displacement") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const Isometry g = random_isometry(rng);
    const double L = std::uniform_real_distribution<double>(0.5, 8.0)(rng);
    const Isometry psi = hyperbolic_with_axis(GeodesicLine(g), L);
    CHECK(translation_length(psi) == doctest::Approx(L));
    const auto ax = axis(psi);
    double best = kInfinity, best_offset = 1.0;
    for (double off = -2.0; off <= 2.0; off += 0.001) {
      const HPoint z = offset_point(ax, 0.3, off);
      const double d = hyp_distance(z, psi.apply(z));
      if (d < best) {
        best = d;
        best_offset = off;
      }
    }
    CHECK(best == doctest::Approx(L).epsilon(1e-6));
    CHECK(std::abs(best_offset) < 1e-3);
  }
}

TEST_CASE("distance to a line") {
  const auto im = GeodesicLine::imaginary_axis();
  CHECK(dist_to_geodesic(HPoint(0, 3), im) == doctest::Approx(0.0));
  CHECK(dist_to_geodesic(HPoint(1, 1), im) == doctest::Approx(std::acosh(std::sqrt(2.0))));
  CHECK(dist_to_geodesic(HPoint(1, 1), im) == doctest::Approx(kDeltaZero));
  CHECK(signed_dist_to_geodesic(HPoint(1, 1), im) == doctest::Approx(kDeltaZero));
  CHECK(signed_dist_to_geodesic(HPoint(-1, 1), im) == doctest::Approx(-kDeltaZero));

  std::mt19937_64 rng(5);
  for (int k = 0; k < 200; ++k) {
    const GeodesicLine line(random_isometry(rng));
    const double t = std::uniform_real_distribution<double>(-3, 3)(rng);
    double prev = -1.0;
    for (double off = 0.0; off <= 5.0; off += 0.25) {
      const HPoint z = offset_point(line, t, off);
      const double d = dist_to_geodesic(z, line);
      CHECK(d == doctest::Approx(off).epsilon(1e-7));
      CHECK(d > prev);
      CHECK(line.foot_parameter(z) == doctest::Approx(t).epsilon(1e-6));
      prev = d;
    }
  }
}

TEST_CASE("geodesic lines through points") {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 300; ++k) {
    const HPoint z = random_point(rng), w = random_point(rng);
    const auto line = GeodesicLine::through(z, w);
    const double d = hyp_distance(z, w);
    CHECK(hyp_distance(line.at(0.0), z) < 1e-9);
    CHECK(hyp_distance(line.at(d), w) < 1e-7 * std::max(1.0, d));
    CHECK(hyp_distance(line.shifted(1.5).at(0.0), line.at(1.5)) < 1e-9);
    CHECK(hyp_distance(line.reversed().at(-d), w) < 1e-7 * std::max(1.0, d));
  }
  const auto l = GeodesicLine::from_endpoints(-2.0, 3.0);
  CHECK(l.start() == doctest::Approx(-2.0));
  CHECK(l.end() == doctest::Approx(3.0));
  CHECK(l.foot_parameter(HPoint(0, 1)) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK_THROWS_AS(GeodesicLine::through(HPoint(0, 1), HPoint(0, 1)), DomainError);
}

TEST_CASE("geodesic triangles are thin") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 300; ++k) {
    const HPoint p[3] = {random_point(rng), random_point(rng), random_point(rng)};
    GeodesicLine side[3] = {GeodesicLine::through(p[0], p[1]), GeodesicLine::through(p[1], p[2]),
                            GeodesicLine::through(p[2], p[0])};
    const double len[3] = {hyp_distance(p[0], p[1]), hyp_distance(p[1], p[2]), hyp_distance(p[2], p[0])};
    for (int s = 0; s < 3; ++s) {
      for (int j = 0; j <= 100; ++j) {
        const HPoint q = side[s].at(len[s] * j / 100.0);
        const double d1 = dist_to_segment(q, side[(s + 1) % 3], 0.0, len[(s + 1) % 3]);
        const double d2 = dist_to_segment(q, side[(s + 2) % 3], 0.0, len[(s + 2) % 3]);
        CHECK(std::min(d1, d2) <= kDeltaZero + 1e-9);
      }
    }
  }
}

TEST_CASE("displacement bounds") {
  const Isometry psi = Isometry::dilation(5.0);
  const auto on_axis = displacement_bounds_check(psi, HPoint(0, 2));
  CHECK(on_axis.holds());
  CHECK(on_axis.displacement == doctest::Approx(5.0));
  CHECK(on_axis.slack_lower > 0.0);
  CHECK(on_axis.slack_upper >= 0.0);
  CHECK_THROWS_AS(displacement_bounds_check(Isometry::dilation(1.0), HPoint(0, 1)), PreconditionFailed);

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> len(4.0 * kDeltaZero, 20.0), off(-10.0, 10.0), t(-5.0, 5.0);
  for (int k = 0; k < 1000; ++k) {
    const GeodesicLine line(random_isometry(rng));
    const Isometry p = hyperbolic_with_axis(line, len(rng));
    const auto rep = displacement_bounds_check(p, offset_point(line, t(rng), off(rng)));
    CHECK(rep.holds());
  }
}

TEST_CASE("neighbor containment") {
  const auto im = GeodesicLine::imaginary_axis();
  const auto same = neighbor_containment_check(im, 10.0, im, 0.5, 0.5);
  CHECK(same.holds());
  CHECK(same.max_distance < 1e-12);
  CHECK(same.min_slack == doctest::Approx(0.5));

  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int k = 0; k < 200; ++k) {
    const double eps = 0.05 + 0.5 * u(rng);
    const double D = eps + (5.0 - eps) * u(rng);
    const double L = 2.0 * (D - std::log(eps)) + 5.0 * u(rng);
    const GeodesicLine alpha(random_isometry(rng));
    // Ends at D from alpha (less a rounding margin), on chosen sides.
    const double s0 = u(rng) < 0.5 ? -1.0 : 1.0, s1 = u(rng) < 0.5 ? -1.0 : 1.0;
    const double c = 10.0 * (u(rng) - 0.5);
    const HPoint a = offset_point(alpha, c - L, s0 * (D - 1e-6)), b = offset_point(alpha, c + L, s1 * (D - 1e-6));
    const auto gamma = GeodesicLine::through(a, b).shifted(hyp_distance(a, b) / 2.0);
    CHECK(dist_to_geodesic(gamma.at(-hyp_distance(a, b) / 2.0), alpha) == doctest::Approx(D).epsilon(1e-5));
    const auto rep = neighbor_containment_check(gamma, hyp_distance(a, b) / 2.0, alpha, D, eps);
    CHECK(rep.holds());
    CHECK(rep.samples > 0);
  }
  CHECK_THROWS_AS(neighbor_containment_check(im, 1.0, im, 0.5, 0.1), PreconditionFailed);
  CHECK_THROWS_AS(neighbor_containment_check(im, 10.0, im, 0.05, 0.1), PreconditionFailed);
}

TEST_CASE("closing constants") {
  const auto c = closing_constants(0.1);
  CHECK(c.s0 == doctest::Approx(0.4 + 6.0 * kDeltaZero));
  CHECK(c.c0 == doctest::Approx(2.0 * kDeltaZero + 0.1 - std::log(0.1 / 8.0)));
  CHECK(c.l0 >= 4.0 * kDeltaZero + 0.1);
  CHECK(c.s0 + c.l0 >= 2.0 * c.c0 - 1e-12);
}

TEST_CASE("closing estimate on the axis and on offset segments") {
  const double L = 8.0;
  const Isometry psi = Isometry::dilation(L);
  const auto k = closing_constants(0.1);
  const auto rep = closing_lemma_check(GeodesicLine::imaginary_axis(), psi, 0.1, L, k.l0 + 1.0);
  CHECK(rep.holds());
  CHECK(rep.shadowing < 1e-9);
  CHECK(rep.slack_lower == doctest::Approx(0.2));
  CHECK(rep.slack_upper == doctest::Approx(0.1));
  CHECK_THROWS_AS(closing_lemma_check(GeodesicLine::imaginary_axis(), Isometry::dilation(k.s0 - 0.1), 0.1,
                                      k.s0 - 0.1, k.l0 + 1.0),
                  PreconditionFailed);
  CHECK_THROWS_AS(closing_lemma_check(GeodesicLine::imaginary_axis(), psi, 0.1, L, k.l0 - 1.0), PreconditionFailed);

  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t done = 0;
  for (int trial = 0; trial < 400 && done < 100; ++trial) {
    const double eps0 = 0.1;
    const auto kk = closing_constants(eps0);
    const double s = kk.s0 + 0.5 + (20.0 - kk.s0 - 0.5) * u(rng);
    const double l = kk.l0 + 5.0 * u(rng);
    const GeodesicLine ax(random_isometry(rng));
    const Isometry p = hyperbolic_with_axis(ax, s);
    const double half = (s + l) / 2.0;
    const HPoint a = offset_point(ax, -half, eps0 / 4.0), b = offset_point(ax, half, -eps0 / 4.0);
    const auto gamma = GeodesicLine::through(a, b);
    try {
      CHECK(closing_lemma_check(gamma, p, eps0, s, l).holds());
      ++done;
    } catch (const HypothesisFailed&) {
    }
  }
  CHECK(done == 100);
}

TEST_CASE("penetration into axis tubes") {
  const Isometry psi = Isometry::dilation(3.0);
  const double eps0 = 0.2;
  const auto whole = geodesic_penetration(GeodesicLine::imaginary_axis(), -4.0, 6.0, psi, eps0, {Isometry::identity()});
  REQUIRE(whole.size() == 1);
  CHECK(whole.front().length == doctest::Approx(10.0));
  CHECK(whole.front().entry == doctest::Approx(-4.0));

  // Crossing at angle theta: sinh d = sinh t sin theta, so the tube of radius
  // eps0 / 2 is entered for |t| < asinh(sinh(eps0 / 2) / sin theta).
  for (double rot : {std::numbers::pi / 2.0, 1.0, 0.6, 2.5}) {
    const GeodesicLine gamma(Isometry::rotation(rot));
    const Complex tangent = gamma.at(1e-6).z() - gamma.at(-1e-6).z();
    const double theta = std::abs(std::atan2(tangent.real(), tangent.imag()));
    const double half = std::asinh(std::sinh(eps0 / 2.0) / std::sin(theta));
    const auto pen = geodesic_penetration(gamma, -5.0, 5.0, psi, eps0, {Isometry::identity()});
    REQUIRE(pen.size() == 1);
    CHECK(std::abs(pen.front().length - 2.0 * half) < 0.02);
  }
  const GeodesicLine far = GeodesicLine::from_endpoints(5.0, 6.0);
  CHECK(geodesic_penetration(far, -3.0, 3.0, psi, eps0, {Isometry::identity()}).empty());
}

TEST_CASE("word balls and orbital counting") {
  const auto gens = schottky_generators();
  CHECK(word_ball(gens, 0).size() == 1);
  CHECK(word_ball(gens, 1).size() == 5);
  CHECK(word_ball(gens, 2).size() == 17);
  CHECK(word_ball(gens, 3).size() == 53);
  CHECK(translation_length(gens[0]) == doctest::Approx(2.0 * std::asinh(2.0)));

  CHECK(orbital_counting({}, HPoint(0, 1), 100.0, 3) == 1);
  const Isometry psi = Isometry::dilation(2.0);
  CHECK(orbital_counting({psi}, HPoint(0, 1), 7.0, 6) == 7);
  CHECK_THROWS_AS(orbital_counting({psi}, HPoint(0, 1), 7.0, 0), PreconditionFailed);

  // log N grows linearly in l for the free group.
  std::vector<double> xs, ys;
  for (double l = 4.0; l <= 10.0; l += 1.0) {
    xs.push_back(l);
    ys.push_back(std::log(static_cast<double>(orbital_counting(gens, HPoint(0.3, 1.2), l, 6))));
  }
  CHECK((ys.back() - ys.front()) / (xs.back() - xs.front()) > 0.1);
  for (std::size_t k = 1; k < ys.size(); ++k) CHECK(ys[k] >= ys[k - 1]);
}
