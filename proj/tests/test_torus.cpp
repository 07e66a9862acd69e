#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "aperiodic/torus.hpp"

using namespace aperiodic;
using namespace aperiodic::torus;

namespace {

const long double kGolden = (std::sqrt(5.0L) - 1.0L) / 2.0L;
const long double kSilver = std::sqrt(2.0L) - 1.0L;

// Independent oracle: min over s of s * ||s alpha||, straight loop.
long double brute_constant(long double alpha, std::uint64_t s_max) {
  long double best = 1e9L;
  for (std::uint64_t s = 1; s <= s_max; ++s) {
    const long double t = static_cast<long double>(s) * alpha;
    best = std::min(best, static_cast<long double>(s) * std::fabs(t - std::nearbyint(t)));
  }
  return best;
}

}  // namespace

TEST_CASE("torus distance examples") {
  const double a[] = {0.0}, b[] = {0.9};
  CHECK(torus_distance(a, b) == doctest::Approx(0.1));
  CHECK(torus_distance(a, a) == 0.0);
  const double p[] = {0.0, 0.0}, q[] = {0.5, 0.5};
  CHECK(torus_distance(p, q) == doctest::Approx(std::sqrt(2.0) / 2.0));
  CHECK(circle_distance(1.75L) == doctest::Approx(0.25));
}

TEST_CASE("the flow is an isometry") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<long double> u(0.0L, 1.0L);
  for (std::size_t n : {1u, 2u, 3u}) {
    std::vector<long double> alpha(n);
    for (auto& a : alpha) a = u(rng);
    TorusRotation sys(n, alpha);
    for (int k = 0; k < 200; ++k) {
      std::vector<long double> bx(n), by(n);
      for (auto& c : bx) c = u(rng);
      for (auto& c : by) c = u(rng);
      const auto x = sys.start(bx), y = sys.start(by);
      CHECK(sys.distance(sys.step(x), sys.step(y)) == doctest::Approx(sys.distance(x, y)).epsilon(1e-12));
      CHECK(sys.distance(x, y) <= sys.diameter_bound());
    }
  }
  CHECK_THROWS_AS(TorusRotation(5, {0.1L, 0.1L, 0.1L, 0.1L, 0.1L}), PreconditionFailed);
}

TEST_CASE("continued fraction convergents") {
  const auto g = ContinuedFraction::golden();
  const auto conv = g.convergents(30);
  CHECK(conv[0].second == 1);
  for (std::size_t k = 2; k < conv.size(); ++k) {
    CHECK(conv[k].first == g.quotient(k) * conv[k - 1].first + conv[k - 2].first);
    CHECK(conv[k].second == g.quotient(k) * conv[k - 1].second + conv[k - 2].second);
  }
  // Fibonacci denominators.
  std::uint64_t f0 = 1, f1 = 1;
  for (std::size_t k = 1; k < 20; ++k) {
    CHECK(conv[k].second == f1);
    const auto t = f0 + f1;
    f0 = f1;
    f1 = t;
  }
  // |alpha - p_k / q_k| < 1 / (q_k q_{k+1}), checked in extended precision for moderate k.
  for (std::size_t k = 0; k + 1 < 20; ++k) {
    const long double p = static_cast<long double>(conv[k].first);
    const long double q = static_cast<long double>(conv[k].second);
    const long double q1 = static_cast<long double>(conv[k + 1].second);
    CHECK(std::fabs(kGolden - p / q) < 1.0L / (q * q1));
  }
  const auto s = ContinuedFraction::silver();
  CHECK(static_cast<double>(s.value()) == doctest::Approx(static_cast<double>(kSilver)));
  CHECK(s.quotient(5) == 2u);
}

TEST_CASE("continued fraction text round trip") {
  for (const auto& text : {"0;1,2|1", "0;|1", "3;7,15,1,292"}) {
    const auto cf = ContinuedFraction::parse(text);
    CHECK(ContinuedFraction::parse(cf.to_string()).to_string() == cf.to_string());
  }
  CHECK(ContinuedFraction::parse("3;7,15,1,292").is_finite());
  CHECK(static_cast<double>(ContinuedFraction::expand(0.75L).value()) == doctest::Approx(0.75));
  CHECK(ContinuedFraction::expand(0.75L).is_finite());
  CHECK_THROWS(ContinuedFraction::parse("x;1"));
}

TEST_CASE("badly approximable constants against the brute-force oracle") {
  const long double half[] = {0.5L};
  CHECK(badly_approximable_constant(half, 10) == 0.0);
  const long double g[] = {kGolden};
  const double cg = badly_approximable_constant(g, 100'000);
  CHECK(cg == doctest::Approx(static_cast<double>(brute_constant(kGolden, 100'000))).epsilon(1e-9));
  // The minimum over all s is attained at s = 1.
  CHECK(cg == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-12));
  const long double s[] = {kSilver};
  const double cs = badly_approximable_constant(s, 100'000);
  CHECK(cs == doctest::Approx(static_cast<double>(brute_constant(kSilver, 100'000))).epsilon(1e-9));
  CHECK(cs == doctest::Approx(2.0 * (3.0 - 2.0 * std::sqrt(2.0))).epsilon(1e-12));

  // Convergent arithmetic: the minimum is attained at a convergent
  // denominator, and q ||q alpha|| tends to 1 / sqrt 5 along them.
  double conv_min = 1e9, last = 0.0;
  for (const auto q : convergent_denominators(ContinuedFraction::golden(), 100'000)) {
    last = static_cast<double>(q * circle_distance(q * kGolden));
    conv_min = std::min(conv_min, last);
  }
  CHECK(cg == doctest::Approx(conv_min).epsilon(1e-9));
  CHECK(last == doctest::Approx(1.0 / std::sqrt(5.0)).epsilon(1e-6));
}

TEST_CASE("generated badly approximable numbers") {
  const auto one = generate_bad_alpha(1, 42);
  for (std::size_t k = 1; k < 60; ++k) CHECK(one.quotient(k) == 1u);
  const long double a1[] = {one.value()};
  CHECK(badly_approximable_constant(a1, 100'000) ==
        doctest::Approx(static_cast<double>(brute_constant(a1[0], 100'000))).epsilon(1e-9));
  CHECK(badly_approximable_constant(a1, 100'000) > 0.3);

  const auto two = generate_bad_alpha(2, 7);
  CHECK(two.to_string() == generate_bad_alpha(2, 7).to_string());
  CHECK(two.max_quotient(60) <= 2u);
  const long double a2[] = {two.value()};
  CHECK(badly_approximable_constant(a2, 100'000) >= 0.2);
}

TEST_CASE("recurrence and simultaneous approximation agree") {
  TorusRotation golden(kGolden);
  const auto x = golden.start(0.37L);
  for (const auto q : convergent_denominators(ContinuedFraction::golden(), 10'000)) {
    if (q < 2) continue;
    const double gap = static_cast<double>(circle_distance(q * kGolden));
    const auto above = verify_classical_da_equivalence(golden, x, q, gap * 1.001);
    CHECK(above.lhs);
    CHECK(above.rhs);
    const auto below = verify_classical_da_equivalence(golden, x, q, gap * 0.999);
    CHECK_FALSE(below.lhs);
    CHECK_FALSE(below.rhs);
  }
  TorusRotation half(0.5L);
  const auto r = verify_classical_da_equivalence(half, half.start(0.0L), 1, 0.6);
  CHECK(r.lhs);
  CHECK(r.rhs);
  REQUIRE(r.p.size() == 1);
  CHECK((r.p[0] == 0 || r.p[0] == 1));

  std::mt19937_64 rng(3);
  std::uniform_real_distribution<long double> u(0.0L, 1.0L);
  TorusRotation plane(2, {0.3141592653589793L, 0.2718281828459045L});
  for (int k = 0; k < 2000; ++k) {
    const long double b[] = {u(rng), u(rng)};
    const auto s = 1 + rng() % 500;
    const double eps = 0.02 + 0.1 * static_cast<double>(u(rng));
    const auto c = verify_classical_da_equivalence(plane, plane.start(b), s, eps);
    CHECK(c.lhs == c.rhs);
  }
}

TEST_CASE("closing witnesses") {
  TorusRotation near_half(0.5L + 1e-6L);
  const auto w = torus_closing_witness(near_half, near_half.start(0.2L), 2, 1e-5);
  CHECK(w.p == std::vector<long long>{1});
  CHECK(w.point.period == 2);
  CHECK(w.holds());

  TorusRotation third(1.0L / 3.0L);
  const auto exact = torus_closing_witness(third, third.start(0.0L), 3, 1e-3);
  CHECK(exact.distance_now < 1e-15);
  CHECK(exact.distance_after < 1e-15);

  TorusRotation golden(kGolden);
  const double gap = static_cast<double>(circle_distance(13.0L * kGolden));
  const auto g = torus_closing_witness(golden, golden.start(0.4L), 13, 2.0 * gap);
  CHECK(g.holds());
  CHECK(g.p == std::vector<long long>{8});

  CHECK_THROWS_AS(torus_closing_witness(golden, golden.start(0.4L), 13, 0.5 * gap), PreconditionFailed);
}

TEST_CASE("closing certificates hold on random recurrences") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<long double> u(0.0L, 1.0L);
  std::size_t trials = 0;
  for (int n = 1; n <= 2; ++n) {
    for (int k = 0; k < 5000; ++k) {
      std::vector<long double> alpha(n), base(n);
      for (auto& a : alpha) a = u(rng);
      for (auto& b : base) b = u(rng);
      TorusRotation sys(n, alpha);
      const auto x = sys.start(base);
      const std::uint64_t s = 1 + rng() % 200;
      auto y = x;
      for (std::uint64_t i = 0; i < s; ++i) y = sys.step(y);
      const double d = sys.distance(x, y);
      if (d >= 0.5) continue;
      const double eps = std::min(0.5, d * (1.0 + static_cast<double>(u(rng))));
      if (!(d < eps)) continue;
      ++trials;
      CHECK(torus_closing_witness(sys, x, s, eps).holds());
    }
  }
  CHECK(trials > 5000);
}

TEST_CASE("badly approximable rotations are aperiodic on the window") {
  TorusRotation golden(kGolden);
  const long double g[] = {kGolden};
  const double c = badly_approximable_constant(g, 100'000);
  std::vector<double> grid;
  for (double e = 0.25; e >= 2e-4; e /= 2.0) grid.push_back(e);
  const auto f = QuantileTable::power_law(c * 0.999, 1.0, grid);
  CHECK(is_F_aperiodic(golden, golden.start(0.0L), f, 0, Window{5000, 100'000}).holds());
  const auto too_big = QuantileTable::power_law(c * 1.2, 1.0, grid);
  CHECK(is_F_aperiodic(golden, golden.start(0.0L), too_big, 0, Window{5000, 100'000}).violated());
}

TEST_CASE("profiles do not depend on the base point") {
  TorusRotation plane(2, {0.6180339887498949L, 0.4142135623730950L});
  const auto grid = geometric_grid(0.25, 0.5, 7);
  const long double zero[] = {0.0L, 0.0L}, other[] = {0.31L, 0.77L};
  const auto a = shift_profile(plane, plane.start(zero), grid, 0, 200, 20'000);
  const auto b = shift_profile(plane, plane.start(other), grid, 0, 200, 20'000);
  CHECK(a.values == b.values);
}

TEST_CASE("registries offer the right periodic points") {
  TorusRotation golden(kGolden);
  const auto reg = rational_registry(golden, 10);
  std::size_t count = 0;
  for (std::uint64_t q = 1; q <= 10; ++q)
    for (std::uint64_t p = 0; p <= q; ++p) count += std::gcd(p, q) == 1;
  CHECK(reg.size() == count);
  for (const auto& pt : reg) CHECK(pt.residual < 1e-10);

  const TorusRegistry tr(golden);
  const auto cands = tr.candidates(golden.start(0.2L), 13);
  CHECK(cands.size() == 3);
  for (const auto& c : cands) CHECK(c.period == 13);
}
