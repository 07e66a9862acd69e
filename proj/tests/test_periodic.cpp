#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "aperiodic/bernoulli.hpp"
#include "aperiodic/periodic.hpp"
#include "aperiodic/torus.hpp"

using namespace aperiodic;
using aperiodic::bernoulli::BernoulliShift;
using aperiodic::bernoulli::SymbolWord;
using aperiodic::torus::TorusRotation;

namespace {

const long double kGolden = (std::sqrt(5.0L) - 1.0L) / 2.0L;

QuantileTable reciprocal_floor(int rows) {
  std::vector<QuantileTable::Row> r;
  for (int k = 1; k <= rows; ++k) r.push_back({1.0 / k, static_cast<double>(k)});
  return QuantileTable::step(r);
}

TorusRotation::State anchor(const TorusRotation& sys, long double base, long double dir) {
  return sys.with_direction(std::span<const long double>(&base, 1), std::span<const long double>(&dir, 1));
}

// Word with prefix `agree` taken from a periodic block and a flipped symbol after it.
SymbolWord diverging(const std::vector<bernoulli::Symbol>& block, std::size_t agree, std::size_t extra_seed) {
  std::vector<bernoulli::Symbol> prefix;
  for (std::size_t i = 0; i < agree; ++i) prefix.push_back(block[i % block.size()]);
  const auto next = block[agree % block.size()];
  prefix.push_back(next == 1 ? 2 : 1);
  return SymbolWord::eventually_periodic(2, prefix, {static_cast<bernoulli::Symbol>(1 + extra_seed % 2)});
}

}  // namespace

TEST_CASE("periodic certification") {
  TorusRotation quarter(0.25L);
  const auto p4 = certify_periodic(quarter, quarter.start(0.1L), 4);
  CHECK(p4.residual < 1e-12);
  CHECK(p4.primitive);
  CHECK_FALSE(certify_periodic(quarter, quarter.start(0.1L), 8).primitive);
  CHECK_THROWS_AS(certify_periodic(quarter, quarter.start(0.1L), 3), PreconditionFailed);
  CHECK_THROWS_AS(certify_periodic(quarter, quarter.start(0.1L), 0), PreconditionFailed);

  BernoulliShift sys(2);
  const auto w = SymbolWord::periodic(2, {1, 2});
  CHECK(certify_periodic(sys, w, 2, 0.0).residual == 0.0);
  CHECK(certify_periodic(sys, w, 2, 0.0).primitive);
  CHECK_FALSE(certify_periodic(sys, w, 4, 0.0).primitive);
}

TEST_CASE("critical radii") {
  // floor(1/eps) exceeds 2 exactly for eps <= 1/3.
  CHECK(critical_radius(reciprocal_floor(20), 2) == doctest::Approx(1.0 / 6.0));
  const auto grid = geometric_grid(1.0, 0.5, 30);
  for (double c : {0.2, 1.0}) {
    for (double n : {1.0, 2.0}) {
      const auto f = QuantileTable::power_law(c, n, grid);
      for (double p : {3.0, 17.0}) CHECK(critical_radius(f, p) == doctest::Approx(std::pow(c / p, 1.0 / n) / 2.0));
    }
  }
  CHECK_THROWS_AS(critical_radius(reciprocal_floor(5), 9), OutOfRange);
}

TEST_CASE("torus direction radius is a different scale from the quantile radius") {
  // In direction space the torus neighborhood of p/q has radius c^{1/n} / q^{1 + 1/n}.
  for (std::uint64_t q : {2u, 5u, 13u}) {
    const double r = torus::direction_critical_radius(0.4, 1, q);
    CHECK(r == doctest::Approx(0.4 / (static_cast<double>(q) * q)));
    const double r2 = torus::direction_critical_radius(0.4, 2, q);
    CHECK(r2 == doctest::Approx(std::sqrt(0.4) / std::pow(static_cast<double>(q), 1.5)));
  }
}

TEST_CASE("critical neighborhood membership") {
  TorusRotation golden(kGolden);
  const auto xp = certify_periodic(golden, anchor(golden, 0.2L, 0.6L), 5);
  CHECK(in_critical_neighborhood(golden, xp.state, xp, 1e-9));
  CHECK_FALSE(in_critical_neighborhood(golden, golden.start(0.2L), xp, 0.01));

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<long double> u(-0.05L, 0.05L);
  std::size_t inside = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto y = anchor(golden, 0.2L + u(rng), 0.6L + u(rng) / 5.0L);
    const double rho = 0.04;
    if (!in_critical_neighborhood(golden, y, xp, rho)) continue;
    ++inside;
    auto z = y;
    for (std::size_t i = 0; i < xp.period; ++i) z = golden.step(z);
    CHECK(golden.distance(y, z) < 2.0 * rho);
  }
  CHECK(inside > 100);

  BernoulliShift sys(2);
  const auto wp = certify_periodic(sys, SymbolWord::periodic(2, {1, 1, 2}), 3, 0.0);
  inside = 0;
  for (std::uint64_t k = 0; k < 1000; ++k) {
    const auto y = diverging({1, 1, 2}, 3 + k % 8, k);
    const double rho = std::exp(-3.5);
    if (!in_critical_neighborhood(sys, y, wp, rho)) continue;
    ++inside;
    CHECK(sys.closer_than(y, y.shifted(3), 2.0 * rho));
  }
  CHECK(inside > 100);
}

TEST_CASE("approximation constants") {
  TorusRotation golden(kGolden);
  const auto self = certify_periodic(golden, anchor(golden, 0.0L, 0.5L), 2);
  const auto r = approximation_constant(golden, self.state, self, 10);
  CHECK(r.constant == 0.0);
  CHECK(r.attained_at == 0);
  CHECK_THROWS_AS(approximation_constant(golden, self.state, self, 0), PreconditionFailed);

  const auto cf = torus::ContinuedFraction::golden();
  const auto x = golden.start(0.0L);
  for (const auto q : torus::convergent_denominators(cf, 100)) {
    const auto p = static_cast<long double>(std::llround(static_cast<long double>(q) * kGolden));
    const auto xp = certify_periodic(golden, anchor(golden, 0.0L, p / q), q);
    const auto rec = approximation_constant(golden, x, xp, 10'000);
    CHECK(rec.constant > 0.0);
    CHECK(rec.constant >= static_cast<double>(std::fabs(kGolden - p / q)) - 1e-15);
  }
}

TEST_CASE("approximation constant equals the brute-force minimum and decreases in the horizon") {
  TorusRotation golden(kGolden);
  const auto xp = certify_periodic(golden, anchor(golden, 0.3L, 0.625L), 8);
  const auto x = golden.start(0.1L);
  double prev = 1e9;
  for (std::size_t n : {5u, 50u, 500u}) {
    const auto rec = approximation_constant(golden, x, xp, n);
    double oracle = 1e9;
    std::vector<TorusRotation::State> orbit{x};
    for (std::size_t k = 0; k < n + xp.period; ++k) orbit.push_back(golden.step(orbit.back()));
    for (std::size_t k = 0; k <= n; ++k)
      oracle = std::min(oracle, std::max(golden.distance(orbit[k], xp.state),
                                         golden.distance(orbit[k + xp.period], xp.state)));
    CHECK(rec.constant == oracle);
    CHECK(rec.constant <= prev);
    prev = rec.constant;
  }
}

TEST_CASE("penetration lengths") {
  TorusRotation rot(0.3L);
  CHECK(penetration_length(rot, rot.start(0.0L), rot.start(0.3L), 0.1, 10) == 0u);
  CHECK_THROWS_AS(penetration_length(rot, rot.start(0.0L), rot.start(0.0L), 0.0, 10), PreconditionFailed);

  BernoulliShift sys(2);
  const auto fixed = SymbolWord::periodic(2, {1});
  CHECK_FALSE(penetration_length(sys, fixed, fixed, 0.1, 50).has_value());

  // d < e^{-1} asks for agreement in the first symbol only.
  const double eps = std::exp(-1.0);
  const std::vector<bernoulli::Symbol> block{1, 2, 2};
  const auto ws = SymbolWord::periodic(2, block);
  for (std::size_t k = 1; k <= 10; ++k) {
    const auto w = diverging(block, k, 0);
    std::size_t oracle = 0;
    while (oracle < 30 && w.at(oracle + 1) == ws.at(oracle + 1)) ++oracle;
    CHECK(oracle == k);
    CHECK(penetration_length(sys, ws, w, eps, 30) == oracle);
  }
  CHECK(penetration_length(sys, ws, diverging(block, 0, 0), eps, 30) == 0u);
}

TEST_CASE("torus closing checker on convergent recurrences") {
  TorusRotation golden(kGolden);
  const torus::TorusRegistry registry(golden);
  std::vector<RecurrenceEvent<TorusRotation>> events;
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<long double> u(0.0L, 1.0L);
  for (const auto q : torus::convergent_denominators(torus::ContinuedFraction::golden(), 100'000)) {
    const double gap = static_cast<double>(torus::circle_distance(static_cast<long double>(q) * kGolden));
    if (gap >= 0.25) continue;
    for (int k = 0; k < 5; ++k) events.push_back({golden.start(u(rng)), q, 0, 2.0 * gap});
  }
  const auto report = check_delta_closing(golden, [](double e) { return 2.0 * e; }, registry,
                                          std::span<const RecurrenceEvent<TorusRotation>>(events));
  CHECK(report.clean());
  CHECK(report.checked == events.size());

  const ListRegistry<TorusRotation> empty;
  const auto none = check_delta_closing(golden, [](double e) { return 2.0 * e; }, empty,
                                        std::span<const RecurrenceEvent<TorusRotation>>(events.data(), 1));
  CHECK(none.counterexamples.size() == 1);
  CHECK(none.semantics.find("budget") != std::string::npos);

  std::vector<RecurrenceEvent<TorusRotation>> bad{{golden.start(0.0L), 2, 0, 1e-6}};
  CHECK_THROWS_AS(check_delta_closing(golden, [](double e) { return e; }, registry,
                                      std::span<const RecurrenceEvent<TorusRotation>>(bad)),
                  MalformedEvent);
}

TEST_CASE("strong closing on the full shift") {
  BernoulliShift sys(2);
  const bernoulli::BernoulliRegistry registry(sys);
  std::vector<RecurrenceEvent<BernoulliShift>> events;
  std::mt19937_64 rng(4);
  for (std::size_t s = 1; s <= 6; ++s) {
    for (std::size_t l = 0; l <= 5; ++l) {
      for (std::size_t j = 1; j <= 3; ++j) {
        // x(m) = x(m + s) for m = 1..l + j, then anything.
        std::vector<bernoulli::Symbol> block;
        for (std::size_t i = 0; i < s; ++i) block.push_back(1 + rng() % 2);
        std::vector<bernoulli::Symbol> prefix;
        for (std::size_t m = 0; m < s + l + j; ++m) prefix.push_back(block[m % s]);
        for (int t = 0; t < 6; ++t) prefix.push_back(1 + rng() % 2);
        events.push_back({SymbolWord::eventually_periodic(2, prefix, {1, 2}), s, l, std::exp(-double(j))});
      }
    }
  }
  const auto ev = std::span<const RecurrenceEvent<BernoulliShift>>(events);
  const auto report = check_strong_delta_closing(sys, [](double, std::size_t l) { return l; }, registry, ev);
  CHECK(report.clean());
  CHECK(report.checked == events.size());

  // A registry that only knows other periods has nothing to offer.
  const ListRegistry<BernoulliShift> wrong(bernoulli::all_periodic_words(sys, 0));
  const auto missing = check_strong_delta_closing(sys, [](double, std::size_t l) { return l; }, wrong, ev);
  CHECK(missing.counterexamples.size() == events.size());
}

TEST_CASE("hurwitz estimates") {
  TorusRotation golden(kGolden);
  const auto xp = certify_periodic(golden, anchor(golden, 0.0L, 0.0L), 1);
  const std::vector<TorusRotation::State> self{xp.state};
  CHECK(hurwitz_estimate(golden, xp, std::span(self), 100) == 0.0);
  const std::vector<TorusRotation::State> sample{golden.start(0.0L), golden.start(0.5L)};
  const double h = hurwitz_estimate(golden, xp, std::span(sample), 100'000);
  CHECK(h >= 0.44);
  CHECK(h <= golden.diameter_bound());
  CHECK_THROWS_AS(hurwitz_estimate(golden, xp, std::span<const TorusRotation::State>{}, 10), PreconditionFailed);
}

TEST_CASE("aperiodic orbits avoid every critical neighborhood") {
  TorusRotation golden(kGolden);
  std::vector<double> grid;
  for (double e = 0.25; e >= 1e-3; e /= 2.0) grid.push_back(e);
  const auto f = QuantileTable::power_law(0.1, 1.0, grid);
  const auto x = golden.start(0.0L);
  REQUIRE(is_F_aperiodic(golden, x, f, 0, Window{2000, 100'000}).holds());
  std::vector<PeriodicPoint<TorusRotation>> anchors;
  // Base points on the orbit, directions p/q: the anchors the orbit comes closest to.
  for (std::uint64_t q = 1; q <= 12; ++q)
    for (std::uint64_t p = 0; p <= q; ++p)
      if (std::gcd(p, q) == 1)
        anchors.push_back(certify_periodic(golden, anchor(golden, 0.0L, static_cast<long double>(p) / q), q));
  for (const auto& c : classify_bounded(golden, x, f, std::span<const PeriodicPoint<TorusRotation>>(anchors), 2000)) {
    CHECK(c.member);
    CHECK(c.consistent);
  }
  const auto own = classify_bounded(golden, anchors[3].state, f,
                                    std::span<const PeriodicPoint<TorusRotation>>(anchors.data() + 3, 1), 10);
  CHECK_FALSE(own.front().member);
  CHECK(own.front().entry_time == 0u);
  CHECK(own.front().consistent);
}

TEST_CASE("points of a critical neighborhood return before the period") {
  BernoulliShift sys(2);
  std::vector<QuantileTable::Row> rows;
  for (int k = 1; k <= 12; ++k) rows.push_back({std::exp(-double(k)), static_cast<double>(k + 1)});
  const auto f = QuantileTable::step(rows);
  std::mt19937_64 rng(8);
  for (std::size_t p = 2; p <= 10; ++p) {
    std::vector<bernoulli::Symbol> block;
    for (std::size_t i = 0; i < p; ++i) block.push_back(1 + rng() % 2);
    const auto xp = PeriodicPoint<BernoulliShift>{SymbolWord::periodic(2, block), p, 0.0, true};
    const double rho = critical_radius(f, static_cast<double>(p));
    const double q = quantile_left(f, static_cast<double>(p));
    for (std::size_t agree = 0; agree < 30; ++agree) {
      const auto y = diverging(block, agree, agree);
      if (!in_critical_neighborhood(sys, y, xp, rho)) continue;
      const auto r = return_time(sys, y, q, 0, p);
      REQUIRE(r.has_value());
      CHECK(*r <= p);
    }
  }
}
