#include "aperiodic/geodesic_flow.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace aperiodic::hyperbolic {

std::vector<Isometry> bounded_schottky_generators(double length) {
  return {hyperbolic_with_axis(GeodesicLine::from_endpoints(-2.0, -1.0), length),
          hyperbolic_with_axis(GeodesicLine::from_endpoints(1.0, 2.0), length)};
}

SchottkyGeodesicFlow::SchottkyGeodesicFlow(std::vector<Isometry> generators, std::size_t ball_radius,
                                           std::size_t lookahead)
    : generators_(std::move(generators)), lookahead_(lookahead) {
  if (generators_.size() < 2) throw PreconditionFailed("the flow needs at least two generators");
  if (lookahead_ < 4) throw PreconditionFailed("lookahead must be >= 4");
  letters_ = generators_;
  for (const auto& g : generators_) letters_.push_back(g.inverse());
  ball_ = word_ball(generators_, ball_radius);

  // Footpoints stay within |tau| <= |sigma| / 2 + 1 of the foot of i.
  const HPoint o(0.0, 1.0);
  double reach = 0.0, sigma_sum = 0.0;
  std::size_t sigma_count = 0;
  for (std::uint64_t seed = 0; seed < 64; ++seed) {
    const auto coding = random_coding(64, 0x5eed0000 + seed);
    for (std::size_t k = 1; k < coding->charts.size(); ++k) {
      const auto& ch = coding->charts[k];
      const double half = std::max(std::abs(ch.sigma), std::abs(coding->charts[k - 1].sigma)) / 2.0;
      reach = std::max(reach, dist_to_geodesic(o, ch.line) + half + 1.0);
      sigma_sum += std::abs(ch.sigma);
      ++sigma_count;
    }
  }
  diameter_ = 2.5 * reach;
  mean_sigma_ = sigma_sum / static_cast<double>(sigma_count);
}

std::shared_ptr<const SchottkyGeodesicFlow::Coding> SchottkyGeodesicFlow::random_coding(
    std::size_t letters, std::uint64_t seed) const {
  const std::size_t m = generators_.size();
  const std::size_t total = letters + 2 * lookahead_ + 2;
  auto coding = std::make_shared<Coding>();
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> any(0, 2 * m - 1), rest(0, 2 * m - 2);
  coding->letters.push_back(static_cast<std::uint8_t>(any(rng)));
  while (coding->letters.size() < total) {
    const std::size_t forbidden = (coding->letters.back() + m) % (2 * m);
    std::size_t k = rest(rng);
    if (k >= forbidden) ++k;
    coding->letters.push_back(static_cast<std::uint8_t>(k));
  }

  const auto& w = coding->letters;
  coding->first = lookahead_;
  const std::size_t last = w.size() - lookahead_ - 1;  // exclusive bound for charts
  std::vector<GeodesicLine> lines;
  for (std::size_t j = coding->first; j <= last; ++j) {
    Complex plus(0.0, 1.0), minus(0.0, 1.0);
    for (std::size_t k = j + lookahead_; k > j; --k) plus = letters_[w[k]].apply(plus);
    for (std::size_t k = j + 1 - lookahead_; k <= j; ++k) minus = letters_[(w[k] + m) % (2 * m)].apply(minus);
    lines.push_back(GeodesicLine::from_endpoints(minus.real(), plus.real()));
  }
  for (std::size_t k = 0; k + 1 < lines.size(); ++k) {
    const std::size_t j = coding->first + k;
    const HPoint moved = letters_[(w[j + 1] + m) % (2 * m)].apply(lines[k].at(0.0));
    coding->charts.push_back({lines[k], lines[k + 1].foot_parameter(moved)});
  }
  return coding;
}

SchottkyGeodesicFlow::State SchottkyGeodesicFlow::place(std::shared_ptr<const Coding> coding,
                                                        std::size_t chart, double tau) const {
  const auto& line = coding->charts[chart].line;
  const Complex f0 = line.at(tau).z();
  const Complex f1 = line.at(tau + 1.0).z();
  return State{std::move(coding), chart, tau, f0, f1};
}

SchottkyGeodesicFlow::State SchottkyGeodesicFlow::normalise(std::shared_ptr<const Coding> coding,
                                                            std::size_t chart, double tau) const {
  const auto& charts = coding->charts;
  for (;;) {
    if (chart + 1 < charts.size() && std::abs(tau + charts[chart].sigma) < std::abs(tau)) {
      tau += charts[chart].sigma;
      ++chart;
    } else if (chart > 0 && std::abs(tau - charts[chart - 1].sigma) < std::abs(tau)) {
      --chart;
      tau -= charts[chart].sigma;
    } else {
      break;
    }
  }
  if (chart + 1 >= charts.size()) throw DomainError("orbit ran past the end of its coding");
  return place(std::move(coding), chart, tau);
}

SchottkyGeodesicFlow::State SchottkyGeodesicFlow::start(std::shared_ptr<const Coding> coding,
                                                        double tau) const {
  if (!coding || coding->charts.size() < 2) throw PreconditionFailed("coding is too short");
  return normalise(std::move(coding), 0, tau);
}

SchottkyGeodesicFlow::State SchottkyGeodesicFlow::orbit_start(std::size_t steps, std::uint64_t seed) const {
  // Each chart advances the footpoint by |sigma| on average; double it.
  const auto letters = static_cast<std::size_t>(2.0 * static_cast<double>(steps + 2) / mean_sigma_) + 8;
  return start(random_coding(letters, seed));
}

std::vector<SchottkyGeodesicFlow::State> SchottkyGeodesicFlow::sample_states(std::size_t count,
                                                                             std::size_t steps,
                                                                             std::uint64_t seed) const {
  std::mt19937_64 rng(seed);
  std::vector<State> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const auto letters = static_cast<std::size_t>(2.0 * static_cast<double>(steps + 2) / mean_sigma_) + 8;
    auto coding = random_coding(letters, rng());
    const double span = std::abs(coding->charts[0].sigma);
    std::uniform_real_distribution<double> tau(0.0, span);
    out.push_back(start(std::move(coding), tau(rng)));
  }
  return out;
}

double SchottkyGeodesicFlow::distance(const State& a, const State& b) const {
  const HPoint p0(a.foot0), p1(a.foot1), q0(b.foot0), q1(b.foot1);
  double best = kInfinity;
  for (const auto& h : ball_) {
    const double d0 = hyp_distance(p0, h.apply(q0));
    if (d0 >= best) continue;
    best = std::min(best, std::max(d0, hyp_distance(p1, h.apply(q1))));
  }
  return best;
}

bool SchottkyGeodesicFlow::closer_than(const State& a, const State& b, double epsilon) const {
  const HPoint p0(a.foot0), p1(a.foot1), q0(b.foot0), q1(b.foot1);
  for (const auto& h : ball_) {
    if (hyp_distance(p0, h.apply(q0)) >= epsilon) continue;
    if (hyp_distance(p1, h.apply(q1)) < epsilon) return true;
  }
  return false;
}

SchottkyGeodesicFlow::State SchottkyGeodesicFlow::step(const State& x) const {
  return normalise(x.coding, x.chart, x.tau + 1.0);
}

double SchottkyGeodesicFlow::systole() const {
  double best = kInfinity;
  for (const auto& h : ball_)
    if (h.is_hyperbolic()) best = std::min(best, translation_length(h));
  return best;
}

}  // namespace aperiodic::hyperbolic
