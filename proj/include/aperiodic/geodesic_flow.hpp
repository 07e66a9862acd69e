#pragma once

// Time-one map of the geodesic flow on the recurrent part of a Schottky
// quotient, the compact invariant set of geodesics whose lifts join two
// limit points.
//
// A geodesic is coded by a bi-infinite reduced word a_j. Chart j is the lift
// G_j with endpoints lim a_{j+1} a_{j+2} ... i and lim a_j^-1 a_{j-1}^-1 ... i,
// both recomputed from a fixed number of letters, so rounding never grows
// along an orbit. Consecutive charts differ by a_{j+1}^-1, and a state always
// sits in the chart whose reference point is nearest.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "aperiodic/hyperbolic.hpp"

namespace aperiodic::hyperbolic {

/// Two generators of length L with axes (-2, -1) and (1, 2). The ping-pong
/// discs are small and bounded, so the limit set is a compact subset of R.
std::vector<Isometry> bounded_schottky_generators(double length = 2.0 * std::asinh(2.0));

class SchottkyGeodesicFlow {
 public:
  struct Chart {
    GeodesicLine line;  // gamma(0) is the foot of i
    double sigma = 0.0;  // a_{j+1}^-1 gamma_j(t) = gamma_{j+1}(t + sigma)
  };

  /// A reduced word with its charts. Chart j is available for
  /// lookahead <= j < letters.size() - lookahead.
  struct Coding {
    std::vector<std::uint8_t> letters;
    std::vector<Chart> charts;  // indexed by j - first
    std::size_t first = 0;
  };

  struct State {
    std::shared_ptr<const Coding> coding;
    std::size_t chart = 0;
    double tau = 0.0;
    // Lifts of the footpoints at times 0 and 1, near i.
    Complex foot0;
    Complex foot1;
  };

  explicit SchottkyGeodesicFlow(std::vector<Isometry> generators, std::size_t ball_radius = 2,
                                std::size_t lookahead = 24);

  const std::vector<Isometry>& generators() const noexcept { return generators_; }

  /// Seeded random reduced word with room for about `letters` charts.
  std::shared_ptr<const Coding> random_coding(std::size_t letters, std::uint64_t seed) const;

  /// State at parameter tau in the first usable chart of a coding.
  State start(std::shared_ptr<const Coding> coding, double tau = 0.0) const;

  /// Orbit starting point whose coding covers at least `steps` iterates.
  State orbit_start(std::size_t steps, std::uint64_t seed) const;

  /// Independent states, each with room for `steps` iterates.
  std::vector<State> sample_states(std::size_t count, std::size_t steps, std::uint64_t seed) const;

  /// min over the word ball of max(d(p0, h q0), d(p1, h q1)) on footpoint
  /// lifts at times 0 and 1.
  double distance(const State& a, const State& b) const;
  bool closer_than(const State& a, const State& b, double epsilon) const;

  /// Throws DomainError when the orbit runs past its coding.
  State step(const State& x) const;

  /// Twice the largest footpoint distance from i over the charts sampled at
  /// construction, with a 25% margin.
  double diameter_bound() const noexcept { return diameter_; }

  /// Smallest translation length among the ball elements: the shortest
  /// closed geodesic the ball sees.
  double systole() const;

 private:
  State place(std::shared_ptr<const Coding> coding, std::size_t chart, double tau) const;
  State normalise(std::shared_ptr<const Coding> coding, std::size_t chart, double tau) const;

  std::vector<Isometry> generators_;
  std::vector<Isometry> letters_;  // generators then inverses
  std::vector<Isometry> ball_;
  std::size_t lookahead_;
  double diameter_ = 0.0;
  double mean_sigma_ = 1.0;
};

}  // namespace aperiodic::hyperbolic
