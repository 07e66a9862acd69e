#pragma once

// Linear flow on the flat torus, sampled at integer times, together with
// continued-fraction arithmetic for the rotation vector.

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <span>
#include <utility>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "aperiodic/periodic.hpp"

namespace aperiodic::torus {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::size_t kMaxDim = 4;

/// [a0; a1, a2, ...] with a finite prefix a1..ak and an optional periodic
/// tail repeated forever after it.
class ContinuedFraction {
 public:
  ContinuedFraction(std::int64_t a0, std::vector<std::uint32_t> prefix,
                    std::vector<std::uint32_t> tail = {});

  static ContinuedFraction golden();  // (sqrt 5 - 1) / 2
  static ContinuedFraction silver();  // sqrt 2 - 1
  /// Finite expansion of a real number, stopping at max_terms or when the
  /// remainder vanishes.
  static ContinuedFraction expand(long double x, std::size_t max_terms = 40);

  std::int64_t a0() const noexcept { return a0_; }
  const std::vector<std::uint32_t>& prefix() const noexcept { return prefix_; }
  const std::vector<std::uint32_t>& tail() const noexcept { return tail_; }
  bool is_finite() const noexcept { return tail_.empty(); }

  /// a_k for k >= 1; 0 past the end of a finite expansion.
  std::uint32_t quotient(std::size_t k) const;
  std::size_t max_quotient(std::size_t depth) const;

  /// (p_k, q_k) for k = 0..count-1 (fewer for a finite expansion).
  std::vector<std::pair<BigInt, BigInt>> convergents(std::size_t count) const;

  /// Value from a deep convergent.
  long double value() const;

  /// "prefix|tail" style text, e.g. "0;1,2|1".
  std::string to_string() const;
  static ContinuedFraction parse(const std::string& text);

 private:
  std::int64_t a0_;
  std::vector<std::uint32_t> prefix_;
  std::vector<std::uint32_t> tail_;
};

/// Convergent denominators q_k of a continued fraction, for q_k <= limit.
std::vector<std::uint64_t> convergent_denominators(const ContinuedFraction& cf, std::uint64_t limit);

/// Pseudorandom partial quotients in [1, K]: a random prefix then an
/// all-ones tail.
ContinuedFraction generate_bad_alpha(std::uint32_t bound, std::uint64_t seed, std::size_t length = 48);

using Vec = std::array<long double, kMaxDim>;

/// Point (x + t alpha mod Z^n, alpha). Position is recomputed from the
/// origin and the elapsed time so rounding does not accumulate along orbits.
struct TorusState {
  Vec origin{};
  Vec dir{};
  std::uint64_t time = 0;

  Vec position(std::size_t n) const;
};

/// |t - round(t)|
long double circle_distance(long double t);

/// Euclidean distance on R^n / Z^n.
double torus_distance(std::span<const double> x, std::span<const double> y);

/// Time-one map of the linear flow on T^n x R^n with the product of the
/// quotient Euclidean metric and the Euclidean metric on directions.
class TorusRotation {
 public:
  using State = TorusState;

  TorusRotation(std::size_t dimension, std::vector<long double> alpha);
  explicit TorusRotation(long double alpha) : TorusRotation(1, {alpha}) {}

  std::size_t dimension() const noexcept { return n_; }
  const Vec& alpha() const noexcept { return alpha_; }

  State start(std::span<const long double> base) const;
  State start(long double base) const { return start(std::span<const long double>(&base, 1)); }
  State with_direction(std::span<const long double> base, std::span<const long double> dir) const;

  double distance(const State& a, const State& b) const;
  State step(const State& x) const;
  /// Directions are assumed to lie in [0, 1]^n.
  double diameter_bound() const;

  /// States with this rotation vector and bases on a uniform grid (n = 1) or
  /// a seeded uniform sample (n >= 2).
  std::vector<State> uniform_candidates(std::size_t count, std::uint64_t seed = 0) const;

 private:
  std::size_t n_;
  Vec alpha_{};
};

/// min over 1 <= s <= s_max of s^{1/n} * dist(s alpha, Z^n).
double badly_approximable_constant(std::span<const long double> alpha, std::uint64_t s_max);

struct DaCheck {
  bool lhs = false;  // d((x, alpha), phi^s(x, alpha)) < eps
  bool rhs = false;  // some p with |s alpha - p| < eps
  std::vector<long long> p;
  double lattice_distance = 0.0;
};

/// Both sides of the recurrence / simultaneous approximation equivalence.
DaCheck verify_classical_da_equivalence(const TorusRotation& sys, const TorusState& x,
                                        std::uint64_t s, double epsilon);

struct ClosingWitness {
  PeriodicPoint<TorusRotation> point;
  std::vector<long long> p;
  double distance_now = 0.0;    // d((x, alpha), (x, p/s))
  double distance_after = 0.0;  // d(phi^s(x, alpha), (x, p/s))
  double bound_now = 0.0;       // eps / s
  double bound_after = 0.0;     // (1 + 1/s) eps
  bool holds() const noexcept { return distance_now < bound_now && distance_after < bound_after; }
};

/// Periodic point (x, p/s) with p = round(s alpha) shadowing an
/// eps-recurrence at shift s. Throws PreconditionFailed without recurrence.
ClosingWitness torus_closing_witness(const TorusRotation& sys, const TorusState& x, std::uint64_t s,
                                     double epsilon);

/// Critical radius in direction space around p/q for F(eps) = c eps^-n.
double direction_critical_radius(double c, std::size_t n, std::uint64_t q);

/// Periodic points (x, p/s) for lattice vectors p next to s alpha.
class TorusRegistry {
 public:
  explicit TorusRegistry(const TorusRotation& sys) : sys_(&sys) {}
  std::vector<PeriodicPoint<TorusRotation>> candidates(const TorusState& x, std::size_t period) const;

 private:
  const TorusRotation* sys_;
};

/// Anchors (0, p/q) for 1 <= q <= max_q, 0 <= p <= q, gcd(p, q) = 1 (n = 1).
std::vector<PeriodicPoint<TorusRotation>> rational_registry(const TorusRotation& sys, std::uint64_t max_q);

}  // namespace aperiodic::torus
