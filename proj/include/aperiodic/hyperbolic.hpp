#pragma once

// Geometry of the upper half-plane: points, Moebius isometries, axes and
// unit-speed geodesics, plus randomized checks of the displacement, tube and
// closing estimates for hyperbolic isometries.
//
// Every closed form goes through a frame isometry g with g(0) and g(inf) the
// endpoints of a geodesic, so the line becomes the imaginary axis.

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "aperiodic/errors.hpp"

namespace aperiodic::hyperbolic {

using Complex = std::complex<double>;

/// log(1 + sqrt 2): thinness constant of geodesic triangles in H^2.
inline constexpr double kDeltaZero = 0.88137358701954302523;

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

class HPoint {
 public:
  HPoint(double u, double v);
  explicit HPoint(Complex z) : HPoint(z.real(), z.imag()) {}

  double u() const noexcept { return z_.real(); }
  double v() const noexcept { return z_.imag(); }
  Complex z() const noexcept { return z_; }

 private:
  Complex z_;
};

/// arccosh(1 + |z - w|^2 / (2 Im z Im w)), evaluated as 2 asinh(|z - w| / (2 sqrt(Im z Im w))).
double hyp_distance(const HPoint& z, const HPoint& w);

/// Element of PSL(2, R). The matrix is rescaled to determinant one on
/// construction; a and -a are the same isometry.
class Isometry {
 public:
  Isometry() = default;
  Isometry(double a, double b, double c, double d);

  static Isometry identity() { return {}; }
  /// diag(e^{t/2}, e^{-t/2}): translation by t along the imaginary axis.
  static Isometry dilation(double t);
  /// z -> z + b.
  static Isometry translation(double b) { return {1.0, b, 0.0, 1.0}; }
  /// Rotation by angle theta about i.
  static Isometry rotation(double theta);

  double a() const noexcept { return m_[0]; }
  double b() const noexcept { return m_[1]; }
  double c() const noexcept { return m_[2]; }
  double d() const noexcept { return m_[3]; }
  double trace() const noexcept { return m_[0] + m_[3]; }
  double determinant() const noexcept { return m_[0] * m_[3] - m_[1] * m_[2]; }

  bool is_hyperbolic() const noexcept;

  HPoint apply(const HPoint& z) const;
  /// Action on the closed plane; boundary points are reals or kInfinity.
  double apply_boundary(double x) const;
  /// Raw Moebius action, no half-plane check.
  Complex apply(Complex z) const;

  Isometry inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }
  Isometry operator*(const Isometry& o) const;

  /// Equality in PSL(2, R): entries agree up to a global sign within tol.
  bool same_as(const Isometry& o, double tolerance = 1e-9) const;

 private:
  std::array<double, 4> m_{1.0, 0.0, 0.0, 1.0};
};

/// Unit-speed geodesic gamma(t) = frame(e^t i). Endpoints are frame(0)
/// (t -> -inf) and frame(inf) (t -> +inf).
class GeodesicLine {
 public:
  explicit GeodesicLine(Isometry frame) : frame_(frame) {}

  /// Oriented from start to end, with gamma(0) the point of the line
  /// closest to i.
  static GeodesicLine from_endpoints(double start, double end);
  /// Through z at t = 0 heading towards w.
  static GeodesicLine through(const HPoint& z, const HPoint& w);
  static GeodesicLine imaginary_axis() { return GeodesicLine(Isometry{}); }

  const Isometry& frame() const noexcept { return frame_; }
  HPoint at(double t) const;
  double start() const { return frame_.apply_boundary(0.0); }
  double end() const { return frame_.apply_boundary(kInfinity); }

  /// Same line and orientation with gamma'(t) = gamma(t + t0).
  GeodesicLine shifted(double t0) const;
  GeodesicLine reversed() const;
  GeodesicLine transformed(const Isometry& g) const { return GeodesicLine(g * frame_); }

  /// Parameter of the foot of the perpendicular from z.
  double foot_parameter(const HPoint& z) const;

 private:
  Isometry frame_;
};

/// asinh(|Re w| / Im w) for w the point in the frame of the line.
double dist_to_geodesic(const HPoint& z, const GeodesicLine& line);

/// Distance from z to the segment line([t0, t1]).
double dist_to_segment(const HPoint& z, const GeodesicLine& line, double t0, double t1);

/// Signed distance from a line: positive on the left of the direction of travel.
double signed_dist_to_geodesic(const HPoint& z, const GeodesicLine& line);

/// 2 arccosh(|trace| / 2). Throws NotHyperbolic.
double translation_length(const Isometry& psi);

/// Oriented from the repelling to the attracting fixed point, so psi moves
/// points along it by +translation_length. Throws NotHyperbolic.
GeodesicLine axis(const Isometry& psi);

/// Hyperbolic isometry with the given axis and translation length.
Isometry hyperbolic_with_axis(const GeodesicLine& line, double length);

/// Point at signed distance offset from the line, with foot at gamma(t).
HPoint offset_point(const GeodesicLine& line, double t, double offset);

struct DisplacementReport {
  double translation = 0.0;
  double axis_distance = 0.0;
  double displacement = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double slack_lower = 0.0;  // displacement - lower
  double slack_upper = 0.0;  // upper - displacement
  bool holds() const noexcept { return slack_lower >= 0.0 && slack_upper >= 0.0; }
};

/// max{2 d(z, A), |psi|} - 4 delta0 <= d(z, psi z) <= |psi| + 2 d(z, A).
/// Throws PreconditionFailed if |psi| < 4 delta0.
DisplacementReport displacement_bounds_check(const Isometry& psi, const HPoint& z);

struct ContainmentReport {
  double c = 0.0;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double max_distance = 0.0;  // largest sampled distance to the target line
  double min_slack = kInfinity;  // epsilon - max_distance
  bool holds() const noexcept { return violations == 0; }
};

/// gamma([-L + c, L - c]) within eps of alpha, c = D - log eps, sampled at
/// 0.01. Throws PreconditionFailed unless D >= eps > 0, both ends of the
/// segment are within D of alpha and L >= 2(D - log eps).
ContainmentReport neighbor_containment_check(const GeodesicLine& gamma, double half_length,
                                             const GeodesicLine& alpha, double D, double epsilon);

/// Constants of the closing estimate for a given eps0.
struct ClosingConstants {
  double epsilon0 = 0.0;
  double s0 = 0.0;  // 4 eps0 + 6 delta0
  double c0 = 0.0;  // 2 delta0 + eps0 - log(eps0 / 8)
  double l0 = 0.0;  // max(4 delta0 + eps0, 2 c0 - s0)
};
ClosingConstants closing_constants(double epsilon0);

struct ClosingLemmaReport {
  ClosingConstants constants;
  double translation = 0.0;
  double shadowing = 0.0;  // max sampled d(gamma(s + t), psi gamma(t)) on [0, l]
  double slack_lower = 0.0;  // |psi| - (s - 2 eps0)
  double slack_upper = 0.0;  // (s + eps0) - |psi|
  ContainmentReport tube;     // gamma([c0, s + l - c0]) against eps0 / 8
  bool sandwich_holds() const noexcept { return slack_lower >= 0.0 && slack_upper >= 0.0; }
  bool holds() const noexcept { return sandwich_holds() && tube.holds(); }
};

/// Checks both conclusions of the closing estimate for gamma on [0, s + l].
/// Throws PreconditionFailed on |psi| < 4 delta0, l < l0 or s <= s0, and
/// HypothesisFailed if the sampled shadowing exceeds eps0.
ClosingLemmaReport closing_lemma_check(const GeodesicLine& gamma, const Isometry& psi, double epsilon0,
                                       double s, double l);

struct Penetration {
  std::size_t element = 0;  // index into the supplied group elements
  double entry = 0.0;
  double length = 0.0;
};

/// For each g, the maximal parameter interval of [t0, t1] on which gamma
/// stays within eps0 / 2 of g A_psi. Located on a 0.01 grid, ends refined
/// by bisection. Elements whose tube gamma misses are omitted.
std::vector<Penetration> geodesic_penetration(const GeodesicLine& gamma, double t0, double t1,
                                              const Isometry& psi, double epsilon0,
                                              const std::vector<Isometry>& elements);

/// Distinct elements given by reduced words of length <= R in the
/// generators and their inverses, identity first.
std::vector<Isometry> word_ball(const std::vector<Isometry>& generators, std::size_t radius);

/// Number of elements of word_ball(generators, R) moving x at most l: a
/// lower bound for the orbital counting function.
std::size_t orbital_counting(const std::vector<Isometry>& generators, const HPoint& x, double l,
                             std::size_t radius);

/// Free Schottky pair: A with axis (-1, 1) and B = diag(e^{L/2}, e^{-L/2}),
/// both of length L = 2 asinh 2. Ping-pong discs: |z -+ 1.118| < 0.5 for A,
/// |z| < 0.486 and |z| > 2.058 for B.
std::vector<Isometry> schottky_generators();

/// Random frame: rotation about i, dilation in [-3, 3], translation in
/// [-2, 2].
Isometry random_isometry(std::mt19937_64& rng);

}  // namespace aperiodic::hyperbolic
