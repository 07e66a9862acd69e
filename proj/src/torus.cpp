#include "aperiodic/torus.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

namespace aperiodic::torus {

ContinuedFraction::ContinuedFraction(std::int64_t a0, std::vector<std::uint32_t> prefix,
                                     std::vector<std::uint32_t> tail)
    : a0_(a0), prefix_(std::move(prefix)), tail_(std::move(tail)) {
  for (auto a : prefix_)
    if (a == 0) throw PreconditionFailed("partial quotients must be positive");
  for (auto a : tail_)
    if (a == 0) throw PreconditionFailed("partial quotients must be positive");
}

ContinuedFraction ContinuedFraction::golden() { return ContinuedFraction(0, {}, {1}); }
ContinuedFraction ContinuedFraction::silver() { return ContinuedFraction(0, {}, {2}); }

ContinuedFraction ContinuedFraction::expand(long double x, std::size_t max_terms) {
  const long double fl = std::floor(x);
  std::vector<std::uint32_t> prefix;
  long double r = x - fl;
  for (std::size_t k = 0; k < max_terms && r > 1e-15L; ++k) {
    const long double inv = 1.0L / r;
    const long double a = std::floor(inv);
    if (a > 4e9L) break;
    prefix.push_back(static_cast<std::uint32_t>(a));
    r = inv - a;
  }
  return ContinuedFraction(static_cast<std::int64_t>(fl), std::move(prefix));
}

std::uint32_t ContinuedFraction::quotient(std::size_t k) const {
  if (k == 0) throw OutOfRange("quotient index starts at 1");
  if (k <= prefix_.size()) return prefix_[k - 1];
  if (tail_.empty()) return 0;
  return tail_[(k - 1 - prefix_.size()) % tail_.size()];
}

std::size_t ContinuedFraction::max_quotient(std::size_t depth) const {
  std::size_t m = 0;
  for (std::size_t k = 1; k <= depth; ++k) m = std::max<std::size_t>(m, quotient(k));
  return m;
}

std::vector<std::pair<BigInt, BigInt>> ContinuedFraction::convergents(std::size_t count) const {
  std::vector<std::pair<BigInt, BigInt>> out;
  if (count == 0) return out;
  // p_{-1} = 1, q_{-1} = 0; p_0 = a0, q_0 = 1.
  BigInt p_prev = 1, q_prev = 0;
  BigInt p = a0_, q = 1;
  out.emplace_back(p, q);
  for (std::size_t k = 1; k < count; ++k) {
    const std::uint32_t a = quotient(k);
    if (a == 0) break;
    BigInt pn = BigInt(a) * p + p_prev;
    BigInt qn = BigInt(a) * q + q_prev;
    p_prev = std::move(p);
    q_prev = std::move(q);
    p = std::move(pn);
    q = std::move(qn);
    out.emplace_back(p, q);
  }
  return out;
}

long double ContinuedFraction::value() const {
  const std::size_t depth = is_finite() ? prefix_.size() + 1 : prefix_.size() + 80;
  const auto conv = convergents(depth);
  // Error below 1 / q_k^2, far under long double resolution at this depth.
  const auto& [p, q] = conv.back();
  using boost::multiprecision::cpp_int;
  const cpp_int whole = p / q;
  const cpp_int rem = p % q;
  return whole.convert_to<long double>() + rem.convert_to<long double>() / q.convert_to<long double>();
}

std::string ContinuedFraction::to_string() const {
  std::ostringstream os;
  os << a0_ << ';';
  for (std::size_t i = 0; i < prefix_.size(); ++i) os << (i ? "," : "") << prefix_[i];
  os << '|';
  for (std::size_t i = 0; i < tail_.size(); ++i) os << (i ? "," : "") << tail_[i];
  return os.str();
}

ContinuedFraction ContinuedFraction::parse(const std::string& text) {
  const auto semi = text.find(';');
  if (semi == std::string::npos) throw PreconditionFailed("continued fraction needs 'a0;...'");
  const std::int64_t a0 = std::stoll(text.substr(0, semi));
  const std::string rest = text.substr(semi + 1);
  const auto bar = rest.find('|');
  auto split = [](const std::string& s) {
    std::vector<std::uint32_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) out.push_back(static_cast<std::uint32_t>(std::stoul(item)));
    return out;
  };
  if (bar == std::string::npos) return ContinuedFraction(a0, split(rest));
  return ContinuedFraction(a0, split(rest.substr(0, bar)), split(rest.substr(bar + 1)));
}

std::vector<std::uint64_t> convergent_denominators(const ContinuedFraction& cf, std::uint64_t limit) {
  std::vector<std::uint64_t> out;
  for (const auto& [p, q] : cf.convergents(200)) {
    if (q > limit) break;
    const auto v = q.convert_to<std::uint64_t>();
    if (out.empty() || out.back() != v) out.push_back(v);
  }
  return out;
}

ContinuedFraction generate_bad_alpha(std::uint32_t bound, std::uint64_t seed, std::size_t length) {
  if (bound < 1) throw PreconditionFailed("generate_bad_alpha needs K >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(1, bound);
  std::vector<std::uint32_t> prefix(length);
  for (auto& a : prefix) a = pick(rng);
  return ContinuedFraction(0, std::move(prefix), {1});
}

long double circle_distance(long double t) { return std::fabs(t - std::nearbyint(t)); }

double torus_distance(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw PreconditionFailed("torus_distance needs equal dimensions");
  long double s = 0.0L;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const long double d = circle_distance(static_cast<long double>(x[i]) - y[i]);
    s += d * d;
  }
  return static_cast<double>(std::sqrt(s));
}

Vec TorusState::position(std::size_t n) const {
  Vec out{};
  for (std::size_t i = 0; i < n; ++i) {
    const long double v = origin[i] + static_cast<long double>(time) * dir[i];
    out[i] = v - std::floor(v);
  }
  return out;
}

TorusRotation::TorusRotation(std::size_t dimension, std::vector<long double> alpha) : n_(dimension) {
  if (n_ < 1 || n_ > kMaxDim) throw PreconditionFailed("torus dimension must be in 1..4");
  if (alpha.size() != n_) throw PreconditionFailed("alpha must have n components");
  std::copy(alpha.begin(), alpha.end(), alpha_.begin());
}

TorusState TorusRotation::start(std::span<const long double> base) const {
  return with_direction(base, std::span<const long double>(alpha_.data(), n_));
}

TorusState TorusRotation::with_direction(std::span<const long double> base,
                                         std::span<const long double> dir) const {
  if (base.size() != n_ || dir.size() != n_) throw PreconditionFailed("state has wrong dimension");
  TorusState s;
  for (std::size_t i = 0; i < n_; ++i) {
    s.origin[i] = base[i] - std::floor(base[i]);
    s.dir[i] = dir[i];
  }
  return s;
}

double TorusRotation::distance(const State& a, const State& b) const {
  long double sum = 0.0L;
  for (std::size_t i = 0; i < n_; ++i) {
    // Difference of positions taken before reduction keeps the common part
    // of the two displacements exact.
    const long double diff = (a.origin[i] - b.origin[i]) +
                             (static_cast<long double>(a.time) * a.dir[i] -
                              static_cast<long double>(b.time) * b.dir[i]);
    const long double t = circle_distance(diff);
    const long double v = a.dir[i] - b.dir[i];
    sum += t * t + v * v;
  }
  return static_cast<double>(std::sqrt(sum));
}

TorusState TorusRotation::step(const State& x) const {
  State y = x;
  ++y.time;
  return y;
}

double TorusRotation::diameter_bound() const { return std::sqrt(5.0 * static_cast<double>(n_)) / 2.0; }

std::vector<TorusState> TorusRotation::uniform_candidates(std::size_t count, std::uint64_t seed) const {
  std::vector<State> out;
  out.reserve(count);
  if (n_ == 1) {
    for (std::size_t k = 0; k < count; ++k) {
      const long double b = static_cast<long double>(k) / static_cast<long double>(count);
      out.push_back(start(std::span<const long double>(&b, 1)));
    }
    return out;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<long double> b(n_);
  for (std::size_t k = 0; k < count; ++k) {
    for (auto& c : b) c = u(rng);
    out.push_back(start(b));
  }
  return out;
}

double badly_approximable_constant(std::span<const long double> alpha, std::uint64_t s_max) {
  if (s_max < 1) throw PreconditionFailed("badly_approximable_constant needs s_max >= 1");
  const std::size_t n = alpha.size();
  if (n == 0) throw PreconditionFailed("alpha is empty");
  const long double inv_n = 1.0L / static_cast<long double>(n);
  long double best = std::numeric_limits<long double>::infinity();
  for (std::uint64_t s = 1; s <= s_max; ++s) {
    long double sq = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
      const long double d = circle_distance(static_cast<long double>(s) * alpha[i]);
      sq += d * d;
    }
    const long double v = std::pow(static_cast<long double>(s), inv_n) * std::sqrt(sq);
    best = std::min(best, v);
    if (best == 0.0L) break;
  }
  return static_cast<double>(best);
}

namespace {

std::vector<long long> nearest_lattice(const TorusState& x, std::size_t n, std::uint64_t s) {
  std::vector<long long> p(n);
  for (std::size_t i = 0; i < n; ++i)
    p[i] = static_cast<long long>(std::nearbyint(static_cast<long double>(s) * x.dir[i]));
  return p;
}

long double lattice_gap(const TorusState& x, std::size_t n, std::uint64_t s, const std::vector<long long>& p) {
  long double sq = 0.0L;
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = static_cast<long double>(s) * x.dir[i] - static_cast<long double>(p[i]);
    sq += d * d;
  }
  return std::sqrt(sq);
}

TorusState advance(const TorusRotation& sys, TorusState x, std::uint64_t s) {
  (void)sys;
  x.time += s;
  return x;
}

}  // namespace

DaCheck verify_classical_da_equivalence(const TorusRotation& sys, const TorusState& x, std::uint64_t s,
                                        double epsilon) {
  DaCheck out;
  const std::size_t n = sys.dimension();
  out.lhs = sys.distance(x, advance(sys, x, s)) < epsilon;
  out.p = nearest_lattice(x, n, s);
  out.lattice_distance = static_cast<double>(lattice_gap(x, n, s, out.p));
  out.rhs = out.lattice_distance < epsilon;
  return out;
}

ClosingWitness torus_closing_witness(const TorusRotation& sys, const TorusState& x, std::uint64_t s,
                                     double epsilon) {
  if (s < 1) throw PreconditionFailed("closing witness needs s >= 1");
  const TorusState xs_orbit = advance(sys, x, s);
  if (!(sys.distance(x, xs_orbit) < epsilon))
    throw PreconditionFailed("no eps-recurrence at shift " + std::to_string(s));
  const std::size_t n = sys.dimension();
  ClosingWitness w;
  w.p = nearest_lattice(x, n, s);
  // Same current position as x, direction p/s.
  TorusState anchor;
  const Vec pos = x.position(n);
  for (std::size_t i = 0; i < n; ++i) {
    anchor.origin[i] = pos[i];
    anchor.dir[i] = static_cast<long double>(w.p[i]) / static_cast<long double>(s);
  }
  w.point = certify_periodic(sys, anchor, s, 1e-10);
  w.distance_now = sys.distance(x, anchor);
  w.distance_after = sys.distance(xs_orbit, anchor);
  w.bound_now = epsilon / static_cast<double>(s);
  w.bound_after = (1.0 + 1.0 / static_cast<double>(s)) * epsilon;
  return w;
}

double direction_critical_radius(double c, std::size_t n, std::uint64_t q) {
  const double dn = static_cast<double>(n);
  return std::pow(c, 1.0 / dn) / std::pow(static_cast<double>(q), 1.0 + 1.0 / dn);
}

std::vector<PeriodicPoint<TorusRotation>> TorusRegistry::candidates(const TorusState& x,
                                                                    std::size_t period) const {
  const std::size_t n = sys_->dimension();
  const auto centre = nearest_lattice(x, n, period);
  const Vec pos = x.position(n);
  std::vector<PeriodicPoint<TorusRotation>> out;
  // All offsets in {-1, 0, 1}^n around round(s alpha).
  std::size_t combos = 1;
  for (std::size_t i = 0; i < n; ++i) combos *= 3;
  for (std::size_t c = 0; c < combos; ++c) {
    TorusState anchor;
    std::size_t code = c;
    for (std::size_t i = 0; i < n; ++i) {
      const long long off = static_cast<long long>(code % 3) - 1;
      code /= 3;
      anchor.origin[i] = pos[i];
      anchor.dir[i] = static_cast<long double>(centre[i] + off) / static_cast<long double>(period);
    }
    TorusState back = anchor;
    back.time += period;
    out.push_back(PeriodicPoint<TorusRotation>{anchor, period, sys_->distance(back, anchor), true});
  }
  return out;
}

std::vector<PeriodicPoint<TorusRotation>> rational_registry(const TorusRotation& sys, std::uint64_t max_q) {
  if (sys.dimension() != 1) throw PreconditionFailed("rational_registry is for n = 1");
  std::vector<PeriodicPoint<TorusRotation>> out;
  const long double zero = 0.0L;
  for (std::uint64_t q = 1; q <= max_q; ++q) {
    for (std::uint64_t p = 0; p <= q; ++p) {
      if (std::gcd(p, q) != 1) continue;
      const long double dir = static_cast<long double>(p) / static_cast<long double>(q);
      auto st = sys.with_direction(std::span<const long double>(&zero, 1), std::span<const long double>(&dir, 1));
      out.push_back(certify_periodic(sys, st, q, 1e-10));
    }
  }
  return out;
}

}  // namespace aperiodic::torus
