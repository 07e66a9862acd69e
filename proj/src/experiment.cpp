#include "aperiodic/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <functional>
#include <locale>
#include <random>
#include <sstream>
#include <thread>
#include <variant>

#include "aperiodic/complexity.hpp"
#include "aperiodic/hyperbolic.hpp"

namespace aperiodic::cli {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

// ---------------------------------------------------------------- config

template <typename T>
T field_or(const json& obj, const char* key, T fallback, const std::string& path) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(path + key, e.what());
  }
}

std::size_t positive_count(const json& obj, const char* key, std::size_t fallback, const std::string& path = "") {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(path + key, "must be a positive integer");
  return v.get<std::size_t>();
}

double positive_real(const json& obj, const char* key, double fallback, const std::string& path = "") {
  if (!obj.contains(key)) return fallback;
  const auto& v = obj.at(key);
  if (!v.is_number() || !(v.get<double>() > 0.0)) throw ConfigError(path + key, "must be a positive number");
  return v.get<double>();
}

std::vector<double> parse_grid(const json& doc) {
  if (!doc.contains("grid")) return geometric_grid(0.5, 0.5, 10);
  const auto& g = doc.at("grid");
  std::vector<double> grid;
  if (g.is_array()) {
    for (const auto& v : g) {
      if (!v.is_number()) throw ConfigError("grid", "entries must be numbers");
      grid.push_back(v.get<double>());
    }
  } else if (g.is_object()) {
    const double max = positive_real(g, "max", 0.5, "grid.");
    const double ratio = positive_real(g, "ratio", 0.5, "grid.");
    const std::size_t count = positive_count(g, "count", 10, "grid.");
    if (!(ratio < 1.0)) throw ConfigError("grid.ratio", "must lie in (0, 1)");
    grid = geometric_grid(max, ratio, count);
  } else {
    throw ConfigError("grid", "must be an array of scales or {max, ratio, count}");
  }
  try {
    require_decreasing_grid(grid);
  } catch (const PreconditionFailed& e) {
    throw ConfigError("grid", e.what());
  }
  return grid;
}

SystemConfig parse_system(const json& doc) {
  if (!doc.contains("system") || !doc.at("system").is_object()) throw ConfigError("system", "missing system object");
  const auto& s = doc.at("system");
  SystemConfig sc;
  const std::string kind = field_or<std::string>(s, "kind", "", "system.");
  if (kind == "torus") {
    sc.kind = SystemKind::Torus;
    if (s.contains("continued_fraction")) {
      sc.continued_fraction = field_or<std::string>(s, "continued_fraction", "", "system.");
      try {
        sc.alpha = {torus::ContinuedFraction::parse(*sc.continued_fraction).value()};
      } catch (const Error& e) {
        throw ConfigError("system.continued_fraction", e.what());
      }
    } else if (s.contains("alpha")) {
      const auto& a = s.at("alpha");
      if (a.is_number()) {
        sc.alpha = {a.get<long double>()};
      } else if (a.is_array() && !a.empty() && a.size() <= torus::kMaxDim) {
        for (const auto& v : a) {
          if (!v.is_number()) throw ConfigError("system.alpha", "entries must be numbers");
          sc.alpha.push_back(v.get<long double>());
        }
      } else {
        throw ConfigError("system.alpha", "must be a number or an array of 1..4 numbers");
      }
    } else {
      sc.continued_fraction = "0;|1";
      sc.alpha = {torus::ContinuedFraction::golden().value()};
    }
    sc.base.assign(sc.alpha.size(), 0.0L);
    if (s.contains("base")) {
      const auto& b = s.at("base");
      if (!b.is_array() || b.size() != sc.alpha.size()) throw ConfigError("system.base", "must match alpha in size");
      for (std::size_t i = 0; i < b.size(); ++i) {
        if (!b[i].is_number()) throw ConfigError("system.base", "entries must be numbers");
        sc.base[i] = b[i].get<long double>();
      }
    }
  } else if (kind == "bernoulli") {
    sc.kind = SystemKind::Bernoulli;
    sc.alphabet = static_cast<unsigned>(positive_count(s, "alphabet", 2, "system."));
    if (sc.alphabet < 2 || sc.alphabet > 10) throw ConfigError("system.alphabet", "must lie in 2..10");
    if (s.contains("word")) {
      sc.word = field_or<std::string>(s, "word", "", "system.");
      try {
        (void)bernoulli::SymbolWord::parse(sc.alphabet, *sc.word);
      } catch (const Error& e) {
        throw ConfigError("system.word", e.what());
      }
    }
    sc.order = positive_count(s, "order", 10, "system.");
  } else if (kind == "schottky") {
    sc.kind = SystemKind::Schottky;
    sc.translation = positive_real(s, "length", 2.0 * std::asinh(2.0), "system.");
    sc.ball_radius = positive_count(s, "ball_radius", 2, "system.");
  } else {
    throw ConfigError("system.kind", "must be one of torus, bernoulli, schottky");
  }
  return sc;
}

// ---------------------------------------------------------------- output

std::string csv_line(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

std::string value_text(const ShiftValue& v) { return v ? std::to_string(*v) : std::string("unresolved"); }

ojson estimate_json(const GrowthRateEstimate& e) {
  ojson j;
  j["slope"] = e.slope;
  j["intercept"] = e.intercept;
  j["residual"] = e.residual;
  j["window"] = {e.window_begin, e.window_end};
  j["x"] = e.xs;
  j["y"] = e.ys;
  return j;
}

std::string dump(const ojson& j) { return j.dump(2) + "\n"; }

// Runs fn(0..count-1) over a fixed number of worker threads; results keep
// their index, so output does not depend on scheduling.
template <typename F>
auto parallel_map(std::size_t count, unsigned threads, F fn) {
  using R = decltype(fn(std::size_t{0}));
  std::vector<std::optional<R>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  auto work = [&](unsigned w) {
    for (std::size_t i = w; i < count; i += workers) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  std::vector<R> out;
  out.reserve(count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------- systems

template <DynamicalSystem S>
struct Setup {
  S sys;
  std::string name;
  std::function<std::vector<typename S::State>()> starts;
  std::function<std::vector<typename S::State>()> box_candidates;
  std::function<std::vector<typename S::State>()> entropy_candidates;
};

using AnySetup = std::variant<Setup<torus::TorusRotation>, Setup<bernoulli::BernoulliShift>,
                              Setup<hyperbolic::SchottkyGeodesicFlow>>;

std::size_t max_length(const ExperimentConfig& c) {
  return c.lengths.empty() ? 0 : *std::max_element(c.lengths.begin(), c.lengths.end());
}

AnySetup make_setup(const ExperimentConfig& c) {
  const auto& sc = c.system;
  switch (sc.kind) {
    case SystemKind::Torus: {
      torus::TorusRotation sys(sc.alpha.size(), sc.alpha);
      Setup<torus::TorusRotation> s{sys, "torus", {}, {}, {}};
      s.starts = [sys, &c]() {
        std::vector<torus::TorusState> out{sys.start(c.system.base)};
        std::mt19937_64 rng(c.seed);
        std::uniform_real_distribution<long double> u(0.0L, 1.0L);
        while (out.size() < c.starts) {
          std::vector<long double> base(sys.dimension());
          for (auto& b : base) b = u(rng);
          out.push_back(sys.start(base));
        }
        return out;
      };
      s.box_candidates = [sys, &c]() { return sys.uniform_candidates(c.candidates, c.seed); };
      s.entropy_candidates = s.box_candidates;
      return s;
    }
    case SystemKind::Bernoulli: {
      bernoulli::BernoulliShift sys(sc.alphabet);
      Setup<bernoulli::BernoulliShift> s{sys, "bernoulli", {}, {}, {}};
      s.starts = [&c]() {
        std::vector<bernoulli::SymbolWord> out;
        if (c.system.word) out.push_back(bernoulli::SymbolWord::parse(c.system.alphabet, *c.system.word));
        const std::size_t prefix = c.horizon + c.max_shift + max_length(c) + 64;
        for (std::uint64_t k = 0; out.size() < c.starts; ++k)
          out.push_back(bernoulli::random_word(c.system.alphabet, prefix, 101, c.seed + k));
        return out;
      };
      s.box_candidates = [&c]() { return bernoulli::de_bruijn_candidates(c.system.alphabet, c.system.order); };
      s.entropy_candidates = s.box_candidates;
      return s;
    }
    case SystemKind::Schottky: {
      hyperbolic::SchottkyGeodesicFlow sys(hyperbolic::bounded_schottky_generators(sc.translation), sc.ball_radius);
      Setup<hyperbolic::SchottkyGeodesicFlow> s{sys, "schottky", {}, {}, {}};
      s.starts = [sys, &c]() {
        std::vector<hyperbolic::SchottkyGeodesicFlow::State> out;
        const std::size_t steps = c.horizon + c.max_shift + max_length(c) + 2;
        for (std::uint64_t k = 0; out.size() < c.starts; ++k) out.push_back(sys.orbit_start(steps, c.seed + k));
        return out;
      };
      s.box_candidates = [sys, &c]() { return sys.sample_states(c.candidates, 0, c.seed); };
      s.entropy_candidates = [sys, &c]() { return sys.sample_states(c.candidates, max_length(c), c.seed); };
      return s;
    }
  }
  throw ConfigError("system.kind", "unknown system");
}

// ---------------------------------------------------------------- commands

struct ProfileOutcome {
  ShiftProfile f;
  std::vector<ShiftProfile> g;
  std::optional<GrowthRateEstimate> f_rate;
  std::optional<GrowthRateEstimate> g_rate;
  std::string f_error;
  std::string g_error;
};

template <DynamicalSystem S>
std::vector<ProfileOutcome> run_profiles(const Setup<S>& s, const ExperimentConfig& c, unsigned threads) {
  const auto starts = s.starts();
  // One task per (start, scale) and per (start, length).
  const std::size_t per = c.grid.size() + c.lengths.size();
  auto values = parallel_map(starts.size() * per, threads, [&](std::size_t task) {
    const auto& x = starts[task / per];
    const std::size_t k = task % per;
    if (k < c.grid.size()) return shift_function(s.sys, x, c.grid[k], 0, c.horizon, c.max_shift);
    return shift_function(s.sys, x, c.entropy_epsilon, c.lengths[k - c.grid.size()], c.horizon, c.max_shift);
  });
  std::vector<ProfileOutcome> out;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    ProfileOutcome o;
    o.f = ShiftProfile{0, c.grid, {}, c.horizon, c.max_shift};
    for (std::size_t k = 0; k < c.grid.size(); ++k) o.f.values.push_back(values[i * per + k]);
    for (std::size_t k = 0; k < c.lengths.size(); ++k)
      o.g.push_back(ShiftProfile{c.lengths[k], {c.entropy_epsilon}, {values[i * per + c.grid.size() + k]},
                                 c.horizon, c.max_shift});
    try {
      o.f_rate = growth_rate_F(o.f);
    } catch (const Error& e) {
      o.f_error = e.what();
    }
    try {
      o.g_rate = growth_rate_G(o.g);
    } catch (const Error& e) {
      o.g_error = e.what();
    }
    out.push_back(std::move(o));
  }
  return out;
}

template <DynamicalSystem S>
GrowthRateEstimate run_dimension(const Setup<S>& s, const ExperimentConfig& c, unsigned threads,
                                 std::vector<std::size_t>& sizes) {
  const auto cand = s.box_candidates();
  sizes = parallel_map(c.grid.size(), threads, [&](std::size_t k) {
    return maximal_separated_net(s.sys, std::span<const typename S::State>(cand), c.grid[k], 0).size();
  });
  if (c.grid.size() < 5) throw ConfigError("grid", "box dimension needs >= 5 scales");
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < c.grid.size(); ++k) {
    xs.push_back(-std::log(c.grid[k]));
    ys.push_back(std::log(static_cast<double>(sizes[k])));
  }
  if (std::all_of(sizes.begin(), sizes.end(), [&](std::size_t n) { return n == sizes.front(); }))
    throw DegenerateFit("all net sizes are equal");
  return fit_growth_rate(xs, ys);
}

template <DynamicalSystem S>
GrowthRateEstimate run_entropy(const Setup<S>& s, const ExperimentConfig& c, unsigned threads,
                               std::vector<std::size_t>& sizes) {
  const auto cand = s.entropy_candidates();
  if (c.lengths.size() < 5) throw ConfigError("lengths", "entropy needs >= 5 lengths");
  sizes = parallel_map(c.lengths.size(), threads, [&](std::size_t k) {
    return maximal_separated_net(s.sys, std::span<const typename S::State>(cand), c.entropy_epsilon, c.lengths[k])
        .size();
  });
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < c.lengths.size(); ++k) {
    xs.push_back(static_cast<double>(c.lengths[k]));
    ys.push_back(std::log(static_cast<double>(sizes[k])));
  }
  if (std::all_of(sizes.begin(), sizes.end(), [](std::size_t n) { return n == 1; }))
    throw DegenerateFit("every net is a single point");
  return fit_growth_rate(xs, ys);
}

void emit_profiles(const std::vector<ProfileOutcome>& outs, RunResult& r, ojson& est) {
  std::string csv = csv_line({"start", "epsilon", "l", "value"});
  std::string plot = csv_line({"series", "x", "y"});
  ojson starts = ojson::array();
  for (std::size_t i = 0; i < outs.size(); ++i) {
    const auto& o = outs[i];
    const std::string idx = std::to_string(i);
    for (std::size_t k = 0; k < o.f.values.size(); ++k) {
      csv += csv_line({idx, format_number(o.f.epsilon_grid[k]), "0", value_text(o.f.values[k])});
      if (o.f.values[k])
        plot += csv_line({"F" + idx, format_number(-std::log(o.f.epsilon_grid[k])),
                          format_number(std::log(static_cast<double>(*o.f.values[k])))});
    }
    for (const auto& g : o.g) {
      csv += csv_line({idx, format_number(g.epsilon_grid.front()), std::to_string(g.length),
                       value_text(g.values.front())});
      if (g.values.front())
        plot += csv_line({"G" + idx, std::to_string(g.length),
                          format_number(std::log(static_cast<double>(*g.values.front())))});
    }
    ojson s;
    s["start"] = i;
    if (o.f_rate) s["F"] = estimate_json(*o.f_rate);
    else s["F"] = {{"error", o.f_error}};
    if (o.g_rate) s["G"] = estimate_json(*o.g_rate);
    else s["G"] = {{"error", o.g_error}};
    starts.push_back(s);
  }
  est["profiles"] = starts;
  r.artifacts.push_back({"profile.csv", csv});
  r.artifacts.push_back({"plot.csv", plot});
}

std::string nets_csv(const std::vector<double>& eps, const std::vector<std::size_t>& lengths,
                     const std::vector<std::size_t>& sizes) {
  std::string csv = csv_line({"epsilon", "l", "value"});
  for (std::size_t k = 0; k < sizes.size(); ++k)
    csv += csv_line({format_number(eps.size() == 1 ? eps[0] : eps[k]),
                     std::to_string(lengths.size() == 1 ? lengths[0] : lengths[k]), std::to_string(sizes[k])});
  return csv;
}

std::string plot_csv(const std::string& series, const GrowthRateEstimate& e) {
  std::string plot = csv_line({"series", "x", "y"});
  for (std::size_t k = 0; k < e.xs.size(); ++k) plot += csv_line({series, format_number(e.xs[k]), format_number(e.ys[k])});
  return plot;
}

ojson header(const std::string& command, const ExperimentConfig& c, const std::string& system) {
  ojson j;
  j["schema"] = kSchemaVersion;
  j["command"] = command;
  j["system"] = system;
  j["seed"] = c.seed;
  j["horizon"] = c.horizon;
  j["max_shift"] = c.max_shift;
  return j;
}

template <DynamicalSystem S>
RunResult generic_command(const std::string& command, const Setup<S>& s, const ExperimentConfig& c,
                          unsigned threads) {
  RunResult r;
  ojson est = header(command, c, s.name);
  if (command == "profile") {
    emit_profiles(run_profiles(s, c, threads), r, est);
    r.artifacts.push_back({"estimate.json", dump(est)});
    r.summary = "profiles for " + std::to_string(c.starts) + " start(s)";
  } else if (command == "dimension") {
    std::vector<std::size_t> sizes;
    const auto e = run_dimension(s, c, threads, sizes);
    est["dimension"] = estimate_json(e);
    r.artifacts.push_back({"nets.csv", nets_csv(c.grid, {0}, sizes)});
    r.artifacts.push_back({"plot.csv", plot_csv("N", e)});
    r.artifacts.push_back({"estimate.json", dump(est)});
    r.summary = "box dimension slope " + format_number(e.slope);
  } else if (command == "entropy") {
    std::vector<std::size_t> sizes;
    const auto e = run_entropy(s, c, threads, sizes);
    est["entropy"] = estimate_json(e);
    r.artifacts.push_back({"nets.csv", nets_csv({c.entropy_epsilon}, c.lengths, sizes)});
    r.artifacts.push_back({"plot.csv", plot_csv("N_T", e)});
    r.artifacts.push_back({"estimate.json", dump(est)});
    r.summary = "entropy slope " + format_number(e.slope);
  } else {  // report
    std::vector<std::size_t> box_sizes, ent_sizes;
    const auto dim = run_dimension(s, c, threads, box_sizes);
    const auto ent = run_entropy(s, c, threads, ent_sizes);
    const auto outs = run_profiles(s, c, threads);
    emit_profiles(outs, r, est);
    est["dimension"] = estimate_json(dim);
    est["entropy"] = estimate_json(ent);
    ojson checks = header(command, c, s.name);
    checks["tolerance"] = c.tolerance;
    ojson rows = ojson::array();
    std::size_t failures = 0;
    for (std::size_t i = 0; i < outs.size(); ++i) {
      ojson row;
      row["start"] = i;
      auto side = [&](const std::optional<GrowthRateEstimate>& rate, const std::string& err, double ceiling,
                      const char* key) {
        if (!rate) {
          row[key] = {{"status", "skipped"}, {"reason", err}};
          return;
        }
        const double slack = ceiling + c.tolerance - rate->slope;
        row[key] = {{"status", slack >= 0.0 ? "pass" : "fail"}, {"estimate", rate->slope}, {"ceiling", ceiling},
                    {"slack", slack}};
        if (slack < 0.0) ++failures;
      };
      side(outs[i].f_rate, outs[i].f_error, dim.slope, "F_vs_dimension");
      side(outs[i].g_rate, outs[i].g_error, ent.slope, "G_vs_entropy");
      rows.push_back(row);
    }
    checks["inequalities"] = rows;
    checks["failures"] = failures;
    r.artifacts.push_back({"nets.csv", nets_csv(c.grid, {0}, box_sizes)});
    r.artifacts.push_back({"estimate.json", dump(est)});
    r.artifacts.push_back({"checks.json", dump(checks)});
    r.status = failures == 0 ? 0 : 1;
    r.summary = std::to_string(failures) + " inequality failure(s)";
  }
  return r;
}

RunResult torus_command(const ExperimentConfig& c) {
  if (c.system.kind != SystemKind::Torus) throw ConfigError("system.kind", "the torus command needs a torus system");
  const torus::TorusRotation sys(c.system.alpha.size(), c.system.alpha);
  ojson checks = header("torus", c, "torus");
  checks["badly_approximable_constant"] = torus::badly_approximable_constant(c.system.alpha, c.max_shift);
  if (c.system.continued_fraction) {
    const auto cf = torus::ContinuedFraction::parse(*c.system.continued_fraction);
    checks["continued_fraction"] = cf.to_string();
    checks["convergent_denominators"] = torus::convergent_denominators(cf, c.max_shift);
  }
  const auto x = sys.start(c.system.base);
  std::size_t mismatches = 0, da_checked = 0;
  const std::uint64_t s_cap = std::min<std::uint64_t>(c.max_shift, 2000);
  for (double eps : c.grid)
    for (std::uint64_t s = 1; s <= s_cap; ++s) {
      const auto d = torus::verify_classical_da_equivalence(sys, x, s, eps);
      ++da_checked;
      if (d.lhs != d.rhs) ++mismatches;
    }
  checks["equivalence"] = {{"checked", da_checked}, {"mismatches", mismatches}};
  std::size_t witness_failures = 0;
  double worst = 0.0;
  for (const auto& ev : torus_recurrence_events(sys, c.events, c.seed)) {
    const auto w = torus::torus_closing_witness(sys, ev.x, ev.shift, ev.epsilon);
    worst = std::max(worst, w.distance_now / w.bound_now);
    if (!w.holds()) ++witness_failures;
  }
  checks["closing_witnesses"] = {{"events", c.events}, {"failures", witness_failures}, {"worst_ratio", worst}};
  RunResult r;
  r.status = mismatches == 0 && witness_failures == 0 ? 0 : 1;
  r.artifacts.push_back({"checks.json", dump(checks)});
  r.summary = std::to_string(mismatches + witness_failures) + " torus check failure(s)";
  return r;
}

RunResult bernoulli_command(const ExperimentConfig& c) {
  if (c.system.kind != SystemKind::Bernoulli)
    throw ConfigError("system.kind", "the bernoulli command needs a bernoulli system");
  const unsigned n = c.system.alphabet;
  const auto phi = bernoulli::phi_exponential(n, c.delta);
  bernoulli::SearchOptions opts;
  opts.seed = c.seed == 0 ? std::nullopt : std::optional<std::uint64_t>(c.seed);
  const auto res = c.l0 ? bernoulli::phi_aperiodic_search(n, phi, *c.l0, c.target_length, opts)
                        : bernoulli::phi_aperiodic_search_auto(n, phi, c.target_length, c.max_l0, opts);
  ojson checks = header("bernoulli", c, "bernoulli");
  checks["delta"] = c.delta;
  checks["l0"] = res.l0;
  checks["found"] = res.found();
  checks["nodes"] = res.nodes;
  checks["deepest"] = res.deepest;
  checks["exhausted"] = res.exhausted;
  checks["budget_hit"] = res.budget_hit;
  RunResult r;
  if (res.found()) {
    const auto& w = *res.word;
    const bernoulli::WordWindow win{c.target_length, c.target_length, c.target_length, true};
    const auto cert = bernoulli::is_phi_aperiodic(w, phi, res.l0, win);
    checks["word"] = w.to_string();
    checks["certified"] = cert.holds();
    checks["certificate_checked"] = cert.checked;
    r.status = cert.holds() ? 0 : 1;
  }
  r.artifacts.push_back({"checks.json", dump(checks)});
  r.summary = res.found() ? "word of length " + std::to_string(c.target_length) + " found at l0 = " + std::to_string(res.l0)
                          : std::string(res.exhausted ? "search exhausted" : "search stopped by budget");
  return r;
}

ojson tally_json(const SuiteTally& t) {
  return {{"instances", t.instances}, {"violations", t.violations}, {"rejected", t.rejected},
          {"min_slack", t.min_slack}};
}

RunResult hyperbolic_command(const ExperimentConfig& c) {
  using namespace hyperbolic;
  ojson checks = header("hyperbolic", c, "hyperbolic");
  const auto t = translation_suite(c.instances, c.seed);
  const auto nb = neighbor_suite(c.instances, c.seed + 1);
  const auto cl = closing_suite(c.instances, c.seed + 2);
  checks["translation"] = tally_json(t);
  checks["neighbor"] = tally_json(nb);
  checks["closing"] = tally_json(cl);

  const auto gens = schottky_generators();
  const auto ball = word_ball(gens, c.word_radius);
  const HPoint o(0.0, 1.0);
  std::vector<double> disp;
  for (const auto& g : ball) disp.push_back(hyp_distance(o, g.apply(o)));
  std::vector<double> xs, ys;
  std::string csv = csv_line({"l", "count"});
  const double reach = 2.0 * std::asinh(2.0) * static_cast<double>(c.word_radius) * 0.6;
  for (double l = 1.0; l <= reach; l += 0.5) {
    const auto n = static_cast<std::size_t>(std::count_if(disp.begin(), disp.end(), [&](double d) { return d <= l; }));
    csv += csv_line({format_number(l), std::to_string(n)});
    xs.push_back(l);
    ys.push_back(std::log(static_cast<double>(n)));
  }
  ojson est = header("hyperbolic", c, "hyperbolic");
  if (xs.size() >= 3) est["orbital_growth"] = estimate_json(fit_growth_rate(xs, ys));
  est["word_radius"] = c.word_radius;

  RunResult r;
  const std::size_t failures = t.violations + nb.violations + cl.violations;
  checks["failures"] = failures;
  r.status = failures == 0 ? 0 : 1;
  r.artifacts.push_back({"checks.json", dump(checks)});
  r.artifacts.push_back({"estimate.json", dump(est)});
  r.artifacts.push_back({"plot.csv", csv});
  r.summary = std::to_string(failures) + " hyperbolic violation(s)";
  return r;
}

ojson closing_json(const ClosingReport& rep) {
  ojson ce = ojson::array();
  for (const auto& x : rep.counterexamples) ce.push_back({{"event", x.event}, {"reason", x.reason}});
  return {{"checked", rep.checked}, {"skipped", rep.skipped}, {"counterexamples", ce}, {"semantics", rep.semantics}};
}

RunResult check_closing_command(const ExperimentConfig& c) {
  ojson checks = header("check-closing", c, "");
  ClosingReport rep;
  if (c.system.kind == SystemKind::Torus) {
    const torus::TorusRotation sys(c.system.alpha.size(), c.system.alpha);
    const auto events = torus_recurrence_events(sys, c.events, c.seed);
    rep = check_delta_closing(sys, [](double e) { return 2.0 * e; }, torus::TorusRegistry(sys),
                              std::span<const RecurrenceEvent<torus::TorusRotation>>(events));
    checks["system"] = "torus";
    checks["delta"] = "2 eps";
  } else if (c.system.kind == SystemKind::Bernoulli) {
    const bernoulli::BernoulliShift sys(c.system.alphabet);
    const auto events = bernoulli_recurrence_events(sys, c.events, c.seed);
    rep = check_strong_delta_closing(sys, [](double, std::size_t l) { return l; }, bernoulli::BernoulliRegistry(sys),
                                     std::span<const RecurrenceEvent<bernoulli::BernoulliShift>>(events));
    checks["system"] = "bernoulli";
    checks["delta"] = "l";
  } else {
    throw ConfigError("system.kind", "check-closing supports torus and bernoulli");
  }
  checks["report"] = closing_json(rep);
  RunResult r;
  r.status = rep.clean() ? 0 : 1;
  r.artifacts.push_back({"checks.json", dump(checks)});
  r.summary = std::to_string(rep.counterexamples.size()) + " counterexample(s) in " + std::to_string(rep.checked);
  return r;
}

}  // namespace

// Randomized suites for the hyperbolic estimates. Each instance is built in
// the frame of the imaginary axis and then moved by a random isometry.

SuiteTally translation_suite(std::size_t count, std::uint64_t seed) {
  using namespace hyperbolic;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> len(4.0 * kDeltaZero, 20.0), off(-10.0, 10.0), foot(-5.0, 5.0);
  SuiteTally t;
  const auto axis0 = GeodesicLine::imaginary_axis();
  for (std::size_t k = 0; k < count; ++k) {
    const Isometry g = random_isometry(rng);
    const Isometry psi = g * Isometry::dilation(len(rng)) * g.inverse();
    const HPoint z = g.apply(offset_point(axis0, foot(rng), off(rng)));
    const auto rep = displacement_bounds_check(psi, z);
    ++t.instances;
    t.min_slack = std::min({t.min_slack, rep.slack_lower, rep.slack_upper});
    if (!rep.holds()) ++t.violations;
  }
  return t;
}

SuiteTally neighbor_suite(std::size_t count, std::uint64_t seed) {
  using namespace hyperbolic;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> eps_d(0.05, 1.0), unit(0.0, 1.0), extra(0.0, 5.0);
  SuiteTally t;
  const auto alpha0 = GeodesicLine::imaginary_axis();
  for (std::size_t k = 0; k < count; ++k) {
    const double eps = eps_d(rng);
    const double D = eps + (5.0 - eps) * unit(rng);
    const double L = 2.0 * (D - std::log(eps)) + extra(rng);
    const double d1 = unit(rng) < 0.5 ? D : -D;
    const double d2 = unit(rng) < 0.5 ? D : -D;
    // Feet separated so that the two offset points are 2L apart.
    const double ch = (std::cosh(2.0 * L) + std::sinh(d1) * std::sinh(d2)) / (std::cosh(d1) * std::cosh(d2));
    const double gap = std::acosh(ch);
    const HPoint p = offset_point(alpha0, -gap / 2.0, d1);
    const HPoint q = offset_point(alpha0, gap / 2.0, d2);
    const Isometry g = random_isometry(rng);
    const auto gamma = GeodesicLine::through(p, q).shifted(L).transformed(g);
    const auto rep = neighbor_containment_check(gamma, L, alpha0.transformed(g), D, eps);
    ++t.instances;
    t.min_slack = std::min(t.min_slack, rep.min_slack);
    if (!rep.holds()) ++t.violations;
  }
  return t;
}

SuiteTally closing_suite(std::size_t count, std::uint64_t seed) {
  using namespace hyperbolic;
  const double eps_values[] = {0.05, 0.1, 0.2};
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> len(4.0 * kDeltaZero, 20.0), unit(0.0, 1.0);
  SuiteTally t;
  const auto axis0 = GeodesicLine::imaginary_axis();
  std::size_t attempts = 0;
  while (t.instances < count && attempts < 20 * count) {
    ++attempts;
    const double eps0 = eps_values[attempts % 3];
    const auto k = closing_constants(eps0);
    const double length = len(rng);
    const double s = length;
    const double l = k.l0 + 2.0 * unit(rng);
    if (s <= k.s0) {
      ++t.rejected;
      continue;
    }
    // Ends offset by at most eps0 / 4 from the axis.
    const HPoint p = offset_point(axis0, -(s + l) / 2.0, eps0 / 4.0 * (2.0 * unit(rng) - 1.0));
    const HPoint q = offset_point(axis0, (s + l) / 2.0, eps0 / 4.0 * (2.0 * unit(rng) - 1.0));
    const Isometry g = random_isometry(rng);
    const auto gamma = GeodesicLine::through(p, q).transformed(g);
    const Isometry psi = g * Isometry::dilation(length) * g.inverse();
    try {
      const auto rep = closing_lemma_check(gamma, psi, eps0, s, l);
      ++t.instances;
      t.min_slack = std::min({t.min_slack, rep.slack_lower, rep.slack_upper, rep.tube.min_slack});
      if (!rep.holds()) ++t.violations;
    } catch (const HypothesisFailed&) {
      ++t.rejected;
    }
  }
  return t;
}

ExperimentConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw ConfigError("config", "must be a JSON object");
  if (!doc.contains("schema") || !doc.at("schema").is_number_integer() || doc.at("schema").get<int>() != kSchemaVersion)
    throw ConfigError("schema", "must be " + std::to_string(kSchemaVersion));
  ExperimentConfig c;
  c.system = parse_system(doc);
  c.grid = parse_grid(doc);
  c.horizon = positive_count(doc, "horizon", c.horizon);
  c.max_shift = positive_count(doc, "max_shift", c.max_shift);
  if (doc.contains("lengths")) {
    const auto& a = doc.at("lengths");
    if (!a.is_array() || a.empty()) throw ConfigError("lengths", "must be a non-empty array");
    c.lengths.clear();
    for (const auto& v : a) {
      if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("lengths", "entries must be naturals");
      const auto l = v.get<std::size_t>();
      if (!c.lengths.empty() && l <= c.lengths.back()) throw ConfigError("lengths", "must be strictly increasing");
      c.lengths.push_back(l);
    }
  }
  c.entropy_epsilon = positive_real(doc, "entropy_epsilon", c.entropy_epsilon);
  c.candidates = positive_count(doc, "candidates", c.candidates);
  c.starts = positive_count(doc, "starts", c.starts);
  c.events = positive_count(doc, "events", c.events);
  c.instances = positive_count(doc, "instances", c.instances);
  c.word_radius = positive_count(doc, "word_radius", c.word_radius);
  c.delta = positive_real(doc, "delta", c.delta);
  c.target_length = positive_count(doc, "target_length", c.target_length);
  if (doc.contains("l0")) {
    const auto& v = doc.at("l0");
    if (!v.is_number_integer() || v.get<long long>() < 0) throw ConfigError("l0", "must be a natural");
    c.l0 = v.get<std::size_t>();
  }
  c.max_l0 = positive_count(doc, "max_l0", c.max_l0);
  c.tolerance = positive_real(doc, "tolerance", c.tolerance);
  if (doc.contains("seed")) {
    const auto& v = doc.at("seed");
    if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0))
      throw ConfigError("seed", "must be an unsigned integer");
    c.seed = v.get<std::uint64_t>();
  }
  return c;
}

RunResult run_experiment(const std::string& command, const ExperimentConfig& config, unsigned threads) {
  if (std::find(commands().begin(), commands().end(), command) == commands().end())
    throw ConfigError("command", "unknown command '" + command + "'");
  if (threads == 0) throw ConfigError("threads", "must be positive");
  if (command == "torus") return torus_command(config);
  if (command == "bernoulli") return bernoulli_command(config);
  if (command == "hyperbolic") return hyperbolic_command(config);
  if (command == "check-closing") return check_closing_command(config);
  const AnySetup setup = make_setup(config);
  return std::visit([&](const auto& s) { return generic_command(command, s, config, threads); }, setup);
}

void write_artifacts(const std::filesystem::path& dir, const std::vector<Artifact>& artifacts) {
  std::filesystem::create_directories(dir);
  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged;
  for (const auto& a : artifacts) {
    const auto final_path = dir / a.name;
    auto tmp = final_path;
    tmp += ".tmp";
    std::ofstream out(tmp, std::ios::binary);
    out << a.content;
    out.close();
    if (!out) throw Error("cannot write " + tmp.string());
    staged.emplace_back(tmp, final_path);
  }
  for (const auto& [tmp, final_path] : staged) std::filesystem::rename(tmp, final_path);
}

std::vector<RecurrenceEvent<torus::TorusRotation>> torus_recurrence_events(const torus::TorusRotation& sys,
                                                                           std::size_t count,
                                                                           std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<long double> base(0.0L, 1.0L);
  std::uniform_real_distribution<double> factor(1.0, 3.0);
  std::uniform_int_distribution<std::uint64_t> shift(1, 2000);
  std::vector<RecurrenceEvent<torus::TorusRotation>> out;
  const std::size_t n = sys.dimension();
  while (out.size() < count) {
    std::vector<long double> b(n);
    for (auto& v : b) v = base(rng);
    const auto x = sys.start(b);
    const std::uint64_t s = shift(rng);
    auto y = x;
    y.time += s;
    const double d = sys.distance(x, y);
    const double eps = std::min(0.5, d * factor(rng));
    if (!(d < eps)) continue;
    out.push_back({x, static_cast<std::size_t>(s), 0, eps});
  }
  return out;
}

std::vector<RecurrenceEvent<bernoulli::BernoulliShift>> bernoulli_recurrence_events(
    const bernoulli::BernoulliShift& sys, std::size_t count, std::uint64_t seed) {
  using bernoulli::Symbol;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<unsigned> sym(1, sys.alphabet());
  std::uniform_int_distribution<std::size_t> shift(1, 30), length(0, 20), scale(1, 5), tail(1, 12);
  std::vector<RecurrenceEvent<bernoulli::BernoulliShift>> out;
  out.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const std::size_t s = shift(rng), l = length(rng), j = scale(rng);
    std::vector<Symbol> prefix;
    for (std::size_t i = 0; i < s; ++i) prefix.push_back(static_cast<Symbol>(sym(rng)));
    while (prefix.size() < s + l + j) prefix.push_back(prefix[prefix.size() - s]);
    // Free symbols after the forced block, then an arbitrary periodic tail.
    for (std::size_t i = 0; i < 8; ++i) prefix.push_back(static_cast<Symbol>(sym(rng)));
    std::vector<Symbol> t;
    for (std::size_t i = tail(rng); i > 0; --i) t.push_back(static_cast<Symbol>(sym(rng)));
    auto w = bernoulli::SymbolWord::eventually_periodic(sys.alphabet(), std::move(prefix), std::move(t));
    out.push_back({std::move(w), s, l, std::exp(-static_cast<double>(j))});
  }
  return out;
}

std::string format_number(double x) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace aperiodic::cli
