#include "aperiodic/bernoulli.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

namespace aperiodic::bernoulli {

namespace {

void check_symbols(unsigned alphabet, const std::vector<Symbol>& symbols) {
  for (Symbol c : symbols)
    if (c < 1 || c > alphabet) throw PreconditionFailed("symbol outside 1..n");
}

std::size_t minimal_period(const std::vector<Symbol>& block) {
  const std::size_t s = block.size();
  for (std::size_t p = 1; p < s; ++p) {
    if (s % p != 0) continue;
    bool ok = true;
    for (std::size_t i = p; i < s && ok; ++i) ok = block[i] == block[i - p];
    if (ok) return p;
  }
  return s;
}

}  // namespace

SymbolWord SymbolWord::periodic(unsigned alphabet, std::vector<Symbol> block) {
  if (block.empty()) throw PreconditionFailed("periodic word needs a nonempty block");
  return eventually_periodic(alphabet, {}, std::move(block));
}

SymbolWord SymbolWord::eventually_periodic(unsigned alphabet, std::vector<Symbol> prefix,
                                           std::vector<Symbol> tail) {
  if (alphabet < 1) throw PreconditionFailed("alphabet must be nonempty");
  check_symbols(alphabet, prefix);
  check_symbols(alphabet, tail);
  auto data = std::make_shared<const Data>(Data{alphabet, std::move(prefix), std::move(tail)});
  return SymbolWord(std::move(data), 0);
}

SymbolWord SymbolWord::finite(unsigned alphabet, std::vector<Symbol> symbols) {
  return eventually_periodic(alphabet, std::move(symbols), {});
}

std::size_t SymbolWord::known_length() const noexcept {
  if (!is_finite()) return std::numeric_limits<std::size_t>::max();
  return offset_ >= data_->prefix.size() ? 0 : data_->prefix.size() - offset_;
}

std::size_t SymbolWord::prefix_remaining() const noexcept {
  return offset_ >= data_->prefix.size() ? 0 : data_->prefix.size() - offset_;
}

Symbol SymbolWord::at(std::size_t i) const {
  if (i == 0) throw OutOfRange("word indices start at 1");
  const std::size_t j = offset_ + i - 1;
  const auto& d = *data_;
  if (j < d.prefix.size()) return d.prefix[j];
  if (d.tail.empty()) throw UnresolvedComparison("read past the end of a finite word");
  return d.tail[(j - d.prefix.size()) % d.tail.size()];
}

SymbolWord SymbolWord::shifted(std::size_t k) const {
  std::size_t off = offset_ + k;
  // Keep offsets small inside the periodic part.
  const auto& d = *data_;
  if (!d.tail.empty() && off > d.prefix.size())
    off = d.prefix.size() + (off - d.prefix.size()) % d.tail.size();
  return SymbolWord(data_, off);
}

std::vector<Symbol> SymbolWord::take(std::size_t count) const {
  std::vector<Symbol> out;
  out.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) out.push_back(at(i));
  return out;
}

std::string SymbolWord::to_string() const {
  std::string out;
  const auto& d = *data_;
  if (alphabet() > 9) throw PreconditionFailed("digit serialization needs n <= 9");
  const std::size_t rem = prefix_remaining();
  for (std::size_t i = 1; i <= rem; ++i) out.push_back(static_cast<char>('0' + at(i)));
  if (!d.tail.empty()) {
    out.push_back('|');
    // Tail phase as seen from the current offset.
    for (std::size_t i = 1; i <= d.tail.size(); ++i) out.push_back(static_cast<char>('0' + at(rem + i)));
  }
  return out;
}

SymbolWord SymbolWord::parse(unsigned alphabet, const std::string& text) {
  std::vector<Symbol> prefix, tail;
  bool in_tail = false;
  for (char ch : text) {
    if (ch == '|') {
      if (in_tail) throw PreconditionFailed("word has two '|' separators");
      in_tail = true;
      continue;
    }
    if (ch < '1' || ch > '9') throw PreconditionFailed(std::string("bad symbol '") + ch + "'");
    (in_tail ? tail : prefix).push_back(static_cast<Symbol>(ch - '0'));
  }
  if (in_tail && tail.empty()) throw PreconditionFailed("empty periodic tail");
  return eventually_periodic(alphabet, std::move(prefix), std::move(tail));
}

std::optional<std::size_t> first_disagreement(const SymbolWord& a, const SymbolWord& b) {
  std::size_t limit = std::numeric_limits<std::size_t>::max();
  if (!a.is_finite() && !b.is_finite()) {
    // Past both prefixes the pair is periodic with period lcm(qa, qb).
    limit = std::max(a.prefix_remaining(), b.prefix_remaining()) + std::lcm(a.tail_period(), b.tail_period());
  }
  const std::size_t known = std::min(a.known_length(), b.known_length());
  for (std::size_t i = 1; i <= limit; ++i) {
    if (i > known) throw UnresolvedComparison("words agree on every known symbol");
    if (a.at(i) != b.at(i)) return i;
  }
  return std::nullopt;
}

Agreement agreement(const SymbolWord& a, const SymbolWord& b, std::size_t limit) {
  const std::size_t known = std::min(a.known_length(), b.known_length());
  Agreement out;
  while (out.length < limit) {
    if (out.length >= known) {
      out.resolved = false;
      return out;
    }
    if (a.at(out.length + 1) != b.at(out.length + 1)) return out;
    ++out.length;
  }
  return out;
}

double word_distance(const SymbolWord& a, const SymbolWord& b) {
  const auto i = first_disagreement(a, b);
  return i ? std::exp(-static_cast<double>(*i)) : 0.0;
}

std::size_t threshold_index(double epsilon) {
  if (!(epsilon > 0.0)) throw PreconditionFailed("epsilon must be positive");
  // Compare against the same exp() the metric reports.
  std::size_t i = 1;
  if (epsilon < 1.0) i = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(-std::log(epsilon))));
  while (!(std::exp(-static_cast<double>(i)) < epsilon)) ++i;
  while (i > 1 && std::exp(-static_cast<double>(i - 1)) < epsilon) --i;
  return i;
}

BernoulliShift::BernoulliShift(unsigned alphabet) : n_(alphabet) {
  if (n_ < 1) throw PreconditionFailed("alphabet must be nonempty");
}

double BernoulliShift::diameter_bound() const { return std::exp(-1.0); }

bool BernoulliShift::closer_than(const State& a, const State& b, double epsilon) const {
  const std::size_t k = threshold_index(epsilon) - 1;
  for (std::size_t i = 1; i <= k; ++i)
    if (a.at(i) != b.at(i)) return false;
  return true;
}

std::string BernoulliShift::separation_key(const State& x, double epsilon, std::size_t l) const {
  // d_l(a, b) < eps iff a and b agree on the first k + l symbols, unless
  // k = 0: then eps exceeds the diameter and every pair is close.
  const std::size_t k = threshold_index(epsilon) - 1;
  if (k == 0) return {};
  std::string key;
  key.reserve(k + l);
  for (std::size_t i = 1; i <= k + l; ++i) key.push_back(static_cast<char>(x.at(i)));
  return key;
}

std::vector<std::vector<Symbol>> all_blocks(unsigned alphabet, std::size_t length) {
  std::vector<std::vector<Symbol>> out;
  std::vector<Symbol> cur(length, 1);
  while (true) {
    out.push_back(cur);
    std::size_t i = length;
    while (i > 0 && cur[i - 1] == alphabet) {
      cur[i - 1] = 1;
      --i;
    }
    if (i == 0) break;
    ++cur[i - 1];
  }
  return out;
}

std::vector<Symbol> de_bruijn(unsigned alphabet, std::size_t order) {
  if (alphabet < 1 || order < 1) throw PreconditionFailed("de Bruijn needs n, k >= 1");
  // Lyndon-word concatenation (Fredricksen, Kessler, Maiorana).
  std::vector<Symbol> out;
  std::vector<unsigned> a(order + 1, 0);
  std::function<void(std::size_t, std::size_t)> db = [&](std::size_t t, std::size_t p) {
    if (t > order) {
      if (order % p == 0)
        for (std::size_t j = 1; j <= p; ++j) out.push_back(static_cast<Symbol>(a[j] + 1));
      return;
    }
    a[t] = a[t - p];
    db(t + 1, p);
    for (unsigned j = a[t - p] + 1; j < alphabet; ++j) {
      a[t] = j;
      db(t + 1, t);
    }
  };
  db(1, 1);
  return out;
}

std::vector<SymbolWord> de_bruijn_candidates(unsigned alphabet, std::size_t order) {
  const SymbolWord base = SymbolWord::periodic(alphabet, de_bruijn(alphabet, order));
  const std::size_t count = base.tail_period();
  std::vector<SymbolWord> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(base.shifted(i));
  return out;
}

SymbolWord random_word(unsigned alphabet, std::size_t prefix_length, std::size_t tail_length,
                       std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<unsigned> pick(1, alphabet);
  std::vector<Symbol> prefix(prefix_length), tail(tail_length);
  for (auto& c : prefix) c = static_cast<Symbol>(pick(rng));
  for (auto& c : tail) c = static_cast<Symbol>(pick(rng));
  return SymbolWord::eventually_periodic(alphabet, std::move(prefix), std::move(tail));
}

PhiFunction phi_exponential(unsigned alphabet, double delta) {
  return [alphabet, delta](std::size_t l) -> std::uint64_t {
    const double v = std::pow(static_cast<double>(alphabet), delta * static_cast<double>(l));
    if (v > 1e18) return std::uint64_t{1} << 60;
    // Exact powers must not round up.
    return static_cast<std::uint64_t>(std::ceil(v - 1e-9));
  };
}

PhiFunction phi_constant(std::uint64_t value) {
  return [value](std::size_t) { return value; };
}

std::optional<std::size_t> phi_inverse(const PhiFunction& phi, std::uint64_t s, std::size_t max_j) {
  if (phi(0) > s) return std::nullopt;
  std::size_t j = 0;
  while (j < max_j && phi(j + 1) <= s) ++j;
  return j;
}

AperiodicityCertificate is_phi_aperiodic(const SymbolWord& w, const PhiFunction& phi, std::size_t l0,
                                         const WordWindow& window) {
  AperiodicityCertificate cert;
  if (w.alphabet() <= 9) cert.word = w.to_string();
  cert.l0 = l0;
  cert.window = window;
  for (std::size_t l = 0; l <= window.max_length; ++l) cert.phi_table.push_back(phi(l));
  const std::size_t known = w.known_length();

  for (std::size_t n = 0; n <= window.max_time; ++n) {
    for (std::size_t s = 1; s <= window.max_shift; ++s) {
      if (n + s > known) {
        // T^{n+s} w is not even known to exist in the cylinder.
        if (!window.clip_to_prefix) ++cert.undetermined;
        continue;
      }
      // Match length of T^n w and T^{n+s} w, read symbol by symbol.
      std::size_t m = 0;
      bool cut = false;
      while (m < window.max_length) {
        if (n + s + m + 1 > known) {
          cut = true;
          break;
        }
        if (w.at(n + m + 1) != w.at(n + s + m + 1)) break;
        ++m;
      }
      for (std::size_t l = l0; l <= window.max_length; ++l) {
        if (l > m) {
          if (cut && !window.clip_to_prefix && s < cert.phi_table[l]) ++cert.undetermined;
          if (!cut) break;
          continue;
        }
        ++cert.checked;
        if (s < cert.phi_table[l]) {
          cert.verdict = AperiodicityCertificate::Verdict::Violated;
          cert.witness = AperiodicityCertificate::Triple{n, s, l};
          return cert;
        }
      }
    }
  }
  if (cert.undetermined > 0) cert.verdict = AperiodicityCertificate::Verdict::Inconclusive;
  return cert;
}

SearchResult phi_aperiodic_search(unsigned alphabet, const PhiFunction& phi, std::size_t l0,
                                  std::size_t target_length, const SearchOptions& options) {
  SearchResult res;
  res.l0 = l0;
  if (alphabet < 1) throw PreconditionFailed("alphabet must be nonempty");

  std::vector<Symbol> order(alphabet);
  std::iota(order.begin(), order.end(), Symbol{1});
  if (options.seed) {
    std::mt19937_64 rng(*options.seed);
    std::shuffle(order.begin(), order.end(), rng);
  }

  // With l0 = 0 the length-0 condition asks s >= phi(0) for every shift,
  // which fails for s = 1 as soon as two positions exist.
  const bool length_zero_blocks = l0 == 0 && phi(0) > 1;

  // phi is evaluated once per length.
  std::vector<std::uint64_t> phi_at(target_length + 1);
  for (std::size_t l = 0; l <= target_length; ++l) phi_at[l] = phi(l);
  const std::size_t min_len = std::max<std::size_t>(l0, 1);

  std::vector<Symbol> word(target_length);
  // runs[m][s]: length of the match w(m-r+1..m) = w(m-s-r+1..m-s) ending at
  // position m (1-based) for shift s.
  std::vector<std::vector<std::uint32_t>> runs(target_length + 1);
  std::vector<std::size_t> next(target_length + 1, 0);

  if (target_length == 0) {
    res.word = SymbolWord::finite(alphabet, {});
    return res;
  }

  std::size_t depth = 0;  // symbols placed
  while (true) {
    if (depth == target_length) {
      res.word = SymbolWord::finite(alphabet, word);
      return res;
    }
    if (next[depth] >= alphabet) {
      if (depth == 0) {
        res.exhausted = true;
        return res;
      }
      next[depth] = 0;
      --depth;
      continue;
    }
    if (res.nodes >= options.node_budget) {
      res.budget_hit = true;
      return res;
    }
    const Symbol c = order[next[depth]++];
    ++res.nodes;
    const std::size_t m = depth + 1;  // position being filled
    if (length_zero_blocks && m >= 2) continue;
    auto& run = runs[m];
    run.assign(m, 0);
    bool ok = true;
    for (std::size_t s = 1; s < m && ok; ++s) {
      if (c != word[m - 1 - s]) continue;
      const std::uint32_t r = (s < m - 1 ? runs[m - 1][s] : 0) + 1;
      run[s] = r;
      if (r >= min_len && s < phi_at[r]) ok = false;
    }
    if (!ok) continue;
    word[depth] = c;
    ++depth;
    res.deepest = std::max(res.deepest, depth);
  }
}

SearchResult phi_aperiodic_search_auto(unsigned alphabet, const PhiFunction& phi, std::size_t target_length,
                                       std::size_t max_l0, const SearchOptions& options) {
  SearchResult last;
  bool all_exhausted = true;
  for (std::size_t l0 = 1; l0 <= max_l0; ++l0) {
    SearchResult probe = phi_aperiodic_search(alphabet, phi, l0, 4 * l0, options);
    if (!probe.found()) {
      all_exhausted = all_exhausted && probe.exhausted;
      last = probe;
      continue;
    }
    SearchResult full = phi_aperiodic_search(alphabet, phi, l0, target_length, options);
    if (full.found()) return full;
    all_exhausted = all_exhausted && full.exhausted;
    last = full;
  }
  last.exhausted = all_exhausted;
  return last;
}

PeriodicClosing periodic_closing_witness(const SymbolWord& w, std::size_t s, std::size_t l) {
  if (s < 1) throw PreconditionFailed("shift must be positive");
  const Agreement pre = agreement(w, w.shifted(s), l);
  if (pre.length < l) throw PreconditionFailed("d(w, T^s w) > e^{-(l+1)}");
  PeriodicClosing out{SymbolWord::periodic(w.alphabet(), w.take(s)), 0, false};
  const std::size_t limit = std::min<std::size_t>(w.known_length(), s + l + 4096);
  out.agreement = agreement(w, out.anchor, limit).length;
  out.holds = out.agreement >= s + l;
  return out;
}

std::vector<PeriodicPoint<BernoulliShift>> BernoulliRegistry::candidates(const SymbolWord& x,
                                                                         std::size_t period) const {
  (void)sys_;
  if (x.known_length() < period) return {};
  auto block = x.take(period);
  const bool primitive = minimal_period(block) == period;
  return {PeriodicPoint<BernoulliShift>{SymbolWord::periodic(x.alphabet(), std::move(block)), period, 0.0,
                                        primitive}};
}

std::vector<PeriodicPoint<BernoulliShift>> all_periodic_words(const BernoulliShift& sys, std::size_t max_period) {
  std::vector<PeriodicPoint<BernoulliShift>> out;
  for (std::size_t s = 1; s <= max_period; ++s) {
    for (auto& block : all_blocks(sys.alphabet(), s)) {
      const bool primitive = minimal_period(block) == s;
      out.push_back({SymbolWord::periodic(sys.alphabet(), std::move(block)), s, 0.0, primitive});
    }
  }
  return out;
}

EquivalenceReport verify_periodic_distance_equivalence(const SymbolWord& w, const PhiFunction& phi,
                           std::span<const PeriodicPoint<BernoulliShift>> anchors, const WordWindow& window) {
  EquivalenceReport rep;
  const auto cert = is_phi_aperiodic(w, phi, 0, window);
  rep.lhs_holds = cert.holds();
  rep.lhs_witness = cert.witness;
  rep.undetermined = cert.undetermined;

  std::vector<std::size_t> bound(window.max_shift + 1, 0);
  for (std::size_t s = 1; s <= window.max_shift; ++s) {
    const auto inv = phi_inverse(phi, s, window.max_length + 1);
    if (!inv) throw PreconditionFailed("phi(0) must be at most 1");
    bound[s] = s + *inv;
  }

  rep.rhs_holds = true;
  const std::size_t known = w.known_length();
  for (std::size_t n = 0; n <= window.max_time && rep.rhs_holds; ++n) {
    if (n >= known) break;
    const SymbolWord y = w.shifted(n);
    auto check = [&](const SymbolWord& anchor, std::size_t s) {
      if (s > window.max_shift) return;
      // d(y, w_s) >= e^{-(bound + 1)}  iff  agreement <= bound.
      const Agreement a = agreement(y, anchor, bound[s] + 1);
      if (a.length > bound[s]) {
        rep.rhs_holds = false;
        rep.rhs_witness = EquivalenceReport::RhsWitness{n, s, a.length};
      } else if (!a.resolved && !window.clip_to_prefix) {
        ++rep.undetermined;
      }
    };
    if (anchors.empty()) {
      for (std::size_t s = 1; s <= window.max_shift && rep.rhs_holds; ++s) {
        if (y.known_length() < s) break;
        check(SymbolWord::periodic(w.alphabet(), y.take(s)), s);
      }
    } else {
      for (const auto& a : anchors) {
        check(a.state, a.period);
        if (!rep.rhs_holds) break;
      }
    }
  }
  rep.forward_ok = !rep.lhs_holds || rep.rhs_holds;
  rep.converse_ok = !rep.rhs_holds || rep.lhs_holds;
  return rep;
}

}  // namespace aperiodic::bernoulli
