#pragma once

// One-sided full shift on n symbols with d(w, w') = e^{-i}, i the first
// index (from 1) where the words differ. Every metric decision is made on
// integer indices.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aperiodic/periodic.hpp"

namespace aperiodic::bernoulli {

using Symbol = std::uint8_t;

/// Finite prefix followed by an optional periodic tail. Without a tail the
/// word is a cylinder: reading past the prefix throws UnresolvedComparison.
/// Shifting shares the underlying storage.
class SymbolWord {
 public:
  static SymbolWord periodic(unsigned alphabet, std::vector<Symbol> block);
  static SymbolWord eventually_periodic(unsigned alphabet, std::vector<Symbol> prefix,
                                        std::vector<Symbol> tail);
  static SymbolWord finite(unsigned alphabet, std::vector<Symbol> symbols);

  unsigned alphabet() const noexcept { return data_->alphabet; }
  bool is_finite() const noexcept { return data_->tail.empty(); }
  /// Symbols still readable from the current offset (max for infinite words).
  std::size_t known_length() const noexcept;
  /// Prefix length left before the periodic tail starts.
  std::size_t prefix_remaining() const noexcept;
  std::size_t tail_period() const noexcept { return data_->tail.size(); }

  /// w(i), i >= 1.
  Symbol at(std::size_t i) const;
  SymbolWord shifted(std::size_t k = 1) const;

  /// Symbols w(1..count).
  std::vector<Symbol> take(std::size_t count) const;

  /// "prefix|tail" over digits; a finite word has no '|'.
  std::string to_string() const;
  static SymbolWord parse(unsigned alphabet, const std::string& text);

 private:
  struct Data {
    unsigned alphabet;
    std::vector<Symbol> prefix;
    std::vector<Symbol> tail;
  };
  SymbolWord(std::shared_ptr<const Data> data, std::size_t offset) : data_(std::move(data)), offset_(offset) {}

  std::shared_ptr<const Data> data_;
  std::size_t offset_ = 0;
};

/// First index where the words differ, or nullopt if they are equal.
/// Throws UnresolvedComparison if the answer depends on unknown symbols.
std::optional<std::size_t> first_disagreement(const SymbolWord& a, const SymbolWord& b);

/// Number of leading symbols on which the words agree, capped at limit.
/// Stops early (and reports resolved = false) where a finite word ends.
struct Agreement {
  std::size_t length = 0;
  bool resolved = true;
};
Agreement agreement(const SymbolWord& a, const SymbolWord& b, std::size_t limit);

double word_distance(const SymbolWord& a, const SymbolWord& b);

/// Smallest i >= 1 with e^{-i} < eps: d < eps iff the words agree on the
/// first threshold_index(eps) - 1 symbols.
std::size_t threshold_index(double epsilon);

class BernoulliShift {
 public:
  using State = SymbolWord;

  explicit BernoulliShift(unsigned alphabet);

  unsigned alphabet() const noexcept { return n_; }
  double distance(const State& a, const State& b) const { return word_distance(a, b); }
  State step(const State& x) const { return x.shifted(1); }
  double diameter_bound() const;

  bool closer_than(const State& a, const State& b, double epsilon) const;
  /// Equal keys iff d_l(a, b) < eps.
  std::string separation_key(const State& x, double epsilon, std::size_t l) const;

 private:
  unsigned n_;
};

/// Lexicographic list of all words of a given length.
std::vector<std::vector<Symbol>> all_blocks(unsigned alphabet, std::size_t length);

/// De Bruijn cycle of order k: every length-k block occurs exactly once
/// cyclically.
std::vector<Symbol> de_bruijn(unsigned alphabet, std::size_t order);

/// The n^k shifts of the periodic de Bruijn word of order k; every
/// length-k block starts exactly one candidate.
std::vector<SymbolWord> de_bruijn_candidates(unsigned alphabet, std::size_t order);

SymbolWord random_word(unsigned alphabet, std::size_t prefix_length, std::size_t tail_length,
                       std::uint64_t seed);

/// phi : N_0 -> N, non-decreasing.
using PhiFunction = std::function<std::uint64_t(std::size_t)>;

/// ceil(n^{delta l}) = ceil(e^{delta log(n) l}).
PhiFunction phi_exponential(unsigned alphabet, double delta);
PhiFunction phi_constant(std::uint64_t value);

/// max{j >= 0 : phi(j) <= s}, searched up to max_j.
std::optional<std::size_t> phi_inverse(const PhiFunction& phi, std::uint64_t s, std::size_t max_j = 4096);

/// Checked triples (n, s, l): n <= max_time, 1 <= s <= max_shift,
/// l0 <= l <= max_length. For finite words clip_to_prefix keeps only the
/// triples the prefix determines.
struct WordWindow {
  std::size_t max_time = 0;
  std::size_t max_shift = 0;
  std::size_t max_length = 0;
  bool clip_to_prefix = true;
};

struct AperiodicityCertificate {
  enum class Verdict { HoldsOnWindow, Violated, Inconclusive };
  struct Triple {
    std::size_t time = 0;
    std::size_t shift = 0;
    std::size_t length = 0;
  };

  std::string word;
  std::vector<std::uint64_t> phi_table;  // phi(0..max_length)
  std::size_t l0 = 0;
  WordWindow window;
  Verdict verdict = Verdict::HoldsOnWindow;
  std::optional<Triple> witness;
  std::uint64_t checked = 0;
  std::uint64_t undetermined = 0;

  bool holds() const noexcept { return verdict == Verdict::HoldsOnWindow; }
};

/// d(T^n w, T^{n+s} w) <= e^{-(l+1)}  =>  s >= phi(l) on the window.
AperiodicityCertificate is_phi_aperiodic(const SymbolWord& w, const PhiFunction& phi, std::size_t l0,
                                         const WordWindow& window);

struct SearchOptions {
  std::uint64_t node_budget = 50'000'000;
  std::optional<std::uint64_t> seed;  // permutes the symbol order
};

struct SearchResult {
  std::optional<SymbolWord> word;  // finite word of the target length
  std::size_t l0 = 0;
  std::uint64_t nodes = 0;
  std::size_t deepest = 0;
  bool exhausted = false;   // the whole tree died
  bool budget_hit = false;  // stopped by the node budget

  bool found() const noexcept { return word.has_value(); }
};

/// Depth-first extension of a prefix, pruning exactly on the violations of
/// the phi-condition that the prefix already determines.
SearchResult phi_aperiodic_search(unsigned alphabet, const PhiFunction& phi, std::size_t l0,
                                  std::size_t target_length, const SearchOptions& options = {});

/// Smallest l0 <= max_l0 whose search reaches depth 4 l0 and then the
/// target length; nullopt-word result if none does.
SearchResult phi_aperiodic_search_auto(unsigned alphabet, const PhiFunction& phi, std::size_t target_length,
                                       std::size_t max_l0 = 16, const SearchOptions& options = {});

struct PeriodicClosing {
  SymbolWord anchor;           // w_s
  std::size_t agreement = 0;   // leading symbols shared by w and w_s
  bool holds = false;          // agreement >= s + l, i.e. d(w, w_s) <= e^{-(s+l+1)}
};

/// w_s = (w(1..s))^inf. Throws PreconditionFailed unless d(w, T^s w) <= e^{-(l+1)}.
PeriodicClosing periodic_closing_witness(const SymbolWord& w, std::size_t s, std::size_t l);

/// Complete registry of periodic words: for period s the only candidate
/// that can be close to x is (x(1..s))^inf.
class BernoulliRegistry {
 public:
  explicit BernoulliRegistry(const BernoulliShift& sys) : sys_(&sys) {}
  std::vector<PeriodicPoint<BernoulliShift>> candidates(const SymbolWord& x, std::size_t period) const;

 private:
  const BernoulliShift* sys_;
};

/// Every block of length s <= max_period repeated forever, labelled with
/// period s (primitive only when s is its minimal period).
std::vector<PeriodicPoint<BernoulliShift>> all_periodic_words(const BernoulliShift& sys, std::size_t max_period);

struct EquivalenceReport {
  bool lhs_holds = false;  // phi-aperiodic with l0 = 0 on the window
  bool rhs_holds = false;  // distance bound for all anchors and times
  std::optional<AperiodicityCertificate::Triple> lhs_witness;
  struct RhsWitness {
    std::size_t time = 0;
    std::size_t period = 0;
    std::size_t agreement = 0;
  };
  std::optional<RhsWitness> rhs_witness;
  std::uint64_t undetermined = 0;
  bool forward_ok = true;   // lhs => rhs
  bool converse_ok = true;  // rhs => lhs
};

/// Both directions of the equivalence between phi-aperiodicity and the
/// bound d(T^n w, w_s) >= e^{-(s + phi^{-1}(s) + 1)} over anchors of
/// period <= window.max_shift. Anchors come from a list or, when it is
/// empty, from the complete registry.
EquivalenceReport verify_periodic_distance_equivalence(const SymbolWord& w, const PhiFunction& phi,
                           std::span<const PeriodicPoint<BernoulliShift>> anchors, const WordWindow& window);

}  // namespace aperiodic::bernoulli
