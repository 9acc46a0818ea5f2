#ifndef UDSEQ_BERNOULLI_HPP
#define UDSEQ_BERNOULLI_HPP

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "udseq/actions.hpp"
#include "udseq/random.hpp"

namespace udseq {

enum class LawKind { geometric, finite_uniform, custom };

/// A probability sequence (p_n) on the positive integers. The infinity
/// token has probability zero and is never sampled.
///
/// Config strings: `geometric:0.5`, `uniform:K`, `custom:[p1,p2,...];tail=q`.
/// A custom law puts the listed masses on 1..h and spreads the remaining
/// mass geometrically with ratio q over h+1, h+2, ...
class ProbabilitySequence {
 public:
  /// Inverse-CDF tables stop at the first n with p_n below this value;
  /// later indices are drawn from the closed-form geometric tail.
  static constexpr double kTableCutoff = 1e-15;

  static ProbabilitySequence geometric(double ratio);
  static ProbabilitySequence finite_uniform(std::uint64_t k);
  static ProbabilitySequence custom(std::vector<double> head, double tail_ratio);

  static ProbabilitySequence parse(std::string_view text);
  std::string to_string() const;

  LawKind kind() const noexcept { return kind_; }

  /// True iff p_n > 0 for every n.
  bool conforming() const noexcept { return conforming_; }

  double probability(std::uint64_t n) const;
  double probability(Symbol s) const { return s.is_infinite() ? 0.0 : probability(s.index()); }

  /// Total mass of the indices strictly greater than n.
  double mass_above(std::uint64_t n) const;

  /// Draws n with probability p_n.
  std::uint64_t sample(CounterRng& rng) const;

 private:
  ProbabilitySequence() = default;
  void build_table();

  LawKind kind_ = LawKind::geometric;
  std::vector<double> head_;  // explicit masses of 1..h
  double tail_mass_ = 0.0;    // mass of h+1, h+2, ...
  double tail_ratio_ = 0.0;
  bool conforming_ = true;
  std::vector<double> cdf_;   // cumulative masses of 1..table size
  std::string source_;
};

inline std::uint64_t sample_index(const ProbabilitySequence& p, CounterRng& rng) { return p.sample(rng); }

/// A point r of the two-sided sequence space together with a position
/// offset: read(i) returns r_{origin + i}.
///
/// Coordinates are derived from (key, absolute coordinate) by a counter
/// based generator, so the window behaves as a fixed point of the product
/// space: reading a coordinate twice, or shifting forward and back, always
/// returns the same value. Copies are cheap and share the law.
class ShiftWindow {
 public:
  ShiftWindow(ProbabilitySequence law, std::uint64_t key, std::int64_t origin = 0);

  Symbol read(std::int64_t position) const;

  /// The coordinates r_{-k}, ..., r_k around the current origin.
  std::vector<Symbol> entries(std::int64_t radius) const;

  /// Replaces positions first, first+1, ... (relative to the current
  /// origin) with explicit symbols, which may include the infinity token.
  ShiftWindow with_entries(std::int64_t first, std::vector<Symbol> symbols) const;

  void advance(std::int64_t steps = 1) noexcept { origin_ += steps; }

  std::int64_t origin() const noexcept { return origin_; }
  std::uint64_t key() const noexcept { return key_; }
  const ProbabilitySequence& law() const noexcept { return *law_; }

 private:
  std::shared_ptr<const ProbabilitySequence> law_;
  std::uint64_t key_;
  std::int64_t origin_;
  std::shared_ptr<const std::vector<Symbol>> pinned_;
  std::int64_t pinned_first_ = 0;  // absolute coordinate of pinned_->front()
};

/// The left shift: read(shift(w), n) == read(w, n + 1).
ShiftWindow shift(const ShiftWindow& w);

/// The cylinder {r : r_{start + j} = symbols[j]} (positions relative to the
/// window origin).
struct Cylinder {
  std::int64_t start = 0;
  std::vector<std::uint64_t> symbols;

  Cylinder(std::int64_t start, std::vector<std::uint64_t> symbols);

  /// Parses `start:s1 s2 ...`, or `s1 s2 ...` with start 0.
  static Cylinder parse(std::string_view text);
  std::string to_string() const;
};

bool matches(const Cylinder& c, const ShiftWindow& w);

/// Product-measure mass of the cylinder: the product of p_{symbol}.
double cylinder_measure(const ProbabilitySequence& p, const Cylinder& c);

}  // namespace udseq

#endif  // UDSEQ_BERNOULLI_HPP
