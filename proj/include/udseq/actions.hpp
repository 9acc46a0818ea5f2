#ifndef UDSEQ_ACTIONS_HPP
#define UDSEQ_ACTIONS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "udseq/groups.hpp"

namespace udseq {

/// A generator index: a positive integer or the point at infinity of the
/// one-point compactification, which always acts as the identity map.
class Symbol {
 public:
  /// Throws std::invalid_argument for index 0.
  explicit Symbol(std::uint64_t index);

  static constexpr Symbol infinity() noexcept { return Symbol(); }

  constexpr bool is_infinite() const noexcept { return value_ == 0; }

  /// Positive index; throws for the infinity token.
  std::uint64_t index() const;

  std::string to_string() const;

  /// Accepts a positive integer or `inf`.
  static Symbol parse(std::string_view text);

  bool operator==(const Symbol&) const = default;

 private:
  constexpr Symbol() noexcept = default;
  std::uint64_t value_ = 0;
};

/// Finite nonempty sequence of symbols (r_1, ..., r_n). The associated map
/// applies r_1 first and r_n last.
class Word {
 public:
  explicit Word(std::vector<Symbol> symbols);
  Word(std::initializer_list<std::uint64_t> indices);

  static Word repeat(std::uint64_t index, std::size_t length);

  const std::vector<Symbol>& symbols() const noexcept { return symbols_; }
  std::size_t size() const noexcept { return symbols_.size(); }

  /// Comma-separated form, e.g. `1,2,inf`.
  std::string to_string() const;

  bool operator==(const Word&) const = default;

 private:
  std::vector<Symbol> symbols_;
};

/// Concatenation: the result applies `u` first, then `v`.
Word concat(const Word& u, const Word& v);

enum class ActionKind { translation, rotation_family, doubling_fixture };

/// How indices beyond the generator list are resolved: `cycle` maps index n
/// to generator ((n-1) mod K) + 1, `strict` rejects them.
enum class IndexPolicy { cycle, strict };

/// A continuous action on a compact metric space X together with its
/// invariant measure.
///
/// Config strings:
///   translation(torus:1; gens=0.618034,0.414214)
///   translation(su2; gens=haar:2)          generators drawn from Haar measure
///   translation(cyclic:6; gens=1; strict)  strict index policy
///   rotation-family(angles=0.414214,0.618034)
///   doubling-fixture
///
/// Translation actions act on X = G by right multiplication x -> x * z_n.
/// The doubling fixture x -> 2x mod 1 is not invertible; it exists only as
/// a sensitive contrast case for the sensitivity probes.
class ActionSpec {
 public:
  static ActionSpec translation(GeneratorSet generators, IndexPolicy policy = IndexPolicy::cycle);
  static ActionSpec rotation_family(const std::vector<double>& angles, IndexPolicy policy = IndexPolicy::cycle);
  static ActionSpec doubling_fixture();

  /// Parses a config string. `seed` feeds `gens=haar:K` sampling.
  static ActionSpec parse(std::string_view text, std::uint64_t seed = 0);

  ActionKind kind() const noexcept { return kind_; }

  /// The space X.
  const GroupSpec& space() const noexcept { return generators_.spec; }

  const GeneratorSet& generators() const noexcept { return generators_; }
  std::size_t generator_count() const noexcept { return generators_.elements.size(); }
  IndexPolicy policy() const noexcept { return policy_; }

  bool invertible() const noexcept { return kind_ != ActionKind::doubling_fixture; }

  /// True when every generator map is an isometry of X.
  bool isometric() const noexcept { return invertible(); }

  /// Name of the invariant measure ("haar" or "lebesgue").
  std::string invariant_measure() const;

  /// Zero-based generator slot for a finite symbol under the index policy.
  std::size_t resolve(Symbol s) const;

  /// Throws std::invalid_argument naming `who` for non-invertible actions.
  void require_invertible(std::string_view who) const;

  std::string to_string() const;

 private:
  ActionSpec(ActionKind kind, GeneratorSet generators, IndexPolicy policy)
      : kind_(kind), generators_(std::move(generators)), policy_(policy) {}

  ActionKind kind_;
  GeneratorSet generators_;
  IndexPolicy policy_;
  std::string source_;
};

/// Phi_index(x); the infinity token returns x unchanged.
GroupElement apply_generator(const ActionSpec& action, Symbol index, const GroupElement& x);

/// Phi_{r_n} o ... o Phi_{r_1}(x).
GroupElement apply_word(const ActionSpec& action, const Word& word, GroupElement x);

}  // namespace udseq

#endif  // UDSEQ_ACTIONS_HPP
