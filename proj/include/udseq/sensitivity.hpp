#ifndef UDSEQ_SENSITIVITY_HPP
#define UDSEQ_SENSITIVITY_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "udseq/actions.hpp"

namespace udseq {

struct SensitivityProbeConfig {
  std::vector<double> beta_levels{0.25, 0.125};        // candidate separation levels
  std::vector<double> delta_ladder{0.1, 0.01, 0.001, 1e-4};  // strictly decreasing, positive
  std::size_t grid_points = 16;
  std::size_t random_points = 16;
  std::size_t word_count = 64;        // random long words
  std::size_t max_word_length = 64;
  std::size_t exhaustive_length = 4;  // all words up to this length are also tried
  std::uint64_t seed = 0;

  /// Throws std::invalid_argument on an empty or non-decreasing ladder,
  /// non-positive levels or a zero budget.
  void validate() const;
};

/// The worst separation found for one base point x at one resolution delta.
struct SeparationRecord {
  GroupElement x;
  GroupElement y;
  double delta = 0.0;
  double initial_distance = 0.0;
  double worst_separation = 0.0;  // max over sampled word prefixes of d(Phi_w x, Phi_w y)
  Word word;                      // prefix achieving worst_separation
};

enum class SensitivityOutcome { sensitive_witnessed, non_sensitive_at_resolution, inconclusive };
std::string to_string(SensitivityOutcome o);

/// Verdict of a finite search. `non_sensitive_at_resolution` only says that
/// no sampled pair separated at the tested resolutions; it is never a proof.
struct SensitivityVerdict {
  SensitivityOutcome outcome = SensitivityOutcome::inconclusive;
  double beta = 0.0;                        // set for sensitive_witnessed
  std::vector<SeparationRecord> evidence;   // one per (base point, delta)
  std::vector<SeparationRecord> witnesses;  // records with separation ≥ beta
  /// Largest worst separation per ladder entry.
  std::vector<double> max_separation;
};

SensitivityVerdict probe_sensitivity(const ActionSpec& action, const SensitivityProbeConfig& cfg);

/// d(Phi_w x, Phi_w y), for replaying a witness.
double replay_separation(const ActionSpec& action, const SeparationRecord& r);

/// The sampled words: every word up to the exhaustive length and `count`
/// seeded random words of length up to `max_length`.
std::vector<Word> sample_words(const ActionSpec& action, std::size_t exhaustive_length, std::size_t count,
                               std::size_t max_length, std::uint64_t seed);

/// Finite-resolution estimate of E_k on a torus of dimension 1 or 2,
/// indexed by grid cells of side 1/resolution (row-major in d = 2).
struct EkEstimate {
  int k = 1;
  int resolution = 1;
  int dimension = 1;
  std::size_t word_budget = 0;
  std::size_t max_word_length = 0;
  std::vector<bool> member;  // cell c kept: no sampled pair in c separated to ≥ 1/k

  std::size_t count() const;
  /// Cell containing x.
  std::size_t cell_of(const TorusPoint& x) const;
};

/// Keeps the cells where no sampled pair of points separated to ≥ 1/k under
/// sampled words. An over-approximation of E_k restricted to the sampled
/// words.
EkEstimate estimate_Ek(const ActionSpec& action, int k, int resolution, std::size_t word_budget,
                       std::size_t max_word_length = 64, std::uint64_t seed = 0);

/// Fraction of (kept cell, generator) pairs whose image cell centre lands in
/// a kept cell.
double ek_forward_invariance(const ActionSpec& action, const EkEstimate& e);

/// Among cells outside the estimate, the fraction for which some sampled
/// word maps the cell centre into a kept cell.
double ek_hit_rate(const ActionSpec& action, const EkEstimate& e, std::size_t word_budget, std::uint64_t seed = 0);

struct ModulusEntry {
  double epsilon = 0.0;
  double delta = 0.0;  // largest tested delta with no separation to ≥ epsilon; 0 if none
};

/// For each epsilon, the largest tested delta such that no sampled pair at
/// distance < delta separated to ≥ epsilon under sampled words.
std::vector<ModulusEntry> equicontinuity_modulus(const ActionSpec& action, const std::vector<double>& epsilons,
                                                 std::size_t word_budget, std::size_t max_word_length = 64,
                                                 std::uint64_t seed = 0);

}  // namespace udseq

#endif  // UDSEQ_SENSITIVITY_HPP
