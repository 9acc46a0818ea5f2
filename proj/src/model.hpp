#ifndef UDSEQ_SRC_MODEL_HPP
#define UDSEQ_SRC_MODEL_HPP

#include "udseq/actions.hpp"
#include "udseq/bernoulli.hpp"
#include "udseq/experiment.hpp"
#include "udseq/products.hpp"

// Builders for the [model] section, shared by validation and execution.
namespace udseq::detail {

/// `model.action`, or `translation(<group>; gens=<generators>)`.
std::string model_action_text(const ExperimentConfig& cfg);
ActionSpec model_action(const ExperimentConfig& cfg);
ProbabilitySequence model_law(const ExperimentConfig& cfg);
/// `model.start`, or the identity of the action's space.
GroupElement model_start(const ExperimentConfig& cfg, const ActionSpec& action);
ProductOrder model_order(const ExperimentConfig& cfg);

}  // namespace udseq::detail

#endif  // UDSEQ_SRC_MODEL_HPP
