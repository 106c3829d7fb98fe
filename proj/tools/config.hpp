#pragma once

#include <string>

#include "housedict/experiment.hpp"

namespace housedict::cli {

/// Parses an experiment configuration (YAML). Unknown keys are rejected.
/// Throws ConfigError with the source name in the message.
ExperimentSpec parse_experiment_spec(const std::string& text,
                                     const std::string& source = "<config>");

ExperimentSpec load_experiment_spec(const std::string& path);

}  // namespace housedict::cli
