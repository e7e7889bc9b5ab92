#pragma once

#include <string>
#include <string_view>

#include "quintel/fusion.hpp"
#include "quintel/sources.hpp"
#include "quintel/triage.hpp"

namespace quintel::app {

/// Runtime configuration. Every key is required and validated at load; unknown
/// keys are rejected. Operational defaults live in the shipped config file,
/// not in code.
struct Config {
    fusion::SpreadPolicy spread_policy = fusion::SpreadPolicy::nearest;
    fusion::CombinationRule combination_rule = fusion::CombinationRule::noisy_or;
    triage::ScoringWeights scoring_weights;
    triage::TriagePolicy triage_policy;
    sources::ReliabilityThresholds reliability_thresholds;
    std::string event_log_path;
    std::string trusted_list_path;

    static Config parse(std::string_view json_text);
    static Config load_file(const std::string& path);
};

}  // namespace quintel::app
