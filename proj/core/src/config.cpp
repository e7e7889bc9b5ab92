#include "quintel/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quintel/errors.hpp"

namespace quintel::app {
namespace {

using json = nlohmann::json;

[[noreturn]] void fail(const std::string& message) {
    throw ValidationError("config: " + message);
}

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end())
            fail("unknown key \"" + std::string(where) + key + "\"");
    }
}

const json& require(const json& obj, std::string_view where, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail("missing key \"" + std::string(where) + key + "\"");
    return *it;
}

std::string require_string(const json& obj, std::string_view where, const char* key) {
    const json& v = require(obj, where, key);
    if (!v.is_string()) fail("key \"" + std::string(where) + key + "\" must be a string");
    return v.get<std::string>();
}

double require_number(const json& obj, std::string_view where, const char* key) {
    const json& v = require(obj, where, key);
    if (!v.is_number()) fail("key \"" + std::string(where) + key + "\" must be a number");
    return v.get<double>();
}

}  // namespace

Config Config::parse(std::string_view json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("malformed JSON: ") + e.what());
    }
    if (!root.is_object()) fail("top level must be a JSON object");
    reject_unknown(root, "",
                   {"spread_policy", "combination_rule", "scoring_weights", "triage_policy",
                    "reliability_thresholds", "paths"});

    Config cfg;

    const std::string spread = require_string(root, "", "spread_policy");
    if (spread == "nearest") {
        cfg.spread_policy = fusion::SpreadPolicy::nearest;
    } else if (spread == "extremes-wide") {
        cfg.spread_policy = fusion::SpreadPolicy::extremes_wide;
    } else {
        fail("spread_policy must be nearest|extremes-wide");
    }

    const std::string rule = require_string(root, "", "combination_rule");
    if (rule == "noisy-or") {
        cfg.combination_rule = fusion::CombinationRule::noisy_or;
    } else if (rule == "odds") {
        cfg.combination_rule = fusion::CombinationRule::odds_product;
    } else {
        fail("combination_rule must be noisy-or|odds");
    }

    const json& weights = require(root, "", "scoring_weights");
    if (!weights.is_object()) fail("scoring_weights must be an object");
    reject_unknown(weights, "scoring_weights.",
                   {"trusted", "reliability", "corroboration", "vetted_human", "detail",
                    "freshness", "freshness_half_life_days"});
    cfg.scoring_weights.trusted = require_number(weights, "scoring_weights.", "trusted");
    cfg.scoring_weights.reliability = require_number(weights, "scoring_weights.", "reliability");
    cfg.scoring_weights.corroboration =
        require_number(weights, "scoring_weights.", "corroboration");
    cfg.scoring_weights.vetted_human = require_number(weights, "scoring_weights.", "vetted_human");
    cfg.scoring_weights.detail = require_number(weights, "scoring_weights.", "detail");
    cfg.scoring_weights.freshness = require_number(weights, "scoring_weights.", "freshness");
    cfg.scoring_weights.freshness_half_life_seconds =
        require_number(weights, "scoring_weights.", "freshness_half_life_days") * 86400.0;
    try {
        cfg.scoring_weights.validate();
    } catch (const DomainError& e) {
        fail(e.what());
    }

    const json& policy = require(root, "", "triage_policy");
    if (!policy.is_object()) fail("triage_policy must be an object");
    reject_unknown(policy, "triage_policy.", {"mode", "weights"});
    const std::string mode = require_string(policy, "triage_policy.", "mode");
    if (mode == "confidence-first") {
        cfg.triage_policy = triage::TriagePolicy::confidence_first();
        if (policy.contains("weights")) fail("triage_policy.weights applies only to weighted mode");
    } else if (mode == "cost-first") {
        cfg.triage_policy = triage::TriagePolicy::cost_first();
        if (policy.contains("weights")) fail("triage_policy.weights applies only to weighted mode");
    } else if (mode == "weighted") {
        const json& pw = require(policy, "triage_policy.", "weights");
        if (!pw.is_object()) fail("triage_policy.weights must be an object");
        reject_unknown(pw, "triage_policy.weights.", {"seriousness", "confidence", "cost"});
        cfg.triage_policy = triage::TriagePolicy::weighted(
            require_number(pw, "triage_policy.weights.", "seriousness"),
            require_number(pw, "triage_policy.weights.", "confidence"),
            require_number(pw, "triage_policy.weights.", "cost"));
    } else {
        fail("triage_policy.mode must be confidence-first|cost-first|weighted");
    }
    try {
        cfg.triage_policy.validate();
    } catch (const DomainError& e) {
        fail(e.what());
    }

    const json& thresholds = require(root, "", "reliability_thresholds");
    if (!thresholds.is_object()) fail("reliability_thresholds must be an object");
    reject_unknown(thresholds, "reliability_thresholds.",
                   {"min_history", "grade_a", "grade_b", "grade_c", "grade_d"});
    const json& min_history = require(thresholds, "reliability_thresholds.", "min_history");
    if (!min_history.is_number_integer())
        fail("reliability_thresholds.min_history must be an integer");
    cfg.reliability_thresholds.min_history = min_history.get<std::int64_t>();
    cfg.reliability_thresholds.grade_a =
        require_number(thresholds, "reliability_thresholds.", "grade_a");
    cfg.reliability_thresholds.grade_b =
        require_number(thresholds, "reliability_thresholds.", "grade_b");
    cfg.reliability_thresholds.grade_c =
        require_number(thresholds, "reliability_thresholds.", "grade_c");
    cfg.reliability_thresholds.grade_d =
        require_number(thresholds, "reliability_thresholds.", "grade_d");
    try {
        cfg.reliability_thresholds.validate();
    } catch (const DomainError& e) {
        fail(e.what());
    }

    const json& paths = require(root, "", "paths");
    if (!paths.is_object()) fail("paths must be an object");
    reject_unknown(paths, "paths.", {"event_log", "trusted_list"});
    cfg.event_log_path = require_string(paths, "paths.", "event_log");
    cfg.trusted_list_path = require_string(paths, "paths.", "trusted_list");
    if (cfg.event_log_path.empty()) fail("paths.event_log must not be empty");
    if (cfg.trusted_list_path.empty()) fail("paths.trusted_list must not be empty");

    return cfg;
}

Config Config::load_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open config file \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

}  // namespace quintel::app
