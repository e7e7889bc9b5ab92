// quintel: confidence fusion for shared threat reports.
//
// Subcommands: ingest, fuse, triage, term, feedback, sources, demo, simulate,
// replay, serve. Configuration comes from --config or $QUINTEL_CONFIG.

#include <cstdio>
#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "quintel/config.hpp"
#include "quintel/demo.hpp"
#include "quintel/engine.hpp"
#include "quintel/errors.hpp"
#include "quintel/estimative.hpp"
#include "quintel/service.hpp"

namespace {

using namespace quintel;

std::string resolve_config_path(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    if (const char* env = std::getenv("QUINTEL_CONFIG"); env && *env) return env;
    throw Error("no configuration: pass --config <file> or set QUINTEL_CONFIG");
}

Timestamp parse_time_flag(const std::string& text, const char* flag) {
    const auto parsed = try_parse_rfc3339(text);
    if (!parsed) throw Error(std::string(flag) + " must be an RFC 3339 timestamp, got \"" + text +
                             "\"");
    return *parsed;
}

std::optional<fusion::CombinationRule> parse_rule(const std::string& text) {
    if (text.empty()) return std::nullopt;
    if (text == "noisy-or") return fusion::CombinationRule::noisy_or;
    if (text == "odds") return fusion::CombinationRule::odds_product;
    throw Error("--rule must be noisy-or|odds");
}

std::optional<triage::TriagePolicy> parse_policy(const std::string& text,
                                                 const app::Config& config) {
    if (text.empty()) return std::nullopt;
    if (text == "confidence-first") return triage::TriagePolicy::confidence_first();
    if (text == "cost-first") return triage::TriagePolicy::cost_first();
    if (text == "weighted") {
        if (config.triage_policy.mode != triage::TriagePolicy::Mode::weighted)
            throw Error("--policy weighted requires weighted mode (with weights) in the config");
        return config.triage_policy;
    }
    throw Error("--policy must be confidence-first|cost-first|weighted");
}

int run(int argc, char** argv) {
    CLI::App cli{"confidence fusion engine for shared cyber threat reports"};
    cli.require_subcommand(1);

    std::string config_flag;
    cli.add_option("--config", config_flag, "path to the JSON config file")
        ->envname("QUINTEL_CONFIG");

    // ingest <file>
    auto* ingest = cli.add_subcommand("ingest", "parse and thread a JSONL report batch");
    std::string ingest_path;
    ingest->add_option("file", ingest_path, "JSONL file, one report object per line")
        ->required();

    // fuse <incident_id> [--rule]
    auto* fuse = cli.add_subcommand("fuse", "fuse an incident's independent evidence");
    std::string fuse_incident;
    std::string fuse_rule;
    fuse->add_option("incident_id", fuse_incident)->required();
    fuse->add_option("--rule", fuse_rule, "noisy-or|odds (default from config)");
    bool fuse_json = false;
    fuse->add_flag("--json", fuse_json, "emit JSON instead of aligned text");

    // triage [--policy] [--now] [--format]
    auto* triage_cmd = cli.add_subcommand("triage", "rank incidents for response");
    std::string triage_policy;
    std::string triage_now;
    std::string triage_format = "jsonl";
    triage_cmd->add_option("--policy", triage_policy,
                           "confidence-first|cost-first|weighted (default from config)");
    triage_cmd->add_option("--now", triage_now, "evaluation time, RFC 3339 (default: wall clock)");
    triage_cmd->add_option("--format", triage_format, "jsonl|text")
        ->check(CLI::IsMember({"jsonl", "text"}));

    // term <p> [--row]
    auto* term = cli.add_subcommand("term", "map a probability onto the estimative scale");
    double term_p = 0.0;
    std::string term_row;
    term->add_option("probability", term_p, "probability fraction in [0,1]")->required();
    term->add_option("--row", term_row, "likelihood|probability (default: both rows)")
        ->check(CLI::IsMember({"likelihood", "probability"}));

    // feedback <report_id> <outcome> [--at]
    auto* feedback = cli.add_subcommand("feedback", "record a confirmed/refuted outcome");
    std::string feedback_report;
    std::string feedback_outcome;
    std::string feedback_at;
    feedback->add_option("report_id", feedback_report)->required();
    feedback->add_option("outcome", feedback_outcome)
        ->required()
        ->check(CLI::IsMember({"confirmed", "refuted"}));
    feedback->add_option("--at", feedback_at, "outcome time, RFC 3339 (default: wall clock)");

    // sources [--reload-trusted]
    auto* sources_cmd = cli.add_subcommand("sources", "export source profiles as CSV");
    bool reload_trusted = false;
    sources_cmd->add_flag("--reload-trusted", reload_trusted,
                          "re-read the trusted list file first (logged)");

    // demo <tables|scale>
    auto* demo = cli.add_subcommand("demo", "render reference tables");
    std::string demo_what;
    demo->add_option("what", demo_what, "tables: worked combination tables; scale: estimative CSV")
        ->required()
        ->check(CLI::IsMember({"tables", "scale"}));

    // simulate echo --sources N --duplicates K --rule R
    auto* simulate = cli.add_subcommand("simulate", "synthetic scenarios");
    std::string simulate_what;
    simulate->add_option("what", simulate_what)->required()->check(CLI::IsMember({"echo"}));
    int sim_sources = 3;
    int sim_duplicates = 5;
    std::string sim_rule = "noisy-or";
    simulate->add_option("--sources", sim_sources, "independent sources (default 3)");
    simulate->add_option("--duplicates", sim_duplicates, "same-source echoes (default 5)");
    simulate->add_option("--rule", sim_rule, "noisy-or|odds");

    // replay <log>
    auto* replay = cli.add_subcommand("replay", "rebuild state from an event log and summarize");
    std::string replay_path;
    replay->add_option("log", replay_path, "event log (JSONL) to fold")->required();

    // serve [--host] [--port]
    auto* serve = cli.add_subcommand("serve", "run the HTTP service");
    std::string serve_host = "127.0.0.1";
    int serve_port = 8787;
    serve->add_option("--host", serve_host);
    serve->add_option("--port", serve_port);

    CLI11_PARSE(cli, argc, argv);

    // stateless commands need no config
    if (demo->parsed()) {
        std::cout << (demo_what == "tables" ? app::render_demo_tables()
                                            : estimative::scale_csv());
        return 0;
    }

    if (term->parsed()) {
        const auto& band = estimative::band_for_probability(term_p);
        std::printf("band %d  [%.0f%%, %.0f%%%c\n", band.index, band.lo * 100, band.hi * 100,
                    band.index == 7 ? ']' : ')');
        if (term_row.empty() || term_row == "likelihood")
            std::printf("likelihood   %s\n", std::string(band.likelihood_term).c_str());
        if (term_row.empty() || term_row == "probability")
            std::printf("probability  %s\n", std::string(band.probability_term).c_str());
        const auto content = estimative::content_code_for_probability(term_p);
        std::printf("admiralty    %d (%s)\n", content.code,
                    std::string(content.definition).c_str());
        return 0;
    }

    const app::Config config = app::Config::load_file(resolve_config_path(config_flag));

    if (replay->parsed()) {
        const app::Engine engine = app::Engine::replay_log(config, replay_path);
        std::printf("events   %llu\n", static_cast<unsigned long long>(engine.event_count()));
        std::printf("reports  %zu (%zu quarantined)\n", engine.store().report_count(),
                    engine.store().quarantine_size());
        std::printf("incidents");
        for (const auto& id : engine.store().incident_ids()) std::printf(" %s", id.c_str());
        std::printf("\n");
        return 0;
    }

    app::Engine engine(config);

    if (ingest->parsed()) {
        const app::IngestSummary summary = engine.ingest_file(ingest_path);
        for (const auto& error : summary.errors)
            std::fprintf(stderr, "rejected %s\n", error.c_str());
        std::printf("accepted %d quarantined %d rejected %d\n", summary.accepted,
                    summary.quarantined, summary.rejected);
        if (summary.unknown_fields > 0)
            std::printf("ignored %d unknown field(s)\n", summary.unknown_fields);
        return summary.rejected == 0 ? 0 : 1;
    }

    if (fuse->parsed()) {
        const app::FusionResult result =
            engine.fuse_incident(fuse_incident, parse_rule(fuse_rule));
        std::cout << (fuse_json ? result.to_json() + "\n" : result.render_text());
        return 0;
    }

    if (triage_cmd->parsed()) {
        const Timestamp now = triage_now.empty() ? app::Engine::system_clock()
                                                 : parse_time_flag(triage_now, "--now");
        const app::TriageResult result = engine.triage(now, parse_policy(triage_policy, config));
        std::cout << (triage_format == "text" ? result.table() : result.jsonl());
        return 0;
    }

    if (feedback->parsed()) {
        std::optional<Timestamp> at;
        if (!feedback_at.empty()) at = parse_time_flag(feedback_at, "--at");
        const auto profile = engine.feedback(
            feedback_report,
            feedback_outcome == "confirmed" ? sources::Outcome::confirmed
                                            : sources::Outcome::refuted,
            at);
        std::cout << app::profile_json(profile) << "\n";
        return 0;
    }

    if (sources_cmd->parsed()) {
        if (reload_trusted) {
            const std::size_t count = engine.reload_trusted();
            std::fprintf(stderr, "trusted list reloaded: %zu source(s)\n", count);
        }
        std::cout << engine.sources_csv();
        return 0;
    }

    if (simulate->parsed()) {
        const auto rule = parse_rule(sim_rule).value_or(config.combination_rule);
        std::cout << engine.simulate_echo(sim_sources, sim_duplicates, rule);
        return 0;
    }

    if (serve->parsed()) {
        app::Service service(engine);
        std::fprintf(stderr, "quintel service on %s:%d\n", serve_host.c_str(), serve_port);
        return service.listen(serve_host, serve_port) ? 0 : 1;
    }

    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
