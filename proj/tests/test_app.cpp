#include <doctest.h>

#include <fstream>
#include <sstream>

#include "quintel/config.hpp"
#include "quintel/demo.hpp"
#include "quintel/engine.hpp"
#include "quintel/errors.hpp"
#include "quintel/event_log.hpp"
#include "support.hpp"

using namespace quintel;
using namespace quintel::app;
using namespace quintel::testsupport;

namespace {

std::string default_config_json(const std::string& log_path, const std::string& trusted_path) {
    return R"({
      "spread_policy": "nearest",
      "combination_rule": "noisy-or",
      "scoring_weights": {
        "trusted": 1.0, "reliability": 1.0, "corroboration": 1.0,
        "vetted_human": 1.0, "detail": 1.0, "freshness": 1.0,
        "freshness_half_life_days": 30.0
      },
      "triage_policy": { "mode": "confidence-first" },
      "reliability_thresholds": {
        "min_history": 5, "grade_a": 0.95, "grade_b": 0.80, "grade_c": 0.60, "grade_d": 0.40
      },
      "paths": { "event_log": ")" +
           log_path + R"(", "trusted_list": ")" + trusted_path + R"(" }
    })";
}

struct Sandbox {
    TempDir dir;
    Config config;

    explicit Sandbox(const std::string& tag) {
        config = Config::parse(
            default_config_json(dir.file(tag + "-events.jsonl"), dir.file(tag + "-trusted.txt")));
    }

    Engine engine(const std::string& fixed_now = "2025-06-09T00:00:00Z") const {
        const Timestamp at = ts(fixed_now);
        return Engine(config, [at] { return at; });
    }
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const std::string kDataDir = QUINTEL_TEST_DATA_DIR;
const std::string kGoldenDir = QUINTEL_GOLDEN_DIR;

}  // namespace

TEST_CASE("config parses the shipped schema") {
    Sandbox box("cfg");
    CHECK(box.config.spread_policy == fusion::SpreadPolicy::nearest);
    CHECK(box.config.combination_rule == fusion::CombinationRule::noisy_or);
    CHECK(box.config.triage_policy.mode == triage::TriagePolicy::Mode::confidence_first);
    CHECK(box.config.scoring_weights.freshness_half_life_seconds ==
          doctest::Approx(30.0 * 86400.0));
    CHECK(box.config.reliability_thresholds.min_history == 5);
}

TEST_CASE("config rejects unknown keys at every level") {
    std::string text = default_config_json("a.log", "b.txt");
    text.insert(text.find("\"spread_policy\""), "\"mystery\": 1,\n");
    CHECK_THROWS_WITH_AS(Config::parse(text), doctest::Contains("mystery"), ValidationError);

    std::string nested = default_config_json("a.log", "b.txt");
    nested.insert(nested.find("\"trusted\""), "\"bonus\": 2,");
    CHECK_THROWS_WITH_AS(Config::parse(nested), doctest::Contains("scoring_weights.bonus"),
                         ValidationError);
}

TEST_CASE("config requires every key and validates values") {
    std::string missing = default_config_json("a.log", "b.txt");
    missing.replace(missing.find("\"combination_rule\": \"noisy-or\","), 33, "");
    CHECK_THROWS_WITH_AS(Config::parse(missing), doctest::Contains("combination_rule"),
                         ValidationError);

    std::string bad_rule = default_config_json("a.log", "b.txt");
    bad_rule.replace(bad_rule.find("noisy-or"), 8, "fuzzy-and");
    CHECK_THROWS_AS(Config::parse(bad_rule), ValidationError);

    std::string weighted_without_weights = default_config_json("a.log", "b.txt");
    weighted_without_weights.replace(weighted_without_weights.find("confidence-first"), 16,
                                     "weighted");
    CHECK_THROWS_WITH_AS(Config::parse(weighted_without_weights), doctest::Contains("weights"),
                         ValidationError);
}

TEST_CASE("event log round trips and rejects gaps") {
    TempDir dir;
    const std::string path = dir.file("events.jsonl");
    EventLogWriter writer(path);
    CHECK(writer.append(EventKind::report, ts("2025-06-01T00:00:00Z"), R"({"x":1})") == 1);
    CHECK(writer.append(EventKind::feedback, ts("2025-06-01T00:01:00Z"), R"({"y":2})") == 2);

    const auto entries = read_event_log_file(path);
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].kind == EventKind::report);
    CHECK(entries[1].payload == R"({"y":2})");

    // a writer reopening the log continues the sequence
    EventLogWriter again(path);
    CHECK(again.next_seq() == 3);

    std::istringstream gap(
        R"({"seq":1,"at":"2025-06-01T00:00:00Z","kind":"report","payload":{}})"
        "\n"
        R"({"seq":2,"at":"2025-06-01T00:00:01Z","kind":"report","payload":{}})"
        "\n"
        R"({"seq":4,"at":"2025-06-01T00:00:02Z","kind":"report","payload":{}})"
        "\n");
    try {
        read_event_log(gap);
        FAIL("expected CorruptLogError");
    } catch (const CorruptLogError& e) {
        CHECK(e.seq() == 4);
    }
}

TEST_CASE("ingest counts accepted, quarantined, and rejected records") {
    Sandbox box("ingest");
    Engine engine = box.engine();

    const IngestSummary summary = engine.ingest_file(kDataDir + "/fixture_reports.jsonl");
    CHECK(summary.accepted == 6);
    CHECK(summary.quarantined == 0);
    CHECK(summary.rejected == 0);
    CHECK(engine.store().report_count() == 6);
    CHECK(engine.store().incident_ids() == std::vector<std::string>{"INC-ALPHA", "INC-BRAVO"});
}

TEST_CASE("ingest isolates per-record failures") {
    Sandbox box("isolate");
    Engine engine = box.engine();
    std::istringstream in(
        R"({"report_id":"ok-1","provenance":{"kind":"initiating","incident_id":"I"},"source_id":"s","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":3}})"
        "\n"
        R"({"report_id":"bad-term","provenance":{"kind":"initiating","incident_id":"I"},"source_id":"s","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"term","term":"sketchy","row":"probability"}})"
        "\n"
        "not json at all\n"
        R"({"report_id":"ok-2","provenance":{"kind":"descendant","parent_report_id":"ok-1"},"source_id":"t","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":4}})"
        "\n");
    const IngestSummary summary = engine.ingest(in);
    CHECK(summary.accepted == 2);
    CHECK(summary.rejected == 2);
    CHECK(summary.quarantined == 0);
    REQUIRE(summary.errors.size() == 2);
    CHECK(summary.errors[0].find("line 2") != std::string::npos);
    CHECK(summary.errors[1].find("line 3") != std::string::npos);
}

TEST_CASE("ingest retries dangling descendants within the batch and across batches") {
    Sandbox box("retry");
    Engine engine = box.engine();
    std::istringstream out_of_order(
        R"({"report_id":"child","provenance":{"kind":"descendant","parent_report_id":"root"},"source_id":"s2","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":3}})"
        "\n"
        R"({"report_id":"root","provenance":{"kind":"initiating","incident_id":"INC-X"},"source_id":"s1","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":3}})"
        "\n");
    const IngestSummary first = engine.ingest(out_of_order);
    CHECK(first.accepted == 2);
    CHECK(first.quarantined == 0);

    std::istringstream dangling(
        R"({"report_id":"stray","provenance":{"kind":"descendant","parent_report_id":"nowhere"},"source_id":"s3","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":2}})"
        "\n");
    const IngestSummary second = engine.ingest(dangling);
    CHECK(second.accepted == 0);
    CHECK(second.quarantined == 1);
    CHECK(engine.store().quarantine_size() == 1);

    std::istringstream parent(
        R"({"report_id":"nowhere","provenance":{"kind":"initiating","incident_id":"INC-Y"},"source_id":"s4","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":2}})"
        "\n");
    const IngestSummary third = engine.ingest(parent);
    CHECK(third.accepted == 1);
    CHECK(engine.store().quarantine_size() == 0);
    CHECK(engine.store().incident_of("stray") == "INC-Y");
}

TEST_CASE("ingesting an empty file yields an all-zero summary") {
    Sandbox box("empty");
    Engine engine = box.engine();
    std::istringstream in("");
    const IngestSummary summary = engine.ingest(in);
    CHECK(summary.accepted == 0);
    CHECK(summary.quarantined == 0);
    CHECK(summary.rejected == 0);
}

TEST_CASE("fuse_incident reproduces the worked cases end to end") {
    Sandbox box("fuse");
    Engine engine = box.engine();
    std::istringstream in(
        R"({"report_id":"q3","provenance":{"kind":"initiating","incident_id":"INC-CASES"},"source_id":"s1","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":3},"reliability_letter":"A"})"
        "\n"
        R"({"report_id":"q1","provenance":{"kind":"descendant","parent_report_id":"q3"},"source_id":"s2","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T01:00:00Z","assertion":{"kind":"quintile","value":1},"reliability_letter":"A"})"
        "\n");
    engine.ingest(in);

    // noisy-OR keeps both asserted cells; argmax ties Q1/Q3 and breaks low
    const FusionResult noisy =
        engine.fuse_incident("INC-CASES", fusion::CombinationRule::noisy_or);
    CHECK(noisy.fused[0] == doctest::Approx(0.80));
    CHECK(noisy.fused[1] == doctest::Approx(0.28));
    CHECK(noisy.fused[2] == doctest::Approx(0.80));
    CHECK(noisy.fused[3] == doctest::Approx(0.10));
    CHECK_FALSE(noisy.annihilated);
    CHECK(noisy.quintile == 1);

    // odds wipes both asserted cells; surfaced distinctly rather than as a failure
    const FusionResult odds =
        engine.fuse_incident("INC-CASES", fusion::CombinationRule::odds_product);
    CHECK(odds.annihilated);
    CHECK(odds.fused[1] == doctest::Approx(0.0270270).epsilon(1e-5));
    CHECK(odds.fused[0] == 0.0);
    CHECK(odds.fused[2] == 0.0);
    CHECK(odds.render_text().find("annihilated") != std::string::npos);

    CHECK_THROWS_AS(engine.fuse_incident("NO-SUCH-INCIDENT", std::nullopt), LookupError);
}

TEST_CASE("single-report incidents fuse to their own spread vector") {
    Sandbox box("single");
    Engine engine = box.engine();
    std::istringstream in(
        R"({"report_id":"solo","provenance":{"kind":"initiating","incident_id":"INC-SOLO"},"source_id":"s1","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":3},"reliability_letter":"A"})"
        "\n");
    engine.ingest(in);
    const FusionResult result = engine.fuse_incident("INC-SOLO", std::nullopt);
    CHECK(result.fused[1] == doctest::Approx(0.10));
    CHECK(result.fused[2] == doctest::Approx(0.80));
    CHECK(result.fused[3] == doctest::Approx(0.10));
    CHECK(result.quintile == 3);
}

TEST_CASE("triage ranks the shipped fixture and honors policy overrides") {
    Sandbox box("triage");
    Engine engine = box.engine();
    engine.ingest_file(kDataDir + "/fixture_reports.jsonl");

    const Timestamp now = ts("2025-06-10T00:00:00Z");
    const TriageResult confidence = engine.triage(now, std::nullopt);
    REQUIRE(confidence.items.size() == 2);
    CHECK(confidence.items[0].incident_id == "INC-ALPHA");  // Q4 beats Q3
    CHECK(confidence.items[0].fused_quintile == 4);
    CHECK(confidence.items[0].fused_weight == doctest::Approx(0.94 / 1.41));
    CHECK(confidence.items[1].incident_id == "INC-BRAVO");
    CHECK(confidence.items[1].fused_quintile == 3);
    CHECK(confidence.items[1].seriousness == triage::Rating::high);
    CHECK(confidence.items[1].action_cost == triage::Rating::low);

    // derived by evaluating the scoring formula by hand
    CHECK(confidence.items[0].acquiring_score == doctest::Approx(6.987).epsilon(1e-3));
    CHECK(confidence.items[1].acquiring_score == doctest::Approx(6.960).epsilon(1e-3));

    const TriageResult cost = engine.triage(now, triage::TriagePolicy::cost_first());
    CHECK(cost.items[0].incident_id == "INC-BRAVO");  // low cost first
    CHECK(cost.items[1].incident_id == "INC-ALPHA");

    const std::string table = engine.triage(now, std::nullopt).table();
    CHECK(table.find("INC-ALPHA") != std::string::npos);
    CHECK(table.find("Q4") != std::string::npos);
}

TEST_CASE("echo duplicates leave fusion and triage output byte-identical") {
    Sandbox bare("echo-bare");
    Engine engine_bare = bare.engine();
    engine_bare.ingest_file(kDataDir + "/fixture_reports.jsonl");

    Sandbox echoed("echo-full");
    Engine engine_echoed = echoed.engine();
    engine_echoed.ingest_file(kDataDir + "/fixture_reports.jsonl");
    const IngestSummary extra = engine_echoed.ingest_file(kDataDir + "/fixture_echo_extra.jsonl");
    CHECK(extra.accepted == 10);

    const Timestamp now = ts("2025-06-10T00:00:00Z");
    CHECK(engine_bare.fuse_incident("INC-ALPHA", std::nullopt).to_json() ==
          engine_echoed.fuse_incident("INC-ALPHA", std::nullopt).to_json());
    CHECK(engine_bare.fuse_incident("INC-ALPHA", std::nullopt).render_text() ==
          engine_echoed.fuse_incident("INC-ALPHA", std::nullopt).render_text());
    CHECK(engine_bare.triage(now, std::nullopt).jsonl() ==
          engine_echoed.triage(now, std::nullopt).jsonl());
}

TEST_CASE("feedback flows into profiles and validates the report id") {
    Sandbox box("feedback");
    Engine engine = box.engine();
    engine.ingest_file(kDataDir + "/fixture_reports.jsonl");

    const auto profile =
        engine.feedback("r-alpha-1", sources::Outcome::confirmed, ts("2025-06-11T00:00:00Z"));
    CHECK(profile.source_id == "soc-tacoma");
    CHECK(profile.confirmed == 1);
    CHECK(profile.unresolved == 2);  // r-alpha-1 resolved; alpha-3 and bravo-3 pending

    CHECK_THROWS_AS(engine.feedback("ghost", sources::Outcome::refuted, std::nullopt),
                    ReferenceError);

    const std::string csv = engine.sources_csv();
    CHECK(csv.find("soc-tacoma,false,1,0,F") != std::string::npos);
}

TEST_CASE("trusted list reloads through the event log") {
    Sandbox box("trusted");
    {
        std::ofstream out(box.config.trusted_list_path);
        out << "soc-tacoma\nisac-metro\n";
    }
    Engine engine = box.engine();
    engine.ingest_file(kDataDir + "/fixture_reports.jsonl");
    CHECK_FALSE(engine.profiles().profile("soc-tacoma").trusted);

    CHECK(engine.reload_trusted() == 2);
    CHECK(engine.profiles().profile("soc-tacoma").trusted);
    CHECK(engine.profiles().profile("isac-metro").trusted);
    CHECK_FALSE(engine.profiles().profile("vendor-watch").trusted);

    // replay applies the logged membership without touching the file again
    {
        std::ofstream out(box.config.trusted_list_path);
        out << "someone-else\n";
    }
    const Engine replayed = Engine::replay_log(box.config, box.config.event_log_path);
    CHECK(replayed.profiles().profile("soc-tacoma").trusted);
    CHECK_FALSE(replayed.profiles().profile("vendor-watch").trusted);
}

TEST_CASE("replay reproduces live state byte for byte") {
    Sandbox box("replay");
    std::string live_triage;
    std::string live_sources;
    {
        Engine engine = box.engine();
        engine.ingest_file(kDataDir + "/fixture_reports.jsonl");
        engine.feedback("r-bravo-1", sources::Outcome::refuted, ts("2025-06-11T00:00:00Z"));
        engine.feedback("r-alpha-1", sources::Outcome::confirmed, ts("2025-06-12T00:00:00Z"));
        live_triage = engine.triage(ts("2025-06-15T00:00:00Z"), std::nullopt).jsonl();
        live_sources = engine.sources_csv();
    }

    const Engine replayed = Engine::replay_log(box.config, box.config.event_log_path);
    CHECK(replayed.triage(ts("2025-06-15T00:00:00Z"), std::nullopt).jsonl() == live_triage);
    CHECK(replayed.sources_csv() == live_sources);

    // a fresh engine over the same log (the normal startup path) also matches
    Engine reopened = box.engine();
    CHECK(reopened.triage(ts("2025-06-15T00:00:00Z"), std::nullopt).jsonl() == live_triage);
}

TEST_CASE("replay of an empty log yields empty state") {
    Sandbox box("replay-empty");
    { std::ofstream touch(box.config.event_log_path); }
    const Engine engine = Engine::replay_log(box.config, box.config.event_log_path);
    CHECK(engine.store().report_count() == 0);
    CHECK(engine.event_count() == 0);
    CHECK(engine.triage(ts("2025-06-15T00:00:00Z"), std::nullopt).items.empty());
}

TEST_CASE("replayed engines refuse writes") {
    Sandbox box("readonly");
    { std::ofstream touch(box.config.event_log_path); }
    Engine engine = Engine::replay_log(box.config, box.config.event_log_path);
    std::istringstream in(
        R"({"report_id":"x","provenance":{"kind":"initiating","incident_id":"I"},"source_id":"s","observed_at":"2025-06-01T00:00:00Z","published_at":"2025-06-01T00:00:00Z","assertion":{"kind":"quintile","value":3}})"
        "\n");
    CHECK_THROWS_AS(engine.ingest(in), Error);
}

TEST_CASE("demo tables match the checked-in golden file") {
    CHECK(render_demo_tables() == read_file(kGoldenDir + "/demo_tables.txt"));
}

TEST_CASE("simulate echo contrasts suppressed and inflated fusion") {
    Sandbox box("simulate");
    const Engine engine = box.engine();
    const std::string out = engine.simulate_echo(3, 4, fusion::CombinationRule::noisy_or);
    CHECK(out.find("3 independent sources") != std::string::npos);
    CHECK(out.find("4 duplicate reports") != std::string::npos);
    // suppressed: Q3 = 1 - 0.2^3; inflated: Q3 = 1 - 0.2^7
    CHECK(out.find("0.992000") != std::string::npos);
    CHECK(out.find("0.999987") != std::string::npos);
}

TEST_CASE("simulate echo under odds shows agreement concentration") {
    Sandbox box("simulate-odds");
    const Engine engine = box.engine();
    const std::string out = engine.simulate_echo(2, 3, fusion::CombinationRule::odds_product);
    CHECK(out.find("rule odds") != std::string::npos);
    CHECK(out.find("0.941176") != std::string::npos);  // the agreeing-pair center
}
