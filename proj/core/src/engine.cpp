#include "quintel/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quintel/errors.hpp"

namespace quintel::app {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string vector_cells(const fusion::QuintileVector& v) {
    char buf[96];
    std::snprintf(buf, sizeof(buf), "%8.6f %8.6f %8.6f %8.6f %8.6f", v[0], v[1], v[2], v[3],
                  v[4]);
    return buf;
}

json vector_json(const fusion::QuintileVector& v) {
    return json::array({v[0], v[1], v[2], v[3], v[4]});
}

triage::Rating rating_or_medium(const std::optional<std::string>& text) {
    if (!text) return triage::Rating::medium;
    return triage::rating_from_string(*text).value();  // parse validated the value
}

}  // namespace

Timestamp Engine::system_clock() {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    return Timestamp{std::chrono::duration_cast<std::chrono::microseconds>(now).count()};
}

Engine::Engine(Config config, Clock clock) : Engine(std::move(config), std::move(clock), true) {}

Engine::Engine(Config config, Clock clock, bool open_writer)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      profiles_(config_.reliability_thresholds) {
    if (open_writer) {
        fold(read_event_log_file(config_.event_log_path));
        writer_ = std::make_unique<EventLogWriter>(config_.event_log_path);
    }
}

Engine Engine::replay_log(Config config, const std::string& log_path) {
    std::ifstream in(log_path, std::ios::binary);
    if (!in) throw Error("cannot open event log \"" + log_path + "\"");
    Engine engine(std::move(config), system_clock, false);
    engine.fold(read_event_log(in));
    return engine;
}

EventLogWriter& Engine::writer() {
    if (!writer_) throw Error("engine is read-only (replayed state has no log writer)");
    return *writer_;
}

void Engine::fold(const std::vector<EventLogEntry>& entries) {
    for (const auto& entry : entries) {
        switch (entry.kind) {
            case EventKind::report:
                apply_report(reports::parse_report(entry.payload).report, entry.at);
                break;
            case EventKind::feedback:
                apply_feedback_payload(entry.payload);
                break;
            case EventKind::trusted_list_reload:
                apply_trusted_payload(entry.payload);
                break;
        }
        ++event_count_;
    }
}

void Engine::apply_report(const reports::ThreatReport& report, Timestamp at) {
    const std::string source_id = report.source_id;
    const std::string report_id = report.report_id;
    store_.add(report);
    profiles_.note_report(source_id, report_id, at);
}

void Engine::apply_feedback_payload(const std::string& payload) {
    const json obj = json::parse(payload);
    const std::string outcome_text = obj.at("outcome").get<std::string>();
    const auto at = try_parse_rfc3339(obj.at("at").get<std::string>());
    profiles_.record_feedback(
        obj.at("report_id").get<std::string>(),
        outcome_text == "confirmed" ? sources::Outcome::confirmed : sources::Outcome::refuted,
        at.value_or(Timestamp{}));
}

void Engine::apply_trusted_payload(const std::string& payload) {
    const json obj = json::parse(payload);
    profiles_.set_trusted(obj.at("source_ids").get<std::vector<std::string>>());
}

IngestSummary Engine::ingest(std::istream& in) {
    IngestSummary summary;
    std::vector<std::string> batch_ids;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        reports::ParsedReport parsed;
        try {
            parsed = reports::parse_report(line);
            if (store_.has_report(parsed.report.report_id))
                throw ValidationError("duplicate report_id \"" + parsed.report.report_id + "\"");
        } catch (const Error& e) {
            ++summary.rejected;
            summary.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
            continue;
        }
        summary.unknown_fields += parsed.unknown_fields;
        const Timestamp at = clock_();
        writer().append(EventKind::report, at, reports::serialize_report(parsed.report));
        ++event_count_;
        batch_ids.push_back(parsed.report.report_id);
        apply_report(parsed.report, at);
    }

    for (const auto& id : batch_ids) {
        (store_.incident_of(id) ? summary.accepted : summary.quarantined) += 1;
    }
    return summary;
}

IngestSummary Engine::ingest_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open input file \"" + path + "\"");
    return ingest(in);
}

FusionResult Engine::fuse_incident(const std::string& incident_id,
                                   std::optional<fusion::CombinationRule> rule) const {
    FusionResult result;
    result.incident_id = incident_id;
    result.rule = rule.value_or(config_.combination_rule);

    const reports::IncidentThread& thread = store_.thread(incident_id);
    result.evidence =
        reports::independent_evidence(thread, store_, profiles_, config_.spread_policy);

    std::vector<fusion::QuintileVector> vectors;
    vectors.reserve(result.evidence.size());
    for (const auto& ev : result.evidence) vectors.push_back(ev.vector);
    result.fused = fusion::combine_all(vectors, result.rule);

    // Annihilation check: the combination zeroed every quintile the evidence
    // actually asserted, leaving at most spillover cells. Covers the all-zero
    // vector as the extreme case.
    result.annihilated = true;
    for (const auto& ev : result.evidence) {
        if (result.fused[ev.quintile - 1] != 0.0) {
            result.annihilated = false;
            break;
        }
    }
    if (!result.annihilated) {
        const auto readout = fusion::argmax_quintile(result.fused);
        result.quintile = readout.quintile;
        result.weight = readout.weight;
    }
    return result;
}

std::string FusionResult::render_text() const {
    std::string out = "incident " + incident_id + "  rule " +
                      std::string(fusion::to_string(rule)) + "\n";
    char buf[256];
    std::snprintf(buf, sizeof(buf), "%-16s %-16s %-3s %-6s %-6s %-13s %s\n", "source", "report",
                  "Q", "letter", "mass", "role", "spread");
    out += buf;
    for (const auto& ev : evidence) {
        std::snprintf(buf, sizeof(buf), "%-16s %-16s Q%-2d %-6c %-6.2f %-13s %s\n",
                      ev.source_id.c_str(), ev.report_id.c_str(), ev.quintile,
                      estimative::to_char(ev.letter), ev.center_mass,
                      ev.corroborating ? "corroborating" : "initiating",
                      vector_cells(ev.vector).c_str());
        out += buf;
    }
    out += "fused  " + vector_cells(fused) + "\n";
    if (annihilated) {
        out += "readout  evidence annihilated under odds rule (no quintile dominates)\n";
    } else {
        std::snprintf(buf, sizeof(buf), "readout  Q%d  weight %.4f\n", quintile, weight);
        out += buf;
    }
    return out;
}

std::string FusionResult::to_json() const {
    ordered_json obj;
    obj["incident_id"] = incident_id;
    obj["rule"] = std::string(fusion::to_string(rule));
    ordered_json ev_list = ordered_json::array();
    for (const auto& ev : evidence) {
        ordered_json e;
        e["source_id"] = ev.source_id;
        e["report_id"] = ev.report_id;
        e["quintile"] = ev.quintile;
        e["letter"] = std::string(1, estimative::to_char(ev.letter));
        e["center_mass"] = ev.center_mass;
        e["role"] = ev.corroborating ? "corroborating" : "initiating";
        e["spread"] = vector_json(ev.vector);
        ev_list.push_back(std::move(e));
    }
    obj["evidence"] = std::move(ev_list);
    obj["fused"] = vector_json(fused);
    obj["annihilated"] = annihilated;
    if (!annihilated) {
        obj["quintile"] = quintile;
        obj["weight"] = weight;
    }
    return obj.dump();
}

TriageResult Engine::triage(Timestamp now, std::optional<triage::TriagePolicy> policy) const {
    std::vector<triage::TriageItem> items;
    for (const auto& incident_id : store_.incident_ids()) {
        const reports::IncidentThread& thread = store_.thread(incident_id);
        const FusionResult fusion_result = fuse_incident(incident_id, std::nullopt);

        triage::TriageItem item;
        item.incident_id = incident_id;
        item.fused = fusion_result.fused;
        item.annihilated = fusion_result.annihilated;
        if (fusion_result.annihilated) {
            item.fused_quintile = 1;  // conservative readout for a wiped vector
            item.fused_weight = 0.0;
        } else {
            item.fused_quintile = fusion_result.quintile;
            item.fused_weight = fusion_result.weight;
        }
        item.acquiring_score =
            triage::acquiring_score(thread, store_, profiles_, now, config_.scoring_weights);

        // Operator-supplied incident metadata rides on initiating reports; the
        // earliest one that carries a value wins.
        std::vector<const reports::ThreatReport*> initiating;
        for (const auto& id : thread.initiating) initiating.push_back(&store_.report(id));
        std::sort(initiating.begin(), initiating.end(),
                  [](const reports::ThreatReport* a, const reports::ThreatReport* b) {
                      if (a->published_at != b->published_at)
                          return a->published_at < b->published_at;
                      return a->report_id < b->report_id;
                  });
        item.seriousness = triage::Rating::medium;
        item.action_cost = triage::Rating::medium;
        for (const auto* r : initiating) {
            if (r->seriousness) {
                item.seriousness = rating_or_medium(r->seriousness);
                break;
            }
        }
        for (const auto* r : initiating) {
            if (r->action_cost) {
                item.action_cost = rating_or_medium(r->action_cost);
                break;
            }
        }
        items.push_back(std::move(item));
    }

    TriageResult result;
    result.items = triage::rank(std::move(items), policy.value_or(config_.triage_policy));
    return result;
}

std::string TriageResult::jsonl() const {
    std::string out;
    for (const auto& item : items) {
        ordered_json obj;
        obj["incident_id"] = item.incident_id;
        obj["seriousness"] = std::string(triage::to_string(item.seriousness));
        obj["action_cost"] = std::string(triage::to_string(item.action_cost));
        obj["fused"] = vector_json(item.fused);
        obj["fused_quintile"] = item.fused_quintile;
        obj["fused_weight"] = item.fused_weight;
        obj["annihilated"] = item.annihilated;
        obj["acquiring_score"] = item.acquiring_score;
        out += obj.dump();
        out += '\n';
    }
    return out;
}

std::string TriageResult::table() const {
    std::string out;
    char buf[192];
    std::snprintf(buf, sizeof(buf), "%-4s %-20s %-11s %-10s %-8s %-9s %s\n", "rank", "incident",
                  "seriousness", "confidence", "weight", "score", "cost");
    out += buf;
    int rank_no = 1;
    for (const auto& item : items) {
        char confidence[16];
        if (item.annihilated) {
            std::snprintf(confidence, sizeof(confidence), "%s", "annihil.");
        } else {
            std::snprintf(confidence, sizeof(confidence), "Q%d", item.fused_quintile);
        }
        std::snprintf(buf, sizeof(buf), "%-4d %-20s %-11s %-10s %-8.4f %-9.4f %s\n", rank_no++,
                      item.incident_id.c_str(),
                      std::string(triage::to_string(item.seriousness)).c_str(), confidence,
                      item.fused_weight, item.acquiring_score,
                      std::string(triage::to_string(item.action_cost)).c_str());
        out += buf;
    }
    return out;
}

sources::SourceProfile Engine::feedback(const std::string& report_id, sources::Outcome outcome,
                                        std::optional<Timestamp> at) {
    if (!store_.has_report(report_id))
        throw ReferenceError("feedback references unknown report \"" + report_id + "\"");
    const Timestamp when = at.value_or(clock_());
    ordered_json payload;
    payload["report_id"] = report_id;
    payload["source_id"] = store_.report(report_id).source_id;
    payload["outcome"] = std::string(sources::to_string(outcome));
    payload["at"] = format_rfc3339(when);
    writer().append(EventKind::feedback, when, payload.dump());
    ++event_count_;
    return profiles_.record_feedback(report_id, outcome, when);
}

std::size_t Engine::reload_trusted() {
    std::ifstream in(config_.trusted_list_path, std::ios::binary);
    if (!in) throw Error("cannot open trusted list \"" + config_.trusted_list_path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    const auto ids = sources::parse_trusted_list(buf.str());

    const Timestamp when = clock_();
    ordered_json payload;
    payload["path"] = config_.trusted_list_path;
    payload["source_ids"] = ids;
    writer().append(EventKind::trusted_list_reload, when, payload.dump());
    ++event_count_;
    profiles_.set_trusted(ids);
    return ids.size();
}

std::string Engine::simulate_echo(int n_sources, int n_duplicates,
                                  fusion::CombinationRule rule) const {
    if (n_sources < 1) throw DomainError("simulate echo needs at least one source");
    if (n_duplicates < 0) throw DomainError("duplicate count must be >= 0");

    const Timestamp base = *try_parse_rfc3339("2025-01-01T00:00:00Z");
    auto make_report = [&](std::string id, std::string source, reports::Provenance provenance,
                           int minute) {
        reports::ThreatReport r;
        r.report_id = std::move(id);
        r.provenance = std::move(provenance);
        r.source_id = std::move(source);
        r.observed_at = base;
        r.published_at = Timestamp{base.micros + minute * 60'000'000LL};
        r.assertion = reports::QuintileAssertion{3};
        r.asserted_reliability = estimative::ReliabilityLetter::A;
        return r;
    };

    reports::ThreadStore sim;
    sources::ProfileStore no_history;
    char name[32];
    sim.add(make_report("sim-r1", "src-01", reports::Provenance::initiating("SIM-ECHO"), 0));
    for (int i = 2; i <= n_sources; ++i) {
        std::snprintf(name, sizeof(name), "src-%02d", i);
        sim.add(make_report("sim-r" + std::to_string(i), name,
                            reports::Provenance::descendant("sim-r1"), i));
    }
    for (int i = 0; i < n_duplicates; ++i) {
        sim.add(make_report("sim-echo" + std::to_string(i + 1), "src-01",
                            reports::Provenance::descendant("sim-r1"), n_sources + i + 1));
    }

    const reports::IncidentThread& thread = sim.thread("SIM-ECHO");
    const auto labeled =
        reports::independent_vectors(thread, sim, no_history, config_.spread_policy);

    std::vector<fusion::QuintileVector> unlabeled;
    auto push_all = [&](const std::vector<std::string>& ids) {
        for (const auto& id : ids) {
            const auto& r = sim.report(id);
            unlabeled.push_back(sources::reliability_vector(
                reports::assertion_quintile(r.assertion), *r.asserted_reliability,
                config_.spread_policy));
        }
    };
    push_all(thread.initiating);
    push_all(thread.descendants);

    const auto fused_labeled = fusion::combine_all(labeled, rule);
    const auto fused_unlabeled = fusion::combine_all(unlabeled, rule);

    char buf[256];
    std::string out;
    std::snprintf(buf, sizeof(buf),
                  "simulated incident: %d independent sources asserting Q3 at letter A, plus %d "
                  "duplicate reports from src-01 (rule %s)\n\n",
                  n_sources, n_duplicates, std::string(fusion::to_string(rule)).c_str());
    out += buf;
    std::snprintf(buf, sizeof(buf), "with provenance labels (echoes suppressed, %zu vectors)\n",
                  labeled.size());
    out += buf;
    out += "  fused  " + vector_cells(fused_labeled) + "\n";
    std::snprintf(buf, sizeof(buf), "without provenance labels (every report counted, %zu vectors)\n",
                  unlabeled.size());
    out += buf;
    out += "  fused  " + vector_cells(fused_unlabeled) + "\n\n";
    std::snprintf(buf, sizeof(buf), "peak mass at Q3: %.6f -> %.6f under echo\n", fused_labeled[2],
                  fused_unlabeled[2]);
    out += buf;
    return out;
}

}  // namespace quintel::app
