#include "quintel/reports.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "quintel/errors.hpp"

namespace quintel::reports {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

struct FieldContext {
    std::string report_id;  // may be empty while still locating it

    [[noreturn]] void fail(const std::string& message) const {
        if (report_id.empty()) throw ValidationError(message);
        throw ValidationError("report \"" + report_id + "\": " + message);
    }
};

const json& require_field(const json& obj, const char* key, const FieldContext& ctx) {
    const auto it = obj.find(key);
    if (it == obj.end()) ctx.fail(std::string("missing required field \"") + key + "\"");
    return *it;
}

std::string require_string(const json& obj, const char* key, const FieldContext& ctx) {
    const json& v = require_field(obj, key, ctx);
    if (!v.is_string() || v.get<std::string>().empty())
        ctx.fail(std::string("field \"") + key + "\" must be a non-empty string");
    return v.get<std::string>();
}

Timestamp require_timestamp(const json& obj, const char* key, const FieldContext& ctx) {
    const std::string text = require_string(obj, key, ctx);
    const auto ts = try_parse_rfc3339(text);
    if (!ts) ctx.fail(std::string("field \"") + key + "\" is not an RFC 3339 timestamp: \"" +
                      text + "\"");
    return *ts;
}

int count_unknown(const json& obj, std::initializer_list<std::string_view> known) {
    int unknown = 0;
    for (const auto& [key, value] : obj.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) ++unknown;
    }
    return unknown;
}

std::optional<std::string> optional_level(const json& obj, const char* key,
                                          const FieldContext& ctx) {
    const auto it = obj.find(key);
    if (it == obj.end()) return std::nullopt;
    if (!it->is_string()) ctx.fail(std::string("field \"") + key + "\" must be a string");
    const std::string v = it->get<std::string>();
    if (v != "low" && v != "medium" && v != "high")
        ctx.fail(std::string("field \"") + key + "\" must be one of low|medium|high");
    return v;
}

}  // namespace

std::string_view to_string(Vetting vetting) {
    switch (vetting) {
        case Vetting::human: return "human";
        case Vetting::machine: return "machine";
        case Vetting::both: return "both";
        default: return "unknown";
    }
}

std::optional<Vetting> vetting_from_string(std::string_view text) {
    if (text == "human") return Vetting::human;
    if (text == "machine") return Vetting::machine;
    if (text == "both") return Vetting::both;
    if (text == "unknown") return Vetting::unknown;
    return std::nullopt;
}

int quintile_of(double p) {
    if (!std::isfinite(p) || p < 0.0 || p > 1.0)
        throw DomainError("probability must be a finite number in [0,1]");
    // Q1 = [0, 0.2], then right-closed fifths: 0.80 is Q4, Q5 starts above 0.8.
    for (int k = 1; k <= 4; ++k) {
        if (p <= 0.2 * k) return k;
    }
    return 5;
}

int assertion_quintile(const Assertion& assertion) {
    if (const auto* q = std::get_if<QuintileAssertion>(&assertion)) return q->quintile;
    if (const auto* p = std::get_if<ProbabilityAssertion>(&assertion)) return quintile_of(p->p);
    const auto& term = std::get<BandTermAssertion>(assertion);
    const auto [lo, hi] = estimative::range_for_term(term.term, term.row);
    return quintile_of((lo + hi) / 2.0);
}

std::optional<int> assertion_band(const Assertion& assertion) {
    if (std::holds_alternative<QuintileAssertion>(assertion)) return std::nullopt;
    if (const auto* p = std::get_if<ProbabilityAssertion>(&assertion))
        return estimative::band_for_probability(p->p).index;
    const auto& term = std::get<BandTermAssertion>(assertion);
    const auto match = estimative::lookup_term(term.term);
    return match ? std::optional<int>(match->band_index) : std::nullopt;
}

ParsedReport parse_report(std::string_view json_object) {
    json obj;
    try {
        obj = json::parse(json_object);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("malformed JSON record: ") + e.what());
    }
    if (!obj.is_object()) throw ValidationError("wire record must be a JSON object");

    FieldContext ctx;
    if (const auto it = obj.find("report_id"); it != obj.end() && it->is_string())
        ctx.report_id = it->get<std::string>();

    ThreatReport r;
    r.report_id = require_string(obj, "report_id", ctx);

    const json& prov = require_field(obj, "provenance", ctx);
    if (!prov.is_object()) ctx.fail("field \"provenance\" must be an object");
    const std::string kind = require_string(prov, "kind", ctx);
    if (kind == "initiating") {
        r.provenance = Provenance::initiating(require_string(prov, "incident_id", ctx));
    } else if (kind == "descendant") {
        r.provenance = Provenance::descendant(require_string(prov, "parent_report_id", ctx));
    } else {
        ctx.fail("field \"provenance.kind\" must be initiating|descendant");
    }

    r.source_id = require_string(obj, "source_id", ctx);
    r.observed_at = require_timestamp(obj, "observed_at", ctx);
    r.published_at = require_timestamp(obj, "published_at", ctx);
    if (r.published_at < r.observed_at)
        ctx.fail("published_at must not precede observed_at");
    if (obj.contains("expires_at")) {
        r.expires_at = require_timestamp(obj, "expires_at", ctx);
        if (*r.expires_at <= r.published_at) ctx.fail("expires_at must be after published_at");
    }

    const json& assertion = require_field(obj, "assertion", ctx);
    if (!assertion.is_object()) ctx.fail("field \"assertion\" must be an object");
    const std::string akind = require_string(assertion, "kind", ctx);
    if (akind == "term") {
        BandTermAssertion term;
        term.term = require_string(assertion, "term", ctx);
        const std::string row = require_string(assertion, "row", ctx);
        if (row == "likelihood") {
            term.row = estimative::TermRow::likelihood;
        } else if (row == "probability") {
            term.row = estimative::TermRow::probability;
        } else {
            ctx.fail("field \"assertion.row\" must be likelihood|probability");
        }
        try {
            estimative::range_for_term(term.term, term.row);
        } catch (const LookupError& e) {
            ctx.fail(std::string("field \"assertion.term\": ") + e.what());
        }
        r.assertion = std::move(term);
    } else if (akind == "probability") {
        const json& v = require_field(assertion, "value", ctx);
        if (!v.is_number()) ctx.fail("field \"assertion.value\" must be a number");
        const double p = v.get<double>();
        if (!std::isfinite(p) || p < 0.0 || p > 1.0)
            ctx.fail("field \"assertion.value\" must be a probability in [0,1]");
        r.assertion = ProbabilityAssertion{p};
    } else if (akind == "quintile") {
        const json& v = require_field(assertion, "value", ctx);
        if (!v.is_number_integer()) ctx.fail("field \"assertion.value\" must be an integer");
        const int q = v.get<int>();
        if (q < 1 || q > 5) ctx.fail("field \"assertion.value\" must be a quintile 1..5");
        r.assertion = QuintileAssertion{q};
    } else {
        ctx.fail("field \"assertion.kind\" must be term|probability|quintile");
    }

    if (const auto it = obj.find("reliability_letter"); it != obj.end()) {
        if (!it->is_string() || it->get<std::string>().size() != 1)
            ctx.fail("field \"reliability_letter\" must be a single letter A..F");
        const auto letter = estimative::reliability_from_char(it->get<std::string>()[0]);
        if (!letter) ctx.fail("field \"reliability_letter\" must be a letter A..F");
        r.asserted_reliability = *letter;
    }
    if (const auto it = obj.find("vetting"); it != obj.end()) {
        if (!it->is_string()) ctx.fail("field \"vetting\" must be a string");
        const auto v = vetting_from_string(it->get<std::string>());
        if (!v) ctx.fail("field \"vetting\" must be human|machine|both|unknown");
        r.vetting = *v;
    }
    if (const auto it = obj.find("detail_score"); it != obj.end()) {
        if (!it->is_number_integer()) ctx.fail("field \"detail_score\" must be an integer");
        const int d = it->get<int>();
        if (d < 0 || d > 3) ctx.fail("field \"detail_score\" must be in 0..3");
        r.detail_score = d;
    }
    if (const auto it = obj.find("body"); it != obj.end()) {
        if (!it->is_string()) ctx.fail("field \"body\" must be a string");
        r.body = it->get<std::string>();
    }
    r.seriousness = optional_level(obj, "seriousness", ctx);
    r.action_cost = optional_level(obj, "action_cost", ctx);

    int unknown = count_unknown(
        obj, {"report_id", "provenance", "source_id", "observed_at", "published_at", "expires_at",
              "assertion", "reliability_letter", "vetting", "detail_score", "body", "seriousness",
              "action_cost"});
    unknown += count_unknown(prov, {"kind", "incident_id", "parent_report_id"});
    unknown += count_unknown(assertion, {"kind", "term", "row", "value"});

    return ParsedReport{std::move(r), unknown};
}

std::string serialize_report(const ThreatReport& r) {
    ordered_json obj;
    obj["report_id"] = r.report_id;
    ordered_json prov;
    if (r.provenance.kind == ProvenanceKind::initiating) {
        prov["kind"] = "initiating";
        prov["incident_id"] = r.provenance.ref;
    } else {
        prov["kind"] = "descendant";
        prov["parent_report_id"] = r.provenance.ref;
    }
    obj["provenance"] = std::move(prov);
    obj["source_id"] = r.source_id;
    obj["observed_at"] = format_rfc3339(r.observed_at);
    obj["published_at"] = format_rfc3339(r.published_at);
    if (r.expires_at) obj["expires_at"] = format_rfc3339(*r.expires_at);

    ordered_json assertion;
    if (const auto* term = std::get_if<BandTermAssertion>(&r.assertion)) {
        assertion["kind"] = "term";
        assertion["term"] = term->term;
        assertion["row"] = std::string(estimative::to_string(term->row));
    } else if (const auto* p = std::get_if<ProbabilityAssertion>(&r.assertion)) {
        assertion["kind"] = "probability";
        assertion["value"] = p->p;
    } else {
        assertion["kind"] = "quintile";
        assertion["value"] = std::get<QuintileAssertion>(r.assertion).quintile;
    }
    obj["assertion"] = std::move(assertion);

    if (r.asserted_reliability)
        obj["reliability_letter"] = std::string(1, estimative::to_char(*r.asserted_reliability));
    if (r.vetting != Vetting::unknown) obj["vetting"] = std::string(to_string(r.vetting));
    obj["detail_score"] = r.detail_score;
    if (!r.body.empty()) obj["body"] = r.body;
    if (r.seriousness) obj["seriousness"] = *r.seriousness;
    if (r.action_cost) obj["action_cost"] = *r.action_cost;
    return obj.dump();
}

ThreadStore::AddResult ThreadStore::add(ThreatReport report) {
    const std::string id = report.report_id;
    if (reports_.contains(id))
        throw ValidationError("duplicate report_id \"" + id + "\"");
    reports_.emplace(id, std::move(report));

    if (!try_attach(id)) {
        quarantine_.insert(id);
        return AddResult::quarantined;
    }

    // A newly threaded report may be the missing parent of held descendants.
    bool progress = true;
    while (progress && !quarantine_.empty()) {
        progress = false;
        for (auto it = quarantine_.begin(); it != quarantine_.end();) {
            if (try_attach(*it)) {
                it = quarantine_.erase(it);
                progress = true;
            } else {
                ++it;
            }
        }
    }
    return AddResult::accepted;
}

const IncidentThread& ThreadStore::assign(const std::string& report_id) {
    if (!try_attach(report_id)) {
        const ThreatReport& r = report(report_id);
        throw QuarantineError("report \"" + report_id + "\" quarantined: parent \"" +
                              r.provenance.ref + "\" is not threaded");
    }
    return threads_.at(report_incident_.at(report_id));
}

bool ThreadStore::try_attach(const std::string& report_id) {
    if (report_incident_.contains(report_id)) return true;
    const ThreatReport& r = report(report_id);

    std::string incident_id;
    if (r.provenance.kind == ProvenanceKind::initiating) {
        incident_id = r.provenance.ref;
    } else {
        const auto parent = report_incident_.find(r.provenance.ref);
        if (parent == report_incident_.end()) return false;
        incident_id = parent->second;
    }

    auto [it, created] = threads_.try_emplace(incident_id);
    if (created) it->second.incident_id = incident_id;
    IncidentThread& thread = it->second;
    (r.provenance.kind == ProvenanceKind::initiating ? thread.initiating : thread.descendants)
        .push_back(report_id);
    thread.distinct_sources.insert(r.source_id);
    report_incident_[report_id] = incident_id;
    return true;
}

const ThreatReport& ThreadStore::report(const std::string& report_id) const {
    const auto it = reports_.find(report_id);
    if (it == reports_.end()) throw LookupError("unknown report \"" + report_id + "\"");
    return it->second;
}

bool ThreadStore::has_report(const std::string& report_id) const {
    return reports_.contains(report_id);
}

const IncidentThread& ThreadStore::thread(const std::string& incident_id) const {
    const IncidentThread* t = find_thread(incident_id);
    if (!t) throw LookupError("unknown incident \"" + incident_id + "\"");
    return *t;
}

const IncidentThread* ThreadStore::find_thread(const std::string& incident_id) const {
    const auto it = threads_.find(incident_id);
    return it == threads_.end() ? nullptr : &it->second;
}

std::optional<std::string> ThreadStore::incident_of(const std::string& report_id) const {
    const auto it = report_incident_.find(report_id);
    if (it == report_incident_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> ThreadStore::incident_ids() const {
    std::vector<std::string> out;
    out.reserve(threads_.size());
    for (const auto& [id, thread] : threads_) out.push_back(id);
    return out;
}

std::vector<std::string> ThreadStore::quarantined_ids() const {
    return {quarantine_.begin(), quarantine_.end()};
}

std::vector<Evidence> independent_evidence(const IncidentThread& thread, const ThreadStore& store,
                                           const sources::ProfileStore& profiles,
                                           fusion::SpreadPolicy policy) {
    if (thread.empty()) throw DomainError("incident thread is empty");

    // Earliest report per source by (published_at, report_id); later echoes from
    // the same source never change the selection.
    std::map<std::string, const ThreatReport*> selected;
    auto consider = [&](const std::string& report_id) {
        const ThreatReport& r = store.report(report_id);
        auto [it, created] = selected.try_emplace(r.source_id, &r);
        if (created) return;
        const ThreatReport& cur = *it->second;
        if (r.published_at < cur.published_at ||
            (r.published_at == cur.published_at && r.report_id < cur.report_id))
            it->second = &r;
    };
    for (const auto& id : thread.initiating) consider(id);
    for (const auto& id : thread.descendants) consider(id);

    std::vector<Evidence> out;
    out.reserve(selected.size());
    for (const auto& [source_id, report] : selected) {
        Evidence ev;
        ev.source_id = source_id;
        ev.report_id = report->report_id;
        ev.quintile = assertion_quintile(report->assertion);

        // Recipient-side grade wins once the source has a history; otherwise fall
        // back to the reliability the report asserted for itself.
        const sources::SourceProfile* profile = profiles.find(source_id);
        if (profile && profile->letter != estimative::ReliabilityLetter::F) {
            ev.letter = profile->letter;
        } else if (report->asserted_reliability) {
            ev.letter = *report->asserted_reliability;
        } else {
            ev.letter = estimative::ReliabilityLetter::F;
        }
        ev.center_mass = sources::center_mass(ev.letter);
        ev.corroborating = report->provenance.kind == ProvenanceKind::descendant;
        ev.vector = sources::reliability_vector(ev.quintile, ev.letter, policy);
        out.push_back(std::move(ev));
    }
    return out;
}

std::vector<fusion::QuintileVector> independent_vectors(const IncidentThread& thread,
                                                        const ThreadStore& store,
                                                        const sources::ProfileStore& profiles,
                                                        fusion::SpreadPolicy policy) {
    std::vector<fusion::QuintileVector> out;
    for (auto& ev : independent_evidence(thread, store, profiles, policy))
        out.push_back(ev.vector);
    return out;
}

}  // namespace quintel::reports
