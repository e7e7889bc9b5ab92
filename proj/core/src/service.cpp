#include "quintel/service.hpp"

#include <shared_mutex>
#include <sstream>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "quintel/errors.hpp"

namespace quintel::app {
namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void reply_error(httplib::Response& res, int status, const std::string& message) {
    res.status = status;
    res.set_content(json{{"error", message}}.dump(), "application/json");
}

std::optional<fusion::CombinationRule> parse_rule_param(const std::string& text) {
    if (text == "noisy-or") return fusion::CombinationRule::noisy_or;
    if (text == "odds") return fusion::CombinationRule::odds_product;
    return std::nullopt;
}

}  // namespace

std::string profile_json(const sources::SourceProfile& p) {
    ordered_json obj;
    obj["source_id"] = p.source_id;
    obj["trusted"] = p.trusted;
    obj["confirmed"] = p.confirmed;
    obj["refuted"] = p.refuted;
    obj["unresolved"] = p.unresolved;
    obj["letter"] = std::string(1, estimative::to_char(p.letter));
    obj["updated_at"] = format_rfc3339(p.updated_at);
    return obj.dump();
}

struct Service::Impl {
    explicit Impl(Engine& engine) : engine(engine) { wire(); }

    Engine& engine;
    std::shared_mutex mutex;
    httplib::Server server;

    void wire() {
        server.Post("/reports", [this](const httplib::Request& req, httplib::Response& res) {
            std::istringstream body(req.body);
            IngestSummary summary;
            {
                std::unique_lock lock(mutex);
                try {
                    summary = engine.ingest(body);
                } catch (const Error& e) {
                    return reply_error(res, 500, e.what());
                }
            }
            ordered_json obj;
            obj["accepted"] = summary.accepted;
            obj["quarantined"] = summary.quarantined;
            obj["rejected"] = summary.rejected;
            obj["unknown_fields"] = summary.unknown_fields;
            obj["errors"] = summary.errors;
            res.set_content(obj.dump(), "application/json");
        });

        server.Post("/feedback", [this](const httplib::Request& req, httplib::Response& res) {
            json body;
            try {
                body = json::parse(req.body);
            } catch (const json::parse_error& e) {
                return reply_error(res, 400, std::string("malformed JSON body: ") + e.what());
            }
            if (!body.is_object() || !body.contains("report_id") || !body.contains("outcome") ||
                !body["report_id"].is_string() || !body["outcome"].is_string())
                return reply_error(res, 400, "body must carry report_id and outcome strings");
            const std::string outcome_text = body["outcome"].get<std::string>();
            if (outcome_text != "confirmed" && outcome_text != "refuted")
                return reply_error(res, 400, "outcome must be confirmed|refuted");
            std::optional<Timestamp> at;
            if (body.contains("at")) {
                if (!body["at"].is_string())
                    return reply_error(res, 400, "at must be an RFC 3339 string");
                at = try_parse_rfc3339(body["at"].get<std::string>());
                if (!at) return reply_error(res, 400, "at is not an RFC 3339 timestamp");
            }
            std::unique_lock lock(mutex);
            try {
                const auto profile = engine.feedback(
                    body["report_id"].get<std::string>(),
                    outcome_text == "confirmed" ? sources::Outcome::confirmed
                                                : sources::Outcome::refuted,
                    at);
                res.set_content(profile_json(profile), "application/json");
            } catch (const ReferenceError& e) {
                reply_error(res, 404, e.what());
            } catch (const Error& e) {
                reply_error(res, 400, e.what());
            }
        });

        server.Get(R"(/incidents/([^/]+)/fusion)",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       std::optional<fusion::CombinationRule> rule;
                       if (req.has_param("rule")) {
                           rule = parse_rule_param(req.get_param_value("rule"));
                           if (!rule) return reply_error(res, 400, "rule must be noisy-or|odds");
                       }
                       std::shared_lock lock(mutex);
                       try {
                           const auto result = engine.fuse_incident(req.matches[1].str(), rule);
                           res.set_content(result.to_json(), "application/json");
                       } catch (const LookupError& e) {
                           reply_error(res, 404, e.what());
                       } catch (const Error& e) {
                           reply_error(res, 400, e.what());
                       }
                   });

        server.Get("/triage", [this](const httplib::Request& req, httplib::Response& res) {
            std::optional<triage::TriagePolicy> policy;
            if (req.has_param("policy")) {
                const std::string text = req.get_param_value("policy");
                if (text == "confidence-first") {
                    policy = triage::TriagePolicy::confidence_first();
                } else if (text == "cost-first") {
                    policy = triage::TriagePolicy::cost_first();
                } else if (text == "weighted") {
                    if (engine.config().triage_policy.mode != triage::TriagePolicy::Mode::weighted)
                        return reply_error(res, 400,
                                           "weighted policy requires weights in the config file");
                    policy = engine.config().triage_policy;
                } else {
                    return reply_error(res, 400,
                                       "policy must be confidence-first|cost-first|weighted");
                }
            }
            Timestamp now = Engine::system_clock();
            if (req.has_param("now")) {
                const auto parsed = try_parse_rfc3339(req.get_param_value("now"));
                if (!parsed) return reply_error(res, 400, "now is not an RFC 3339 timestamp");
                now = *parsed;
            }
            std::shared_lock lock(mutex);
            try {
                res.set_content(engine.triage(now, policy).jsonl(), "application/x-ndjson");
            } catch (const Error& e) {
                reply_error(res, 400, e.what());
            }
        });

        server.Get(R"(/sources/([^/]+))",
                   [this](const httplib::Request& req, httplib::Response& res) {
                       std::shared_lock lock(mutex);
                       try {
                           res.set_content(profile_json(engine.source(req.matches[1].str())),
                                           "application/json");
                       } catch (const LookupError& e) {
                           reply_error(res, 404, e.what());
                       }
                   });
    }
};

Service::Service(Engine& engine) : impl_(std::make_unique<Impl>(engine)) {}

Service::~Service() { stop(); }

bool Service::listen(const std::string& host, int port) {
    return impl_->server.listen(host, port);
}

int Service::bind_any(const std::string& host) { return impl_->server.bind_to_any_port(host); }

bool Service::listen_after_bind() { return impl_->server.listen_after_bind(); }

void Service::stop() {
    if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

bool Service::is_running() const { return impl_->server.is_running(); }

}  // namespace quintel::app
