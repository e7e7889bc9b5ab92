#pragma once

// Shared fixture builders for the test suites.

#include <filesystem>
#include <random>
#include <stdexcept>
#include <string>

#include "quintel/reports.hpp"
#include "quintel/time.hpp"

namespace quintel::testsupport {

inline Timestamp ts(const std::string& rfc3339) {
    const auto parsed = try_parse_rfc3339(rfc3339);
    if (!parsed) throw std::runtime_error("test fixture timestamp is malformed: " + rfc3339);
    return *parsed;
}

struct ReportBuilder {
    reports::ThreatReport r;

    ReportBuilder(std::string id, reports::Provenance provenance, std::string source) {
        r.report_id = std::move(id);
        r.provenance = std::move(provenance);
        r.source_id = std::move(source);
        r.observed_at = ts("2025-06-01T00:00:00Z");
        r.published_at = ts("2025-06-01T00:00:00Z");
        r.assertion = reports::QuintileAssertion{3};
    }

    ReportBuilder& published(const std::string& when) {
        r.published_at = ts(when);
        if (r.observed_at > r.published_at) r.observed_at = r.published_at;
        return *this;
    }
    ReportBuilder& expires(const std::string& when) {
        r.expires_at = ts(when);
        return *this;
    }
    ReportBuilder& quintile(int q) {
        r.assertion = reports::QuintileAssertion{q};
        return *this;
    }
    ReportBuilder& probability(double p) {
        r.assertion = reports::ProbabilityAssertion{p};
        return *this;
    }
    ReportBuilder& term(std::string text, estimative::TermRow row) {
        r.assertion = reports::BandTermAssertion{std::move(text), row};
        return *this;
    }
    ReportBuilder& letter(estimative::ReliabilityLetter l) {
        r.asserted_reliability = l;
        return *this;
    }
    ReportBuilder& vetting(reports::Vetting v) {
        r.vetting = v;
        return *this;
    }
    ReportBuilder& detail(int d) {
        r.detail_score = d;
        return *this;
    }
    ReportBuilder& seriousness(std::string level) {
        r.seriousness = std::move(level);
        return *this;
    }
    ReportBuilder& action_cost(std::string level) {
        r.action_cost = std::move(level);
        return *this;
    }

    operator reports::ThreatReport() const { return r; }
};

inline ReportBuilder initiating(std::string id, std::string incident, std::string source) {
    return {std::move(id), reports::Provenance::initiating(std::move(incident)),
            std::move(source)};
}

inline ReportBuilder descendant(std::string id, std::string parent, std::string source) {
    return {std::move(id), reports::Provenance::descendant(std::move(parent)), std::move(source)};
}

/// Unique scratch directory under the build tree, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::mt19937_64 rng(std::random_device{}());
        path_ = std::filesystem::temp_directory_path() /
                ("quintel-test-" + std::to_string(rng()));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    std::string file(const std::string& name) const { return (path_ / name).string(); }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

}  // namespace quintel::testsupport
