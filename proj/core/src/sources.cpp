#include "quintel/sources.hpp"

#include <cmath>

#include "quintel/errors.hpp"

namespace quintel::sources {

std::string_view to_string(Outcome outcome) {
    return outcome == Outcome::confirmed ? "confirmed" : "refuted";
}

void ReliabilityThresholds::validate() const {
    if (min_history < 1) throw DomainError("reliability min_history must be >= 1");
    const double grades[] = {grade_a, grade_b, grade_c, grade_d};
    for (double g : grades) {
        if (!std::isfinite(g) || g <= 0.0 || g > 1.0)
            throw DomainError("reliability grade cutoffs must be in (0,1]");
    }
    if (!(grade_a > grade_b && grade_b > grade_c && grade_c > grade_d))
        throw DomainError("reliability grade cutoffs must be strictly decreasing A..D");
}

ReliabilityLetter letter_from_history(std::int64_t confirmed, std::int64_t refuted,
                                      const ReliabilityThresholds& t) {
    if (confirmed < 0 || refuted < 0) throw DomainError("outcome counts must be >= 0");
    const std::int64_t n = confirmed + refuted;
    if (n == 0 || n < t.min_history) return ReliabilityLetter::F;
    const double accuracy = static_cast<double>(confirmed) / static_cast<double>(n);
    if (accuracy >= t.grade_a) return ReliabilityLetter::A;
    if (accuracy >= t.grade_b) return ReliabilityLetter::B;
    if (accuracy >= t.grade_c) return ReliabilityLetter::C;
    if (accuracy >= t.grade_d) return ReliabilityLetter::D;
    return ReliabilityLetter::E;
}

double center_mass(ReliabilityLetter letter) {
    switch (letter) {
        case ReliabilityLetter::A: return 0.80;
        case ReliabilityLetter::B: return 0.70;
        case ReliabilityLetter::C: return 0.60;
        case ReliabilityLetter::D: return 0.50;
        case ReliabilityLetter::E: return 0.40;
        default: return 0.20;
    }
}

fusion::QuintileVector reliability_vector(int quintile, ReliabilityLetter letter,
                                          fusion::SpreadPolicy policy) {
    if (letter == ReliabilityLetter::F) {
        if (quintile < 1 || quintile > 5) throw DomainError("quintile must be 1..5");
        return fusion::QuintileVector::uniform();
    }
    return fusion::spread(quintile, center_mass(letter), policy);
}

void ProfileStore::note_report(const std::string& source_id, const std::string& report_id,
                               Timestamp at) {
    auto [it, created] = profiles_.try_emplace(source_id);
    if (created) {
        it->second.source_id = source_id;
        it->second.trusted = trusted_.contains(source_id);
    }
    it->second.unresolved += 1;
    it->second.updated_at = at;
    report_source_[report_id] = source_id;
}

SourceProfile ProfileStore::record_feedback(const std::string& report_id, Outcome outcome,
                                            Timestamp at) {
    const auto src_it = report_source_.find(report_id);
    if (src_it == report_source_.end())
        throw ReferenceError("feedback references unknown report \"" + report_id + "\"");
    const std::string& source_id = src_it->second;
    SourceProfile& p = profiles_.at(source_id);

    const auto prior = outcomes_.find(report_id);
    if (prior == outcomes_.end()) {
        p.unresolved -= 1;
    } else {
        // Replacement: back out the earlier outcome for this report.
        (prior->second.second == Outcome::confirmed ? p.confirmed : p.refuted) -= 1;
    }
    (outcome == Outcome::confirmed ? p.confirmed : p.refuted) += 1;
    outcomes_[report_id] = {source_id, outcome};

    p.letter = letter_from_history(p.confirmed, p.refuted, thresholds_);
    p.updated_at = at;
    return p;
}

void ProfileStore::set_trusted(const std::vector<std::string>& source_ids) {
    trusted_ = std::set<std::string>(source_ids.begin(), source_ids.end());
    for (auto& [id, profile] : profiles_) profile.trusted = trusted_.contains(id);
}

const SourceProfile* ProfileStore::find(const std::string& source_id) const {
    const auto it = profiles_.find(source_id);
    return it == profiles_.end() ? nullptr : &it->second;
}

const SourceProfile& ProfileStore::profile(const std::string& source_id) const {
    const SourceProfile* p = find(source_id);
    if (!p) throw LookupError("unknown source \"" + source_id + "\"");
    return *p;
}

std::vector<SourceProfile> ProfileStore::all() const {
    std::vector<SourceProfile> out;
    out.reserve(profiles_.size());
    for (const auto& [id, profile] : profiles_) out.push_back(profile);
    return out;
}

std::string ProfileStore::csv() const {
    std::string out = "source_id,trusted,confirmed,refuted,letter\n";
    for (const auto& [id, p] : profiles_) {
        out += id;
        out += p.trusted ? ",true," : ",false,";
        out += std::to_string(p.confirmed);
        out += ',';
        out += std::to_string(p.refuted);
        out += ',';
        out += estimative::to_char(p.letter);
        out += '\n';
    }
    return out;
}

std::vector<std::string> parse_trusted_list(std::string_view text) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        std::string_view line = text.substr(start, end - start);
        while (!line.empty() && (line.front() == ' ' || line.front() == '\t' || line.front() == '\r'))
            line.remove_prefix(1);
        while (!line.empty() && (line.back() == ' ' || line.back() == '\t' || line.back() == '\r'))
            line.remove_suffix(1);
        if (!line.empty()) out.emplace_back(line);
        if (end == text.size()) break;
        start = end + 1;
    }
    return out;
}

}  // namespace quintel::sources
