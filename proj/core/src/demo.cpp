#include "quintel/demo.hpp"

#include <array>
#include <cmath>
#include <cstdio>

#include "quintel/fusion.hpp"

namespace quintel::app {
namespace {

using fusion::QuintileVector;

constexpr int kLabelWidth = 14;
constexpr int kCellWidth = 7;

std::string label_cell(const char* label) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%-*s", kLabelWidth, label);
    return buf;
}

std::string header_row() {
    std::string row = label_cell("");
    for (const char* q : {"Q1", "Q2", "Q3", "Q4", "Q5"}) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%*s", kCellWidth, q);
        row += buf;
    }
    return row + "\n";
}

std::string percent_row(const char* label, const QuintileVector& v) {
    std::string row = label_cell(label);
    for (int i = 0; i < 5; ++i) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%*ld%%", kCellWidth - 1, std::lround(v[i] * 100.0));
        row += buf;
    }
    return row + "\n";
}

std::string odds_row(const char* label, const std::array<double, 5>& odds) {
    std::string row = label_cell(label);
    for (double o : odds) {
        char buf[16];
        std::snprintf(buf, sizeof(buf), "%*.3f", kCellWidth, o);
        row += buf;
    }
    return row + "\n";
}

}  // namespace

std::string render_demo_tables() {
    using fusion::SpreadPolicy;

    const QuintileVector report1 = fusion::spread(3, 0.80, SpreadPolicy::nearest);
    const QuintileVector report2 = fusion::spread(1, 0.80, SpreadPolicy::nearest);
    const QuintileVector report2_wide = fusion::spread(1, 0.80, SpreadPolicy::extremes_wide);

    std::string out;
    out += "Spread: Q3 asserted by a top-tier source (80% center mass)\n";
    out += header_row();
    out += percent_row("Report 1", report1);
    out += "\n";

    out += "Spread: adding a Q1 assertion from a top-tier source, nearest policy\n";
    out += header_row();
    out += percent_row("Report 1", report1);
    out += percent_row("Report 2", report2);
    out += "\n";

    out += "Spread: the same Q1 assertion under the extremes-wide alternative\n";
    out += header_row();
    out += percent_row("Report 1", report1);
    out += percent_row("Report 2", report2);
    out += percent_row("Alt: Report 2", report2_wide);
    out += "\n";

    out += "Combination rules compared\n";

    out += "\nNoisy-OR\n";
    out += label_cell("CASE A") + header_row().substr(kLabelWidth);
    out += percent_row("Report 1", report1);
    out += percent_row("Report 2", report2);
    out += percent_row("Combined", fusion::combine_noisy_or(report1, report2));

    out += "\nNoisy-OR\n";
    out += label_cell("CASE B") + header_row().substr(kLabelWidth);
    out += percent_row("Report 1", report1);
    out += percent_row("Report 3", report1);
    out += percent_row("Combined", fusion::combine_noisy_or(report1, report1));

    const auto odds1 = fusion::to_odds(report1);
    const auto odds2 = fusion::to_odds(report2);

    out += "\nOdds multiplication\n";
    out += label_cell("CASE C") + header_row().substr(kLabelWidth);
    out += percent_row("Report 1", report1);
    out += percent_row("Report 3", report1);
    out += odds_row("Odds 1", odds1);
    out += odds_row("Odds 2", odds1);
    std::array<double, 5> product_c{};
    for (std::size_t i = 0; i < 5; ++i) product_c[i] = odds1[i] * odds1[i];
    out += odds_row("Product", product_c);
    out += percent_row("Probability", fusion::combine_odds(report1, report1));

    out += "\nOdds multiplication\n";
    out += label_cell("CASE D") + header_row().substr(kLabelWidth);
    out += percent_row("Report 1", report1);
    out += percent_row("Report 2", report2);
    out += odds_row("Odds 1", odds1);
    out += odds_row("Odds 2", odds2);
    std::array<double, 5> product_d{};
    for (std::size_t i = 0; i < 5; ++i) product_d[i] = odds1[i] * odds2[i];
    out += odds_row("Product", product_d);
    out += percent_row("Probability", fusion::combine_odds(report1, report2));

    return out;
}

}  // namespace quintel::app
