#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "nlibias/evalx.hpp"
#include "nlibias/prune.hpp"
#include "nlibias/stats.hpp"

namespace nlibias {

inline constexpr std::string_view kToolVersion = "0.1.0";

/// Shortest round-trippable text for a double; "inf" / "-inf" / "nan" otherwise.
std::string format_number(double x);
/// Odds as text with one decimal ("13.7", "8"); infinity is "∞".
std::string format_odds(double odds);

// Comparison report (bigram analysis).

/// Header: bigram,split,count,p_contradiction,p_neutral,p_entailment,entropy,share.
/// One row per bigram and split, in rank order.
void write_comparison_csv(const ComparisonReport& report, std::ostream& out);
nlohmann::ordered_json comparison_json(const ComparisonReport& report);
/// Stacked horizontal bars per bigram and split: red contradiction, blue neutral, green
/// entailment, with the bigram's share of its split printed on the bar.
void write_comparison_svg(const ComparisonReport& report, std::ostream& out);

// Evaluation.

void write_eval_text(const EvalReport& report, std::ostream& out);
nlohmann::ordered_json eval_json(const EvalReport& report);
void write_delta_text(const DeltaReport& report, std::ostream& out);
nlohmann::ordered_json delta_json(const DeltaReport& report);

// Pruning.

/// Header: iteration,id,score,removed_total.
void write_trace_csv(const PruneTrace& trace, std::ostream& out);
/// Summary and run metadata; everything except the per-step rows.
nlohmann::ordered_json trace_summary_json(const PruneTrace& trace);

/// Sidecar document accompanying every CLI output.
struct RunManifest {
    std::string subcommand;
    nlohmann::ordered_json config = nlohmann::ordered_json::object();
    nlohmann::ordered_json inputs = nlohmann::ordered_json::array();
    nlohmann::ordered_json outputs = nlohmann::ordered_json::array();
    nlohmann::ordered_json results = nlohmann::ordered_json::object();
    std::string timestamp;

    void add_input(const std::string& path, const Fingerprint& fp);
    nlohmann::ordered_json to_json() const;
};

/// Current UTC time as ISO-8601.
std::string utc_timestamp();

} // namespace nlibias
