#include "nlibias/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <iomanip>
#include <ostream>

namespace nlibias {

namespace {

using ojson = nlohmann::ordered_json;

// Column order of the comparison CSV and the figure colours.
constexpr Label kColumnOrder[] = {Label::Contradiction, Label::Neutral, Label::Entailment};

const char* colour(Label c) {
    switch (c) {
        case Label::Contradiction: return "#d62728";
        case Label::Neutral: return "#1f77b4";
        case Label::Entailment: return "#2ca02c";
    }
    return "#000";
}

ojson number_or_string(double x) {
    if (std::isfinite(x)) return x;
    return format_number(x);
}

ojson counts_json(const ClassCounts& counts) {
    ojson j;
    for (Label c : kColumnOrder) j[std::string(name(c))] = counts[c];
    return j;
}

ojson dist_json(const ClassDistribution& d) {
    ojson j;
    for (Label c : kColumnOrder) j[std::string(name(c))] = d[c];
    return j;
}

double odds_of(const SplitStats& s, Label c) {
    const auto rest = s.count - s.counts[c];
    if (rest == 0) return s.counts[c] > 0 ? INFINITY : 0.0;
    return static_cast<double>(s.counts[c]) / static_cast<double>(rest);
}

ojson split_json(const SplitStats& s) {
    const Label top = s.dist.argmax();
    ojson j;
    j["count"] = s.count;
    j["counts"] = counts_json(s.counts);
    j["p"] = dist_json(s.dist);
    j["entropy"] = s.entropy;
    j["share"] = s.share;
    j["argmax"] = std::string(name(top));
    const double odds = odds_of(s, top);
    j["odds"] = std::isfinite(odds) ? ojson(odds) : ojson(format_odds(odds));
    return j;
}

void csv_row(std::ostream& out, const Bigram& w, const char* split, const SplitStats& s) {
    out << w.str() << ',' << split << ',' << s.count;
    for (Label c : kColumnOrder) out << ',' << format_number(s.dist[c]);
    out << ',' << format_number(s.entropy) << ',' << format_number(s.share) << '\n';
}

std::string xml_escape(std::string_view s) {
    std::string out;
    for (char ch : s) {
        switch (ch) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += ch;
        }
    }
    return out;
}

std::string percent(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
    return buf;
}

} // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, x);
        if (std::strtod(buf, nullptr) == x) break;
    }
    return buf;
}

std::string format_odds(double odds) {
    if (std::isinf(odds)) return "∞";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", odds);
    std::string s = buf;
    if (s.size() > 2 && s.compare(s.size() - 2, 2, ".0") == 0) s.resize(s.size() - 2);
    return s;
}

void write_comparison_csv(const ComparisonReport& report, std::ostream& out) {
    out << "bigram,split,count,p_contradiction,p_neutral,p_entailment,entropy,share\n";
    for (const auto& row : report.rows) {
        csv_row(out, row.bigram, "train", row.train);
        if (row.test) csv_row(out, row.bigram, "test", *row.test);
    }
}

ojson comparison_json(const ComparisonReport& report) {
    ojson j;
    j["side"] = std::string(name(report.side));
    j["mode"] = std::string(name(report.mode));
    j["alpha"] = report.alpha;
    j["share_definition"] = report.mode == CountMode::Presence
                                ? "instances containing the bigram / instances in the split"
                                : "bigram occurrences / all bigram occurrences in the split";
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        ojson r;
        r["rank"] = i + 1;
        r["bigram"] = row.bigram.str();
        r["train"] = split_json(row.train);
        if (row.test) r["test"] = split_json(*row.test);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["mean_train_entropy"] = report.mean_train_entropy();
    if (report.has_test()) j["mean_test_entropy"] = report.mean_test_entropy();
    return j;
}

void write_comparison_svg(const ComparisonReport& report, std::ostream& out) {
    constexpr int kLabelWidth = 200, kBarWidth = 560, kBarHeight = 16, kGap = 6, kTop = 40;
    const int splits = report.has_test() ? 2 : 1;
    const int row_height = splits * (kBarHeight + 2) + kGap;
    const int height = kTop + static_cast<int>(report.rows.size()) * row_height + 20;
    const int width = kLabelWidth + kBarWidth + 20;

    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    int lx = kLabelWidth;
    for (Label c : kColumnOrder) {
        out << "  <rect x=\"" << lx << "\" y=\"10\" width=\"12\" height=\"12\" fill=\"" << colour(c) << "\"/>\n";
        out << "  <text x=\"" << lx + 16 << "\" y=\"20\">" << name(c) << "</text>\n";
        lx += 110;
    }
    int y = kTop;
    for (const auto& row : report.rows) {
        const SplitStats* parts[2] = {&row.train, row.test ? &*row.test : nullptr};
        const char* split_names[2] = {"train", "test"};
        for (int s = 0; s < splits; ++s) {
            const SplitStats& st = *parts[s];
            out << "  <text x=\"" << kLabelWidth - 6 << "\" y=\"" << y + kBarHeight - 4
                << "\" text-anchor=\"end\">" << xml_escape(row.bigram.str()) << " (" << split_names[s] << ")</text>\n";
            double x = kLabelWidth;
            for (Label c : kColumnOrder) {
                const double w = st.dist[c] * kBarWidth;
                out << "  <rect x=\"" << std::fixed << std::setprecision(2) << x << "\" y=\"" << y
                    << "\" width=\"" << w << "\" height=\"" << kBarHeight << "\" fill=\"" << colour(c) << "\"/>\n";
                x += w;
            }
            out.unsetf(std::ios::floatfield);
            char share[32];
            std::snprintf(share, sizeof share, "%.4f", st.share);
            out << "  <text x=\"" << kLabelWidth + 4 << "\" y=\"" << y + kBarHeight - 4
                << "\" fill=\"white\">" << share << "</text>\n";
            y += kBarHeight + 2;
        }
        y += kGap;
    }
    out << "</svg>\n";
}

void write_eval_text(const EvalReport& r, std::ostream& out) {
    out << "hypothesis-only evaluation (alpha=" << format_number(r.alpha) << ")\n";
    out << "  train " << r.train.str() << "\n  test  " << r.test.str() << "\n";
    out << "  accuracy          " << percent(r.accuracy) << " (" << r.correct() << "/" << r.total() << ")\n";
    out << "  majority baseline " << percent(r.majority_baseline) << " (always " << name(r.majority_label) << ")\n";
    out << "  class           precision  recall\n";
    for (Label c : kLabels) {
        char line[96];
        std::snprintf(line, sizeof line, "  %-15s %9.4f %7.4f\n", std::string(name(c)).c_str(), r.precision[c], r.recall[c]);
        out << line;
    }
    out << "  confusion (rows gold, columns predicted: C E N)\n";
    for (Label g : kLabels) {
        out << "    " << name(g)[0] << ' ';
        for (Label p : kLabels) out << ' ' << std::setw(8) << r.confusion[index(g)][index(p)];
        out << '\n';
    }
}

ojson eval_json(const EvalReport& r) {
    ojson j;
    j["accuracy"] = r.accuracy;
    j["correct"] = r.correct();
    j["total"] = r.total();
    j["majority_baseline"] = r.majority_baseline;
    j["majority_label"] = std::string(name(r.majority_label));
    j["alpha"] = r.alpha;
    ojson per = ojson::object();
    for (Label c : kLabels) per[std::string(name(c))] = {{"precision", r.precision[c]}, {"recall", r.recall[c]}};
    j["per_class"] = std::move(per);
    ojson conf = ojson::object();
    for (Label g : kLabels) {
        ojson row = ojson::object();
        for (Label p : kLabels) row[std::string(name(p))] = r.confusion[index(g)][index(p)];
        conf[std::string(name(g))] = std::move(row);
    }
    j["confusion"] = std::move(conf);
    j["train_fingerprint"] = r.train.str();
    j["test_fingerprint"] = r.test.str();
    return j;
}

void write_delta_text(const DeltaReport& d, std::ostream& out) {
    std::size_t width = 6;
    for (const auto& l : d.labels) width = std::max(width, l.size());
    out << std::left << std::setw(static_cast<int>(width)) << "Method" << "  h only    delta\n";
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        out << std::left << std::setw(static_cast<int>(width)) << d.labels[i] << "  " << std::right << std::setw(7)
            << percent(d.accuracies[i]);
        if (i > 0) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%+8.2f", 100.0 * d.deltas[i - 1]);
            out << ' ' << buf;
        }
        out << '\n';
    }
    out << std::left << "test " << d.test.str() << '\n';
}

ojson delta_json(const DeltaReport& d) {
    ojson j;
    ojson rows = ojson::array();
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        ojson r;
        r["method"] = d.labels[i];
        r["accuracy"] = d.accuracies[i];
        r["delta_from_previous"] = i > 0 ? ojson(d.deltas[i - 1]) : ojson(nullptr);
        rows.push_back(std::move(r));
    }
    j["rows"] = std::move(rows);
    j["pairwise"] = d.pairwise;
    j["test_fingerprint"] = d.test.str();
    return j;
}

void write_trace_csv(const PruneTrace& trace, std::ostream& out) {
    out << "iteration,id,score,removed_total\n";
    for (const auto& s : trace.steps)
        out << s.iteration << ',' << s.id << ',' << format_number(s.score) << ',' << s.removed_total << '\n';
}

ojson trace_summary_json(const PruneTrace& trace) {
    ojson j;
    j["mode"] = std::string(name(trace.mode));
    j["batch_size"] = trace.batch_size;
    j["target_removals"] = trace.target_removals;
    j["removed"] = trace.removed();
    j["truncated"] = trace.truncated;
    j["scoring_passes"] = trace.scoring_passes;
    j["wall_seconds"] = number_or_string(trace.wall_seconds);
    return j;
}

void RunManifest::add_input(const std::string& path, const Fingerprint& fp) {
    inputs.push_back({{"path", path}, {"fingerprint", fp.str()}});
}

ojson RunManifest::to_json() const {
    ojson j;
    j["tool"] = "nlibias";
    j["version"] = std::string(kToolVersion);
    j["subcommand"] = subcommand;
    j["config"] = config;
    j["inputs"] = inputs;
    j["outputs"] = outputs;
    j["results"] = results;
    j["timestamp"] = timestamp.empty() ? utc_timestamp() : timestamp;
    return j;
}

std::string utc_timestamp() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace nlibias
