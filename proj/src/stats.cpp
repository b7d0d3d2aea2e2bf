#include "nlibias/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlibias/error.hpp"
#include "nlibias/parallel.hpp"

namespace nlibias {

std::string_view name(CountMode m) noexcept {
    return m == CountMode::Multiplicity ? "multiplicity" : "presence";
}

Label ClassDistribution::argmax() const noexcept {
    Label best = kLabels[0];
    for (Label c : kLabels)
        if (p[c] > p[best]) best = c;
    return best;
}

BigramTable::BigramTable(Side side, double alpha, CountMode mode)
    : side_(side), alpha_(alpha), mode_(mode) {
    if (!(alpha >= 0.0)) throw DomainError("alpha must be >= 0");
}

void BigramTable::add(const Instance& instance) {
    auto bigrams = extract_bigrams(instance.tokens(side_));
    if (mode_ == CountMode::Presence) {
        std::sort(bigrams.begin(), bigrams.end());
        bigrams.erase(std::unique(bigrams.begin(), bigrams.end()), bigrams.end());
    }
    for (auto& w : bigrams) ++counts_[std::move(w)][instance.label];
    class_totals_[instance.label] += static_cast<std::int64_t>(bigrams.size());
    ++instance_totals_[instance.label];
}

void BigramTable::merge(const BigramTable& other) {
    if (other.side_ != side_ || other.mode_ != mode_)
        throw DomainError("cannot merge bigram tables of different side or mode");
    for (const auto& [w, c] : other.counts_) {
        auto& mine = counts_[w];
        for (Label l : kLabels) mine[l] += c[l];
    }
    for (Label l : kLabels) {
        class_totals_[l] += other.class_totals_[l];
        instance_totals_[l] += other.instance_totals_[l];
    }
}

const ClassCounts* BigramTable::find(const Bigram& w) const {
    auto it = counts_.find(w);
    return it == counts_.end() ? nullptr : &it->second;
}

ClassCounts BigramTable::counts(const Bigram& w) const {
    const auto* c = find(w);
    return c ? *c : ClassCounts{};
}

std::int64_t BigramTable::share_denominator() const noexcept {
    return mode_ == CountMode::Presence ? instance_totals_.sum() : class_totals_.sum();
}

BigramTable count_bigrams(const Corpus& corpus, Side side, double alpha, CountMode mode,
                          unsigned threads) {
    if (corpus.empty()) throw EmptyCorpusError("cannot count bigrams of an empty corpus");
    const std::size_t chunks = chunk_count(corpus.size(), threads);
    std::vector<BigramTable> partial(chunks, BigramTable(side, alpha, mode));
    parallel_chunks(corpus.size(), threads, [&](std::size_t chunk, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) partial[chunk].add(corpus[i]);
    });
    BigramTable table = std::move(partial.front());
    for (std::size_t c = 1; c < chunks; ++c) table.merge(partial[c]);
    return table;
}

ClassDistribution smoothed_dist(const ClassCounts& counts, double alpha) {
    if (!(alpha > 0.0)) throw DomainError("a smoothed distribution requires alpha > 0");
    const double denom = static_cast<double>(counts.sum()) + static_cast<double>(kNumLabels) * alpha;
    ClassDistribution d;
    for (Label c : kLabels) d.p[c] = (static_cast<double>(counts[c]) + alpha) / denom;
    return d;
}

ClassDistribution conditional_dist(const BigramTable& table, const Bigram& w) {
    return smoothed_dist(table.counts(w), table.alpha());
}

double entropy(const ClassDistribution& dist) noexcept {
    double h = 0.0;
    for (Label c : kLabels) {
        const double p = dist[c];
        if (p > 0.0) h -= p * std::log(p);
    }
    return h;
}

std::vector<RankedBigram> rank_bigrams(const BigramTable& table, std::int64_t min_count,
                                       std::size_t top_k) {
    if (min_count < 0) throw DomainError("min_count must be >= 0");
    if (top_k < 1) throw DomainError("top_k must be >= 1");

    std::vector<RankedBigram> out;
    for (const auto& [w, counts] : table.entries()) {
        const std::int64_t total = counts.sum();
        if (total <= min_count) continue;
        RankedBigram r;
        r.bigram = w;
        r.dist = smoothed_dist(counts, table.alpha());
        r.entropy = entropy(r.dist);
        r.total_count = total;
        r.per_class_counts = counts;
        out.push_back(std::move(r));
    }
    const auto before = [](const RankedBigram& a, const RankedBigram& b) {
        if (a.entropy != b.entropy) return a.entropy < b.entropy;
        if (a.total_count != b.total_count) return a.total_count > b.total_count;
        return a.bigram < b.bigram;
    };
    if (out.size() > top_k) {
        std::partial_sort(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(top_k), out.end(), before);
        out.resize(top_k);
    } else {
        std::sort(out.begin(), out.end(), before);
    }
    return out;
}

double odds_ratio(const BigramTable& table, const Bigram& w, Label c) {
    const auto* counts = table.find(w);
    if (!counts) throw DomainError("bigram '" + w.str() + "' is not in the table");
    const std::int64_t target = (*counts)[c];
    const std::int64_t rest = counts->sum() - target;
    if (rest == 0) return std::numeric_limits<double>::infinity();
    return static_cast<double>(target) / static_cast<double>(rest);
}

double mean_max_probability(std::span<const RankedBigram> ranked) noexcept {
    if (ranked.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : ranked) s += r.dist.max();
    return s / static_cast<double>(ranked.size());
}

double mean_entropy(std::span<const RankedBigram> ranked) noexcept {
    if (ranked.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : ranked) s += r.entropy;
    return s / static_cast<double>(ranked.size());
}

double ComparisonReport::mean_train_entropy() const noexcept {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.train.entropy;
    return s / static_cast<double>(rows.size());
}

double ComparisonReport::mean_test_entropy() const noexcept {
    if (rows.empty()) return 0.0;
    double s = 0.0;
    for (const auto& r : rows) s += r.test ? r.test->entropy : 0.0;
    return s / static_cast<double>(rows.size());
}

SplitStats split_stats(const BigramTable& table, const Bigram& w) {
    SplitStats s;
    s.counts = table.counts(w);
    s.count = s.counts.sum();
    s.dist = smoothed_dist(s.counts, table.alpha());
    s.entropy = entropy(s.dist);
    const auto denom = table.share_denominator();
    s.share = denom > 0 ? static_cast<double>(s.count) / static_cast<double>(denom) : 0.0;
    return s;
}

ComparisonReport describe_split(const BigramTable& train, std::span<const RankedBigram> ranked) {
    ComparisonReport report;
    report.side = train.side();
    report.mode = train.mode();
    report.alpha = train.alpha();
    for (const auto& r : ranked) report.rows.push_back({r.bigram, split_stats(train, r.bigram), std::nullopt});
    return report;
}

ComparisonReport compare_splits(const BigramTable& train, const BigramTable& test,
                                std::span<const RankedBigram> ranked) {
    if (train.side() != test.side() || train.mode() != test.mode())
        throw DomainError("train and test tables must share side and counting mode");
    ComparisonReport report = describe_split(train, ranked);
    for (auto& row : report.rows) row.test = split_stats(test, row.bigram);
    return report;
}

} // namespace nlibias
