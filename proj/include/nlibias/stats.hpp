#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "nlibias/corpus.hpp"
#include "nlibias/label.hpp"

namespace nlibias {

enum class CountMode { Multiplicity, Presence };

std::string_view name(CountMode m) noexcept;

/// Smoothed label distribution.
struct ClassDistribution {
    PerLabel<double> p;

    double operator[](Label c) const noexcept { return p[c]; }
    /// First label (in enum order) with the largest probability.
    Label argmax() const noexcept;
    double max() const noexcept { return p[argmax()]; }
};

/// Per-class bigram counts for one sentence side.
///
/// In multiplicity mode counts are occurrences; in presence mode each instance contributes
/// at most one to a bigram. class_totals is the per-class sum over all bigrams in either
/// mode; instance_totals counts instances per class.
class BigramTable {
public:
    using Map = std::unordered_map<Bigram, ClassCounts, BigramHash>;

    BigramTable(Side side, double alpha, CountMode mode);

    void add(const Instance& instance);
    /// Adds every count of `other`. Side and mode must match.
    void merge(const BigramTable& other);

    /// nullptr when the bigram was never counted.
    const ClassCounts* find(const Bigram& w) const;
    ClassCounts counts(const Bigram& w) const;

    const Map& entries() const noexcept { return counts_; }
    const ClassCounts& class_totals() const noexcept { return class_totals_; }
    const ClassCounts& instance_totals() const noexcept { return instance_totals_; }
    std::size_t size() const noexcept { return counts_.size(); }

    /// Denominator of a bigram's share of its split: all bigram occurrences in
    /// multiplicity mode, all instances in presence mode.
    std::int64_t share_denominator() const noexcept;

    Side side() const noexcept { return side_; }
    double alpha() const noexcept { return alpha_; }
    CountMode mode() const noexcept { return mode_; }

    friend bool operator==(const BigramTable&, const BigramTable&) = default;

private:
    Side side_;
    double alpha_;
    CountMode mode_;
    Map counts_;
    ClassCounts class_totals_;
    ClassCounts instance_totals_;
};

/// Throws EmptyCorpusError on an empty corpus, DomainError when alpha < 0.
/// The result does not depend on `threads`.
BigramTable count_bigrams(const Corpus& corpus, Side side, double alpha,
                          CountMode mode = CountMode::Multiplicity, unsigned threads = 1);

/// (count[c] + alpha) / (sum + 3 alpha). Throws DomainError unless alpha > 0.
ClassDistribution smoothed_dist(const ClassCounts& counts, double alpha);

/// p(c|w) with the table's alpha. Unseen bigrams give the uniform distribution.
ClassDistribution conditional_dist(const BigramTable& table, const Bigram& w);

/// Natural-log entropy in nats, with 0 log 0 = 0.
double entropy(const ClassDistribution& dist) noexcept;

struct RankedBigram {
    Bigram bigram;
    ClassDistribution dist;
    double entropy = 0.0;
    std::int64_t total_count = 0;
    ClassCounts per_class_counts;
};

/// Bigrams whose raw total is strictly greater than min_count, by ascending entropy, then
/// descending total count, then bigram order. At most top_k are returned.
/// Throws DomainError when min_count < 0 or top_k < 1.
std::vector<RankedBigram> rank_bigrams(const BigramTable& table, std::int64_t min_count,
                                       std::size_t top_k);

/// Raw count for `c` divided by the raw count of all other classes combined. +infinity when
/// the other classes never saw the bigram. Throws DomainError for an absent bigram.
double odds_ratio(const BigramTable& table, const Bigram& w, Label c);

/// Mean of each bigram's largest class probability.
double mean_max_probability(std::span<const RankedBigram> ranked) noexcept;
double mean_entropy(std::span<const RankedBigram> ranked) noexcept;

struct SplitStats {
    std::int64_t count = 0;
    ClassCounts counts;
    ClassDistribution dist;
    double entropy = 0.0;
    /// count / share_denominator() of the split.
    double share = 0.0;
};

struct ComparisonRow {
    Bigram bigram;
    SplitStats train;
    std::optional<SplitStats> test;
};

struct ComparisonReport {
    Side side = Side::Hypothesis;
    CountMode mode = CountMode::Multiplicity;
    double alpha = 1.0;
    std::vector<ComparisonRow> rows;

    bool has_test() const noexcept { return !rows.empty() && rows.front().test.has_value(); }
    double mean_train_entropy() const noexcept;
    /// Requires has_test().
    double mean_test_entropy() const noexcept;
};

SplitStats split_stats(const BigramTable& table, const Bigram& w);

/// Train-side report for the ranked bigrams, without a test split.
ComparisonReport describe_split(const BigramTable& train, std::span<const RankedBigram> ranked);

/// Train and test statistics per ranked bigram. Throws DomainError when the tables differ in
/// side or mode.
ComparisonReport compare_splits(const BigramTable& train, const BigramTable& test,
                                std::span<const RankedBigram> ranked);

} // namespace nlibias
