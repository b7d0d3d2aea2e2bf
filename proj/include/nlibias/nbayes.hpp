#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <span>
#include <unordered_map>
#include <vector>

#include "nlibias/corpus.hpp"
#include "nlibias/label.hpp"
#include "nlibias/stats.hpp"

namespace nlibias {

/// Bag-of-bigrams multinomial Naive Bayes over hypotheses.
///
///   log p(c, h) = log(N_c / N) + sum_w log(n_wc + alpha) - L * log(M_c + alpha V)
///
/// where N_c counts instances of class c, n_wc occurrences of bigram w in class c,
/// M_c = sum_w n_wc, L the number of bigrams in h and V the vocabulary size. V is the number
/// of distinct bigrams ever added (a high-water mark) or a pinned floor, whichever is
/// larger; it never shrinks when counts are removed. The sum runs over the bigrams of h
/// sorted lexicographically, so equal bigram multisets always give bit-equal scores.
///
/// add/remove are exact inverses and cost O(|h|). A model is safe to read from many threads;
/// mutation needs exclusive access.
class NaiveBayesModel {
public:
    using FeatureId = std::uint32_t;
    static constexpr FeatureId kUnknown = std::numeric_limits<FeatureId>::max();

    /// Throws DomainError unless alpha > 0.
    explicit NaiveBayesModel(double alpha = 1.0);

    struct TrainOptions {
        unsigned threads = 1;
        /// Floor for the vocabulary size used in the likelihood denominator.
        std::size_t min_vocabulary = 0;
    };

    /// Throws EmptyCorpusError for an empty corpus and DomainError when a label is missing.
    static NaiveBayesModel train(const Corpus& corpus, double alpha, const TrainOptions& options);
    static NaiveBayesModel train(const Corpus& corpus, double alpha = 1.0) {
        return train(corpus, alpha, TrainOptions{});
    }

    void add(const Instance& instance);
    /// Throws DoubleRemovalError, leaving the model untouched, if any count would go negative.
    void remove(const Instance& instance);

    /// Feature ids of the hypothesis bigrams in scoring order. Unseen bigrams map to kUnknown.
    std::vector<FeatureId> encode(std::span<const std::string> tokens) const;
    void add(std::span<const FeatureId> features, Label label);
    void remove(std::span<const FeatureId> features, Label label);

    ClassDistribution posterior(std::span<const std::string> hypothesis_tokens) const;
    ClassDistribution posterior_encoded(std::span<const FeatureId> features) const;

    /// -log p(label | hypothesis), clamped at 0.
    double score(const Instance& instance) const;
    double score_encoded(std::span<const FeatureId> features, Label label) const;

    /// Most probable label; ties go to the earlier label in enum order.
    Label predict(std::span<const std::string> hypothesis_tokens) const;

    /// Unnormalized log joint per class.
    PerLabel<double> log_joint(std::span<const FeatureId> features) const;

    double alpha() const noexcept { return alpha_; }
    std::size_t vocabulary_size() const noexcept;
    void pin_vocabulary(std::size_t floor) noexcept { vocabulary_floor_ = floor; }
    const ClassCounts& instance_counts() const noexcept { return instance_counts_; }
    const ClassCounts& class_mass() const noexcept { return class_mass_; }
    std::int64_t instances() const noexcept { return instance_counts_.sum(); }
    PerLabel<double> priors() const;
    ClassCounts counts(const Bigram& w) const;
    std::size_t features() const noexcept { return bigrams_.size(); }
    const Bigram& bigram(FeatureId f) const { return bigrams_[f]; }
    const ClassCounts& feature_counts(FeatureId f) const { return counts_[f]; }

    /// Equal instance counts, class mass and non-zero bigram counts. Ignores V.
    bool same_counts(const NaiveBayesModel& other) const;

    /// Text snapshot, one bigram per line, sorted; see README for the layout.
    void write_snapshot(std::ostream& out) const;
    static NaiveBayesModel read_snapshot(std::istream& in);

private:
    FeatureId intern(const Bigram& w);
    std::vector<FeatureId> encode_interning(std::span<const std::string> tokens);
    void set_count(FeatureId f, Label c, std::int64_t value);

    double alpha_;
    double log_alpha_;
    std::size_t vocabulary_floor_ = 0;
    std::unordered_map<Bigram, FeatureId, BigramHash> index_;
    std::vector<Bigram> bigrams_;
    std::vector<ClassCounts> counts_;
    // log(n_wc + alpha), kept in step with counts_.
    std::vector<PerLabel<double>> log_counts_;
    ClassCounts instance_counts_;
    ClassCounts class_mass_;
};

} // namespace nlibias
