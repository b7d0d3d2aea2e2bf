#include "nlibias/evalx.hpp"

#include "nlibias/error.hpp"
#include "nlibias/nbayes.hpp"
#include "nlibias/parallel.hpp"

namespace nlibias {

std::int64_t EvalReport::total() const noexcept {
    std::int64_t t = 0;
    for (const auto& row : confusion)
        for (auto x : row) t += x;
    return t;
}

std::int64_t EvalReport::correct() const noexcept {
    std::int64_t t = 0;
    for (std::size_t i = 0; i < kNumLabels; ++i) t += confusion[i][i];
    return t;
}

EvalReport eval_hypothesis_only(const Corpus& train, const Corpus& test, double alpha, unsigned threads) {
    if (test.empty()) throw EmptyCorpusError("test corpus is empty");
    const auto model = NaiveBayesModel::train(train, alpha, {threads, 0});

    std::vector<Label> predicted(test.size());
    parallel_chunks(test.size(), threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) predicted[i] = model.predict(test[i].hypothesis_tokens);
    });

    EvalReport r;
    r.alpha = alpha;
    r.train = fingerprint(train);
    r.test = fingerprint(test);
    for (std::size_t i = 0; i < test.size(); ++i) ++r.confusion[index(test[i].label)][index(predicted[i])];

    const auto total = static_cast<double>(r.total());
    r.accuracy = static_cast<double>(r.correct()) / total;
    for (Label c : kLabels) {
        std::int64_t gold = 0, pred = 0;
        for (Label o : kLabels) {
            gold += r.confusion[index(c)][index(o)];
            pred += r.confusion[index(o)][index(c)];
        }
        const auto hit = static_cast<double>(r.confusion[index(c)][index(c)]);
        r.precision[c] = pred > 0 ? hit / static_cast<double>(pred) : 0.0;
        r.recall[c] = gold > 0 ? hit / static_cast<double>(gold) : 0.0;
    }

    const auto train_labels = train.label_counts();
    for (Label c : kLabels)
        if (train_labels[c] > train_labels[r.majority_label]) r.majority_label = c;
    std::int64_t majority_hits = 0;
    for (Label o : kLabels) majority_hits += r.confusion[index(r.majority_label)][index(o)];
    r.majority_baseline = static_cast<double>(majority_hits) / total;
    return r;
}

DeltaReport eval_delta(std::span<const EvalReport> reports, std::span<const std::string> labels) {
    if (reports.size() < 2) throw DomainError("eval_delta needs at least two reports");
    if (labels.size() != reports.size()) throw DomainError("one label per report is required");
    for (const auto& r : reports)
        if (r.test != reports.front().test)
            throw FingerprintMismatch("reports were computed on different test corpora (" +
                                      reports.front().test.str() + " vs " + r.test.str() + ")");

    DeltaReport d;
    d.test = reports.front().test;
    d.labels.assign(labels.begin(), labels.end());
    for (const auto& r : reports) d.accuracies.push_back(r.accuracy);
    for (std::size_t i = 0; i + 1 < d.accuracies.size(); ++i) d.deltas.push_back(d.accuracies[i + 1] - d.accuracies[i]);
    d.pairwise.assign(d.accuracies.size(), std::vector<double>(d.accuracies.size(), 0.0));
    for (std::size_t i = 0; i < d.accuracies.size(); ++i)
        for (std::size_t j = 0; j < d.accuracies.size(); ++j) d.pairwise[i][j] = d.accuracies[j] - d.accuracies[i];
    return d;
}

} // namespace nlibias
