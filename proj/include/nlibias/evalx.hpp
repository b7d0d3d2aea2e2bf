#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "nlibias/corpus.hpp"
#include "nlibias/label.hpp"

namespace nlibias {

struct EvalReport {
    double accuracy = 0.0;
    /// Precision is 0 for a class never predicted; recall is 0 for a class absent from test.
    PerLabel<double> precision;
    PerLabel<double> recall;
    /// confusion[gold][predicted], indexed by index(Label).
    std::array<std::array<std::int64_t, kNumLabels>, kNumLabels> confusion{};
    /// Accuracy of always predicting the most frequent training label.
    double majority_baseline = 0.0;
    Label majority_label = Label::Contradiction;
    double alpha = 1.0;
    Fingerprint train;
    Fingerprint test;

    std::int64_t total() const noexcept;
    std::int64_t correct() const noexcept;
};

/// Trains the hypothesis-only model on `train` and predicts every `test` hypothesis by
/// argmax posterior (ties: contradiction, entailment, neutral).
EvalReport eval_hypothesis_only(const Corpus& train, const Corpus& test, double alpha = 1.0,
                                unsigned threads = 1);

struct DeltaReport {
    std::vector<std::string> labels;
    std::vector<double> accuracies;
    /// deltas[i] = accuracies[i + 1] - accuracies[i]
    std::vector<double> deltas;
    /// pairwise[i][j] = accuracies[j] - accuracies[i]
    std::vector<std::vector<double>> pairwise;
    Fingerprint test;
};

/// Tabulates accuracies of reports computed on one test corpus. Throws DomainError for fewer
/// than two reports or a label count mismatch, FingerprintMismatch for differing test sets.
DeltaReport eval_delta(std::span<const EvalReport> reports, std::span<const std::string> labels);

} // namespace nlibias
