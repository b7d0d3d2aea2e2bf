#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "nlibias/corpus.hpp"

namespace nlibias {

enum class PruneMode { Exact, Batched };

std::string_view name(PruneMode m) noexcept;

/// Corpora smaller than this default to exact mode.
inline constexpr std::size_t kExactModeLimit = 50'000;
inline constexpr std::size_t kDefaultBatchSize = 1000;

struct PruneConfig {
    double lambda = 0.2;
    PruneMode mode = PruneMode::Exact;
    std::size_t batch_size = kDefaultBatchSize;
    std::uint64_t seed = 0;
    double alpha = 1.0;
    unsigned threads = 1;
};

PruneMode default_prune_mode(std::size_t corpus_size) noexcept;

/// floor(lambda * n). Throws DomainError unless 0 < lambda < 1 and the result is >= 1.
std::size_t removal_count(std::size_t n, double lambda);

struct PruneStep {
    /// Retrain step (1-based). Equals removed_total in exact mode.
    std::size_t iteration = 0;
    std::string id;
    double score = 0.0;
    std::size_t removed_total = 0;
};

struct PruneTrace {
    std::vector<PruneStep> steps;
    std::size_t target_removals = 0;
    /// Set when the next removal would have left a class without instances.
    bool truncated = false;
    PruneMode mode = PruneMode::Exact;
    std::size_t batch_size = 1;
    std::size_t scoring_passes = 0;
    double wall_seconds = 0.0;

    std::size_t removed() const noexcept { return steps.size(); }
};

struct PruneResult {
    Corpus corpus;
    PruneTrace trace;
};

/// Greedy removal of the instances whose gold label the hypothesis-only Naive Bayes model
/// predicts most confidently, updating the model after every removal.
///
/// Exact mode rescores every survivor before each removal. Batched mode rescores once per
/// epoch and removes the batch_size lowest scorers, an approximation that coincides with exact
/// mode at batch_size 1. Ties go to the smaller id. Survivors keep their original order.
PruneResult prune_greedy(const Corpus& corpus, const PruneConfig& config);

struct RandomPruneResult {
    Corpus corpus;
    std::vector<std::string> removed_ids;
    std::string algorithm;
};

/// Removes floor(lambda * n) instances chosen uniformly without replacement.
RandomPruneResult prune_random(const Corpus& corpus, double lambda, std::uint64_t seed);

} // namespace nlibias
