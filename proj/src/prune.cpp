#include "nlibias/prune.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include "nlibias/error.hpp"
#include "nlibias/nbayes.hpp"
#include "nlibias/parallel.hpp"
#include "nlibias/random.hpp"

namespace nlibias {

namespace {

void check_prunable(const Corpus& corpus) {
    if (corpus.empty()) throw EmptyCorpusError("cannot prune an empty corpus");
    const auto labels = corpus.label_counts();
    for (Label c : kLabels)
        if (labels[c] == 0) throw DomainError("corpus has no '" + std::string(name(c)) + "' instance");
}

Corpus survivors(const Corpus& corpus, const std::vector<bool>& removed, std::string note) {
    Corpus out;
    out.source_path = corpus.source_path;
    out.side_note = corpus.side_note.empty() ? std::move(note) : corpus.side_note + "; " + note;
    out.load_stats = corpus.load_stats;
    for (std::size_t i = 0; i < corpus.size(); ++i)
        if (!removed[i]) out.instances.push_back(corpus[i]);
    return out;
}

} // namespace

std::string_view name(PruneMode m) noexcept { return m == PruneMode::Exact ? "exact" : "batched"; }

PruneMode default_prune_mode(std::size_t corpus_size) noexcept {
    return corpus_size < kExactModeLimit ? PruneMode::Exact : PruneMode::Batched;
}

std::size_t removal_count(std::size_t n, double lambda) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw DomainError("lambda must lie in (0, 1)");
    // The relative nudge absorbs decimal representation error, e.g. 0.29 * 100.
    const auto k = static_cast<std::size_t>(std::floor(lambda * static_cast<double>(n) * (1.0 + 1e-12)));
    if (k == 0) throw DomainError("lambda * |D| rounds down to zero removals");
    return k;
}

PruneResult prune_greedy(const Corpus& corpus, const PruneConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    check_prunable(corpus);
    const std::size_t target = removal_count(corpus.size(), config.lambda);
    const std::size_t batch = config.mode == PruneMode::Exact ? 1 : config.batch_size;
    if (batch < 1) throw DomainError("batch_size must be >= 1");

    NaiveBayesModel model = NaiveBayesModel::train(corpus, config.alpha, {config.threads, 0});
    const std::size_t n = corpus.size();
    std::vector<std::vector<NaiveBayesModel::FeatureId>> features(n);
    parallel_chunks(n, config.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) features[i] = model.encode(corpus[i].hypothesis_tokens);
    });

    PruneTrace trace;
    trace.target_removals = target;
    trace.mode = config.mode;
    trace.batch_size = batch;

    std::vector<bool> removed(n, false);
    std::vector<std::size_t> alive(n);
    for (std::size_t i = 0; i < n; ++i) alive[i] = i;
    std::vector<double> scores(n, 0.0);
    const auto before = [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] < scores[b];
        return corpus[a].id < corpus[b].id;
    };

    while (trace.removed() < target && !trace.truncated) {
        ++trace.scoring_passes;
        parallel_chunks(alive.size(), config.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
            for (std::size_t k = begin; k < end; ++k) {
                const std::size_t i = alive[k];
                scores[i] = model.score_encoded(features[i], corpus[i].label);
            }
        });

        const std::size_t take = std::min(batch, target - trace.removed());
        std::vector<std::size_t> chosen;
        if (take == 1) {
            chosen.push_back(*std::min_element(alive.begin(), alive.end(), before));
        } else {
            chosen = alive;
            std::partial_sort(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(take), chosen.end(), before);
            chosen.resize(take);
        }

        for (std::size_t i : chosen) {
            const Label c = corpus[i].label;
            if (model.instance_counts()[c] <= 1) {
                trace.truncated = true;
                break;
            }
            model.remove(features[i], c);
            removed[i] = true;
            trace.steps.push_back({trace.scoring_passes, corpus[i].id, scores[i], trace.removed() + 1});
        }
        std::erase_if(alive, [&](std::size_t i) { return removed[i]; });
    }

    PruneResult result;
    result.corpus = survivors(corpus, removed, "greedy-pruned");
    trace.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    result.trace = std::move(trace);
    return result;
}

RandomPruneResult prune_random(const Corpus& corpus, double lambda, std::uint64_t seed) {
    if (corpus.empty()) throw EmptyCorpusError("cannot prune an empty corpus");
    const std::size_t target = removal_count(corpus.size(), lambda);
    Rng rng(seed);
    const auto picked = sample_without_replacement(corpus.size(), target, rng);

    std::vector<bool> removed(corpus.size(), false);
    RandomPruneResult result;
    for (std::size_t i : picked) {
        removed[i] = true;
        result.removed_ids.push_back(corpus[i].id);
    }
    result.corpus = survivors(corpus, removed, "random-pruned");
    result.algorithm = std::string(Rng::kAlgorithm) + "/partial-fisher-yates";
    return result;
}

} // namespace nlibias
