#include <doctest.h>

// End-to-end runs on corpora with planted label cues: the cues should be found, pruning
// should remove them, and a hypothesis-only model trained on the pruned data should lose
// most of its advantage.

#include <algorithm>
#include <cmath>

#include "nlibias/evalx.hpp"
#include "nlibias/prune.hpp"
#include "nlibias/stats.hpp"
#include "support/synth.hpp"

using namespace nlibias;
using nlibias::testing::SynthSpec;
using nlibias::testing::synth_corpus;

namespace {

SynthSpec spec(std::size_t n, std::uint64_t seed, const char* prefix, double cue_rate = 0.35) {
    SynthSpec s;
    s.n = n;
    s.seed = seed;
    s.vocab = 30;
    s.max_len = 6;
    s.cue_rate = cue_rate;
    s.cue_noise = 0.1;
    s.id_prefix = prefix;
    return s;
}

} // namespace

TEST_CASE("planted cues rank at the top") {
    const Corpus train = synth_corpus(spec(3000, 11, "tr"));
    const auto table = count_bigrams(train, Side::Hypothesis, 1.0);
    // A cue drags its most frequent neighbour bigram ("is w0") up with it.
    const auto ranked = rank_bigrams(table, 20, 6);
    REQUIRE(ranked.size() == 6);
    std::vector<std::string> top;
    for (const auto& r : ranked) top.push_back(r.bigram.str());
    CHECK(std::find(top.begin(), top.end(), "nobody is") != top.end());
    CHECK(std::find(top.begin(), top.end(), "tall human") != top.end());
    CHECK(std::find(top.begin(), top.end(), "some humans") != top.end());
    CHECK(conditional_dist(table, {"nobody", "is"}).argmax() == Label::Contradiction);
    CHECK(odds_ratio(table, {"nobody", "is"}, Label::Contradiction) > 5.0);
}

TEST_CASE("greedy pruning removes the hypothesis-only advantage") {
    // Few cued instances, so a fifth of the corpus is enough to strip most of them.
    const Corpus train = synth_corpus(spec(1500, 21, "tr", 0.15));
    const Corpus test = synth_corpus(spec(1500, 22, "te", 0.15));

    PruneConfig cfg;
    cfg.lambda = 0.2;
    cfg.mode = PruneMode::Batched;
    cfg.batch_size = 25;
    const auto greedy = prune_greedy(train, cfg);
    const auto random = prune_random(train, 0.2, 5);
    REQUIRE(greedy.corpus.size() == random.corpus.size());

    const auto original = eval_hypothesis_only(train, test);
    const auto after_greedy = eval_hypothesis_only(greedy.corpus, test);
    const auto after_random = eval_hypothesis_only(random.corpus, test);
    MESSAGE("original ", original.accuracy, " random ", after_random.accuracy, " greedy ", after_greedy.accuracy);

    CHECK(original.accuracy > original.majority_baseline);
    CHECK(after_greedy.accuracy < after_random.accuracy);
    CHECK(after_greedy.accuracy < original.accuracy - 0.02);
    // Random pruning of a fifth of the data barely moves the model.
    CHECK(std::abs(after_random.accuracy - original.accuracy) < 0.03);

    const std::vector<EvalReport> reports{original, after_random, after_greedy};
    const std::vector<std::string> labels{"original", "random", "greedy"};
    const auto delta = eval_delta(reports, labels);
    CHECK(delta.deltas[1] < 0.0);
}

TEST_CASE("pruning lowers the skew of the top bigrams") {
    const Corpus train = synth_corpus(spec(1500, 31, "tr"));
    PruneConfig cfg;
    cfg.lambda = 0.2;
    const auto pruned = prune_greedy(train, cfg);

    const auto before = rank_bigrams(count_bigrams(train, Side::Hypothesis, 1.0), 10, 8);
    const auto after = rank_bigrams(count_bigrams(pruned.corpus, Side::Hypothesis, 1.0), 10, 8);
    REQUIRE(before.size() == 8);
    REQUIRE(after.size() == 8);
    CHECK(mean_max_probability(after) < mean_max_probability(before));
    CHECK(mean_entropy(after) > mean_entropy(before));
}

TEST_CASE("top train bigrams are less skewed on a held-out split") {
    const Corpus train = synth_corpus(spec(3000, 41, "tr"));
    const Corpus test = synth_corpus(spec(1000, 42, "te"));
    const auto train_table = count_bigrams(train, Side::Hypothesis, 1.0);
    const auto test_table = count_bigrams(test, Side::Hypothesis, 1.0);
    const auto ranked = rank_bigrams(train_table, 20, 8);
    const auto report = compare_splits(train_table, test_table, ranked);
    REQUIRE(report.has_test());
    CHECK(report.mean_test_entropy() > report.mean_train_entropy());
    int agree = 0;
    for (const auto& row : report.rows) agree += row.train.dist.argmax() == row.test->dist.argmax();
    CHECK(agree >= 6);
}

TEST_CASE("premise shuffling leaves hypothesis-only statistics unchanged") {
    const Corpus train = synth_corpus(spec(400, 51, "tr"));
    const auto shuffled = shuffle_premises(train, 3);
    CHECK(shuffled.fixed_points == 0);
    CHECK(count_bigrams(train, Side::Hypothesis, 1.0) == count_bigrams(shuffled.corpus, Side::Hypothesis, 1.0));
    CHECK_FALSE(count_bigrams(train, Side::Premise, 1.0) == count_bigrams(shuffled.corpus, Side::Premise, 1.0));
}
