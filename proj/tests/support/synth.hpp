#pragma once

// Synthetic NLI corpora for tests. Hypotheses are drawn from a shared vocabulary and,
// with probability cue_rate, carry a label-associated cue phrase; a fraction of cues is
// attached to the wrong label so the association is strong but not deterministic.

#include <cstdio>
#include <string>
#include <vector>

#include "nlibias/corpus.hpp"
#include "nlibias/random.hpp"

namespace nlibias::testing {

struct SynthSpec {
    std::size_t n = 100;
    std::uint64_t seed = 1;
    std::size_t vocab = 40;
    std::size_t min_len = 1;
    std::size_t max_len = 8;
    double cue_rate = 0.3;
    double cue_noise = 0.1;
    std::string id_prefix = "s";
};

inline const char* cue_for(Label c) {
    switch (c) {
        case Label::Contradiction: return "nobody is";
        case Label::Neutral: return "tall human";
        case Label::Entailment: return "some humans";
    }
    return "";
}

inline std::string word(std::size_t i) { return "w" + std::to_string(i); }

inline Corpus synth_corpus(const SynthSpec& spec) {
    Rng rng(spec.seed);
    Corpus corpus;
    corpus.source_path = "synthetic";
    for (std::size_t i = 0; i < spec.n; ++i) {
        // The first three instances cover every label.
        const Label label = i < 3 ? kLabels[i] : kLabels[rng.below(3)];
        const std::size_t len = spec.min_len + rng.below(spec.max_len - spec.min_len + 1);
        std::string hyp;
        // Skewed word choice so that bigrams repeat.
        for (std::size_t t = 0; t < len; ++t) {
            const double u = rng.uniform();
            const auto w = static_cast<std::size_t>(u * u * static_cast<double>(spec.vocab));
            if (!hyp.empty()) hyp += ' ';
            hyp += word(w);
        }
        if (rng.uniform() < spec.cue_rate) {
            Label cue_label = label;
            if (rng.uniform() < spec.cue_noise) cue_label = kLabels[rng.below(3)];
            hyp = std::string(cue_for(cue_label)) + ' ' + hyp;
        }
        std::string premise = "a person " + word(rng.below(spec.vocab)) + " near " + word(rng.below(spec.vocab));
        char id[64];
        std::snprintf(id, sizeof id, "%s%06zu", spec.id_prefix.c_str(), i);
        corpus.instances.push_back(make_instance(id, premise, hyp, label));
    }
    corpus.load_stats.loaded = corpus.size();
    return corpus;
}

/// Small random corpus with a tiny vocabulary, so scores tie often.
inline Corpus random_small_corpus(Rng& rng, std::size_t max_n = 200) {
    SynthSpec spec;
    spec.n = 3 + rng.below(max_n - 2);
    spec.seed = rng.next();
    spec.vocab = 3 + rng.below(10);
    spec.max_len = 2 + rng.below(7);
    spec.cue_rate = rng.uniform() * 0.6;
    return synth_corpus(spec);
}

} // namespace nlibias::testing
