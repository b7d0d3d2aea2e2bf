#include <doctest.h>

#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "nlibias/error.hpp"
#include "nlibias/nbayes.hpp"
#include "nlibias/random.hpp"
#include "support/oracle.hpp"
#include "support/synth.hpp"

using namespace nlibias;

namespace {

Corpus toy_corpus() {
    Corpus c;
    const std::vector<std::pair<const char*, Label>> rows = {
        {"Nobody is singing.", Label::Contradiction},   {"Nobody is here.", Label::Contradiction},
        {"The man is not eating.", Label::Contradiction}, {"A tall human stands.", Label::Neutral},
        {"The man is tall.", Label::Neutral},           {"He is here for a contest.", Label::Neutral},
        {"Some humans walking.", Label::Entailment},    {"A man is here.", Label::Entailment},
        {"Somebody is singing.", Label::Entailment},    {"A person is outdoors.", Label::Entailment},
    };
    int i = 0;
    for (const auto& [hyp, label] : rows) c.instances.push_back(make_instance("t" + std::to_string(i++), "p", hyp, label));
    return c;
}

// Posterior by direct multiplication, no logs.
PerLabel<double> posterior_oracle(const Corpus& train, const Tokens& hyp, double alpha) {
    std::map<std::pair<std::string, std::string>, PerLabel<double>> n;
    PerLabel<double> mass, docs;
    for (const auto& inst : train) {
        docs[inst.label] += 1;
        for (std::size_t i = 0; i + 1 < inst.hypothesis_tokens.size(); ++i) {
            n[{inst.hypothesis_tokens[i], inst.hypothesis_tokens[i + 1]}][inst.label] += 1;
            mass[inst.label] += 1;
        }
    }
    const double vocab = static_cast<double>(n.size());
    PerLabel<double> p;
    double z = 0.0;
    for (Label c : kLabels) {
        double v = docs[c] / static_cast<double>(train.size());
        for (std::size_t i = 0; i + 1 < hyp.size(); ++i) {
            auto it = n.find({hyp[i], hyp[i + 1]});
            const double k = it == n.end() ? 0.0 : it->second[c];
            v *= (k + alpha) / (mass[c] + alpha * vocab);
        }
        p[c] = v;
        z += v;
    }
    for (Label c : kLabels) p[c] /= z;
    return p;
}

void check_matches_brute(const NaiveBayesModel& m, const Corpus& data) {
    std::vector<const Instance*> ptrs;
    for (const auto& inst : data) ptrs.push_back(&inst);
    const auto bc = testing::brute_count(ptrs);
    for (Label c : kLabels) {
        CHECK(m.instance_counts()[c] == bc.instances[index(c)]);
        CHECK(m.class_mass()[c] == bc.mass[index(c)]);
    }
    std::size_t nonzero = 0;
    for (const auto& [pair, counts] : bc.bigram) {
        const auto got = m.counts({pair.first, pair.second});
        for (Label c : kLabels) CHECK(got[c] == counts[index(c)]);
        ++nonzero;
    }
    std::size_t model_nonzero = 0;
    for (NaiveBayesModel::FeatureId f = 0; f < m.features(); ++f)
        if (m.feature_counts(f) != ClassCounts{}) ++model_nonzero;
    CHECK(model_nonzero == nonzero);
}

Corpus without(const Corpus& c, const std::set<std::size_t>& drop) {
    Corpus out;
    for (std::size_t i = 0; i < c.size(); ++i)
        if (!drop.count(i)) out.instances.push_back(c[i]);
    return out;
}

} // namespace

TEST_CASE("train") {
    SUBCASE("one instance per class gives equal priors") {
        Corpus c;
        c.instances = {make_instance("a", "p", "a b", Label::Contradiction), make_instance("b", "p", "c d", Label::Neutral),
                       make_instance("c", "p", "e f", Label::Entailment)};
        const auto m = NaiveBayesModel::train(c, 1.0);
        for (Label l : kLabels) CHECK(m.priors()[l] == doctest::Approx(1.0 / 3));
        CHECK(m.vocabulary_size() == 3);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(NaiveBayesModel::train(Corpus{}, 1.0), EmptyCorpusError);
        Corpus c;
        c.instances = {make_instance("a", "p", "a b", Label::Contradiction), make_instance("b", "p", "c d", Label::Neutral)};
        CHECK_THROWS_AS(NaiveBayesModel::train(c, 1.0), DomainError);
        CHECK_THROWS_AS(NaiveBayesModel(0.0), DomainError);
    }
    SUBCASE("30-instance corpus equals a brute-force recount") {
        testing::SynthSpec spec;
        spec.n = 30;
        spec.vocab = 6;
        const auto c = testing::synth_corpus(spec);
        check_matches_brute(NaiveBayesModel::train(c, 1.0), c);
    }
    SUBCASE("thread count does not change the counts") {
        testing::SynthSpec spec;
        spec.n = 2000;
        const auto c = testing::synth_corpus(spec);
        const auto a = NaiveBayesModel::train(c, 1.0, {1, 0});
        const auto b = NaiveBayesModel::train(c, 1.0, {4, 0});
        CHECK(a.same_counts(b));
        std::ostringstream sa, sb;
        a.write_snapshot(sa);
        b.write_snapshot(sb);
        CHECK(sa.str() == sb.str());
    }
}

TEST_CASE("posterior") {
    SUBCASE("symmetric counts give a uniform posterior") {
        Corpus c;
        int i = 0;
        for (Label l : kLabels)
            for (const char* h : {"a b c", "b c d", "x y"}) c.instances.push_back(make_instance("s" + std::to_string(i++), "p", h, l));
        const auto m = NaiveBayesModel::train(c, 1.0);
        for (const Tokens& h : {Tokens{"a", "b", "c"}, Tokens{"q", "r"}, Tokens{"x", "y", "a", "b"}}) {
            const auto p = m.posterior(h);
            for (Label l : kLabels) CHECK(p[l] == doctest::Approx(1.0 / 3).epsilon(1e-12));
        }
    }
    SUBCASE("a single token falls back to the prior") {
        const auto c = toy_corpus();
        const auto m = NaiveBayesModel::train(c, 1.0);
        const auto p = m.posterior(Tokens{"nobody"});
        CHECK(p[Label::Contradiction] == doctest::Approx(0.3));
        CHECK(p[Label::Neutral] == doctest::Approx(0.3));
        CHECK(p[Label::Entailment] == doctest::Approx(0.4));
        CHECK(m.posterior(Tokens{}).p == p.p);
    }
    SUBCASE("10-instance toy model matches direct evaluation") {
        const auto c = toy_corpus();
        const auto m = NaiveBayesModel::train(c, 1.0);
        for (const Tokens& h : {Tokens{"nobody", "is", "here"}, Tokens{"some", "humans", "walking"},
                                Tokens{"a", "tall", "man", "is", "here"}, Tokens{"unseen", "words", "only"}}) {
            const auto p = m.posterior(h);
            const auto want = posterior_oracle(c, h, 1.0);
            for (Label l : kLabels) CHECK(p[l] == doctest::Approx(want[l]).epsilon(1e-12));
            CHECK(std::abs(p.p.sum() - 1.0) <= 1e-12);
        }
        const auto p = m.posterior(Tokens{"nobody", "is", "here"});
        CHECK(p.argmax() == Label::Contradiction);

        Instance probe = make_instance("probe", "p", "nobody is here", Label::Contradiction);
        CHECK(m.score(probe) == doctest::Approx(-std::log(posterior_oracle(c, probe.hypothesis_tokens, 1.0)[Label::Contradiction])).epsilon(1e-12));
    }
}

TEST_CASE("score bounds") {
    Corpus c;
    int i = 0;
    for (Label l : kLabels) c.instances.push_back(make_instance("s" + std::to_string(i++), "p", "same words", l));
    const auto m = NaiveBayesModel::train(c, 1.0);
    CHECK(m.score(c[0]) == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    // A bigram seen thousands of times under one label drives its score towards 0.
    Corpus skew = c;
    for (int k = 0; k < 3000; ++k) skew.instances.push_back(make_instance("k" + std::to_string(k), "p", "nobody is", Label::Contradiction));
    const auto ms = NaiveBayesModel::train(skew, 1.0);
    const auto probe = make_instance("probe", "p", "nobody is", Label::Contradiction);
    CHECK(ms.score(probe) >= 0.0);
    CHECK(ms.score(probe) < 1e-3);
}

TEST_CASE("remove and add") {
    SUBCASE("train on one, remove it") {
        Corpus c;
        c.instances = {make_instance("a", "p", "a b", Label::Contradiction), make_instance("b", "p", "c d", Label::Neutral),
                       make_instance("c", "p", "e f", Label::Entailment)};
        auto m = NaiveBayesModel::train(c, 1.0);
        for (const auto& inst : c) m.remove(inst);
        CHECK(m.instance_counts() == ClassCounts{});
        CHECK(m.class_mass() == ClassCounts{});
        CHECK(m.vocabulary_size() == 3); // high-water mark
    }
    SUBCASE("double removal is detected and leaves the model intact") {
        const auto c = toy_corpus();
        auto m = NaiveBayesModel::train(c, 1.0);
        m.remove(c[0]);
        const auto snapshot = m;
        CHECK_THROWS_AS(m.remove(c[0]), DoubleRemovalError);
        CHECK(m.same_counts(snapshot));
        const auto unknown = make_instance("u", "p", "never seen before", Label::Neutral);
        CHECK_THROWS_AS(m.remove(unknown), DoubleRemovalError);
    }
    SUBCASE("remove then add restores the counts") {
        const auto c = toy_corpus();
        const auto original = NaiveBayesModel::train(c, 1.0);
        auto m = original;
        m.remove(c[3]);
        m.add(c[3]);
        CHECK(m.same_counts(original));
        for (const auto& inst : c) CHECK(m.score(inst) == original.score(inst));
    }
    SUBCASE("add to an empty model equals training on a singleton") {
        Corpus one;
        one.instances = {make_instance("a", "p", "x y z", Label::Neutral)};
        NaiveBayesModel m(1.0);
        m.add(one[0]);
        check_matches_brute(m, one);
    }
    SUBCASE("remove equals retraining without the instance") {
        Rng rng(17);
        for (int trial = 0; trial < 40; ++trial) {
            const auto c = testing::random_small_corpus(rng, 60);
            auto m = NaiveBayesModel::train(c, 1.0);
            const std::size_t x = rng.below(c.size());
            m.remove(c[x]);
            check_matches_brute(m, without(c, {x}));
        }
    }
    SUBCASE("random add/remove sequences equal training on the survivors") {
        Rng rng(23);
        for (int trial = 0; trial < 40; ++trial) {
            const auto c = testing::random_small_corpus(rng, 80);
            auto m = NaiveBayesModel::train(c, 1.0);
            std::set<std::size_t> out;
            for (int step = 0; step < 60; ++step) {
                const std::size_t i = rng.below(c.size());
                if (out.count(i)) {
                    m.add(c[i]);
                    out.erase(i);
                } else {
                    m.remove(c[i]);
                    out.insert(i);
                }
            }
            check_matches_brute(m, without(c, out));
        }
    }
}

TEST_CASE("property: incremental posteriors equal retrained posteriors") {
    Rng rng(101);
    for (int trial = 0; trial < 30; ++trial) {
        const auto c = testing::random_small_corpus(rng);
        auto m = NaiveBayesModel::train(c, 1.0);
        const std::size_t vocab = m.vocabulary_size();
        std::set<std::size_t> out;
        const std::size_t removals = rng.below(c.size() / 2 + 1);
        for (std::size_t k = 0; k < removals; ++k) {
            const std::size_t i = rng.below(c.size());
            if (out.insert(i).second) m.remove(c[i]);
        }
        const auto survivors = without(c, out);
        const auto labels = survivors.label_counts();
        if (labels[Label::Contradiction] == 0 || labels[Label::Entailment] == 0 || labels[Label::Neutral] == 0) continue;
        const auto fresh = NaiveBayesModel::train(survivors, 1.0, {1, vocab});
        CHECK(fresh.vocabulary_size() == vocab);
        for (const auto& inst : c) {
            const auto a = m.posterior(inst.hypothesis_tokens);
            const auto b = fresh.posterior(inst.hypothesis_tokens);
            for (Label l : kLabels) CHECK(std::abs(a[l] - b[l]) <= 1e-9);
            CHECK(std::abs(a.p.sum() - 1.0) <= 1e-9);
            const double s = m.score(inst);
            CHECK(std::isfinite(s));
            CHECK(s >= 0.0);
        }
    }
}

TEST_CASE("snapshot round trip") {
    auto m = NaiveBayesModel::train(toy_corpus(), 0.5);
    m.remove(toy_corpus()[1]);
    std::stringstream ss;
    m.write_snapshot(ss);
    const std::string text = ss.str();
    CHECK(text.rfind("nlibias-nb 1\nalpha 0.5\nvocabulary ", 0) == 0);
    const auto back = NaiveBayesModel::read_snapshot(ss);
    CHECK(back.same_counts(m));
    CHECK(back.vocabulary_size() == m.vocabulary_size());
    CHECK(back.alpha() == m.alpha());
    for (const auto& inst : toy_corpus()) CHECK(back.score(inst) == doctest::Approx(m.score(inst)).epsilon(1e-14));

    std::istringstream bad("nlibias-nb 2\n");
    CHECK_THROWS_AS(NaiveBayesModel::read_snapshot(bad), Error);
}
