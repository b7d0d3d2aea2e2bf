#include "nlibias/nbayes.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "nlibias/error.hpp"

namespace nlibias {

namespace {

constexpr const char* kSnapshotMagic = "nlibias-nb";
constexpr int kSnapshotVersion = 1;

std::string format_double(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace

NaiveBayesModel::NaiveBayesModel(double alpha) : alpha_(alpha), log_alpha_(std::log(alpha)) {
    if (!(alpha > 0.0)) throw DomainError("Naive Bayes smoothing requires alpha > 0");
}

NaiveBayesModel NaiveBayesModel::train(const Corpus& corpus, double alpha, const TrainOptions& options) {
    NaiveBayesModel model(alpha);
    if (corpus.empty()) throw EmptyCorpusError("cannot train on an empty corpus");
    const ClassCounts labels = corpus.label_counts();
    for (Label c : kLabels)
        if (labels[c] == 0)
            throw DomainError("training corpus has no '" + std::string(name(c)) + "' instance");

    const BigramTable table =
        count_bigrams(corpus, Side::Hypothesis, alpha, CountMode::Multiplicity, options.threads);
    std::vector<const BigramTable::Map::value_type*> entries;
    entries.reserve(table.size());
    for (const auto& e : table.entries()) entries.push_back(&e);
    std::sort(entries.begin(), entries.end(), [](auto* a, auto* b) { return a->first < b->first; });

    model.bigrams_.reserve(entries.size());
    model.counts_.reserve(entries.size());
    model.log_counts_.reserve(entries.size());
    for (const auto* e : entries) {
        const FeatureId f = model.intern(e->first);
        for (Label c : kLabels) model.set_count(f, c, e->second[c]);
    }
    model.instance_counts_ = table.instance_totals();
    model.class_mass_ = table.class_totals();
    model.vocabulary_floor_ = options.min_vocabulary;
    return model;
}

NaiveBayesModel::FeatureId NaiveBayesModel::intern(const Bigram& w) {
    auto [it, inserted] = index_.try_emplace(w, static_cast<FeatureId>(bigrams_.size()));
    if (inserted) {
        if (bigrams_.size() >= kUnknown) throw DomainError("feature space exhausted");
        bigrams_.push_back(w);
        counts_.emplace_back();
        PerLabel<double> logs;
        for (Label c : kLabels) logs[c] = log_alpha_;
        log_counts_.push_back(logs);
    }
    return it->second;
}

void NaiveBayesModel::set_count(FeatureId f, Label c, std::int64_t value) {
    counts_[f][c] = value;
    log_counts_[f][c] = std::log(static_cast<double>(value) + alpha_);
}

std::vector<NaiveBayesModel::FeatureId> NaiveBayesModel::encode(std::span<const std::string> tokens) const {
    auto bigrams = extract_bigrams(tokens);
    std::sort(bigrams.begin(), bigrams.end());
    std::vector<FeatureId> out;
    out.reserve(bigrams.size());
    for (const auto& w : bigrams) {
        auto it = index_.find(w);
        out.push_back(it == index_.end() ? kUnknown : it->second);
    }
    return out;
}

std::vector<NaiveBayesModel::FeatureId> NaiveBayesModel::encode_interning(std::span<const std::string> tokens) {
    auto bigrams = extract_bigrams(tokens);
    std::sort(bigrams.begin(), bigrams.end());
    std::vector<FeatureId> out;
    out.reserve(bigrams.size());
    for (const auto& w : bigrams) out.push_back(intern(w));
    return out;
}

void NaiveBayesModel::add(const Instance& instance) {
    add(encode_interning(instance.hypothesis_tokens), instance.label);
}

void NaiveBayesModel::remove(const Instance& instance) {
    remove(encode(instance.hypothesis_tokens), instance.label);
}

void NaiveBayesModel::add(std::span<const FeatureId> features, Label label) {
    for (FeatureId f : features)
        if (f >= bigrams_.size()) throw DomainError("cannot add an unknown feature");
    for (FeatureId f : features) set_count(f, label, counts_[f][label] + 1);
    class_mass_[label] += static_cast<std::int64_t>(features.size());
    ++instance_counts_[label];
}

void NaiveBayesModel::remove(std::span<const FeatureId> features, Label label) {
    const auto fail = [&] {
        throw DoubleRemovalError("removing a '" + std::string(name(label)) +
                                 "' instance would make a count negative");
    };
    if (instance_counts_[label] < 1 || class_mass_[label] < static_cast<std::int64_t>(features.size())) fail();
    // Equal features are adjacent because encode() sorts by bigram.
    for (std::size_t i = 0; i < features.size();) {
        std::size_t j = i;
        while (j < features.size() && features[j] == features[i]) ++j;
        const FeatureId f = features[i];
        if (f >= bigrams_.size() || counts_[f][label] < static_cast<std::int64_t>(j - i)) fail();
        i = j;
    }
    for (FeatureId f : features) set_count(f, label, counts_[f][label] - 1);
    class_mass_[label] -= static_cast<std::int64_t>(features.size());
    --instance_counts_[label];
}

std::size_t NaiveBayesModel::vocabulary_size() const noexcept {
    return std::max<std::size_t>({bigrams_.size(), vocabulary_floor_, 1});
}

PerLabel<double> NaiveBayesModel::priors() const {
    const auto n = instances();
    if (n == 0) throw DomainError("model holds no instances");
    PerLabel<double> p;
    for (Label c : kLabels) p[c] = static_cast<double>(instance_counts_[c]) / static_cast<double>(n);
    return p;
}

ClassCounts NaiveBayesModel::counts(const Bigram& w) const {
    auto it = index_.find(w);
    return it == index_.end() ? ClassCounts{} : counts_[it->second];
}

PerLabel<double> NaiveBayesModel::log_joint(std::span<const FeatureId> features) const {
    const auto n = instances();
    if (n == 0) throw DomainError("model holds no instances");
    const double vocab = static_cast<double>(vocabulary_size());
    const double length = static_cast<double>(features.size());
    PerLabel<double> lp;
    for (Label c : kLabels) {
        double s = 0.0;
        for (FeatureId f : features) s += f == kUnknown ? log_alpha_ : log_counts_[f][c];
        lp[c] = std::log(static_cast<double>(instance_counts_[c]) / static_cast<double>(n)) + s;
        if (!features.empty())
            lp[c] -= length * std::log(static_cast<double>(class_mass_[c]) + alpha_ * vocab);
    }
    return lp;
}

ClassDistribution NaiveBayesModel::posterior_encoded(std::span<const FeatureId> features) const {
    const auto lp = log_joint(features);
    double m = lp[kLabels[0]];
    for (Label c : kLabels) m = std::max(m, lp[c]);
    double z = 0.0;
    for (Label c : kLabels) z += std::exp(lp[c] - m);
    ClassDistribution d;
    for (Label c : kLabels) d.p[c] = std::exp(lp[c] - m) / z;
    return d;
}

ClassDistribution NaiveBayesModel::posterior(std::span<const std::string> hypothesis_tokens) const {
    return posterior_encoded(encode(hypothesis_tokens));
}

double NaiveBayesModel::score_encoded(std::span<const FeatureId> features, Label label) const {
    const auto lp = log_joint(features);
    double m = lp[kLabels[0]];
    for (Label c : kLabels) m = std::max(m, lp[c]);
    double z = 0.0;
    for (Label c : kLabels) z += std::exp(lp[c] - m);
    return std::max(0.0, (m + std::log(z)) - lp[label]);
}

double NaiveBayesModel::score(const Instance& instance) const {
    return score_encoded(encode(instance.hypothesis_tokens), instance.label);
}

Label NaiveBayesModel::predict(std::span<const std::string> hypothesis_tokens) const {
    const auto lp = log_joint(encode(hypothesis_tokens));
    Label best = kLabels[0];
    for (Label c : kLabels)
        if (lp[c] > lp[best]) best = c;
    return best;
}

bool NaiveBayesModel::same_counts(const NaiveBayesModel& other) const {
    if (instance_counts_ != other.instance_counts_ || class_mass_ != other.class_mass_) return false;
    const auto covered = [](const NaiveBayesModel& a, const NaiveBayesModel& b) {
        for (FeatureId f = 0; f < a.bigrams_.size(); ++f) {
            const auto& mine = a.counts_[f];
            if (mine == ClassCounts{}) continue;
            if (b.counts(a.bigrams_[f]) != mine) return false;
        }
        return true;
    };
    return covered(*this, other) && covered(other, *this);
}

void NaiveBayesModel::write_snapshot(std::ostream& out) const {
    std::vector<FeatureId> order;
    for (FeatureId f = 0; f < bigrams_.size(); ++f)
        if (counts_[f] != ClassCounts{}) order.push_back(f);
    std::sort(order.begin(), order.end(), [&](FeatureId a, FeatureId b) { return bigrams_[a] < bigrams_[b]; });

    out << kSnapshotMagic << ' ' << kSnapshotVersion << '\n';
    out << "alpha " << format_double(alpha_) << '\n';
    out << "vocabulary " << vocabulary_size() << '\n';
    out << "labels";
    for (Label c : kLabels) out << ' ' << name(c);
    out << "\ninstances";
    for (Label c : kLabels) out << ' ' << instance_counts_[c];
    out << "\nmass";
    for (Label c : kLabels) out << ' ' << class_mass_[c];
    out << "\npriors";
    if (instances() > 0) {
        const auto p = priors();
        for (Label c : kLabels) out << ' ' << format_double(p[c]);
    }
    out << "\nbigrams " << order.size() << '\n';
    for (FeatureId f : order) {
        out << bigrams_[f].first << '\t' << bigrams_[f].second;
        for (Label c : kLabels) out << '\t' << counts_[f][c];
        out << '\n';
    }
}

NaiveBayesModel NaiveBayesModel::read_snapshot(std::istream& in) {
    const auto bad = [](const std::string& what) -> Error { return Error("model snapshot: " + what); };
    std::string line;
    const auto next = [&](std::string_view key) {
        if (!std::getline(in, line)) throw bad("truncated before '" + std::string(key) + "'");
        std::istringstream ls(line);
        std::string k;
        ls >> k;
        if (k != key) throw bad("expected '" + std::string(key) + "', found '" + k + "'");
        std::string rest;
        std::getline(ls, rest);
        return std::istringstream(rest);
    };

    {
        auto ls = next(kSnapshotMagic);
        int version = 0;
        if (!(ls >> version) || version != kSnapshotVersion) throw bad("unsupported version");
    }
    double alpha = 0.0;
    std::size_t vocab = 0;
    if (!(next("alpha") >> alpha)) throw bad("bad alpha");
    if (!(next("vocabulary") >> vocab)) throw bad("bad vocabulary");
    next("labels");
    NaiveBayesModel model(alpha);
    {
        auto ls = next("instances");
        for (Label c : kLabels)
            if (!(ls >> model.instance_counts_[c])) throw bad("bad instances");
    }
    {
        auto ls = next("mass");
        for (Label c : kLabels)
            if (!(ls >> model.class_mass_[c])) throw bad("bad mass");
    }
    next("priors");
    std::size_t rows = 0;
    if (!(next("bigrams") >> rows)) throw bad("bad bigram count");
    for (std::size_t r = 0; r < rows; ++r) {
        if (!std::getline(in, line)) throw bad("truncated bigram table");
        std::istringstream ls(line);
        Bigram w;
        ClassCounts counts;
        if (!std::getline(ls, w.first, '\t') || !std::getline(ls, w.second, '\t')) throw bad("bad bigram row");
        for (Label c : kLabels)
            if (!(ls >> counts[c]) || counts[c] < 0) throw bad("bad bigram counts");
        const FeatureId f = model.intern(w);
        for (Label c : kLabels) model.set_count(f, c, counts[c]);
    }
    model.vocabulary_floor_ = vocab;
    return model;
}

} // namespace nlibias
