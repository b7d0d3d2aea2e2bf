#include "nlibias/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "nlibias/corpus.hpp"
#include "nlibias/error.hpp"
#include "nlibias/evalx.hpp"
#include "nlibias/io.hpp"
#include "nlibias/prune.hpp"
#include "nlibias/random.hpp"
#include "nlibias/report.hpp"
#include "nlibias/stats.hpp"

namespace nlibias::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

class UsageError : public Error {
public:
    using Error::Error;
};

const std::map<std::string, Side> kSides = {{"hypothesis", Side::Hypothesis}, {"premise", Side::Premise}};
const std::map<std::string, CountMode> kModes = {{"multiplicity", CountMode::Multiplicity},
                                                 {"presence", CountMode::Presence}};
const std::map<std::string, PruneMode> kPruneModes = {{"exact", PruneMode::Exact}, {"batched", PruneMode::Batched}};

/// Collects outputs and commits them together once everything has been written.
class Outputs {
public:
    std::ofstream& open(const std::string& path) {
        files_.push_back(std::make_unique<AtomicFile>(path));
        paths_.push_back(path);
        return files_.back()->stream();
    }

    void manifest(const std::string& output, RunManifest m) {
        for (const auto& p : paths_) m.outputs.push_back(p);
        open(output + ".manifest") << m.to_json().dump(2) << '\n';
    }

    void commit() {
        for (auto& f : files_) f->commit();
    }

private:
    std::vector<std::unique_ptr<AtomicFile>> files_;
    std::vector<std::string> paths_;
};

void refuse_overwrite(const std::vector<std::string>& inputs, const std::vector<std::string>& outputs) {
    for (const auto& o : outputs) {
        if (o.empty()) continue;
        const auto out_path = fs::weakly_canonical(o);
        for (const auto& i : inputs)
            if (!i.empty() && fs::weakly_canonical(i) == out_path)
                throw UsageError("output " + o + " would overwrite input " + i);
    }
}

Corpus load(const std::string& path, unsigned threads, std::ostream& err) {
    Corpus c = load_corpus(path, {CorpusFormat::SnliJsonl, threads});
    err << load_summary(c) << '\n';
    return c;
}

auto open_unit_interval() {
    return CLI::Validator(
        [](std::string& s) -> std::string {
            double v = 0.0;
            try {
                v = std::stod(s);
            } catch (...) {
                return "not a number";
            }
            return v > 0.0 && v < 1.0 ? "" : "must lie strictly between 0 and 1";
        },
        "(0,1)");
}

// analyze --------------------------------------------------------------------

struct AnalyzeArgs {
    std::string input, test, out, json, svg;
    std::string side = "hypothesis", mode = "multiplicity";
    bool presence = false;
    std::int64_t min_count = 200;
    double alpha = 1.0;
    std::size_t top_k = 20;
    unsigned threads = 1;
};

void print_ranked(const ComparisonReport& report, std::ostream& out) {
    out << "rank  bigram                    count   p(C)    p(N)    p(E)    entropy  odds\n";
    for (std::size_t i = 0; i < report.rows.size(); ++i) {
        const auto& row = report.rows[i];
        const auto& s = row.train;
        const Label top = s.dist.argmax();
        const auto rest = s.count - s.counts[top];
        const double odds = rest == 0 ? INFINITY : static_cast<double>(s.counts[top]) / static_cast<double>(rest);
        char line[160];
        std::snprintf(line, sizeof line, "%4zu  %-24s %6lld  %.4f  %.4f  %.4f  %.4f   ", i + 1, row.bigram.str().c_str(),
                      static_cast<long long>(s.count), s.dist[Label::Contradiction], s.dist[Label::Neutral],
                      s.dist[Label::Entailment], s.entropy);
        out << line << format_odds(odds) << ':' << "1 " << name(top) << '\n';
    }
}

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
    refuse_overwrite({a.input, a.test}, {a.out, a.json, a.svg});
    const Side side = kSides.at(a.side);
    const CountMode mode = a.presence ? CountMode::Presence : kModes.at(a.mode);

    const Corpus train = load(a.input, a.threads, err);
    std::optional<Corpus> test;
    if (!a.test.empty()) test = load(a.test, a.threads, err);

    const BigramTable train_table = count_bigrams(train, side, a.alpha, mode, a.threads);
    const auto ranked = rank_bigrams(train_table, a.min_count, a.top_k);
    ComparisonReport report;
    if (test) {
        const BigramTable test_table = count_bigrams(*test, side, a.alpha, mode, a.threads);
        report = compare_splits(train_table, test_table, ranked);
    } else {
        report = describe_split(train_table, ranked);
    }

    print_ranked(report, out);
    if (report.has_test())
        out << "mean entropy: train " << format_number(report.mean_train_entropy()) << ", test "
            << format_number(report.mean_test_entropy()) << '\n';

    Outputs outputs;
    write_comparison_csv(report, outputs.open(a.out));
    if (!a.json.empty()) outputs.open(a.json) << comparison_json(report).dump(2) << '\n';
    if (!a.svg.empty()) write_comparison_svg(report, outputs.open(a.svg));

    RunManifest m;
    m.subcommand = "analyze";
    m.config = {{"side", a.side}, {"mode", std::string(name(mode))}, {"min_count", a.min_count},
                {"alpha", a.alpha}, {"top_k", a.top_k}, {"threads", a.threads}};
    m.add_input(a.input, fingerprint(train));
    if (test) m.add_input(a.test, fingerprint(*test));
    m.results = {{"rows", report.rows.size()}, {"qualifying_threshold", "count > min_count"}};
    outputs.manifest(a.out, std::move(m));
    outputs.commit();
    return kOk;
}

// prune ----------------------------------------------------------------------

struct PruneArgs {
    std::string strategy, input, out, trace, mode;
    double lambda = 0.2;
    double alpha = 1.0;
    std::size_t batch_size = kDefaultBatchSize;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

int cmd_prune(const PruneArgs& a, std::ostream& out, std::ostream& err) {
    refuse_overwrite({a.input}, {a.out, a.trace});
    if (a.strategy == "random" && !a.seed) throw UsageError("random pruning requires --seed");
    if (a.batch_size < 1) throw UsageError("--batch-size must be >= 1");

    const Corpus corpus = load(a.input, a.threads, err);
    RunManifest m;
    m.subcommand = "prune " + a.strategy;
    m.add_input(a.input, fingerprint(corpus));
    Outputs outputs;

    if (a.strategy == "greedy") {
        PruneConfig cfg;
        cfg.lambda = a.lambda;
        cfg.mode = a.mode.empty() ? default_prune_mode(corpus.size()) : kPruneModes.at(a.mode);
        cfg.batch_size = a.batch_size;
        cfg.alpha = a.alpha;
        cfg.threads = a.threads;
        const auto result = prune_greedy(corpus, cfg);

        write_corpus(result.corpus, outputs.open(a.out));
        if (!a.trace.empty()) write_trace_csv(result.trace, outputs.open(a.trace));
        m.config = {{"strategy", "greedy"}, {"lambda", a.lambda}, {"mode", std::string(name(cfg.mode))},
                    {"batch_size", cfg.mode == PruneMode::Exact ? std::size_t{1} : cfg.batch_size},
                    {"alpha", a.alpha}, {"threads", a.threads}};
        m.results = trace_summary_json(result.trace);
        m.results["survivors"] = result.corpus.size();
        out << "removed " << result.trace.removed() << " of " << corpus.size() << " instances ("
            << name(cfg.mode) << " mode, " << result.trace.scoring_passes << " scoring passes)"
            << (result.trace.truncated ? ", truncated: a class would have been emptied" : "") << '\n';
    } else {
        const auto result = prune_random(corpus, a.lambda, *a.seed);
        write_corpus(result.corpus, outputs.open(a.out));
        if (!a.trace.empty()) {
            auto& t = outputs.open(a.trace);
            t << "index,id\n";
            for (std::size_t i = 0; i < result.removed_ids.size(); ++i) t << i + 1 << ',' << result.removed_ids[i] << '\n';
        }
        m.config = {{"strategy", "random"}, {"lambda", a.lambda}, {"seed", *a.seed}, {"algorithm", result.algorithm}};
        m.results = {{"removed", result.removed_ids.size()}, {"survivors", result.corpus.size()}};
        out << "removed " << result.removed_ids.size() << " of " << corpus.size() << " instances uniformly at random\n";
    }
    outputs.manifest(a.out, std::move(m));
    outputs.commit();
    return kOk;
}

// eval -----------------------------------------------------------------------

struct EvalArgs {
    std::vector<std::string> train, labels;
    std::string test, out;
    double alpha = 1.0;
    std::optional<double> min_accuracy, max_accuracy;
    unsigned threads = 1;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    std::vector<std::string> inputs = a.train;
    inputs.push_back(a.test);
    refuse_overwrite(inputs, {a.out});
    if (!a.labels.empty() && a.labels.size() != a.train.size())
        throw UsageError("give one --label per --train");

    const Corpus test = load(a.test, a.threads, err);
    std::vector<EvalReport> reports;
    std::vector<std::string> labels;
    RunManifest m;
    m.subcommand = "eval hypo-only";
    m.add_input(a.test, fingerprint(test));
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        const Corpus train = load(a.train[i], a.threads, err);
        m.add_input(a.train[i], fingerprint(train));
        reports.push_back(eval_hypothesis_only(train, test, a.alpha, a.threads));
        labels.push_back(a.labels.empty() ? fs::path(a.train[i]).stem().string() : a.labels[i]);
    }

    out << "test split: " << a.test << '\n';
    ojson doc;
    ojson rep = ojson::array();
    for (std::size_t i = 0; i < reports.size(); ++i) {
        out << "[" << labels[i] << "] ";
        write_eval_text(reports[i], out);
        auto j = eval_json(reports[i]);
        j["label"] = labels[i];
        j["train_path"] = a.train[i];
        rep.push_back(std::move(j));
    }
    doc["test_path"] = a.test;
    doc["reports"] = std::move(rep);
    if (reports.size() >= 2) {
        const auto delta = eval_delta(reports, labels);
        out << '\n';
        write_delta_text(delta, out);
        doc["delta"] = delta_json(delta);
    }

    int code = kOk;
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const double acc = reports[i].accuracy;
        if (a.min_accuracy && acc < *a.min_accuracy) {
            err << "assertion failed: " << labels[i] << " accuracy " << format_number(acc) << " < "
                << format_number(*a.min_accuracy) << '\n';
            code = kThreshold;
        }
        if (a.max_accuracy && acc > *a.max_accuracy) {
            err << "assertion failed: " << labels[i] << " accuracy " << format_number(acc) << " > "
                << format_number(*a.max_accuracy) << '\n';
            code = kThreshold;
        }
    }

    if (!a.out.empty()) {
        Outputs outputs;
        outputs.open(a.out) << doc.dump(2) << '\n';
        m.config = {{"alpha", a.alpha}, {"labels", labels}, {"threads", a.threads}};
        if (a.min_accuracy) m.config["assert_min_accuracy"] = *a.min_accuracy;
        if (a.max_accuracy) m.config["assert_max_accuracy"] = *a.max_accuracy;
        m.results = {{"assertions_passed", code == kOk}};
        outputs.manifest(a.out, std::move(m));
        outputs.commit();
    }
    return code;
}

// transform ------------------------------------------------------------------

struct TransformArgs {
    std::string input, out;
    std::optional<std::uint64_t> seed;
    unsigned threads = 1;
};

int cmd_shuffle(const TransformArgs& a, std::ostream& out, std::ostream& err) {
    refuse_overwrite({a.input}, {a.out});
    const Corpus corpus = load(a.input, a.threads, err);
    const auto result = shuffle_premises(corpus, *a.seed);

    Outputs outputs;
    write_corpus(result.corpus, outputs.open(a.out));
    RunManifest m;
    m.subcommand = "transform shuffle-premises";
    m.config = {{"seed", *a.seed}, {"algorithm", std::string(Rng::kAlgorithm) + "/fisher-yates+fixed-point-repair"}};
    m.add_input(a.input, fingerprint(corpus));
    m.results = {{"instances", result.corpus.size()}, {"fixed_points", result.fixed_points}};
    outputs.manifest(a.out, std::move(m));
    outputs.commit();
    out << "shuffled premises of " << result.corpus.size() << " instances; fixed points: " << result.fixed_points << '\n';
    return kOk;
}

} // namespace

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Annotation-artifact diagnostics and hypothesis-only pruning for NLI corpora", "nlibias"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kToolVersion));

    AnalyzeArgs analyze;
    auto* an = app.add_subcommand("analyze", "Rank label-informative bigrams and compare train/test");
    an->add_option("--input", analyze.input, "Training corpus (SNLI jsonl)")->required();
    an->add_option("--test", analyze.test, "Test corpus to compare against");
    an->add_option("--side", analyze.side, "Sentence side to count")->check(CLI::IsMember({"hypothesis", "premise"}))->capture_default_str();
    an->add_option("--min-count", analyze.min_count, "Keep bigrams seen more than this many times")->check(CLI::NonNegativeNumber)->capture_default_str();
    an->add_option("--alpha", analyze.alpha, "Laplace smoothing constant")->check(CLI::PositiveNumber)->capture_default_str();
    an->add_option("--top-k", analyze.top_k, "Number of bigrams to report")->check(CLI::Range(std::size_t{1}, std::numeric_limits<std::size_t>::max()))->capture_default_str();
    an->add_option("--mode", analyze.mode, "Counting mode")->check(CLI::IsMember({"multiplicity", "presence"}))->capture_default_str();
    an->add_flag("--presence", analyze.presence, "Shorthand for --mode presence");
    an->add_option("--out", analyze.out, "CSV report path")->required();
    an->add_option("--json", analyze.json, "JSON report path");
    an->add_option("--svg", analyze.svg, "SVG figure path");
    an->add_option("--threads", analyze.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    PruneArgs prune;
    auto* pr = app.add_subcommand("prune", "Remove a fraction of the training set (greedy or random)");
    pr->add_option("strategy", prune.strategy, "greedy | random")->required()->check(CLI::IsMember({"greedy", "random"}));
    pr->add_option("--input", prune.input, "Corpus to prune")->required();
    pr->add_option("--lambda", prune.lambda, "Fraction to remove")->check(open_unit_interval())->capture_default_str();
    pr->add_option("--mode", prune.mode, "exact | batched (default: exact below 50000 instances)")->check(CLI::IsMember({"exact", "batched"}));
    pr->add_option("--batch-size", prune.batch_size, "Removals per epoch in batched mode")->check(CLI::PositiveNumber)->capture_default_str();
    pr->add_option("--seed", prune.seed, "Seed (required for random)");
    pr->add_option("--alpha", prune.alpha, "Naive Bayes smoothing constant")->check(CLI::PositiveNumber)->capture_default_str();
    pr->add_option("--out", prune.out, "Pruned corpus path")->required();
    pr->add_option("--trace", prune.trace, "Removal trace CSV path");
    pr->add_option("--threads", prune.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    EvalArgs eval;
    auto* ev = app.add_subcommand("eval", "Hypothesis-only evaluation");
    ev->require_subcommand(1);
    auto* hy = ev->add_subcommand("hypo-only", "Train on hypotheses only and report test accuracy");
    hy->add_option("--train", eval.train, "Training corpus; repeat to compare several")->required();
    hy->add_option("--label", eval.labels, "Name per --train for the comparison table");
    hy->add_option("--test", eval.test, "Test corpus")->required();
    hy->add_option("--alpha", eval.alpha, "Naive Bayes smoothing constant")->check(CLI::PositiveNumber)->capture_default_str();
    hy->add_option("--assert-min-accuracy", eval.min_accuracy, "Exit nonzero if any accuracy is below");
    hy->add_option("--assert-max-accuracy", eval.max_accuracy, "Exit nonzero if any accuracy is above");
    hy->add_option("--out", eval.out, "JSON report path");
    hy->add_option("--threads", eval.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    TransformArgs transform;
    auto* tr = app.add_subcommand("transform", "Corpus transforms");
    tr->require_subcommand(1);
    auto* sh = tr->add_subcommand("shuffle-premises", "Pair every hypothesis with another instance's premise");
    sh->add_option("--input", transform.input, "Corpus")->required();
    sh->add_option("--seed", transform.seed, "Seed")->required();
    sh->add_option("--out", transform.out, "Output corpus path")->required();
    sh->add_option("--threads", transform.threads, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (an->parsed()) return cmd_analyze(analyze, out, err);
        if (pr->parsed()) return cmd_prune(prune, out, err);
        if (hy->parsed()) return cmd_eval(eval, out, err);
        if (sh->parsed()) return cmd_shuffle(transform, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kIo;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kData;
    }
    return kUsage;
}

} // namespace nlibias::cli
