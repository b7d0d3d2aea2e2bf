#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "nlibias/cli.hpp"
#include "nlibias/corpus.hpp"
#include "nlibias/error.hpp"
#include "nlibias/evalx.hpp"
#include "nlibias/nbayes.hpp"
#include "nlibias/prune.hpp"
#include "nlibias/report.hpp"
#include "nlibias/stats.hpp"

namespace py = pybind11;
using namespace nlibias;
using ojson = nlohmann::ordered_json;

namespace {

Label to_label(const std::string& s) {
    if (auto l = parse_label(s)) return *l;
    throw py::value_error("unknown label: " + s);
}

Side to_side(const std::string& s) {
    if (s == "hypothesis") return Side::Hypothesis;
    if (s == "premise") return Side::Premise;
    throw py::value_error("side must be 'hypothesis' or 'premise'");
}

CountMode to_count_mode(const std::string& s) {
    if (s == "multiplicity") return CountMode::Multiplicity;
    if (s == "presence") return CountMode::Presence;
    throw py::value_error("mode must be 'multiplicity' or 'presence'");
}

Bigram to_bigram(const std::string& s) {
    const auto t = tokenize(s);
    if (t.size() != 2) throw py::value_error("expected two tokens, got '" + s + "'");
    return {t[0], t[1]};
}

py::dict to_dict(const ClassDistribution& d) {
    py::dict out;
    for (Label c : kLabels) out[py::str(std::string(name(c)))] = d[c];
    return out;
}

py::dict to_dict(const ClassCounts& counts) {
    py::dict out;
    for (Label c : kLabels) out[py::str(std::string(name(c)))] = counts[c];
    return out;
}

py::object from_json(const ojson& j) { return py::module_::import("json").attr("loads")(j.dump()); }

Corpus parse_text(const std::string& text, const std::string& source) {
    std::istringstream in(text);
    return parse_corpus(in, source);
}

py::list ranked_list(const std::vector<RankedBigram>& ranked) {
    py::list out;
    for (const auto& r : ranked) {
        py::dict d;
        d["bigram"] = r.bigram.str();
        d["count"] = r.total_count;
        d["counts"] = to_dict(r.per_class_counts);
        d["dist"] = to_dict(r.dist);
        d["entropy"] = r.entropy;
        out.append(std::move(d));
    }
    return out;
}

py::dict trace_dict(const PruneTrace& t) {
    py::list steps;
    for (const auto& s : t.steps) steps.append(py::make_tuple(s.iteration, s.id, s.score));
    py::dict d;
    d["steps"] = std::move(steps);
    d["target_removals"] = t.target_removals;
    d["truncated"] = t.truncated;
    d["mode"] = std::string(name(t.mode));
    d["scoring_passes"] = t.scoring_passes;
    return d;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Annotation-artifact statistics and hypothesis-only pruning for NLI corpora";
    m.attr("__version__") = std::string(kToolVersion);

    auto error = py::register_exception<Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<IoError>(m, "IoError", error);
    py::register_exception<FormatError>(m, "FormatError", error);
    py::register_exception<EmptyCorpusError>(m, "EmptyCorpusError", error);
    py::register_exception<DomainError>(m, "DomainError", error);
    py::register_exception<DoubleRemovalError>(m, "DoubleRemovalError", error);
    py::register_exception<FingerprintMismatch>(m, "FingerprintMismatch", error);

    m.def("tokenize", [](const std::string& s) { return tokenize(s); }, py::arg("text"));
    m.def(
        "bigrams",
        [](const std::string& s) {
            std::vector<std::string> out;
            for (const auto& b : extract_bigrams(tokenize(s))) out.push_back(b.str());
            return out;
        },
        py::arg("text"));

    py::class_<Instance>(m, "Instance")
        .def_readonly("id", &Instance::id)
        .def_property_readonly("label", [](const Instance& i) { return std::string(name(i.label)); })
        .def_readonly("premise_tokens", &Instance::premise_tokens)
        .def_readonly("hypothesis_tokens", &Instance::hypothesis_tokens)
        .def_readonly("raw_record", &Instance::raw_record)
        .def("__repr__", [](const Instance& i) { return "<Instance " + i.id + " " + std::string(name(i.label)) + ">"; });

    py::class_<Corpus>(m, "Corpus")
        .def_static(
            "from_instances",
            [](const std::vector<std::tuple<std::string, std::string, std::string, std::string>>& rows) {
                Corpus c;
                c.source_path = "<python>";
                for (const auto& [id, premise, hypothesis, label] : rows)
                    c.instances.push_back(make_instance(id, premise, hypothesis, to_label(label)));
                c.load_stats.loaded = c.size();
                return c;
            },
            py::arg("rows"), "Build from (id, premise, hypothesis, label) tuples.")
        .def_static("parse", &parse_text, py::arg("text"), py::arg("source") = "<string>",
                    "Parse SNLI-style JSON lines from a string.")
        .def("__len__", &Corpus::size)
        .def("__getitem__",
             [](const Corpus& c, std::ptrdiff_t i) -> const Instance& {
                 const auto n = static_cast<std::ptrdiff_t>(c.size());
                 if (i < 0) i += n;
                 if (i < 0 || i >= n) throw py::index_error();
                 return c[static_cast<std::size_t>(i)];
             },
             py::return_value_policy::reference_internal)
        .def("__iter__", [](const Corpus& c) { return py::make_iterator(c.begin(), c.end()); }, py::keep_alive<0, 1>())
        .def_property_readonly("ids",
                               [](const Corpus& c) {
                                   std::vector<std::string> ids;
                                   for (const auto& i : c) ids.push_back(i.id);
                                   return ids;
                               })
        .def_property_readonly("label_counts", [](const Corpus& c) { return to_dict(c.label_counts()); })
        .def_property_readonly("fingerprint", [](const Corpus& c) { return fingerprint(c).str(); })
        .def_readonly("source_path", &Corpus::source_path)
        .def("to_jsonl",
             [](const Corpus& c) {
                 std::ostringstream out;
                 write_corpus(c, out);
                 return out.str();
             })
        .def("__repr__", [](const Corpus& c) { return "<Corpus " + std::to_string(c.size()) + " instances>"; });

    m.def(
        "load_corpus",
        [](const std::filesystem::path& path, unsigned threads) {
            LoadOptions opts;
            opts.threads = threads;
            py::gil_scoped_release release;
            return load_corpus(path, opts);
        },
        py::arg("path"), py::arg("threads") = 1);

    py::class_<BigramTable>(m, "BigramTable")
        .def_property_readonly("alpha", &BigramTable::alpha)
        .def("__len__", &BigramTable::size)
        .def("counts",
             [](const BigramTable& t, const std::string& w) {
                 const auto* c = t.find(to_bigram(w));
                 return to_dict(c ? *c : ClassCounts{});
             },
             py::arg("bigram"))
        .def("dist", [](const BigramTable& t, const std::string& w) { return to_dict(conditional_dist(t, to_bigram(w))); },
             py::arg("bigram"))
        .def("entropy", [](const BigramTable& t, const std::string& w) { return entropy(conditional_dist(t, to_bigram(w))); },
             py::arg("bigram"))
        .def("odds_ratio",
             [](const BigramTable& t, const std::string& w, const std::string& label) {
                 return odds_ratio(t, to_bigram(w), to_label(label));
             },
             py::arg("bigram"), py::arg("label"))
        .def("rank",
             [](const BigramTable& t, std::int64_t min_count, std::size_t top_k) {
                 return ranked_list(rank_bigrams(t, min_count, top_k));
             },
             py::arg("min_count") = 200, py::arg("top_k") = 20)
        .def("merge", &BigramTable::merge, py::arg("other"))
        .def("__eq__", [](const BigramTable& a, const BigramTable& b) { return a == b; });

    m.def(
        "count_bigrams",
        [](const Corpus& c, const std::string& side, double alpha, const std::string& mode, unsigned threads) {
            const Side s = to_side(side);
            const CountMode cm = to_count_mode(mode);
            py::gil_scoped_release release;
            return count_bigrams(c, s, alpha, cm, threads);
        },
        py::arg("corpus"), py::arg("side") = "hypothesis", py::arg("alpha") = 1.0, py::arg("mode") = "multiplicity",
        py::arg("threads") = 1);

    m.def(
        "compare_splits",
        [](const BigramTable& train, const BigramTable& test, std::int64_t min_count, std::size_t top_k) {
            const auto ranked = rank_bigrams(train, min_count, top_k);
            return from_json(comparison_json(compare_splits(train, test, ranked)));
        },
        py::arg("train"), py::arg("test"), py::arg("min_count") = 200, py::arg("top_k") = 8);

    m.def(
        "entropy",
        [](const std::vector<double>& p) {
            if (p.size() != kNumLabels) throw py::value_error("expected three probabilities");
            ClassDistribution d;
            for (std::size_t i = 0; i < kNumLabels; ++i) d.p[kLabels[i]] = p[i];
            return entropy(d);
        },
        py::arg("p"));

    py::class_<NaiveBayesModel>(m, "NaiveBayesModel")
        .def(py::init<double>(), py::arg("alpha") = 1.0)
        .def_static(
            "train",
            [](const Corpus& c, double alpha, unsigned threads) {
                NaiveBayesModel::TrainOptions opts;
                opts.threads = threads;
                return NaiveBayesModel::train(c, alpha, opts);
            },
            py::arg("corpus"), py::arg("alpha") = 1.0, py::arg("threads") = 1)
        .def("add", py::overload_cast<const Instance&>(&NaiveBayesModel::add), py::arg("instance"))
        .def("remove", py::overload_cast<const Instance&>(&NaiveBayesModel::remove), py::arg("instance"))
        .def("posterior", [](const NaiveBayesModel& nb, const std::string& h) { return to_dict(nb.posterior(tokenize(h))); },
             py::arg("hypothesis"))
        .def("predict", [](const NaiveBayesModel& nb, const std::string& h) { return std::string(name(nb.predict(tokenize(h)))); },
             py::arg("hypothesis"))
        .def("score", &NaiveBayesModel::score, py::arg("instance"))
        .def_property_readonly("alpha", &NaiveBayesModel::alpha)
        .def_property_readonly("vocabulary_size", &NaiveBayesModel::vocabulary_size)
        .def_property_readonly("instances", &NaiveBayesModel::instances)
        .def("snapshot",
             [](const NaiveBayesModel& nb) {
                 std::ostringstream out;
                 nb.write_snapshot(out);
                 return out.str();
             })
        .def_static(
            "from_snapshot",
            [](const std::string& text) {
                std::istringstream in(text);
                return NaiveBayesModel::read_snapshot(in);
            },
            py::arg("text"));

    m.def(
        "prune_greedy",
        [](const Corpus& c, double lambda, std::optional<std::string> mode, std::size_t batch_size, double alpha,
           unsigned threads) {
            PruneConfig cfg;
            cfg.lambda = lambda;
            cfg.batch_size = batch_size;
            cfg.alpha = alpha;
            cfg.threads = threads;
            if (!mode) cfg.mode = default_prune_mode(c.size());
            else if (*mode == "exact") cfg.mode = PruneMode::Exact;
            else if (*mode == "batched") cfg.mode = PruneMode::Batched;
            else throw py::value_error("mode must be 'exact' or 'batched'");
            PruneResult r = [&] {
                py::gil_scoped_release release;
                return prune_greedy(c, cfg);
            }();
            return py::make_tuple(std::move(r.corpus), trace_dict(r.trace));
        },
        py::arg("corpus"), py::arg("lam") = 0.2, py::arg("mode") = py::none(), py::arg("batch_size") = kDefaultBatchSize,
        py::arg("alpha") = 1.0, py::arg("threads") = 1,
        "Greedy hypothesis-only pruning. Returns (survivors, trace).");

    m.def(
        "prune_random",
        [](const Corpus& c, double lambda, std::uint64_t seed) {
            auto r = prune_random(c, lambda, seed);
            return py::make_tuple(std::move(r.corpus), r.removed_ids);
        },
        py::arg("corpus"), py::arg("lam"), py::arg("seed"), "Uniform random pruning. Returns (survivors, removed_ids).");

    m.def(
        "shuffle_premises",
        [](const Corpus& c, std::uint64_t seed) {
            auto r = shuffle_premises(c, seed);
            return py::make_tuple(std::move(r.corpus), r.fixed_points);
        },
        py::arg("corpus"), py::arg("seed"), "Returns (shuffled, fixed_points).");

    m.def(
        "eval_hypothesis_only",
        [](const Corpus& train, const Corpus& test, double alpha, unsigned threads) {
            EvalReport r = [&] {
                py::gil_scoped_release release;
                return eval_hypothesis_only(train, test, alpha, threads);
            }();
            return from_json(eval_json(r));
        },
        py::arg("train"), py::arg("test"), py::arg("alpha") = 1.0, py::arg("threads") = 1);

    m.def(
        "run_cli",
        [](const std::vector<std::string>& args) {
            std::vector<std::string> argv{"nlibias"};
            argv.insert(argv.end(), args.begin(), args.end());
            std::ostringstream out, err;
            int code;
            {
                py::gil_scoped_release release;
                code = cli::run(argv, out, err);
            }
            return py::make_tuple(code, out.str(), err.str());
        },
        py::arg("args"), "Run the command-line tool in-process. Returns (exit_code, stdout, stderr).");
}
