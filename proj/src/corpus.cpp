#include "nlibias/corpus.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include <json.hpp>
#include <unicode/uchar.h>
#include <unicode/utf8.h>

#include "nlibias/error.hpp"
#include "nlibias/parallel.hpp"
#include "nlibias/random.hpp"

namespace nlibias {

namespace {

void append_utf8(std::string& out, UChar32 c) {
    char buf[U8_MAX_LENGTH];
    std::int32_t n = 0;
    U8_APPEND_UNSAFE(buf, n, c);
    out.append(buf, static_cast<std::size_t>(n));
}

bool is_sentence1_field(std::string_view key) { return key.starts_with("sentence1"); }

enum class RecordKind { Blank, Loaded, NoConsensus, EmptyHypothesis };

struct ParsedRecord {
    RecordKind kind = RecordKind::Blank;
    Instance instance;
    bool has_pair_id = false;
};

const std::string& require_string(const nlohmann::json& rec, const char* field, std::size_t line) {
    auto it = rec.find(field);
    if (it == rec.end()) throw FormatError(line, std::string("missing field '") + field + "'");
    if (!it->is_string()) throw FormatError(line, std::string("field '") + field + "' is not a string");
    return it->get_ref<const std::string&>();
}

ParsedRecord parse_record(std::string&& line, std::size_t line_no) {
    ParsedRecord out;
    if (line.find_first_not_of(" \t\r") == std::string::npos) return out;

    nlohmann::json rec;
    try {
        rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(line_no, std::string("malformed record: ") + e.what());
    }
    if (!rec.is_object()) throw FormatError(line_no, "record is not an object");

    const std::string& gold = require_string(rec, "gold_label", line_no);
    if (gold == "-") {
        out.kind = RecordKind::NoConsensus;
        return out;
    }
    const auto label = parse_label(gold);
    if (!label) throw FormatError(line_no, "unknown gold_label '" + gold + "'");

    Instance& inst = out.instance;
    inst.label = *label;
    inst.premise_tokens = tokenize(require_string(rec, "sentence1", line_no));
    inst.hypothesis_tokens = tokenize(require_string(rec, "sentence2", line_no));
    if (inst.hypothesis_tokens.empty()) {
        out.kind = RecordKind::EmptyHypothesis;
        return out;
    }
    if (auto it = rec.find("pairID"); it != rec.end()) {
        if (it->is_string())
            inst.id = it->get<std::string>();
        else if (it->is_number_integer())
            inst.id = std::to_string(it->get<long long>());
        else
            throw FormatError(line_no, "field 'pairID' is neither string nor integer");
        out.has_pair_id = true;
    } else {
        inst.id = "L" + std::to_string(line_no);
    }
    inst.raw_record = std::move(line);
    out.kind = RecordKind::Loaded;
    return out;
}

} // namespace

Tokens tokenize(std::string_view text) {
    Tokens out;
    std::string cur;
    const auto* s = reinterpret_cast<const std::uint8_t*>(text.data());
    const auto len = static_cast<std::int32_t>(text.size());
    std::int32_t i = 0;
    while (i < len) {
        if (s[i] < 0x80) {
            const char ch = static_cast<char>(s[i++]);
            if ((ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9')) {
                cur.push_back(ch);
            } else if (ch >= 'A' && ch <= 'Z') {
                cur.push_back(static_cast<char>(ch - 'A' + 'a'));
            } else if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
            continue;
        }
        UChar32 c;
        U8_NEXT(s, i, len, c);
        if (c >= 0 && u_isalnum(c)) {
            append_utf8(cur, u_tolower(c));
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

std::vector<Bigram> extract_bigrams(std::span<const std::string> tokens) {
    std::vector<Bigram> out;
    if (tokens.size() < 2) return out;
    out.reserve(tokens.size() - 1);
    for (std::size_t i = 0; i + 1 < tokens.size(); ++i) out.push_back({tokens[i], tokens[i + 1]});
    return out;
}

std::string_view name(Side s) noexcept {
    return s == Side::Hypothesis ? "hypothesis" : "premise";
}

Instance make_instance(std::string id, std::string_view premise, std::string_view hypothesis,
                       Label label) {
    nlohmann::ordered_json rec;
    rec["gold_label"] = std::string(name(label));
    rec["pairID"] = id;
    rec["sentence1"] = std::string(premise);
    rec["sentence2"] = std::string(hypothesis);

    Instance inst;
    inst.id = std::move(id);
    inst.premise_tokens = tokenize(premise);
    inst.hypothesis_tokens = tokenize(hypothesis);
    inst.label = label;
    inst.raw_record = rec.dump();
    return inst;
}

ClassCounts Corpus::label_counts() const noexcept {
    ClassCounts counts;
    for (const auto& inst : instances) ++counts[inst.label];
    return counts;
}

Corpus parse_corpus(std::istream& in, std::string source, const LoadOptions& options) {
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(std::move(line));
    if (in.bad()) throw IoError("read failed: " + source);

    std::vector<ParsedRecord> parsed(lines.size());
    parallel_chunks(lines.size(), options.threads, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) parsed[i] = parse_record(std::move(lines[i]), i + 1);
    });

    Corpus corpus;
    corpus.source_path = std::move(source);
    corpus.load_stats.lines = lines.size();
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < parsed.size(); ++i) {
        auto& rec = parsed[i];
        switch (rec.kind) {
            case RecordKind::Blank: break;
            case RecordKind::NoConsensus: ++corpus.load_stats.skipped_no_consensus; break;
            case RecordKind::EmptyHypothesis: ++corpus.load_stats.skipped_empty_hypothesis; break;
            case RecordKind::Loaded:
                if (!seen.insert(rec.instance.id).second) {
                    rec.instance.id += "#L" + std::to_string(i + 1);
                    seen.insert(rec.instance.id);
                    ++corpus.load_stats.renamed_duplicate_ids;
                }
                corpus.instances.push_back(std::move(rec.instance));
                break;
        }
    }
    corpus.load_stats.loaded = corpus.instances.size();
    if (corpus.instances.empty()) throw EmptyCorpusError("no valid instances in " + corpus.source_path);
    return corpus;
}

Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return parse_corpus(in, path.string(), options);
}

std::string load_summary(const Corpus& corpus) {
    const auto& s = corpus.load_stats;
    std::ostringstream os;
    os << "loaded " << s.loaded << " instances from " << corpus.source_path << " (skipped "
       << s.skipped_no_consensus << " without consensus label, " << s.skipped_empty_hypothesis
       << " with empty hypothesis";
    if (s.renamed_duplicate_ids > 0) os << "; renamed " << s.renamed_duplicate_ids << " duplicate ids";
    os << ")";
    return os.str();
}

void write_corpus(const Corpus& corpus, std::ostream& out) {
    for (const auto& inst : corpus.instances) {
        out.write(inst.raw_record.data(), static_cast<std::streamsize>(inst.raw_record.size()));
        out.put('\n');
    }
}

std::string Fingerprint::str() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%zu:%016llx", instances, static_cast<unsigned long long>(hash));
    return buf;
}

Fingerprint fingerprint(const Corpus& corpus) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](unsigned char b) {
        h ^= b;
        h *= 0x100000001b3ULL;
    };
    for (const auto& inst : corpus.instances) {
        for (unsigned char b : inst.raw_record) mix(b);
        mix('\n');
    }
    return {corpus.size(), h};
}

ShuffleResult shuffle_premises(const Corpus& corpus, std::uint64_t seed) {
    const std::size_t n = corpus.size();
    if (n < 2) throw DomainError("shuffle_premises needs at least 2 instances");

    Rng rng(seed);
    std::vector<std::size_t> source(n);
    for (std::size_t i = 0; i < n; ++i) source[i] = i;
    for (std::size_t i = n - 1; i > 0; --i) std::swap(source[i], source[rng.below(i + 1)]);
    for (std::size_t i = 0; i < n; ++i) {
        if (source[i] != i) continue;
        std::size_t j = rng.below(n - 1);
        if (j >= i) ++j;
        std::swap(source[i], source[j]);
    }

    ShuffleResult result;
    Corpus& out = result.corpus;
    out.source_path = corpus.source_path;
    out.side_note = corpus.side_note.empty() ? "premises shuffled" : corpus.side_note + "; premises shuffled";
    out.load_stats = corpus.load_stats;
    out.instances.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Instance& target = corpus[i];
        const Instance& donor = corpus[source[i]];
        if (source[i] == i) ++result.fixed_points;

        auto rec = nlohmann::ordered_json::parse(target.raw_record);
        const auto donor_rec = nlohmann::ordered_json::parse(donor.raw_record);
        for (auto it = rec.begin(); it != rec.end();) {
            if (is_sentence1_field(it.key()) && !donor_rec.contains(it.key()))
                it = rec.erase(it);
            else
                ++it;
        }
        for (const auto& [key, value] : donor_rec.items())
            if (is_sentence1_field(key)) rec[key] = value;

        Instance inst = target;
        inst.premise_tokens = donor.premise_tokens;
        inst.raw_record = rec.dump();
        out.instances.push_back(std::move(inst));
    }
    return result;
}

} // namespace nlibias
