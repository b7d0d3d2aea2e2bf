#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nlibias/label.hpp"

namespace nlibias {

using Tokens = std::vector<std::string>;

/// Ordered pair of adjacent tokens.
struct Bigram {
    std::string first;
    std::string second;

    friend auto operator<=>(const Bigram&, const Bigram&) = default;
    friend bool operator==(const Bigram&, const Bigram&) = default;

    /// "first second"
    std::string str() const { return first + ' ' + second; }
};

struct BigramHash {
    std::size_t operator()(const Bigram& b) const noexcept {
        std::size_t h = std::hash<std::string>{}(b.first);
        return h ^ (std::hash<std::string>{}(b.second) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
    }
};

/// Lowercased maximal runs of Unicode letters/digits. Everything else separates.
/// Invalid UTF-8 bytes are treated as separators.
Tokens tokenize(std::string_view text);

/// Adjacent pairs, with multiplicity, in sequence order.
std::vector<Bigram> extract_bigrams(std::span<const std::string> tokens);

enum class Side { Hypothesis, Premise };

std::string_view name(Side s) noexcept;

struct Instance {
    std::string id;
    Tokens premise_tokens;
    Tokens hypothesis_tokens;
    Label label = Label::Entailment;
    /// The record line exactly as read, without the line terminator.
    std::string raw_record;

    const Tokens& tokens(Side s) const noexcept {
        return s == Side::Hypothesis ? hypothesis_tokens : premise_tokens;
    }
};

/// Builds an instance from sentences, synthesizing an SNLI-style record.
Instance make_instance(std::string id, std::string_view premise, std::string_view hypothesis,
                       Label label);

struct LoadStats {
    std::size_t lines = 0;
    std::size_t loaded = 0;
    std::size_t skipped_no_consensus = 0;
    std::size_t skipped_empty_hypothesis = 0;
    /// Records whose pairID repeated an earlier one and received a suffixed id.
    std::size_t renamed_duplicate_ids = 0;
};

struct Corpus {
    std::vector<Instance> instances;
    std::string source_path;
    std::string side_note;
    LoadStats load_stats;

    std::size_t size() const noexcept { return instances.size(); }
    bool empty() const noexcept { return instances.empty(); }
    auto begin() const noexcept { return instances.begin(); }
    auto end() const noexcept { return instances.end(); }
    const Instance& operator[](std::size_t i) const noexcept { return instances[i]; }

    ClassCounts label_counts() const noexcept;
};

enum class CorpusFormat { SnliJsonl };

struct LoadOptions {
    CorpusFormat format = CorpusFormat::SnliJsonl;
    unsigned threads = 1;
};

/// Reads an SNLI/MultiNLI line-delimited JSON file.
///
/// Records with gold_label "-" and records whose hypothesis tokenizes to nothing are
/// skipped and counted in load_stats. Blank lines are ignored. The instance id is the
/// record's pairID, or "L<line>" when absent; a repeated pairID gets "#L<line>" appended.
///
/// Throws IoError, FormatError (with the line number) or EmptyCorpusError.
Corpus load_corpus(const std::filesystem::path& path, const LoadOptions& options = {});

/// Same as load_corpus, reading from a stream. `source` names it in errors and metadata.
Corpus parse_corpus(std::istream& in, std::string source, const LoadOptions& options = {});

/// One-line summary of load_stats, as printed on standard error by the CLI.
std::string load_summary(const Corpus& corpus);

/// Writes every instance's raw record followed by '\n', in corpus order.
void write_corpus(const Corpus& corpus, std::ostream& out);

/// Instance count plus FNV-1a 64 over the raw records in order.
struct Fingerprint {
    std::size_t instances = 0;
    std::uint64_t hash = 0;

    std::string str() const;
    friend bool operator==(const Fingerprint&, const Fingerprint&) = default;
};

Fingerprint fingerprint(const Corpus& corpus);

struct ShuffleResult {
    Corpus corpus;
    /// Instances that kept their own premise.
    std::size_t fixed_points = 0;
};

/// Permutes premises across instances, leaving (id, hypothesis, label) in place.
///
/// A seeded Fisher-Yates shuffle is followed by a repair pass that swaps every fixed
/// point with a randomly chosen other position; each swap removes one fixed point and
/// creates none. All record fields whose name begins with "sentence1" travel with the
/// premise. Throws DomainError when the corpus has fewer than two instances.
ShuffleResult shuffle_premises(const Corpus& corpus, std::uint64_t seed);

} // namespace nlibias
