#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

namespace nlibias {

// Enumerator order is the fixed argmax tie-break order.
enum class Label : std::uint8_t { Contradiction = 0, Entailment = 1, Neutral = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kLabels = {
    Label::Contradiction, Label::Entailment, Label::Neutral};

constexpr std::size_t index(Label c) noexcept { return static_cast<std::size_t>(c); }

constexpr std::string_view name(Label c) noexcept {
    switch (c) {
        case Label::Contradiction: return "contradiction";
        case Label::Entailment: return "entailment";
        case Label::Neutral: return "neutral";
    }
    return "?";
}

/// Maps an SNLI/MultiNLI gold_label string. "-" and anything else yield nullopt.
constexpr std::optional<Label> parse_label(std::string_view s) noexcept {
    if (s == "contradiction") return Label::Contradiction;
    if (s == "entailment") return Label::Entailment;
    if (s == "neutral") return Label::Neutral;
    return std::nullopt;
}

/// A value per label, indexed by index(Label).
template <typename T>
struct PerLabel {
    std::array<T, kNumLabels> v{};

    constexpr T& operator[](Label c) noexcept { return v[index(c)]; }
    constexpr const T& operator[](Label c) const noexcept { return v[index(c)]; }

    constexpr T sum() const noexcept {
        T s{};
        for (const auto& x : v) s += x;
        return s;
    }

    friend constexpr bool operator==(const PerLabel&, const PerLabel&) = default;
};

using ClassCounts = PerLabel<std::int64_t>;

} // namespace nlibias
