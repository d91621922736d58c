#pragma once

#include <array>
#include <cstdint>
#include <cstddef>
#include <optional>
#include <string_view>

namespace sensor_rank {

// Declaration order is the prediction tie-break order.
enum class Label : std::uint8_t { Relevant = 0, News = 1, Noise = 2 };

inline constexpr std::size_t kNumLabels = 3;
inline constexpr std::array<Label, kNumLabels> kAllLabels = {
    Label::Relevant, Label::News, Label::Noise};

constexpr std::size_t index_of(Label l) { return static_cast<std::size_t>(l); }

std::string_view to_string(Label l);

// Accepts the lowercase wire names "relevant", "news", "noise".
std::optional<Label> parse_label(std::string_view s);

}  // namespace sensor_rank
