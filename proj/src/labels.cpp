#include "sensor_rank/labels.hpp"

namespace sensor_rank {

std::string_view to_string(Label l) {
  switch (l) {
    case Label::Relevant: return "relevant";
    case Label::News: return "news";
    case Label::Noise: return "noise";
  }
  return "unknown";
}

std::optional<Label> parse_label(std::string_view s) {
  if (s == "relevant") return Label::Relevant;
  if (s == "news") return Label::News;
  if (s == "noise") return Label::Noise;
  return std::nullopt;
}

}  // namespace sensor_rank
