#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "sensor_rank/classifier.hpp"
#include "sensor_rank/text.hpp"

namespace sensor_rank {

// A trained classifier plus the preprocessing it was trained with.
struct RelevanceModel {
  Model model;
  Vocabulary vocab;
  std::uint64_t replacement_table_hash = 0;
};

inline constexpr std::string_view kModelFormat = "sensor-rank-model";
inline constexpr int kModelVersion = 1;

void save_model(const RelevanceModel& model, const std::filesystem::path& path);
std::string serialize_model(const RelevanceModel& model);
RelevanceModel load_model(const std::filesystem::path& path);
RelevanceModel parse_model(const std::string& text);

}  // namespace sensor_rank
