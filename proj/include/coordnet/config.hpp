#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coordnet/corpus.hpp"
#include "coordnet/detector.hpp"
#include "coordnet/graph.hpp"
#include "coordnet/keys.hpp"
#include "coordnet/synth.hpp"

namespace coordnet {

// Everything a pipeline run needs, file-configurable and flag-overridable.
struct PipelineConfig {
    InputFormat input_format = InputFormat::jsonl;

    // empty keyword list = no filtering
    std::vector<std::string> filter_keywords;
    std::set<TextField> filter_fields = {TextField::message, TextField::description,
                                         TextField::image_text};

    NormalizationConfig normalization;
    DetectionConfig detection;

    bool estimate_threshold = false;
    double quantile = 0.10;
    std::set<ContentKey::Kind> estimate_kinds = {ContentKey::Kind::url};

    double min_degree = 100.0;
    DegreeComparator comparator = DegreeComparator::at_least;
    bool iterative_filter = true;

    double resolution = 1.0;
    std::uint64_t seed = 1;
    std::uint64_t best_of_k = 1;

    std::string output_dir;
    std::size_t top_n = 5;

    std::optional<ScenarioConfig> scenario;
};

// Strict parse: unknown keys, wrong types, and invariant violations all
// throw ConfigError naming the offending key.
PipelineConfig config_from_json(const nlohmann::json& doc);

// Canonical serialization with every field materialized. Round-trip stable:
// config_to_json(config_from_json(config_to_json(c))) == config_to_json(c).
nlohmann::json config_to_json(const PipelineConfig& config);

// Reads and parses a config file. Throws IoError when unreadable,
// ConfigError when invalid.
PipelineConfig load_config_file(const std::string& path);

}  // namespace coordnet
