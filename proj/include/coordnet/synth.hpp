#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coordnet/detector.hpp"
#include "coordnet/post.hpp"

namespace coordnet {

struct CampaignConfig {
    std::size_t n_groups = 0;
    std::size_t n_keys = 0;
    std::size_t shares_per_key = 0;
    std::int64_t burst_interval_seconds = 5;
    std::int64_t jitter_seconds = 0;
};

struct OrganicConfig {
    std::size_t n_posts = 0;
    double key_reuse_probability = 0.0;
};

struct ScenarioConfig {
    std::uint64_t seed = 1;
    std::int64_t horizon_seconds = 86400;
    std::size_t n_groups = 0;
    OrganicConfig organic;
    std::vector<CampaignConfig> campaigns;
};

constexpr int kOrganicLabel = -1;

struct CampaignTruth {
    std::set<std::string> groups;
    std::set<std::string> keys;  // normalized message texts
};

struct GroundTruth {
    std::map<std::string, int> post_labels;  // post_id -> campaign index or -1
    std::vector<CampaignTruth> campaigns;
};

struct SyntheticCorpus {
    std::vector<Post> posts;  // sorted by (timestamp, post_id)
    GroundTruth truth;
};

// Deterministic under seed: organic posts at uniform times with mostly
// unique message keys, campaign posts in bursts of consecutive gaps
// burst_interval +- jitter. Throws ConfigError on impossible scenarios.
SyntheticCorpus generate_corpus(const ScenarioConfig& config);

struct DetectionScore {
    double precision = 1.0;
    double recall = 1.0;
    double f1 = 1.0;
};

// Post-level scoring: predicted-coordinated = appears in any chain.
// Empty predictions score precision 1; empty truth scores recall 1;
// f1 is 0 when precision + recall == 0.
DetectionScore evaluate_detection(const std::vector<CoordinationChain>& chains,
                                  const GroundTruth& truth);

void write_ground_truth_jsonl(std::ostream& out, const GroundTruth& truth);

// Parses the JSONL written above. Throws IoError on malformed input.
GroundTruth read_ground_truth_jsonl(std::istream& in);

}  // namespace coordnet
