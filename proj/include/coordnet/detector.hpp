#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "coordnet/keys.hpp"
#include "coordnet/post.hpp"

namespace coordnet {

// One occurrence of a content key in a post.
struct Share {
    std::string post_id;
    std::string group_id;
    std::int64_t timestamp = 0;

    friend bool operator==(const Share&, const Share&) = default;
};

struct DetectionConfig {
    std::int64_t window_seconds = 30;
    std::size_t min_chain_shares = 2;
    std::size_t min_distinct_groups = 2;
};

// Maximal run of shares of one key where every consecutive gap is within the
// window. shares stay sorted by (timestamp, post_id).
struct CoordinationChain {
    ContentKey key;
    std::vector<Share> shares;
    std::int64_t span_seconds = 0;
    std::set<std::string> groups;

    friend bool operator==(const CoordinationChain&, const CoordinationChain&) = default;
};

using ShareIndex = std::map<ContentKey, std::vector<Share>>;

// Each (post, key) pair contributes exactly one Share; lists sorted by
// (timestamp, post_id). Single-share keys are retained.
ShareIndex build_share_index(const std::vector<Post>& posts, const NormalizationConfig& config);

// Greedy left-to-right chaining over one key's shares: a share joins the
// current chain iff its gap to the previous member is <= window_seconds.
// Chains failing min_chain_shares or min_distinct_groups are dropped.
// Throws ContractError when shares are not sorted by (timestamp, post_id).
std::vector<CoordinationChain> detect_chains(const ContentKey& key,
                                             const std::vector<Share>& shares,
                                             const DetectionConfig& config);

// All chains across the index, ordered by (key, first timestamp).
std::vector<CoordinationChain> detect_all_chains(const ShareIndex& index,
                                                 const DetectionConfig& config);

// q-quantile (linear interpolation) of first-to-second-share interarrival
// seconds over keys of the selected kinds with >= 2 shares.
// Throws ConfigError when q is outside (0,1]; EstimationError when no key
// qualifies (callers should fall back to the fixed default window).
double estimate_threshold_quantile(const ShareIndex& index, double q,
                                   const std::set<ContentKey::Kind>& kinds);

void write_chains_jsonl(std::ostream& out, const std::vector<CoordinationChain>& chains);

// Parses chains written by write_chains_jsonl. Throws IoError on malformed
// input.
std::vector<CoordinationChain> read_chains_jsonl(std::istream& in);

}  // namespace coordnet
