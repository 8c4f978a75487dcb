#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "coordnet/communities.hpp"
#include "coordnet/detector.hpp"
#include "coordnet/graph.hpp"
#include "coordnet/post.hpp"

namespace coordnet {

enum class MediaCategory { video, photo_or_meme, url, text };

std::string_view media_category_name(MediaCategory c);

// One widely shared piece of content, aggregated over its chains.
struct NarrativeEntry {
    ContentKey key;
    std::size_t distinct_groups = 0;
    std::size_t total_shares = 0;
    std::size_t chain_count = 0;
    MediaCategory media_category = MediaCategory::text;
    // bipartite key<->group edges: group_id -> share count, group_id-sorted
    std::vector<std::pair<std::string, std::size_t>> group_shares;
};

// Top n keys ranked by distinct_groups desc, total_shares desc, key value,
// kind. media_by_post supplies each post's media type for categorization:
// url keys -> url, image_text -> photo_or_meme, message/description -> video
// when at least half the sharing posts are videos, else text.
std::vector<NarrativeEntry> top_narratives(const std::vector<CoordinationChain>& chains,
                                           std::size_t n,
                                           const std::map<std::string, MediaType>& media_by_post);

void write_narratives_json(std::ostream& out, const std::vector<NarrativeEntry>& entries);

// GEXF 1.2draft, undirected static graph, byte-stable for identical inputs.
// Node attributes: post_count, weighted_degree, clustering, and community
// when an assignment is given. Throws ContractError on an empty graph.
void export_gexf(std::ostream& out, const GroupGraph& graph,
                 const CommunityAssignment* assignment = nullptr);

// Same, to a file via temp-and-rename so partial output never lands under
// the final name. Throws IoError on write failure.
void export_gexf_file(const std::string& path, const GroupGraph& graph,
                      const CommunityAssignment* assignment = nullptr);

struct GexfGraph {
    GroupGraph graph;
    std::map<std::string, int> communities;  // empty when the file has none
};

// Parses GEXF produced by export_gexf (round-trip support, not a general
// XML parser). Throws IoError on malformed input.
GexfGraph read_gexf(std::istream& in);

// Single JSON document aggregating one run: corpus counts, per-kind key
// counts over chains, chain coverage, graph order/size, community metrics,
// and the exact config echo.
nlohmann::json summary_report(const CorpusStats& stats,
                              const std::vector<CoordinationChain>& chains,
                              const GroupGraph& graph, const CommunityAssignment& assignment,
                              const nlohmann::json& config_echo);

}  // namespace coordnet
