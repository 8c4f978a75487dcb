#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "coordnet/graph.hpp"

namespace coordnet {

struct CommunityInfo {
    int community_id = 0;
    std::size_t size = 0;
    // mean local clustering of the subgraph induced by the members
    double mean_clustering = 0.0;
    double internal_weight = 0.0;
};

struct CommunityAssignment {
    // community ids are dense integers from 0, assigned by first appearance
    // in group_id order
    std::map<std::string, int> mapping;
    double modularity = 0.0;
    std::vector<CommunityInfo> communities;
};

// Weighted Newman-Girvan modularity of the assignment at the given
// resolution. Zero-total-weight graphs score 0. Throws ContractError when a
// vertex is missing from the mapping.
double modularity(const GroupGraph& graph, const std::map<std::string, int>& mapping,
                  double resolution = 1.0);

// Two-phase Louvain: seed-shuffled single-vertex moves to the neighbor
// community with maximal positive gain (ties to the smallest community id),
// then aggregation; repeats until the modularity gain drops below 1e-9.
// Throws ContractError on an empty graph, ConfigError when resolution <= 0.
CommunityAssignment louvain(const GroupGraph& graph, double resolution, std::uint64_t seed);

// Runs louvain with seeds seed..seed+k-1 and keeps the highest-modularity
// result (ties to the lowest seed).
CommunityAssignment louvain_best_of(const GroupGraph& graph, double resolution,
                                    std::uint64_t seed, std::uint64_t k);

// Per-community size, induced-subgraph mean clustering, and internal weight,
// ordered by community id. Works on any mapping that covers the graph.
std::vector<CommunityInfo> describe_communities(const GroupGraph& graph,
                                                const std::map<std::string, int>& mapping);

void write_communities_csv(std::ostream& out, const CommunityAssignment& assignment);

// Parses the CSV written above. Throws IoError on malformed input.
std::map<std::string, int> read_communities_csv(std::istream& in);

}  // namespace coordnet
