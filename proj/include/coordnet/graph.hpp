#pragma once

#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "coordnet/detector.hpp"

namespace coordnet {

// Undirected weighted graph over groups. Vertices are index-addressed and
// sorted by group_id; adjacency is symmetric with no self-loops.
class GroupGraph {
public:
    struct Vertex {
        std::string group_id;
        std::string group_name;
        std::uint64_t post_count = 0;

        friend bool operator==(const Vertex&, const Vertex&) = default;
    };

    // vertices must be unique by group_id; sorted internally
    explicit GroupGraph(std::vector<Vertex> vertices);
    GroupGraph() = default;

    // adds w to the undirected edge; u/v are vertex indices, u != v
    void add_edge_weight(std::size_t u, std::size_t v, double w);

    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const;
    double total_weight() const;

    const Vertex& vertex(std::size_t i) const { return vertices_[i]; }
    Vertex& vertex(std::size_t i) { return vertices_[i]; }
    std::optional<std::size_t> index_of(const std::string& group_id) const;
    const std::map<std::size_t, double>& neighbors(std::size_t i) const { return adjacency_[i]; }
    double weighted_degree(std::size_t i) const;

    friend bool operator==(const GroupGraph&, const GroupGraph&) = default;

private:
    std::vector<Vertex> vertices_;
    std::vector<std::map<std::size_t, double>> adjacency_;
};

struct GraphMetrics {
    std::vector<double> weighted_degree;
    std::vector<double> clustering;
    double mean_clustering = 0.0;
};

enum class DegreeComparator { at_least, greater };

// Vertices = groups appearing in at least one chain; edge weight = number of
// chains in which both groups participate (one increment per chain per pair);
// vertex post_count = distinct chain-participating posts of that group.
// group_names (group_id -> display name) fills vertex names when provided;
// chains themselves do not carry names.
GroupGraph build_graph(const std::vector<CoordinationChain>& chains,
                       const std::map<std::string, std::string>* group_names = nullptr);

// Subgraph induced by the given vertex indices (duplicates ignored).
GroupGraph induced_subgraph(const GroupGraph& graph, const std::vector<std::size_t>& vertices);

// Removes vertices whose weighted degree fails the threshold, recomputing
// degrees each round until a fixed point (iterative=true) or once
// (iterative=false). Returns the induced subgraph.
GroupGraph filter_by_weighted_degree(const GroupGraph& graph, double min_degree,
                                     bool iterative = true,
                                     DegreeComparator comparator = DegreeComparator::at_least);

// Unweighted Watts-Strogatz local coefficients: 2*T(v) / (k_v*(k_v-1)),
// 0 when a vertex has < 2 neighbors. mean_clustering averages over `subset`
// (vertex indices) when given, else over all vertices; empty graph -> 0.
GraphMetrics clustering(const GroupGraph& graph,
                        const std::vector<std::size_t>* subset = nullptr);

void write_edges_csv(std::ostream& out, const GroupGraph& graph);
void write_vertices_csv(std::ostream& out, const GroupGraph& graph, const GraphMetrics& metrics);

// Parses the edge/vertex CSVs written above back into a graph. Throws
// IoError on malformed input.
GroupGraph read_graph_csv(std::istream& vertices_in, std::istream& edges_in);

}  // namespace coordnet
