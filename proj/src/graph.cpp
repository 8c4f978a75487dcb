#include "coordnet/graph.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "coordnet/csv.hpp"
#include "coordnet/errors.hpp"

namespace coordnet {

GroupGraph::GroupGraph(std::vector<Vertex> vertices) : vertices_(std::move(vertices)) {
    std::sort(vertices_.begin(), vertices_.end(),
              [](const Vertex& a, const Vertex& b) { return a.group_id < b.group_id; });
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        if (vertices_[i - 1].group_id == vertices_[i].group_id)
            throw ContractError("duplicate vertex group_id \"" + vertices_[i].group_id + "\"");
    }
    adjacency_.resize(vertices_.size());
}

void GroupGraph::add_edge_weight(std::size_t u, std::size_t v, double w) {
    if (u == v) throw ContractError("self-loops are not allowed");
    if (u >= vertices_.size() || v >= vertices_.size())
        throw ContractError("vertex index out of range");
    adjacency_[u][v] += w;
    adjacency_[v][u] += w;
}

std::size_t GroupGraph::edge_count() const {
    std::size_t twice = 0;
    for (const auto& adj : adjacency_) twice += adj.size();
    return twice / 2;
}

double GroupGraph::total_weight() const {
    double twice = 0.0;
    for (const auto& adj : adjacency_)
        for (const auto& [_, w] : adj) twice += w;
    return twice / 2.0;
}

std::optional<std::size_t> GroupGraph::index_of(const std::string& group_id) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), group_id,
                               [](const Vertex& v, const std::string& id) {
                                   return v.group_id < id;
                               });
    if (it == vertices_.end() || it->group_id != group_id) return std::nullopt;
    return static_cast<std::size_t>(it - vertices_.begin());
}

double GroupGraph::weighted_degree(std::size_t i) const {
    double d = 0.0;
    for (const auto& [_, w] : adjacency_[i]) d += w;
    return d;
}

GroupGraph build_graph(const std::vector<CoordinationChain>& chains,
                       const std::map<std::string, std::string>* group_names) {
    // group_id -> distinct chain-participating post ids
    std::map<std::string, std::set<std::string>> groups;
    for (const auto& chain : chains) {
        for (const auto& share : chain.shares) {
            groups[share.group_id].insert(share.post_id);
        }
    }

    std::vector<GroupGraph::Vertex> vertices;
    vertices.reserve(groups.size());
    for (const auto& [id, posts] : groups) {
        std::string name;
        if (group_names) {
            if (auto it = group_names->find(id); it != group_names->end()) name = it->second;
        }
        vertices.push_back({id, std::move(name), posts.size()});
    }
    GroupGraph graph(std::move(vertices));

    for (const auto& chain : chains) {
        std::vector<std::size_t> members;
        members.reserve(chain.groups.size());
        for (const auto& gid : chain.groups) members.push_back(*graph.index_of(gid));
        for (std::size_t a = 0; a < members.size(); ++a)
            for (std::size_t b = a + 1; b < members.size(); ++b)
                graph.add_edge_weight(members[a], members[b], 1.0);
    }
    return graph;
}

namespace {

GroupGraph induced_by_mask(const GroupGraph& graph, const std::vector<bool>& keep) {
    std::vector<GroupGraph::Vertex> vertices;
    std::unordered_map<std::size_t, std::size_t> remap;
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
        if (!keep[i]) continue;
        remap[i] = vertices.size();
        vertices.push_back(graph.vertex(i));
    }
    GroupGraph out(std::move(vertices));
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
        if (!keep[i]) continue;
        for (const auto& [j, w] : graph.neighbors(i)) {
            if (j > i && keep[j]) out.add_edge_weight(remap[i], remap[j], w);
        }
    }
    return out;
}

}  // namespace

GroupGraph induced_subgraph(const GroupGraph& graph, const std::vector<std::size_t>& vertices) {
    std::vector<bool> keep(graph.vertex_count(), false);
    for (std::size_t v : vertices) {
        if (v >= graph.vertex_count()) throw ContractError("subgraph vertex index out of range");
        keep[v] = true;
    }
    return induced_by_mask(graph, keep);
}

GroupGraph filter_by_weighted_degree(const GroupGraph& graph, double min_degree,
                                     bool iterative, DegreeComparator comparator) {
    auto passes = [&](double degree) {
        return comparator == DegreeComparator::at_least ? degree >= min_degree
                                                        : degree > min_degree;
    };

    std::vector<bool> keep(graph.vertex_count(), true);
    std::vector<double> degree(graph.vertex_count());
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) degree[i] = graph.weighted_degree(i);

    for (;;) {
        bool removed = false;
        std::vector<std::size_t> dropped;
        for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
            if (keep[i] && !passes(degree[i])) {
                keep[i] = false;
                dropped.push_back(i);
                removed = true;
            }
        }
        for (std::size_t i : dropped) {
            for (const auto& [j, w] : graph.neighbors(i)) {
                if (keep[j]) degree[j] -= w;
            }
        }
        if (!removed || !iterative) break;
    }
    return induced_by_mask(graph, keep);
}

GraphMetrics clustering(const GroupGraph& graph, const std::vector<std::size_t>* subset) {
    GraphMetrics m;
    const std::size_t n = graph.vertex_count();
    m.weighted_degree.resize(n);
    m.clustering.resize(n);

    for (std::size_t v = 0; v < n; ++v) {
        m.weighted_degree[v] = graph.weighted_degree(v);
        const auto& adj = graph.neighbors(v);
        const std::size_t k = adj.size();
        if (k < 2) {
            m.clustering[v] = 0.0;
            continue;
        }
        std::size_t triangles = 0;
        for (auto it = adj.begin(); it != adj.end(); ++it) {
            const auto& nbrs = graph.neighbors(it->first);
            for (auto jt = std::next(it); jt != adj.end(); ++jt) {
                if (nbrs.count(jt->first)) ++triangles;
            }
        }
        m.clustering[v] =
            2.0 * static_cast<double>(triangles) / (static_cast<double>(k) * (k - 1));
    }

    double sum = 0.0;
    std::size_t count = 0;
    if (subset) {
        for (std::size_t v : *subset) {
            if (v >= n) throw ContractError("clustering subset index out of range");
            sum += m.clustering[v];
            ++count;
        }
    } else {
        for (double c : m.clustering) sum += c;
        count = n;
    }
    m.mean_clustering = count == 0 ? 0.0 : sum / static_cast<double>(count);
    return m;
}

void write_edges_csv(std::ostream& out, const GroupGraph& graph) {
    write_csv_row(out, {"source_group_id", "target_group_id", "weight"});
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
        for (const auto& [j, w] : graph.neighbors(i)) {
            if (j <= i) continue;
            write_csv_row(out, {graph.vertex(i).group_id, graph.vertex(j).group_id,
                                format_weight(w)});
        }
    }
}

void write_vertices_csv(std::ostream& out, const GroupGraph& graph,
                        const GraphMetrics& metrics) {
    write_csv_row(out, {"group_id", "group_name", "post_count", "weighted_degree",
                        "clustering"});
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
        const auto& v = graph.vertex(i);
        write_csv_row(out, {v.group_id, v.group_name, std::to_string(v.post_count),
                            format_weight(metrics.weighted_degree[i]),
                            format_double(metrics.clustering[i])});
    }
}

GroupGraph read_graph_csv(std::istream& vertices_in, std::istream& edges_in) {
    CsvReader vreader(vertices_in);
    std::size_t consumed = 0;
    auto vheader = vreader.next(consumed);
    if (!vheader || vheader->size() < 2 || (*vheader)[0] != "group_id")
        throw IoError("vertex CSV: missing or unexpected header");
    std::vector<GroupGraph::Vertex> vertices;
    for (;;) {
        auto row = vreader.next(consumed);
        if (!row) break;
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() != vheader->size()) throw IoError("vertex CSV: column count mismatch");
        GroupGraph::Vertex v;
        v.group_id = (*row)[0];
        v.group_name = (*row)[1];
        if (row->size() > 2) {
            try {
                v.post_count = std::stoull((*row)[2]);
            } catch (const std::exception&) {
                throw IoError("vertex CSV: invalid post_count \"" + (*row)[2] + "\"");
            }
        }
        vertices.push_back(std::move(v));
    }
    GroupGraph graph(std::move(vertices));

    CsvReader ereader(edges_in);
    auto eheader = ereader.next(consumed);
    if (!eheader || eheader->size() != 3 || (*eheader)[0] != "source_group_id")
        throw IoError("edge CSV: missing or unexpected header");
    for (;;) {
        auto row = ereader.next(consumed);
        if (!row) break;
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() != 3) throw IoError("edge CSV: column count mismatch");
        auto u = graph.index_of((*row)[0]);
        auto v = graph.index_of((*row)[1]);
        if (!u || !v) throw IoError("edge CSV: unknown group id");
        double w = 0.0;
        try {
            w = std::stod((*row)[2]);
        } catch (const std::exception&) {
            throw IoError("edge CSV: invalid weight \"" + (*row)[2] + "\"");
        }
        graph.add_edge_weight(*u, *v, w);
    }
    return graph;
}

}  // namespace coordnet
