#include "coordnet/communities.hpp"

#include <algorithm>
#include <istream>
#include <ostream>
#include <random>

#include "coordnet/csv.hpp"
#include "coordnet/errors.hpp"

namespace coordnet {

double modularity(const GroupGraph& graph, const std::map<std::string, int>& mapping,
                  double resolution) {
    const std::size_t n = graph.vertex_count();
    std::vector<int> comm(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto it = mapping.find(graph.vertex(i).group_id);
        if (it == mapping.end())
            throw ContractError("modularity mapping misses vertex \"" +
                                graph.vertex(i).group_id + "\"");
        comm[i] = it->second;
    }

    const double m = graph.total_weight();
    if (m == 0.0) return 0.0;
    const double two_m = 2.0 * m;

    // sums per community over ordered vertex pairs / weighted degrees
    std::map<int, double> internal, total;
    for (std::size_t i = 0; i < n; ++i) {
        total[comm[i]] += graph.weighted_degree(i);
        for (const auto& [j, w] : graph.neighbors(i)) {
            if (comm[j] == comm[i]) internal[comm[i]] += w;
        }
    }

    double q = 0.0;
    for (const auto& [c, tot] : total) {
        double in = 0.0;
        if (auto it = internal.find(c); it != internal.end()) in = it->second;
        q += in / two_m - resolution * (tot / two_m) * (tot / two_m);
    }
    return q;
}

namespace {

// Aggregated working graph for the Louvain levels. self[i] holds the
// ordered-pair self-loop weight A_ii (2x the undirected internal weight).
struct WorkGraph {
    std::vector<std::map<std::size_t, double>> adj;
    std::vector<double> self;
    std::vector<double> degree;  // k_i = self[i] + sum of adj[i]
    double two_m = 0.0;

    std::size_t size() const { return adj.size(); }

    void finish_degrees() {
        degree.assign(size(), 0.0);
        two_m = 0.0;
        for (std::size_t i = 0; i < size(); ++i) {
            double k = self[i];
            for (const auto& [_, w] : adj[i]) k += w;
            degree[i] = k;
            two_m += k;
        }
    }
};

WorkGraph work_graph_from(const GroupGraph& graph) {
    WorkGraph wg;
    wg.adj.resize(graph.vertex_count());
    wg.self.assign(graph.vertex_count(), 0.0);
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
        for (const auto& [j, w] : graph.neighbors(i)) wg.adj[i][j] = w;
    }
    wg.finish_degrees();
    return wg;
}

double work_modularity(const WorkGraph& wg, const std::vector<std::size_t>& comm,
                       double resolution) {
    if (wg.two_m == 0.0) return 0.0;
    std::map<std::size_t, double> internal, total;
    for (std::size_t i = 0; i < wg.size(); ++i) {
        total[comm[i]] += wg.degree[i];
        internal[comm[i]] += wg.self[i];
        for (const auto& [j, w] : wg.adj[i]) {
            if (comm[j] == comm[i]) internal[comm[i]] += w;
        }
    }
    double q = 0.0;
    for (const auto& [c, tot] : total) {
        q += internal[c] / wg.two_m - resolution * (tot / wg.two_m) * (tot / wg.two_m);
    }
    return q;
}

// In-place Fisher-Yates with rng()%k draws; std::shuffle is not
// implementation-stable across standard libraries.
void shuffle_order(std::vector<std::size_t>& order, std::mt19937_64& rng) {
    for (std::size_t i = order.size(); i > 1; --i) {
        std::size_t j = static_cast<std::size_t>(rng() % i);
        std::swap(order[i - 1], order[j]);
    }
}

// One Louvain level: local moves until stable. comm is updated in place.
// Returns true when at least one vertex moved.
bool move_phase(const WorkGraph& wg, std::vector<std::size_t>& comm,
                const std::vector<std::size_t>& order, double resolution) {
    const double m = wg.two_m / 2.0;
    std::vector<double> tot(wg.size(), 0.0);
    for (std::size_t i = 0; i < wg.size(); ++i) tot[comm[i]] += wg.degree[i];

    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        for (std::size_t v : order) {
            const std::size_t own = comm[v];
            const double k_v = wg.degree[v];
            tot[own] -= k_v;

            // weight from v to each candidate community
            std::map<std::size_t, double> links;
            links[own];  // staying is always a candidate
            for (const auto& [u, w] : wg.adj[v]) links[comm[u]] += w;

            std::size_t best = own;
            double best_gain = 0.0;
            bool first = true;
            for (const auto& [c, w_vc] : links) {
                double gain = w_vc / m - resolution * tot[c] * k_v / (2.0 * m * m);
                // map order visits smaller ids first, so strict > keeps the
                // smallest community id among equal gains
                if (first || gain > best_gain) {
                    best = c;
                    best_gain = gain;
                    first = false;
                }
            }

            tot[best] += k_v;
            if (best != own) {
                comm[v] = best;
                moved = true;
                any_move = true;
            }
        }
    }
    return any_move;
}

// Renumbers communities to 0..C-1 in increasing raw-id order and returns the
// aggregated graph.
WorkGraph aggregate(const WorkGraph& wg, std::vector<std::size_t>& comm) {
    std::map<std::size_t, std::size_t> dense;
    for (std::size_t i = 0; i < wg.size(); ++i) dense.emplace(comm[i], 0);
    std::size_t next = 0;
    for (auto& [raw, id] : dense) id = next++;
    for (std::size_t i = 0; i < wg.size(); ++i) comm[i] = dense[comm[i]];

    WorkGraph out;
    out.adj.resize(next);
    out.self.assign(next, 0.0);
    for (std::size_t i = 0; i < wg.size(); ++i) {
        out.self[comm[i]] += wg.self[i];
        for (const auto& [j, w] : wg.adj[i]) {
            if (comm[j] == comm[i]) out.self[comm[i]] += w;
            else out.adj[comm[i]][comm[j]] += w;
        }
    }
    out.finish_degrees();
    return out;
}

}  // namespace

CommunityAssignment louvain(const GroupGraph& graph, double resolution, std::uint64_t seed) {
    if (graph.vertex_count() == 0) throw ContractError("louvain requires a non-empty graph");
    if (resolution <= 0.0) throw ConfigError("resolution must be positive");

    const std::size_t n = graph.vertex_count();
    // membership[v] = work-graph node currently containing original vertex v
    std::vector<std::size_t> membership(n);
    for (std::size_t i = 0; i < n; ++i) membership[i] = i;

    WorkGraph wg = work_graph_from(graph);
    std::mt19937_64 rng(seed);
    double q = 0.0;

    if (wg.two_m > 0.0) {
        std::vector<std::size_t> comm(wg.size());
        for (std::size_t i = 0; i < wg.size(); ++i) comm[i] = i;
        q = work_modularity(wg, comm, resolution);

        for (;;) {
            std::vector<std::size_t> order(wg.size());
            for (std::size_t i = 0; i < wg.size(); ++i) order[i] = i;
            shuffle_order(order, rng);

            bool moved = move_phase(wg, comm, order, resolution);
            double q_new = work_modularity(wg, comm, resolution);
            if (!moved || q_new - q < 1e-9) {
                q = std::max(q, q_new);
                break;
            }
            q = q_new;

            wg = aggregate(wg, comm);
            for (std::size_t v = 0; v < n; ++v) membership[v] = comm[membership[v]];
            comm.assign(wg.size(), 0);
            for (std::size_t i = 0; i < wg.size(); ++i) comm[i] = i;
        }
        for (std::size_t v = 0; v < n; ++v) membership[v] = comm[membership[v]];
    }

    CommunityAssignment out;
    out.modularity = q;
    // dense ids by first appearance in group_id (= vertex index) order
    std::map<std::size_t, int> dense;
    int next = 0;
    for (std::size_t v = 0; v < n; ++v) {
        auto [it, inserted] = dense.emplace(membership[v], next);
        if (inserted) ++next;
        out.mapping[graph.vertex(v).group_id] = it->second;
    }
    out.communities = describe_communities(graph, out.mapping);
    return out;
}

CommunityAssignment louvain_best_of(const GroupGraph& graph, double resolution,
                                    std::uint64_t seed, std::uint64_t k) {
    if (k == 0) throw ConfigError("best-of run count must be >= 1");
    CommunityAssignment best;
    bool have = false;
    for (std::uint64_t i = 0; i < k; ++i) {
        CommunityAssignment candidate = louvain(graph, resolution, seed + i);
        if (!have || candidate.modularity > best.modularity) {
            best = std::move(candidate);
            have = true;
        }
    }
    return best;
}

std::vector<CommunityInfo> describe_communities(const GroupGraph& graph,
                                                const std::map<std::string, int>& mapping) {
    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
        auto it = mapping.find(graph.vertex(i).group_id);
        if (it == mapping.end())
            throw ContractError("community mapping misses vertex \"" +
                                graph.vertex(i).group_id + "\"");
        members[it->second].push_back(i);
    }

    std::vector<CommunityInfo> out;
    out.reserve(members.size());
    for (const auto& [cid, verts] : members) {
        CommunityInfo info;
        info.community_id = cid;
        info.size = verts.size();
        GroupGraph sub = induced_subgraph(graph, verts);
        info.mean_clustering = clustering(sub).mean_clustering;
        info.internal_weight = sub.total_weight();
        out.push_back(info);
    }
    return out;
}

void write_communities_csv(std::ostream& out, const CommunityAssignment& assignment) {
    write_csv_row(out, {"group_id", "community_id"});
    for (const auto& [group_id, community_id] : assignment.mapping) {
        write_csv_row(out, {group_id, std::to_string(community_id)});
    }
}

std::map<std::string, int> read_communities_csv(std::istream& in) {
    CsvReader reader(in);
    std::size_t consumed = 0;
    auto header = reader.next(consumed);
    if (!header || header->size() != 2 || (*header)[0] != "group_id" ||
        (*header)[1] != "community_id")
        throw IoError("communities CSV: missing or unexpected header");
    std::map<std::string, int> mapping;
    for (;;) {
        auto row = reader.next(consumed);
        if (!row) break;
        if (row->size() == 1 && (*row)[0].empty()) continue;
        if (row->size() != 2) throw IoError("communities CSV: column count mismatch");
        try {
            mapping[(*row)[0]] = std::stoi((*row)[1]);
        } catch (const std::exception&) {
            throw IoError("communities CSV: invalid community id \"" + (*row)[1] + "\"");
        }
    }
    return mapping;
}

}  // namespace coordnet
