#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>
#include <set>
#include <sstream>
#include <tuple>

#include "coordnet/communities.hpp"
#include "coordnet/errors.hpp"

using namespace coordnet;

namespace {

GroupGraph make_graph(std::size_t n, const std::vector<std::tuple<std::size_t, std::size_t, double>>& edges) {
    std::vector<GroupGraph::Vertex> vertices;
    for (std::size_t i = 0; i < n; ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "g%03zu", i);
        vertices.push_back({id, "", 0});
    }
    GroupGraph g(std::move(vertices));
    for (const auto& [a, b, w] : edges) g.add_edge_weight(a, b, w);
    return g;
}

GroupGraph triangle() { return make_graph(3, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}}); }

GroupGraph two_triangles() {
    return make_graph(6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1}, {3, 4, 1}, {4, 5, 1}, {3, 5, 1}});
}

GroupGraph bridged_triangles() {
    return make_graph(6, {{0, 1, 1}, {1, 2, 1}, {0, 2, 1},
                          {3, 4, 1}, {4, 5, 1}, {3, 5, 1},
                          {2, 3, 1}});
}

GroupGraph two_cliques4() {
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t i = 0; i < 4; ++i)
        for (std::size_t j = i + 1; j < 4; ++j) {
            edges.push_back({i, j, 1});
            edges.push_back({i + 4, j + 4, 1});
        }
    edges.push_back({3, 4, 1});
    return make_graph(8, edges);
}

std::map<std::string, int> split_mapping(const GroupGraph& g, std::size_t boundary) {
    std::map<std::string, int> mapping;
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        mapping[g.vertex(i).group_id] = i < boundary ? 0 : 1;
    }
    return mapping;
}

std::map<std::string, int> singleton_mapping(const GroupGraph& g) {
    std::map<std::string, int> mapping;
    for (std::size_t i = 0; i < g.vertex_count(); ++i) {
        mapping[g.vertex(i).group_id] = static_cast<int>(i);
    }
    return mapping;
}

GroupGraph random_graph(std::mt19937_64& rng, std::size_t n, int density_mod) {
    std::vector<std::tuple<std::size_t, std::size_t, double>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (rng() % density_mod == 0) edges.push_back({i, j, 1.0 + double(rng() % 5)});
        }
    }
    return make_graph(n, edges);
}

}  // namespace

TEST_CASE("modularity forced values") {
    auto t = triangle();
    CHECK(modularity(t, split_mapping(t, 3)) == doctest::Approx(0.0));
    CHECK(modularity(t, singleton_mapping(t)) == doctest::Approx(-1.0 / 3.0));

    auto tt = two_triangles();
    CHECK(modularity(tt, split_mapping(tt, 3)) == doctest::Approx(0.5));

    auto bt = bridged_triangles();
    CHECK(modularity(bt, split_mapping(bt, 3)) == doctest::Approx(5.0 / 14.0));
}

TEST_CASE("modularity respects resolution") {
    auto tt = two_triangles();
    auto split = split_mapping(tt, 3);
    // Q(gamma) = 1 - gamma/2 for this split
    CHECK(modularity(tt, split, 2.0) == doctest::Approx(0.0));
    CHECK(modularity(tt, split, 0.5) == doctest::Approx(0.75));
}

TEST_CASE("modularity of an edgeless graph is zero") {
    auto g = make_graph(4, {});
    CHECK(modularity(g, split_mapping(g, 2)) == 0.0);
}

TEST_CASE("modularity requires full coverage") {
    auto t = triangle();
    auto mapping = split_mapping(t, 3);
    mapping.erase("g001");
    CHECK_THROWS_AS(modularity(t, mapping), ContractError);
}

TEST_CASE("modularity weighted split") {
    // heavy internal pair, light bridge: {A,B} vs {C}
    auto g = make_graph(3, {{0, 1, 4}, {1, 2, 1}});
    std::map<std::string, int> mapping = {{"g000", 0}, {"g001", 0}, {"g002", 1}};
    // m=5, in_0=8/10, tot_0=9/10, tot_1=1/10
    double expected = 8.0 / 10.0 - (9.0 / 10.0) * (9.0 / 10.0) - (1.0 / 10.0) * (1.0 / 10.0);
    CHECK(modularity(g, mapping) == doctest::Approx(expected));
}

TEST_CASE("louvain recovers planted cliques") {
    auto g = two_cliques4();
    auto result = louvain(g, 1.0, 1);
    REQUIRE(result.communities.size() == 2);
    for (std::size_t i = 0; i < 4; ++i) {
        CHECK(result.mapping.at(g.vertex(i).group_id) == result.mapping.at(g.vertex(0).group_id));
        CHECK(result.mapping.at(g.vertex(i + 4).group_id) ==
              result.mapping.at(g.vertex(4).group_id));
    }
    CHECK(result.mapping.at(g.vertex(0).group_id) != result.mapping.at(g.vertex(4).group_id));
    CHECK(result.modularity == doctest::Approx(modularity(g, result.mapping)));
}

TEST_CASE("louvain splits disjoint triangles") {
    auto result = louvain(two_triangles(), 1.0, 3);
    CHECK(result.communities.size() == 2);
    CHECK(result.modularity == doctest::Approx(0.5));
}

TEST_CASE("louvain on a single vertex") {
    auto g = make_graph(1, {});
    auto result = louvain(g, 1.0, 1);
    CHECK(result.mapping.at("g000") == 0);
    CHECK(result.modularity == 0.0);
    REQUIRE(result.communities.size() == 1);
    CHECK(result.communities[0].size == 1);
}

TEST_CASE("louvain on an edgeless graph gives singletons") {
    auto g = make_graph(4, {});
    auto result = louvain(g, 1.0, 9);
    CHECK(result.communities.size() == 4);
    CHECK(result.modularity == 0.0);
}

TEST_CASE("louvain rejects bad inputs") {
    CHECK_THROWS_AS(louvain(GroupGraph{}, 1.0, 1), ContractError);
    CHECK_THROWS_AS(louvain(triangle(), 0.0, 1), ConfigError);
    CHECK_THROWS_AS(louvain(triangle(), -2.0, 1), ConfigError);
}

TEST_CASE("louvain is deterministic per seed") {
    std::mt19937_64 rng(21);
    for (int trial = 0; trial < 10; ++trial) {
        auto g = random_graph(rng, 4 + rng() % 20, 3);
        auto a = louvain(g, 1.0, trial);
        auto b = louvain(g, 1.0, trial);
        CHECK(a.mapping == b.mapping);
        CHECK(a.modularity == b.modularity);
    }
}

TEST_CASE("louvain community ids are dense and ordered by first group") {
    auto result = louvain(two_triangles(), 1.0, 7);
    // g000 comes first in group order, so its community is 0
    CHECK(result.mapping.at("g000") == 0);
    CHECK(result.mapping.at("g003") == 1);
    std::set<int> ids;
    for (const auto& [gid, cid] : result.mapping) ids.insert(cid);
    CHECK(ids == std::set<int>{0, 1});
    REQUIRE(result.communities.size() == 2);
    CHECK(result.communities[0].community_id == 0);
    CHECK(result.communities[1].community_id == 1);
}

TEST_CASE("louvain reported modularity matches a fresh recomputation") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 25; ++trial) {
        auto g = random_graph(rng, 3 + rng() % 25, 2 + trial % 3);
        double gamma = 0.5 + (trial % 4) * 0.5;
        auto result = louvain(g, gamma, 100 + trial);
        double fresh = modularity(g, result.mapping, gamma);
        CHECK(std::abs(result.modularity - fresh) < 1e-9);
    }
}

TEST_CASE("louvain never scores below the singleton partition") {
    std::mt19937_64 rng(41);
    for (int trial = 0; trial < 20; ++trial) {
        auto g = random_graph(rng, 3 + rng() % 18, 3);
        auto result = louvain(g, 1.0, trial);
        CHECK(result.modularity >= modularity(g, singleton_mapping(g)) - 1e-12);
    }
}

TEST_CASE("low resolution merges across the bridge") {
    auto result = louvain(bridged_triangles(), 0.01, 1);
    CHECK(result.communities.size() == 1);
}

TEST_CASE("best-of-k dominates every member seed") {
    std::mt19937_64 rng(51);
    for (int trial = 0; trial < 8; ++trial) {
        auto g = random_graph(rng, 6 + rng() % 18, 3);
        auto best = louvain_best_of(g, 1.0, 1, 6);
        for (std::uint64_t seed = 1; seed <= 6; ++seed) {
            CHECK(best.modularity >= louvain(g, 1.0, seed).modularity);
        }
    }
}

TEST_CASE("best-of-k validates the count") {
    CHECK_THROWS_AS(louvain_best_of(triangle(), 1.0, 1, 0), ConfigError);
}

TEST_CASE("describe_communities reports induced statistics") {
    auto tt = two_triangles();
    auto infos = describe_communities(tt, split_mapping(tt, 3));
    REQUIRE(infos.size() == 2);
    for (const auto& info : infos) {
        CHECK(info.size == 3);
        CHECK(info.mean_clustering == 1.0);
        CHECK(info.internal_weight == 3.0);
    }

    auto bt = bridged_triangles();
    infos = describe_communities(bt, split_mapping(bt, 3));
    // the bridge edge belongs to neither community
    CHECK(infos[0].internal_weight == 3.0);
    CHECK(infos[1].internal_weight == 3.0);
}

TEST_CASE("describe_communities misses nothing") {
    auto g = two_cliques4();
    auto result = louvain(g, 1.0, 1);
    std::size_t total = 0;
    for (const auto& info : result.communities) total += info.size;
    CHECK(total == g.vertex_count());
}

TEST_CASE("communities csv round trip") {
    auto result = louvain(two_cliques4(), 1.0, 1);
    std::ostringstream out;
    write_communities_csv(out, result);
    std::istringstream in(out.str());
    CHECK(read_communities_csv(in) == result.mapping);
}

TEST_CASE("communities csv rejects garbage") {
    std::istringstream in("group_id,community_id\nA,not-a-number\n");
    CHECK_THROWS_AS(read_communities_csv(in), IoError);
}
