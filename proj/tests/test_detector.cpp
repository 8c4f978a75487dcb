#include <doctest.h>

#include <cstdio>
#include <random>
#include <sstream>

#include "coordnet/detector.hpp"
#include "coordnet/errors.hpp"

using namespace coordnet;

namespace {

const ContentKey kKey{ContentKey::Kind::message, "mensagem de teste longa o suficiente"};

std::vector<Share> shares_at(const std::vector<std::int64_t>& times,
                             const std::vector<std::string>& groups) {
    std::vector<Share> shares;
    for (std::size_t i = 0; i < times.size(); ++i) {
        char id[8];
        std::snprintf(id, sizeof id, "p%03zu", i);
        shares.push_back({id, groups[i % groups.size()], times[i]});
    }
    return shares;
}

Post mk(const std::string& id, const std::string& gid, std::int64_t ts,
        const std::string& message) {
    Post p;
    p.post_id = id;
    p.group_id = gid;
    p.timestamp = ts;
    p.message = message;
    return p;
}

}  // namespace

TEST_CASE("detect_chains spec example") {
    auto shares = shares_at({0, 20, 45, 100}, {"A", "B", "C", "D"});
    DetectionConfig config;
    auto chains = detect_chains(kKey, shares, config);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].shares.size() == 3);
    CHECK(chains[0].shares[2].timestamp == 45);
    CHECK(chains[0].span_seconds == 45);
    CHECK(chains[0].groups == std::set<std::string>{"A", "B", "C"});
}

TEST_CASE("detect_chains gap exceeds window") {
    auto shares = shares_at({0, 31}, {"A", "B"});
    CHECK(detect_chains(kKey, shares, {}).empty());
}

TEST_CASE("detect_chains distinct group threshold") {
    auto shares = shares_at({0, 10}, {"A"});
    DetectionConfig config;
    CHECK(detect_chains(kKey, shares, config).empty());
    config.min_distinct_groups = 1;
    auto chains = detect_chains(kKey, shares, config);
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].groups == std::set<std::string>{"A"});
}

TEST_CASE("detect_chains multiple chains stay disjoint and ordered") {
    auto shares = shares_at({0, 10, 100, 105, 300, 500, 505}, {"A", "B"});
    auto chains = detect_chains(kKey, shares, {});
    REQUIRE(chains.size() == 3);
    CHECK(chains[0].shares.size() == 2);
    CHECK(chains[1].shares[0].timestamp == 100);
    CHECK(chains[2].shares[0].timestamp == 500);
    // the lone share at 300 belongs to no chain
    for (const auto& chain : chains) {
        for (const auto& share : chain.shares) CHECK(share.timestamp != 300);
    }
}

TEST_CASE("detect_chains boundary gap equal to window joins") {
    auto shares = shares_at({0, 30, 60}, {"A", "B", "C"});
    auto chains = detect_chains(kKey, shares, {});
    REQUIRE(chains.size() == 1);
    CHECK(chains[0].shares.size() == 3);
    CHECK(chains[0].span_seconds == 60);
}

TEST_CASE("detect_chains rejects unsorted input") {
    std::vector<Share> shares = {{"p1", "A", 50}, {"p2", "B", 10}};
    CHECK_THROWS_AS(detect_chains(kKey, shares, {}), ContractError);
    std::vector<Share> tied = {{"pb", "A", 10}, {"pa", "B", 10}};
    CHECK_THROWS_AS(detect_chains(kKey, tied, {}), ContractError);
}

TEST_CASE("detect_chains translation invariance") {
    auto base = shares_at({0, 20, 45, 100, 120, 121}, {"A", "B", "C"});
    auto shifted = base;
    for (auto& s : shifted) s.timestamp += 9999;
    auto chains_base = detect_chains(kKey, base, {});
    auto chains_shifted = detect_chains(kKey, shifted, {});
    REQUIRE(chains_base.size() == chains_shifted.size());
    for (std::size_t i = 0; i < chains_base.size(); ++i) {
        CHECK(chains_base[i].shares.size() == chains_shifted[i].shares.size());
        CHECK(chains_base[i].span_seconds == chains_shifted[i].span_seconds);
    }
}

TEST_CASE("detect_chains window monotonicity") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t n = 2 + rng() % 60;
        std::vector<std::int64_t> times;
        for (std::size_t i = 0; i < n; ++i)
            times.push_back(static_cast<std::int64_t>(rng() % (10 * n)));
        std::sort(times.begin(), times.end());
        auto shares = shares_at(times, {"A", "B", "C"});

        std::size_t covered_small = 0, covered_large = 0;
        DetectionConfig config;
        config.window_seconds = 5;
        for (const auto& c : detect_chains(kKey, shares, config))
            covered_small += c.shares.size();
        config.window_seconds = 25;
        for (const auto& c : detect_chains(kKey, shares, config))
            covered_large += c.shares.size();
        CHECK(covered_small <= covered_large);
    }
}

TEST_CASE("build_share_index groups and sorts shares") {
    std::vector<Post> posts = {
        mk("p2", "g2", 50, "a mesma mensagem repetida aqui"),
        mk("p1", "g1", 10, "a mesma mensagem repetida aqui"),
        mk("p3", "g3", 10, "outra mensagem diferente aqui"),
    };
    auto index = build_share_index(posts, {});
    REQUIRE(index.size() == 2);
    const auto& shares = index.at({ContentKey::Kind::message, "a mesma mensagem repetida aqui"});
    REQUIRE(shares.size() == 2);
    CHECK(shares[0].post_id == "p1");
    CHECK(shares[1].post_id == "p2");
}

TEST_CASE("build_share_index set semantics within a post") {
    Post p = mk("p1", "g1", 10, "");
    p.message.reset();
    p.links = {"http://a.com/x", "http://A.com/x"};
    auto index = build_share_index({p}, {});
    REQUIRE(index.size() == 1);
    CHECK(index.begin()->second.size() == 1);
}

TEST_CASE("build_share_index tie order by post_id") {
    std::vector<Post> posts = {
        mk("pz", "g1", 10, "a mesma mensagem repetida aqui"),
        mk("pa", "g2", 10, "a mesma mensagem repetida aqui"),
    };
    auto index = build_share_index(posts, {});
    const auto& shares = index.begin()->second;
    CHECK(shares[0].post_id == "pa");
    CHECK(shares[1].post_id == "pz");
}

TEST_CASE("detect_all_chains ordered by key then first timestamp") {
    std::vector<Post> posts = {
        mk("p1", "g1", 0, "bbbb mensagem repetida aqui"),
        mk("p2", "g2", 10, "bbbb mensagem repetida aqui"),
        mk("p3", "g1", 500, "bbbb mensagem repetida aqui"),
        mk("p4", "g2", 505, "bbbb mensagem repetida aqui"),
        mk("p5", "g1", 100, "aaaa mensagem repetida aqui"),
        mk("p6", "g2", 105, "aaaa mensagem repetida aqui"),
    };
    auto chains = detect_all_chains(build_share_index(posts, {}), {});
    REQUIRE(chains.size() == 3);
    CHECK(chains[0].key.value == "aaaa mensagem repetida aqui");
    CHECK(chains[1].key.value == "bbbb mensagem repetida aqui");
    CHECK(chains[1].shares[0].timestamp == 0);
    CHECK(chains[2].key.value == "bbbb mensagem repetida aqui");
    CHECK(chains[2].shares[0].timestamp == 500);
}

TEST_CASE("estimate_threshold_quantile forced examples") {
    ShareIndex index;
    std::vector<std::int64_t> gaps = {5, 10, 20, 40, 60, 80, 100, 120, 140, 160};
    for (std::size_t i = 0; i < gaps.size(); ++i) {
        ContentKey key{ContentKey::Kind::url, "http://k" + std::to_string(i) + ".com/"};
        index[key] = {{"a" + std::to_string(i), "g1", 1000},
                      {"b" + std::to_string(i), "g2", 1000 + gaps[i]}};
    }
    double v = estimate_threshold_quantile(index, 0.10, {ContentKey::Kind::url});
    CHECK(v == doctest::Approx(9.5).epsilon(1e-12));

    // q = 1.0 returns the maximum
    CHECK(estimate_threshold_quantile(index, 1.0, {ContentKey::Kind::url}) ==
          doctest::Approx(160.0));
}

TEST_CASE("estimate_threshold_quantile single key") {
    ShareIndex index;
    index[{ContentKey::Kind::url, "http://k.com/"}] = {{"a", "g1", 0}, {"b", "g2", 42}};
    CHECK(estimate_threshold_quantile(index, 0.5, {ContentKey::Kind::url}) ==
          doctest::Approx(42.0));
}

TEST_CASE("estimate_threshold_quantile uses first two shares only") {
    ShareIndex index;
    index[{ContentKey::Kind::url, "http://k.com/"}] = {
        {"a", "g1", 0}, {"b", "g2", 10}, {"c", "g3", 1000}};
    CHECK(estimate_threshold_quantile(index, 1.0, {ContentKey::Kind::url}) ==
          doctest::Approx(10.0));
}

TEST_CASE("estimate_threshold_quantile errors") {
    ShareIndex index;
    index[{ContentKey::Kind::message, "só uma mensagem de texto aqui"}] = {
        {"a", "g1", 0}, {"b", "g2", 10}};
    // no URL key qualifies
    CHECK_THROWS_AS(estimate_threshold_quantile(index, 0.1, {ContentKey::Kind::url}),
                    EstimationError);
    // selected kind does qualify
    CHECK(estimate_threshold_quantile(index, 0.1, {ContentKey::Kind::message}) ==
          doctest::Approx(10.0));
    CHECK_THROWS_AS(estimate_threshold_quantile(index, 0.0, {ContentKey::Kind::message}),
                    ConfigError);
    CHECK_THROWS_AS(estimate_threshold_quantile(index, 1.5, {ContentKey::Kind::message}),
                    ConfigError);
}

TEST_CASE("chains jsonl round trip") {
    std::vector<Post> posts = {
        mk("p1", "g1", 0, "mensagem compartilhada em grupos"),
        mk("p2", "g2", 10, "mensagem compartilhada em grupos"),
        mk("p3", "g3", 20, "mensagem compartilhada em grupos"),
    };
    auto chains = detect_all_chains(build_share_index(posts, {}), {});
    REQUIRE(chains.size() == 1);

    std::ostringstream out;
    write_chains_jsonl(out, chains);
    std::istringstream in(out.str());
    auto parsed = read_chains_jsonl(in);
    CHECK(parsed == chains);
}

TEST_CASE("chains jsonl rejects malformed input") {
    std::istringstream bad1("not json\n");
    CHECK_THROWS_AS(read_chains_jsonl(bad1), IoError);
    std::istringstream bad2(R"({"kind":"message","key":"x","post_ids":["a"],)"
                            R"("group_ids":[],"timestamps":[],"span_seconds":0})" "\n");
    CHECK_THROWS_AS(read_chains_jsonl(bad2), IoError);
}
