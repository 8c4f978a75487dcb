#include "coordnet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>

#include <nlohmann/json.hpp>

#include "coordnet/errors.hpp"

namespace coordnet {

using json = nlohmann::json;

namespace {

// rng()%n draws keep output identical across standard libraries, unlike
// std::uniform_int_distribution.
std::uint64_t draw_below(std::mt19937_64& rng, std::uint64_t n) {
    return n == 0 ? 0 : rng() % n;
}

bool draw_probability(std::mt19937_64& rng, double p) {
    constexpr std::uint64_t scale = 1000000;
    auto cut = static_cast<std::uint64_t>(std::llround(p * static_cast<double>(scale)));
    return draw_below(rng, scale) < cut;
}

std::string format_id(const char* pattern, std::size_t n) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), pattern, n);
    return buf;
}

void validate(const ScenarioConfig& config) {
    if (config.horizon_seconds < 0) throw ConfigError("scenario horizon must be >= 0");
    if (config.organic.key_reuse_probability < 0.0 ||
        config.organic.key_reuse_probability > 1.0)
        throw ConfigError("key_reuse_probability must be in [0, 1]");
    if (config.organic.n_posts > 0 && config.n_groups == 0)
        throw ConfigError("organic posts require at least one group");
    for (std::size_t c = 0; c < config.campaigns.size(); ++c) {
        const CampaignConfig& camp = config.campaigns[c];
        if (camp.n_groups > config.n_groups)
            throw ConfigError("campaign " + std::to_string(c) +
                              " wants more groups than the scenario has");
        if (camp.n_keys > 0 && camp.shares_per_key > 0 && camp.n_groups == 0)
            throw ConfigError("campaign " + std::to_string(c) + " shares need member groups");
        if (camp.burst_interval_seconds < 0)
            throw ConfigError("burst_interval_seconds must be >= 0");
        if (camp.jitter_seconds < 0) throw ConfigError("jitter_seconds must be >= 0");
    }
}

}  // namespace

SyntheticCorpus generate_corpus(const ScenarioConfig& config) {
    validate(config);
    std::mt19937_64 rng(config.seed);
    SyntheticCorpus out;
    std::size_t next_post = 0;

    auto group_id = [](std::size_t g) { return format_id("grp-%04zu", g); };
    auto group_name = [](std::size_t g) { return format_id("Group %04zu", g); };

    auto make_post = [&](std::size_t g, std::int64_t ts, std::string message, int label) {
        Post p;
        p.post_id = format_id("post-%06zu", next_post++);
        p.group_id = group_id(g);
        p.group_name = group_name(g);
        p.timestamp = ts;
        p.message = std::move(message);
        p.media_type = MediaType::status;
        out.truth.post_labels[p.post_id] = label;
        out.posts.push_back(std::move(p));
    };

    std::vector<std::string> organic_keys;
    for (std::size_t i = 0; i < config.organic.n_posts; ++i) {
        std::size_t g = draw_below(rng, config.n_groups);
        auto ts = static_cast<std::int64_t>(
            draw_below(rng, static_cast<std::uint64_t>(config.horizon_seconds) + 1));
        std::string key;
        if (!organic_keys.empty() &&
            draw_probability(rng, config.organic.key_reuse_probability)) {
            key = organic_keys[draw_below(rng, organic_keys.size())];
        } else {
            key = format_id("organic narrative number %06zu for testing", organic_keys.size());
            organic_keys.push_back(key);
        }
        make_post(g, ts, std::move(key), kOrganicLabel);
    }

    for (std::size_t c = 0; c < config.campaigns.size(); ++c) {
        const CampaignConfig& camp = config.campaigns[c];
        CampaignTruth truth;

        // partial Fisher-Yates picks the member groups
        std::vector<std::size_t> pool(config.n_groups);
        for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
        std::vector<std::size_t> members;
        members.reserve(camp.n_groups);
        for (std::size_t i = 0; i < camp.n_groups; ++i) {
            std::size_t j = i + draw_below(rng, pool.size() - i);
            std::swap(pool[i], pool[j]);
            members.push_back(pool[i]);
            truth.groups.insert(group_id(pool[i]));
        }

        for (std::size_t k = 0; k < camp.n_keys; ++k) {
            std::string key = "campaign " + std::to_string(c) + " key " + std::to_string(k) +
                              " coordinated burst payload";
            truth.keys.insert(key);
            auto ts = static_cast<std::int64_t>(
                draw_below(rng, static_cast<std::uint64_t>(config.horizon_seconds) + 1));
            for (std::size_t s = 0; s < camp.shares_per_key; ++s) {
                if (s > 0) {
                    std::int64_t jitter = 0;
                    if (camp.jitter_seconds > 0) {
                        jitter = static_cast<std::int64_t>(draw_below(
                                     rng, 2 * static_cast<std::uint64_t>(camp.jitter_seconds) + 1)) -
                                 camp.jitter_seconds;
                    }
                    ts += std::max<std::int64_t>(0, camp.burst_interval_seconds + jitter);
                }
                make_post(members[s % members.size()], ts, key, static_cast<int>(c));
            }
        }
        out.truth.campaigns.push_back(std::move(truth));
    }

    std::sort(out.posts.begin(), out.posts.end(), [](const Post& a, const Post& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.post_id < b.post_id;
    });
    return out;
}

DetectionScore evaluate_detection(const std::vector<CoordinationChain>& chains,
                                  const GroundTruth& truth) {
    std::set<std::string> predicted;
    for (const auto& chain : chains) {
        for (const auto& share : chain.shares) predicted.insert(share.post_id);
    }

    std::size_t tp = 0, fp = 0, fn = 0;
    for (const auto& [post_id, label] : truth.post_labels) {
        bool positive = label != kOrganicLabel;
        bool flagged = predicted.count(post_id) > 0;
        if (flagged && positive) ++tp;
        else if (flagged && !positive) ++fp;
        else if (!flagged && positive) ++fn;
    }

    DetectionScore score;
    score.precision = tp + fp == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fp);
    score.recall = tp + fn == 0 ? 1.0 : static_cast<double>(tp) / static_cast<double>(tp + fn);
    score.f1 = score.precision + score.recall == 0.0
                   ? 0.0
                   : 2.0 * score.precision * score.recall / (score.precision + score.recall);
    return score;
}

void write_ground_truth_jsonl(std::ostream& out, const GroundTruth& truth) {
    for (const auto& [post_id, label] : truth.post_labels) {
        json rec;
        rec["type"] = "post";
        rec["post_id"] = post_id;
        rec["label"] = label;
        out << rec.dump() << '\n';
    }
    for (std::size_t c = 0; c < truth.campaigns.size(); ++c) {
        json rec;
        rec["type"] = "campaign";
        rec["campaign_id"] = c;
        rec["groups"] = truth.campaigns[c].groups;
        rec["keys"] = truth.campaigns[c].keys;
        out << rec.dump() << '\n';
    }
}

GroundTruth read_ground_truth_jsonl(std::istream& in) {
    GroundTruth truth;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        try {
            json rec = json::parse(line);
            std::string type = rec.at("type").get<std::string>();
            if (type == "post") {
                truth.post_labels[rec.at("post_id").get<std::string>()] =
                    rec.at("label").get<int>();
            } else if (type == "campaign") {
                auto id = rec.at("campaign_id").get<std::size_t>();
                if (truth.campaigns.size() <= id) truth.campaigns.resize(id + 1);
                for (const auto& g : rec.at("groups"))
                    truth.campaigns[id].groups.insert(g.get<std::string>());
                for (const auto& k : rec.at("keys"))
                    truth.campaigns[id].keys.insert(k.get<std::string>());
            } else {
                throw std::runtime_error("unknown record type \"" + type + "\"");
            }
        } catch (const std::exception& ex) {
            throw IoError("ground truth line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return truth;
}

}  // namespace coordnet
