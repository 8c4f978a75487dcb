#include "coordnet/detector.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>

#include <nlohmann/json.hpp>

#include "coordnet/errors.hpp"

namespace coordnet {

using json = nlohmann::json;

ShareIndex build_share_index(const std::vector<Post>& posts, const NormalizationConfig& config) {
    ShareIndex index;
    for (const auto& post : posts) {
        for (const auto& key : extract_keys(post, config)) {
            index[key].push_back({post.post_id, post.group_id, post.timestamp});
        }
    }
    auto share_order = [](const Share& a, const Share& b) {
        if (a.timestamp != b.timestamp) return a.timestamp < b.timestamp;
        return a.post_id < b.post_id;
    };
    for (auto& [key, shares] : index) {
        std::sort(shares.begin(), shares.end(), share_order);
    }
    return index;
}

std::vector<CoordinationChain> detect_chains(const ContentKey& key,
                                             const std::vector<Share>& shares,
                                             const DetectionConfig& config) {
    for (std::size_t i = 1; i < shares.size(); ++i) {
        const Share& a = shares[i - 1];
        const Share& b = shares[i];
        if (a.timestamp > b.timestamp ||
            (a.timestamp == b.timestamp && a.post_id > b.post_id))
            throw ContractError("detect_chains requires shares sorted by (timestamp, post_id)");
    }

    std::vector<CoordinationChain> chains;
    std::size_t i = 0;
    while (i < shares.size()) {
        std::size_t j = i + 1;
        while (j < shares.size() &&
               shares[j].timestamp - shares[j - 1].timestamp <= config.window_seconds)
            ++j;
        if (j - i >= config.min_chain_shares) {
            CoordinationChain chain;
            chain.key = key;
            chain.shares.assign(shares.begin() + i, shares.begin() + j);
            chain.span_seconds = shares[j - 1].timestamp - shares[i].timestamp;
            for (std::size_t k = i; k < j; ++k) chain.groups.insert(shares[k].group_id);
            if (chain.groups.size() >= config.min_distinct_groups)
                chains.push_back(std::move(chain));
        }
        i = j;
    }
    return chains;
}

std::vector<CoordinationChain> detect_all_chains(const ShareIndex& index,
                                                 const DetectionConfig& config) {
    std::vector<CoordinationChain> all;
    for (const auto& [key, shares] : index) {
        auto chains = detect_chains(key, shares, config);
        all.insert(all.end(), std::make_move_iterator(chains.begin()),
                   std::make_move_iterator(chains.end()));
    }
    // index iteration is key-ordered and detect_chains emits by first
    // timestamp, so `all` is already (key, first timestamp)-ordered
    return all;
}

double estimate_threshold_quantile(const ShareIndex& index, double q,
                                   const std::set<ContentKey::Kind>& kinds) {
    if (!(q > 0.0) || q > 1.0) throw ConfigError("quantile must be in (0, 1]");
    std::vector<double> interarrivals;
    for (const auto& [key, shares] : index) {
        if (shares.size() < 2 || kinds.count(key.kind) == 0) continue;
        interarrivals.push_back(static_cast<double>(shares[1].timestamp - shares[0].timestamp));
    }
    if (interarrivals.empty())
        throw EstimationError(
            "no key of the selected kinds has two or more shares; "
            "use the fixed default window instead");
    std::sort(interarrivals.begin(), interarrivals.end());
    const std::size_t n = interarrivals.size();
    double p = q * static_cast<double>(n - 1);
    std::size_t lo = static_cast<std::size_t>(p);
    if (lo >= n - 1) return interarrivals[n - 1];
    double frac = p - static_cast<double>(lo);
    return interarrivals[lo] + frac * (interarrivals[lo + 1] - interarrivals[lo]);
}

void write_chains_jsonl(std::ostream& out, const std::vector<CoordinationChain>& chains) {
    for (const auto& chain : chains) {
        json rec;
        rec["kind"] = std::string(key_kind_name(chain.key.kind));
        rec["key"] = chain.key.value;
        json post_ids = json::array();
        json group_ids = json::array();
        json timestamps = json::array();
        for (const auto& share : chain.shares) {
            post_ids.push_back(share.post_id);
            group_ids.push_back(share.group_id);
            timestamps.push_back(share.timestamp);
        }
        rec["post_ids"] = std::move(post_ids);
        rec["group_ids"] = std::move(group_ids);
        rec["timestamps"] = std::move(timestamps);
        rec["span_seconds"] = chain.span_seconds;
        out << rec.dump() << '\n';
    }
}

std::vector<CoordinationChain> read_chains_jsonl(std::istream& in) {
    std::vector<CoordinationChain> chains;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& ex) {
            throw IoError("chains line " + std::to_string(line_no) + ": invalid JSON: " +
                          ex.what());
        }
        try {
            CoordinationChain chain;
            auto kind = key_kind_from_name(rec.at("kind").get<std::string>());
            if (!kind) throw std::runtime_error("unknown kind");
            chain.key.kind = *kind;
            chain.key.value = rec.at("key").get<std::string>();
            const auto& post_ids = rec.at("post_ids");
            const auto& group_ids = rec.at("group_ids");
            const auto& timestamps = rec.at("timestamps");
            if (!post_ids.is_array() || !group_ids.is_array() || !timestamps.is_array() ||
                post_ids.size() != group_ids.size() || post_ids.size() != timestamps.size())
                throw std::runtime_error("post_ids/group_ids/timestamps must be equal-length arrays");
            for (std::size_t i = 0; i < post_ids.size(); ++i) {
                Share share;
                share.post_id = post_ids[i].get<std::string>();
                share.group_id = group_ids[i].get<std::string>();
                share.timestamp = timestamps[i].get<std::int64_t>();
                chain.groups.insert(share.group_id);
                chain.shares.push_back(std::move(share));
            }
            chain.span_seconds = rec.at("span_seconds").get<std::int64_t>();
            chains.push_back(std::move(chain));
        } catch (const std::exception& ex) {
            throw IoError("chains line " + std::to_string(line_no) + ": " + ex.what());
        }
    }
    return chains;
}

}  // namespace coordnet
