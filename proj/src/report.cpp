#include "coordnet/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include "coordnet/csv.hpp"
#include "coordnet/errors.hpp"

namespace coordnet {

using json = nlohmann::json;

std::string_view media_category_name(MediaCategory c) {
    switch (c) {
        case MediaCategory::video: return "video";
        case MediaCategory::photo_or_meme: return "photo_or_meme";
        case MediaCategory::url: return "url";
        case MediaCategory::text: return "text";
    }
    return "text";
}

std::vector<NarrativeEntry> top_narratives(const std::vector<CoordinationChain>& chains,
                                           std::size_t n,
                                           const std::map<std::string, MediaType>& media_by_post) {
    struct Agg {
        std::set<std::string> groups;
        std::map<std::string, std::size_t> group_shares;
        std::set<std::string> posts;
        std::size_t total_shares = 0;
        std::size_t chain_count = 0;
    };
    std::map<ContentKey, Agg> by_key;
    for (const auto& chain : chains) {
        Agg& agg = by_key[chain.key];
        ++agg.chain_count;
        agg.total_shares += chain.shares.size();
        for (const auto& share : chain.shares) {
            agg.groups.insert(share.group_id);
            ++agg.group_shares[share.group_id];
            agg.posts.insert(share.post_id);
        }
    }

    std::vector<NarrativeEntry> entries;
    entries.reserve(by_key.size());
    for (const auto& [key, agg] : by_key) {
        NarrativeEntry e;
        e.key = key;
        e.distinct_groups = agg.groups.size();
        e.total_shares = agg.total_shares;
        e.chain_count = agg.chain_count;
        e.group_shares.assign(agg.group_shares.begin(), agg.group_shares.end());

        if (key.kind == ContentKey::Kind::url) {
            e.media_category = MediaCategory::url;
        } else if (key.kind == ContentKey::Kind::image_text) {
            e.media_category = MediaCategory::photo_or_meme;
        } else {
            std::size_t videos = 0;
            for (const auto& post_id : agg.posts) {
                auto it = media_by_post.find(post_id);
                if (it != media_by_post.end() && it->second == MediaType::video) ++videos;
            }
            e.media_category = 2 * videos >= agg.posts.size() ? MediaCategory::video
                                                              : MediaCategory::text;
        }
        entries.push_back(std::move(e));
    }

    std::sort(entries.begin(), entries.end(), [](const NarrativeEntry& a, const NarrativeEntry& b) {
        if (a.distinct_groups != b.distinct_groups) return a.distinct_groups > b.distinct_groups;
        if (a.total_shares != b.total_shares) return a.total_shares > b.total_shares;
        if (a.key.value != b.key.value) return a.key.value < b.key.value;
        return a.key.kind < b.key.kind;
    });
    if (entries.size() > n) entries.resize(n);
    return entries;
}

void write_narratives_json(std::ostream& out, const std::vector<NarrativeEntry>& entries) {
    json arr = json::array();
    for (const auto& e : entries) {
        json rec;
        rec["kind"] = std::string(key_kind_name(e.key.kind));
        rec["key"] = e.key.value;
        rec["distinct_groups"] = e.distinct_groups;
        rec["total_shares"] = e.total_shares;
        rec["chain_count"] = e.chain_count;
        rec["media_category"] = std::string(media_category_name(e.media_category));
        json groups = json::array();
        for (const auto& [gid, shares] : e.group_shares) {
            groups.push_back({{"group_id", gid}, {"shares", shares}});
        }
        rec["group_shares"] = std::move(groups);
        arr.push_back(std::move(rec));
    }
    out << arr.dump(2) << '\n';
}

namespace {

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string xml_unescape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (std::size_t i = 0; i < s.size();) {
        if (s[i] != '&') {
            out += s[i++];
            continue;
        }
        auto match = [&](std::string_view ent, char c) {
            if (s.substr(i, ent.size()) == ent) {
                out += c;
                i += ent.size();
                return true;
            }
            return false;
        };
        if (!match("&amp;", '&') && !match("&lt;", '<') && !match("&gt;", '>') &&
            !match("&quot;", '"') && !match("&apos;", '\''))
            out += s[i++];
    }
    return out;
}

}  // namespace

void export_gexf(std::ostream& out, const GroupGraph& graph,
                 const CommunityAssignment* assignment) {
    if (graph.vertex_count() == 0) throw ContractError("cannot export an empty graph");
    GraphMetrics metrics = clustering(graph);

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<gexf xmlns=\"http://www.gexf.net/1.2draft\" version=\"1.2\">\n";
    out << "  <graph mode=\"static\" defaultedgetype=\"undirected\">\n";
    out << "    <attributes class=\"node\">\n";
    out << "      <attribute id=\"0\" title=\"post_count\" type=\"long\"/>\n";
    out << "      <attribute id=\"1\" title=\"weighted_degree\" type=\"double\"/>\n";
    out << "      <attribute id=\"2\" title=\"clustering\" type=\"double\"/>\n";
    if (assignment)
        out << "      <attribute id=\"3\" title=\"community\" type=\"integer\"/>\n";
    out << "    </attributes>\n";

    out << "    <nodes>\n";
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
        const auto& v = graph.vertex(i);
        const std::string& label = v.group_name.empty() ? v.group_id : v.group_name;
        out << "      <node id=\"" << xml_escape(v.group_id) << "\" label=\""
            << xml_escape(label) << "\">\n";
        out << "        <attvalues>\n";
        out << "          <attvalue for=\"0\" value=\"" << v.post_count << "\"/>\n";
        out << "          <attvalue for=\"1\" value=\"" << format_weight(metrics.weighted_degree[i])
            << "\"/>\n";
        out << "          <attvalue for=\"2\" value=\"" << format_double(metrics.clustering[i])
            << "\"/>\n";
        if (assignment) {
            auto it = assignment->mapping.find(v.group_id);
            if (it == assignment->mapping.end())
                throw ContractError("assignment misses vertex \"" + v.group_id + "\"");
            out << "          <attvalue for=\"3\" value=\"" << it->second << "\"/>\n";
        }
        out << "        </attvalues>\n";
        out << "      </node>\n";
    }
    out << "    </nodes>\n";

    out << "    <edges>\n";
    std::size_t edge_id = 0;
    for (std::size_t i = 0; i < graph.vertex_count(); ++i) {
        for (const auto& [j, w] : graph.neighbors(i)) {
            if (j <= i) continue;
            out << "      <edge id=\"" << edge_id++ << "\" source=\""
                << xml_escape(graph.vertex(i).group_id) << "\" target=\""
                << xml_escape(graph.vertex(j).group_id) << "\" weight=\"" << format_weight(w)
                << "\"/>\n";
        }
    }
    out << "    </edges>\n";
    out << "  </graph>\n";
    out << "</gexf>\n";
}

void export_gexf_file(const std::string& path, const GroupGraph& graph,
                      const CommunityAssignment* assignment) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open \"" + tmp + "\" for writing");
        export_gexf(out, graph, assignment);
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw IoError("failed to write \"" + tmp + "\"");
        }
    }
    if (std::rename(tmp.c_str(), path.c_str()) != 0) {
        std::remove(tmp.c_str());
        throw IoError("cannot move \"" + tmp + "\" to \"" + path + "\"");
    }
}

namespace {

// Pulls attr="value" out of a tag string. The writer always emits quoted
// attributes, so this stays a string scan, not an XML parser.
std::optional<std::string> tag_attr(const std::string& tag, const std::string& name) {
    std::string needle = name + "=\"";
    std::size_t pos = tag.find(needle);
    if (pos == std::string::npos) return std::nullopt;
    pos += needle.size();
    std::size_t end = tag.find('"', pos);
    if (end == std::string::npos) return std::nullopt;
    return xml_unescape(tag.substr(pos, end - pos));
}

}  // namespace

GexfGraph read_gexf(std::istream& in) {
    std::stringstream buffer;
    buffer << in.rdbuf();
    std::string text = buffer.str();

    struct NodeRec {
        std::string id;
        std::string label;
        std::uint64_t post_count = 0;
        std::optional<int> community;
    };
    std::vector<NodeRec> nodes;
    std::vector<std::tuple<std::string, std::string, double>> edges;

    // attribute id -> title, from the declaration block
    std::map<std::string, std::string> attr_titles;

    std::size_t pos = 0;
    NodeRec* current = nullptr;
    bool saw_root = false;
    while (true) {
        std::size_t open = text.find('<', pos);
        if (open == std::string::npos) break;
        std::size_t close = text.find('>', open);
        if (close == std::string::npos) throw IoError("gexf: unterminated tag");
        std::string tag = text.substr(open + 1, close - open - 1);
        pos = close + 1;

        if (tag.rfind("gexf ", 0) == 0 || tag == "gexf") {
            saw_root = true;
        } else if (tag.rfind("attribute ", 0) == 0) {
            auto id = tag_attr(tag, "id");
            auto title = tag_attr(tag, "title");
            if (id && title) attr_titles[*id] = *title;
        } else if (tag.rfind("node ", 0) == 0) {
            NodeRec rec;
            auto id = tag_attr(tag, "id");
            if (!id) throw IoError("gexf: node without id");
            rec.id = *id;
            rec.label = tag_attr(tag, "label").value_or("");
            nodes.push_back(std::move(rec));
            current = &nodes.back();
        } else if (tag.rfind("attvalue ", 0) == 0) {
            if (!current) throw IoError("gexf: attvalue outside a node");
            auto for_id = tag_attr(tag, "for");
            auto value = tag_attr(tag, "value");
            if (!for_id || !value) throw IoError("gexf: attvalue missing for/value");
            auto title = attr_titles.find(*for_id);
            if (title == attr_titles.end()) throw IoError("gexf: undeclared attribute");
            try {
                if (title->second == "post_count") current->post_count = std::stoull(*value);
                else if (title->second == "community") current->community = std::stoi(*value);
                // weighted_degree and clustering are derived, not stored
            } catch (const std::exception&) {
                throw IoError("gexf: invalid attvalue \"" + *value + "\"");
            }
        } else if (tag.rfind("/node", 0) == 0) {
            current = nullptr;
        } else if (tag.rfind("edge ", 0) == 0) {
            auto source = tag_attr(tag, "source");
            auto target = tag_attr(tag, "target");
            auto weight = tag_attr(tag, "weight");
            if (!source || !target) throw IoError("gexf: edge missing source/target");
            double w = 1.0;
            if (weight) {
                try {
                    w = std::stod(*weight);
                } catch (const std::exception&) {
                    throw IoError("gexf: invalid edge weight \"" + *weight + "\"");
                }
            }
            edges.emplace_back(*source, *target, w);
        }
    }
    if (!saw_root) throw IoError("gexf: missing gexf root element");

    GexfGraph out;
    std::vector<GroupGraph::Vertex> vertices;
    vertices.reserve(nodes.size());
    for (const auto& rec : nodes) {
        vertices.push_back({rec.id, rec.label == rec.id ? std::string() : rec.label,
                            rec.post_count});
    }
    out.graph = GroupGraph(std::move(vertices));
    for (const auto& [source, target, w] : edges) {
        auto u = out.graph.index_of(source);
        auto v = out.graph.index_of(target);
        if (!u || !v) throw IoError("gexf: edge references unknown node");
        out.graph.add_edge_weight(*u, *v, w);
    }
    for (const auto& rec : nodes) {
        if (rec.community) out.communities[rec.id] = *rec.community;
    }
    return out;
}

json summary_report(const CorpusStats& stats, const std::vector<CoordinationChain>& chains,
                    const GroupGraph& graph, const CommunityAssignment& assignment,
                    const json& config_echo) {
    json doc;
    doc["schema_version"] = 1;

    doc["corpus"] = {{"records_read", stats.records_read},
                     {"parse_failures", stats.parse_failures},
                     {"duplicates_removed", stats.duplicates_removed},
                     {"unique_posts", stats.unique_posts},
                     {"groups", stats.groups}};

    std::map<ContentKey::Kind, std::set<std::string>> keys_by_kind;
    std::size_t covered_shares = 0;
    std::set<std::string> covered_posts;
    for (const auto& chain : chains) {
        keys_by_kind[chain.key.kind].insert(chain.key.value);
        covered_shares += chain.shares.size();
        for (const auto& share : chain.shares) covered_posts.insert(share.post_id);
    }
    json keys;
    for (ContentKey::Kind kind :
         {ContentKey::Kind::message, ContentKey::Kind::description, ContentKey::Kind::image_text,
          ContentKey::Kind::url}) {
        auto it = keys_by_kind.find(kind);
        keys[std::string(key_kind_name(kind))] = it == keys_by_kind.end() ? 0 : it->second.size();
    }
    doc["keys"] = std::move(keys);

    doc["chains"] = {{"count", chains.size()},
                     {"covered_shares", covered_shares},
                     {"covered_posts", covered_posts.size()}};

    doc["graph"] = {{"vertices", graph.vertex_count()},
                    {"edges", graph.edge_count()},
                    {"total_weight", graph.total_weight()}};

    doc["modularity"] = assignment.modularity;
    json comms = json::array();
    for (const auto& info : assignment.communities) {
        comms.push_back({{"community_id", info.community_id},
                         {"size", info.size},
                         {"mean_clustering", info.mean_clustering},
                         {"internal_weight", info.internal_weight}});
    }
    doc["communities"] = std::move(comms);

    doc["config"] = config_echo;
    return doc;
}

}  // namespace coordnet
