#include "coordnet/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "coordnet/communities.hpp"
#include "coordnet/corpus.hpp"
#include "coordnet/csv.hpp"
#include "coordnet/detector.hpp"
#include "coordnet/errors.hpp"
#include "coordnet/graph.hpp"
#include "coordnet/log.hpp"
#include "coordnet/report.hpp"
#include "coordnet/synth.hpp"

namespace coordnet {

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string join_path(const std::string& dir, const char* name) {
    return (fs::path(dir) / name).string();
}

// temp-and-rename so a crashed stage never leaves a half-written file under
// the final name
void write_file_atomic(const std::string& path,
                       const std::function<void(std::ostream&)>& body) {
    std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw IoError("cannot open \"" + tmp + "\" for writing");
        body(out);
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

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open \"" + path + "\"");
    return in;
}

json stats_to_json(const CorpusStats& stats) {
    return {{"records_read", stats.records_read},
            {"parse_failures", stats.parse_failures},
            {"duplicates_removed", stats.duplicates_removed},
            {"unique_posts", stats.unique_posts},
            {"groups", stats.groups}};
}

CorpusStats stats_from_json(const json& doc) {
    CorpusStats stats;
    try {
        stats.records_read = doc.at("records_read").get<std::uint64_t>();
        stats.parse_failures = doc.at("parse_failures").get<std::uint64_t>();
        stats.duplicates_removed = doc.at("duplicates_removed").get<std::uint64_t>();
        stats.unique_posts = doc.at("unique_posts").get<std::uint64_t>();
        stats.groups = doc.at("groups").get<std::uint64_t>();
    } catch (const std::exception& ex) {
        throw IoError(std::string("corpus stats: ") + ex.what());
    }
    return stats;
}

std::vector<Post> load_posts(const std::string& output_dir) {
    auto in = open_input(join_path(output_dir, outfile::posts));
    ParseResult result = parse_posts(in, InputFormat::jsonl);
    if (!result.errors.empty())
        throw IoError("posts.jsonl line " + std::to_string(result.errors.front().line) + ": " +
                      result.errors.front().reason);
    return std::move(result.posts);
}

std::vector<CoordinationChain> load_chains(const std::string& output_dir) {
    auto in = open_input(join_path(output_dir, outfile::chains));
    return read_chains_jsonl(in);
}

GroupGraph load_graph(const std::string& output_dir) {
    auto vin = open_input(join_path(output_dir, outfile::vertices));
    auto ein = open_input(join_path(output_dir, outfile::edges));
    return read_graph_csv(vin, ein);
}

// The echoed/hashed config identifies the analysis, not the destination, so
// equal runs stay byte-identical across output directories.
json canonical_config(const PipelineConfig& config) {
    PipelineConfig copy = config;
    copy.output_dir.clear();
    return config_to_json(copy);
}

void write_corpus_outputs(const std::string& output_dir, const std::vector<Post>& posts,
                          const CorpusStats& stats, const std::vector<ParseError>& errors) {
    write_file_atomic(join_path(output_dir, outfile::posts),
                      [&](std::ostream& out) { write_posts_jsonl(out, posts); });
    write_file_atomic(join_path(output_dir, outfile::corpus_stats), [&](std::ostream& out) {
        out << stats_to_json(stats).dump(2) << '\n';
    });
    write_file_atomic(join_path(output_dir, outfile::parse_errors), [&](std::ostream& out) {
        for (const auto& err : errors) {
            out << json{{"line", err.line}, {"reason", err.reason}}.dump() << '\n';
        }
    });
}

}  // namespace

void run_ingest(const std::string& input_path, const PipelineConfig& config,
                const std::string& output_dir) {
    auto in = open_input(input_path);
    ParseResult result = ingest(in, config.input_format);
    log_info("ingest: " + std::to_string(result.stats.records_read) + " records, " +
             std::to_string(result.stats.unique_posts) + " unique posts, " +
             std::to_string(result.stats.parse_failures) + " parse failures");

    std::vector<Post> posts = std::move(result.posts);
    if (!config.filter_keywords.empty()) {
        posts = filter_by_keywords(posts, config.filter_keywords, config.filter_fields);
        log_info("ingest: " + std::to_string(posts.size()) + " posts match the keyword filter");
    }
    write_corpus_outputs(output_dir, posts, result.stats, result.errors);
}

void run_simulate(const PipelineConfig& config, const std::string& output_dir) {
    if (!config.scenario)
        throw ConfigError("simulate requires a scenario section in the config");
    SyntheticCorpus corpus = generate_corpus(*config.scenario);

    CorpusStats stats;
    stats.records_read = corpus.posts.size();
    stats.unique_posts = corpus.posts.size();
    std::set<std::string> groups;
    for (const auto& p : corpus.posts) groups.insert(p.group_id);
    stats.groups = groups.size();
    log_info("simulate: " + std::to_string(corpus.posts.size()) + " posts across " +
             std::to_string(stats.groups) + " groups");

    write_corpus_outputs(output_dir, corpus.posts, stats, {});
    write_file_atomic(join_path(output_dir, outfile::ground_truth), [&](std::ostream& out) {
        write_ground_truth_jsonl(out, corpus.truth);
    });
}

std::int64_t run_detect(const PipelineConfig& config, const std::string& output_dir) {
    std::vector<Post> posts = load_posts(output_dir);
    ShareIndex index = build_share_index(posts, config.normalization);

    DetectionConfig detection = config.detection;
    if (config.estimate_threshold) {
        try {
            double estimate = estimate_threshold_quantile(index, config.quantile,
                                                          config.estimate_kinds);
            detection.window_seconds =
                std::max<std::int64_t>(1, static_cast<std::int64_t>(std::floor(estimate)));
            log_info("detect: estimated threshold " + format_double(estimate) +
                     "s, using window " + std::to_string(detection.window_seconds) + "s");
        } catch (const EstimationError& ex) {
            log_warn(std::string("detect: ") + ex.what() + "; keeping window " +
                     std::to_string(detection.window_seconds) + "s");
        }
    }

    std::vector<CoordinationChain> chains = detect_all_chains(index, detection);
    log_info("detect: " + std::to_string(chains.size()) + " chains over " +
             std::to_string(index.size()) + " keys");
    write_file_atomic(join_path(output_dir, outfile::chains),
                      [&](std::ostream& out) { write_chains_jsonl(out, chains); });
    return detection.window_seconds;
}

void run_graph(const PipelineConfig& config, const std::string& output_dir) {
    std::vector<CoordinationChain> chains = load_chains(output_dir);
    std::vector<Post> posts = load_posts(output_dir);
    std::map<std::string, std::string> names;
    for (const auto& p : posts) names.emplace(p.group_id, p.group_name);

    GroupGraph full = build_graph(chains, &names);
    GroupGraph filtered = filter_by_weighted_degree(full, config.min_degree,
                                                    config.iterative_filter, config.comparator);
    log_info("graph: " + std::to_string(full.vertex_count()) + " groups, " +
             std::to_string(filtered.vertex_count()) + " after degree filter");

    GraphMetrics metrics = clustering(filtered);
    write_file_atomic(join_path(output_dir, outfile::edges),
                      [&](std::ostream& out) { write_edges_csv(out, filtered); });
    write_file_atomic(join_path(output_dir, outfile::vertices), [&](std::ostream& out) {
        write_vertices_csv(out, filtered, metrics);
    });
}

void run_communities(const PipelineConfig& config, const std::string& output_dir) {
    GroupGraph graph = load_graph(output_dir);
    CommunityAssignment assignment;
    if (graph.vertex_count() == 0) {
        log_warn("communities: graph is empty, writing an empty assignment");
    } else {
        assignment = louvain_best_of(graph, config.resolution, config.seed, config.best_of_k);
        log_info("communities: " + std::to_string(assignment.communities.size()) +
                 " communities, modularity " + format_double(assignment.modularity));
    }
    write_file_atomic(join_path(output_dir, outfile::communities), [&](std::ostream& out) {
        write_communities_csv(out, assignment);
    });
}

void run_report(const PipelineConfig& config, const std::string& output_dir) {
    auto stats_in = open_input(join_path(output_dir, outfile::corpus_stats));
    json stats_doc;
    try {
        stats_doc = json::parse(stats_in);
    } catch (const json::parse_error& ex) {
        throw IoError(std::string("corpus_stats.json: ") + ex.what());
    }
    CorpusStats stats = stats_from_json(stats_doc);

    std::vector<CoordinationChain> chains = load_chains(output_dir);
    GroupGraph graph = load_graph(output_dir);

    CommunityAssignment assignment;
    {
        auto in = open_input(join_path(output_dir, outfile::communities));
        assignment.mapping = read_communities_csv(in);
    }
    if (graph.vertex_count() > 0) {
        assignment.modularity = modularity(graph, assignment.mapping, config.resolution);
        assignment.communities = describe_communities(graph, assignment.mapping);
    }

    std::vector<Post> posts = load_posts(output_dir);
    std::map<std::string, MediaType> media_by_post;
    for (const auto& p : posts) media_by_post.emplace(p.post_id, p.media_type);

    auto narratives = top_narratives(chains, config.top_n, media_by_post);
    write_file_atomic(join_path(output_dir, outfile::narratives), [&](std::ostream& out) {
        write_narratives_json(out, narratives);
    });

    if (graph.vertex_count() > 0) {
        export_gexf_file(join_path(output_dir, outfile::gexf), graph, &assignment);
    } else {
        log_warn("report: graph is empty, omitting graph.gexf");
        std::remove(join_path(output_dir, outfile::gexf).c_str());
    }

    json summary = summary_report(stats, chains, graph, assignment, canonical_config(config));
    write_file_atomic(join_path(output_dir, outfile::summary),
                      [&](std::ostream& out) { out << summary.dump(2) << '\n'; });
    log_info("report: wrote narratives, summary" +
             std::string(graph.vertex_count() > 0 ? ", gexf" : ""));
}

void run_pipeline(const PipelineConfig& config, const std::string& input_path,
                  const std::string& output_dir) {
    if (output_dir.empty()) throw ConfigError("an output directory is required");
    std::error_code ec;
    fs::create_directories(output_dir, ec);
    if (ec) throw IoError("cannot create output directory \"" + output_dir + "\"");

    const bool synthetic = input_path == "synthetic";
    if (!synthetic && !fs::exists(input_path))
        throw IoError("input \"" + input_path + "\" does not exist");

    json manifest;
    manifest["schema_version"] = 1;
    manifest["config_sha256"] = sha256_string(canonical_config(config).dump());
    manifest["input"] = synthetic ? "synthetic" : input_path;

    std::vector<std::string> written;
    auto track = [&](const char* name) { written.push_back(join_path(output_dir, name)); };

    json stages = json::array();
    auto timed = [&](const char* name, const std::function<void()>& stage) {
        auto start = std::chrono::steady_clock::now();
        stage();
        std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
        stages.push_back({{"name", name}, {"seconds", elapsed.count()}});
    };

    try {
        if (synthetic) {
            timed("simulate", [&] { run_simulate(config, output_dir); });
            track(outfile::ground_truth);
        } else {
            timed("ingest", [&] { run_ingest(input_path, config, output_dir); });
        }
        track(outfile::posts);
        track(outfile::corpus_stats);
        track(outfile::parse_errors);
        manifest["input_sha256"] = synthetic
                                       ? sha256_file(join_path(output_dir, outfile::posts))
                                       : sha256_file(input_path);

        timed("detect", [&] { run_detect(config, output_dir); });
        track(outfile::chains);
        timed("graph", [&] { run_graph(config, output_dir); });
        track(outfile::edges);
        track(outfile::vertices);
        timed("communities", [&] { run_communities(config, output_dir); });
        track(outfile::communities);
        timed("report", [&] { run_report(config, output_dir); });
        track(outfile::narratives);
        track(outfile::summary);
    } catch (...) {
        for (const auto& path : written) std::remove(path.c_str());
        std::remove(join_path(output_dir, outfile::gexf).c_str());
        throw;
    }

    manifest["stages"] = std::move(stages);
    write_file_atomic(join_path(output_dir, outfile::manifest), [&](std::ostream& out) {
        out << manifest.dump(2) << '\n';
    });
}

namespace {

std::string hex_digest(const unsigned char* digest, unsigned int len) {
    static const char* hex = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

}  // namespace

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open \"" + path + "\" for hashing");

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw IoError("cannot allocate digest context");
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in.read(buf, sizeof(buf)) || in.gcount() > 0) {
        EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest, &len);
    EVP_MD_CTX_free(ctx);
    return hex_digest(digest, len);
}

std::string sha256_string(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
    return hex_digest(digest, len);
}

}  // namespace coordnet
